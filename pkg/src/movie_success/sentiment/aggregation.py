"""
Time-decayed, helpfulness-weighted aggregation of review sentiment.
"""

import math
from typing import Dict, Sequence, Tuple

import numpy as np

from ..errors import ContractViolation
from ..models import AggregateSentiment, AggregationConfig, Review, SentimentVector

POSITIVE_THRESHOLD = 6.0


def helpfulness_weight(upvotes: int, total_votes: int, smoothing: float = 1.0) -> float:
    """Laplace-smoothed helpful share, strictly inside (0, 1)."""
    if smoothing <= 0:
        raise ContractViolation("smoothing must be > 0")
    return (upvotes + smoothing) / (total_votes + 2.0 * smoothing)


def aggregate_temporal(
    sentiments: Sequence[Tuple[SentimentVector, Review]],
    t: float,
    config: AggregationConfig = AggregationConfig(),
) -> AggregateSentiment:
    """
    Aggregate sentiment of a film at day ``t``.

    S_t = sum_i w_i * score_i * exp(-lambda * (t - t_i)) with w_i the
    helpfulness weight. Sums use exact rounding so the result does not
    depend on review order.

    Raises:
        ContractViolation: If a review is dated after ``t``
    """
    terms = []
    scores = []
    for vector, review in sentiments:
        age = t - review.days_since_release
        if age < 0:
            raise ContractViolation(
                "review is later than the aggregation time",
                {"review_id": review.review_id, "t": t, "t_i": review.days_since_release},
            )
        weight = helpfulness_weight(review.upvotes, review.total_votes, config.weight_smoothing)
        terms.append(weight * vector.sentiment_score * math.exp(-config.lambda_decay * age))
        scores.append(vector.sentiment_score)

    if not scores:
        return AggregateSentiment(s_t=0.0, mean_score=None, score_std=None, positive_share=None, review_count=0)

    values = np.sort(np.asarray(scores, dtype=float))
    mean = math.fsum(values) / len(values)
    return AggregateSentiment(
        s_t=math.fsum(terms),
        mean_score=mean,
        score_std=float(np.sqrt(math.fsum((values - mean) ** 2) / len(values))),
        positive_share=float(np.mean(values >= POSITIVE_THRESHOLD)),
        review_count=len(values),
    )


def sentiment_features(
    sentiments: Sequence[Tuple[SentimentVector, Review]],
    window_days: float = 7.0,
    config: AggregationConfig = AggregationConfig(),
) -> Dict[str, float]:
    """
    The five sentiment-group features of one film.

    ``sentiment_decayed_7d`` aggregates reviews posted before ``window_days``
    at t = window_days; the other statistics cover every review. Missing
    statistics are NaN and get imputed later.
    """
    opening = [(v, r) for v, r in sentiments if r.days_since_release < window_days]
    early = aggregate_temporal(opening, window_days, config)
    overall = aggregate_temporal(
        sentiments, max((r.days_since_release for _, r in sentiments), default=0.0), config
    )

    def _value(x):
        return float("nan") if x is None else float(x)

    return {
        "sentiment_decayed_7d": early.s_t,
        "sentiment_mean": _value(overall.mean_score),
        "sentiment_std": _value(overall.score_std),
        "sentiment_positive_share": _value(overall.positive_share),
        "log_review_count": math.log1p(overall.review_count),
    }
