"""
Closed-form SIR estimators from a film's review timeline.

Reviewer-denominated ratios (I0, R0) count distinct authors; comment-
denominated ratios (beta, gamma) count raw reviews.
"""

import logging
from typing import Iterable, Mapping, Optional

from ..errors import ContractViolation, EmptyDataset, InconsistentCounts
from ..models import Review, ReviewTimeline, SentimentVector, SIRParams, SIRState, TimelineEntry

logger = logging.getLogger(__name__)

GAMMA_FLOOR = 1e-6
NEGATIVE_RATING_MAX = 5
NEGATIVE_SCORE_BELOW = 6.0


def estimate_initial_conditions(timeline: ReviewTimeline) -> SIRState:
    """
    Initial compartments at release.

    I0 is the share of reviewers who commented in the first week and R0 the
    share who posted a negative first-week review; S0 is the remainder.

    Raises:
        InconsistentCounts: If the counts imply I0 + R0 > 1
    """
    i0 = timeline.first_week_commenters() / timeline.total_reviewers
    r0 = timeline.first_week_negative_reviewers() / timeline.total_reviewers
    if i0 + r0 > 1.0 + 1e-12:
        raise InconsistentCounts(
            "first-week counts exceed the reviewer population",
            {"i0": i0, "r0": r0, "total_reviewers": timeline.total_reviewers},
        )
    s0 = max(1.0 - i0 - r0, 0.0)
    return SIRState(s=s0, i=i0, r=r0, t=0.0)


def estimate_rates(timeline: ReviewTimeline, gamma_floor: float = GAMMA_FLOOR) -> SIRParams:
    """
    Contact and recovery rates as first-week comment shares.

    gamma is floored at ``gamma_floor`` when there are no negative
    first-week comments, and the result is flagged ``gamma_floored``.
    """
    if timeline.total_comments <= 0:
        raise ContractViolation("total_comments must be > 0")
    if gamma_floor <= 0:
        raise ContractViolation("gamma_floor must be > 0")

    beta = timeline.first_week_comments() / timeline.total_comments
    gamma = timeline.first_week_negative_comments() / timeline.total_comments
    floored = gamma < gamma_floor
    if floored:
        logger.debug("No negative first-week comments, gamma floored at %g", gamma_floor)
        gamma = gamma_floor
    return SIRParams(beta=beta, gamma=gamma, gamma_floored=floored)


def is_negative_review(review: Review, sentiment: Optional[SentimentVector] = None) -> bool:
    """
    Negativity rule: a star rating of 5 or less when the reviewer left one,
    otherwise an extracted score below 6, otherwise not negative.
    """
    if review.user_rating is not None:
        return review.user_rating <= NEGATIVE_RATING_MAX
    if sentiment is not None:
        return sentiment.sentiment_score < NEGATIVE_SCORE_BELOW
    return False


def build_timeline(
    reviews: Iterable[Review],
    sentiments: Optional[Mapping[str, SentimentVector]] = None,
    first_week_days: float = 7.0,
) -> ReviewTimeline:
    """
    Collect one film's reviews into a timeline.

    Args:
        reviews: Reviews of a single film
        sentiments: Optional extracted vectors keyed by review_id
        first_week_days: Length of the opening window in days

    Returns:
        ReviewTimeline with distinct-author and raw-comment totals

    Raises:
        EmptyDataset: If the film has no reviews
    """
    sentiments = sentiments or {}
    entries = []
    authors = set()
    for review in reviews:
        authors.add(review.author_id)
        entries.append(
            TimelineEntry(
                day=review.days_since_release,
                is_negative=is_negative_review(review, sentiments.get(review.review_id)),
                author_id=review.author_id,
            )
        )
    if not entries:
        raise EmptyDataset("cannot build a timeline without reviews")

    entries.sort(key=lambda e: (e.day, e.author_id or ""))
    return ReviewTimeline(
        review_timestamps=tuple(entries),
        total_reviewers=len(authors),
        total_comments=len(entries),
        first_week_days=first_week_days,
    )
