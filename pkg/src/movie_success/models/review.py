"""
Review-level sentiment models.
"""

import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

from ..errors import ContractViolation

SENTIMENT_KEYS = (
    "sentiment_score",
    "emotion_keywords",
    "primary_emotion",
    "review_focus",
    "bias_analysis",
    "summary",
)
KEYWORD_COUNT = 5
SUMMARY_MAX_WORDS = 50


@dataclass(frozen=True)
class Review:
    """
    A review as seen by the sentiment stage.

    Attributes:
        review_id: Stable identifier of the review row
        author_id: Anonymized author identifier
        timestamp: Posting time
        days_since_release: Days between release and posting, >= 0
        title: Review headline
        body: Review text
        upvotes: Helpful votes
        total_votes: All votes cast on the review
        user_rating: Optional star rating in [1, 10]
    """
    review_id: str
    author_id: str
    timestamp: datetime
    days_since_release: float
    title: str = ""
    body: str = ""
    upvotes: int = 0
    total_votes: int = 0
    user_rating: Optional[int] = None

    def __post_init__(self):
        if self.days_since_release < 0:
            raise ContractViolation("days_since_release must be >= 0", {"review_id": self.review_id})
        if self.upvotes < 0 or self.upvotes > self.total_votes:
            raise ContractViolation("upvotes must be within [0, total_votes]", {"review_id": self.review_id})
        if self.user_rating is not None and not (1 <= self.user_rating <= 10):
            raise ContractViolation("user_rating must be in [1, 10]", {"review_id": self.review_id})


@dataclass(frozen=True)
class SentimentVector:
    """
    Multidimensional sentiment of one review.

    Only ``sentiment_score`` feeds the model numerically; the text fields are
    kept as metadata. ``flags`` records repairs made while parsing.
    """
    sentiment_score: float
    emotion_keywords: Tuple[str, ...]
    primary_emotion: str = ""
    review_focus: str = ""
    bias_analysis: str = ""
    summary: str = ""
    flags: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not (1.0 <= self.sentiment_score <= 10.0):
            raise ContractViolation("sentiment_score must be in [1, 10]", {"score": self.sentiment_score})
        if len(self.emotion_keywords) != KEYWORD_COUNT:
            raise ContractViolation("emotion_keywords must have exactly 5 entries")

    @property
    def is_positive(self) -> bool:
        return self.sentiment_score >= 6.0

    def to_dict(self) -> Dict[str, Any]:
        """Answer keys in prompt order."""
        return {
            "sentiment_score": self.sentiment_score,
            "emotion_keywords": list(self.emotion_keywords),
            "primary_emotion": self.primary_emotion,
            "review_focus": self.review_focus,
            "bias_analysis": self.bias_analysis,
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SentimentVector":
        return cls(
            sentiment_score=float(data["sentiment_score"]),
            emotion_keywords=tuple(data["emotion_keywords"]),
            primary_emotion=data.get("primary_emotion", ""),
            review_focus=data.get("review_focus", ""),
            bias_analysis=data.get("bias_analysis", ""),
            summary=data.get("summary", ""),
            flags=tuple(data.get("flags", ())),
        )


@dataclass(frozen=True)
class AggregationConfig:
    """
    Temporal aggregation settings.

    Attributes:
        lambda_decay: Exponential decay per day, >= 0 (default 0.05, ~14 day half-life)
        weight_smoothing: Laplace constant c of the helpfulness weight, > 0
    """
    lambda_decay: float = 0.05
    weight_smoothing: float = 1.0

    def __post_init__(self):
        if self.lambda_decay < 0:
            raise ContractViolation("lambda_decay must be >= 0")
        if self.weight_smoothing <= 0:
            raise ContractViolation("weight_smoothing must be > 0")

    def to_dict(self) -> Dict[str, Any]:
        return {"lambda_decay": self.lambda_decay, "weight_smoothing": self.weight_smoothing}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AggregationConfig":
        return cls(**data)


@dataclass(frozen=True)
class AggregateSentiment:
    """
    Aggregate sentiment of a film at time t.

    ``mean_score`` and ``score_std`` are None when no reviews were aggregated.
    """
    s_t: float
    mean_score: Optional[float]
    score_std: Optional[float]
    positive_share: Optional[float]
    review_count: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s_t": self.s_t,
            "mean_score": self.mean_score,
            "score_std": self.score_std,
            "positive_share": self.positive_share,
            "review_count": self.review_count,
        }


def keywords_tuple(values: List[str]) -> Tuple[str, ...]:
    """Pad with "n/a" or truncate to exactly five keywords."""
    cleaned = [str(v).strip() for v in values if str(v).strip()]
    cleaned = cleaned[:KEYWORD_COUNT]
    cleaned += ["n/a"] * (KEYWORD_COUNT - len(cleaned))
    return tuple(cleaned)
