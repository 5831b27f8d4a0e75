"""
Movie and review records as ingested from the CSV schemas.
"""

import hashlib
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from typing import Any, Dict, List, Optional

from ..errors import ContractViolation

PRE_RELEASE_WINDOW_DAYS = 30


def _split_list(value: Optional[str]) -> List[str]:
    if not value:
        return []
    return [part.strip() for part in value.split(",") if part.strip()]


@dataclass
class MovieRecord:
    """
    One film with the movie-level columns of the dataset schema.

    Optional numeric fields are None when absent in the source file.
    """
    title: str
    director: str = ""
    writers: str = ""
    gross_worldwide: Optional[float] = None
    opening_weekend: Optional[float] = None
    budget: Optional[float] = None
    language: str = ""
    country: str = ""
    filming_locations: str = ""
    production_companies: str = ""
    release_day: int = 1
    release_month: int = 1
    release_year: int = 2004
    runtime: Optional[float] = None
    imdb_rating: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.title:
            raise ContractViolation("movie title is required")
        for name in ("budget", "opening_weekend", "gross_worldwide"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ContractViolation(f"{name} must be >= 0", {"title": self.title, name: value})
        if self.runtime is not None and self.runtime <= 0:
            raise ContractViolation("runtime must be > 0", {"title": self.title})

    @property
    def key(self) -> str:
        """Join key between movies and reviews."""
        return self.title

    @property
    def release_date(self) -> date:
        return date(self.release_year, self.release_month, self.release_day)

    @property
    def writer_list(self) -> List[str]:
        return _split_list(self.writers)

    @property
    def company_list(self) -> List[str]:
        return _split_list(self.production_companies)

    @property
    def primary_language(self) -> str:
        langs = _split_list(self.language)
        return langs[0] if langs else ""

    @property
    def primary_country(self) -> str:
        countries = _split_list(self.country)
        return countries[0] if countries else ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "director": self.director,
            "writers": self.writers,
            "gross_worldwide": self.gross_worldwide,
            "opening_weekend": self.opening_weekend,
            "budget": self.budget,
            "language": self.language,
            "country": self.country,
            "filming_locations": self.filming_locations,
            "production_companies": self.production_companies,
            "release_day": self.release_day,
            "release_month": self.release_month,
            "release_year": self.release_year,
            "runtime": self.runtime,
            "imdb_rating": self.imdb_rating,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MovieRecord":
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data and k != "metadata"}
        return cls(**known, metadata=data.get("metadata", {}))

    def __repr__(self) -> str:
        return f"MovieRecord(title={self.title!r}, year={self.release_year}, budget={self.budget})"


@dataclass
class ReviewRecord:
    """
    One review row. ``review_author`` holds the anonymized identifier.

    ``sentiment_score`` and ``emotion_keywords`` are optional precomputed
    columns; when present they bypass extraction.
    """
    movie_key: str
    review_author: str
    review_date: datetime
    title: str = ""
    body: str = ""
    upvotes: int = 0
    total_votes: int = 0
    rating: Optional[int] = None
    sentiment_score: Optional[float] = None
    emotion_keywords: Optional[List[str]] = None

    def __post_init__(self):
        if self.upvotes < 0 or self.total_votes < self.upvotes:
            raise ContractViolation(
                "votes must satisfy 0 <= upvotes <= total_votes",
                {"upvotes": self.upvotes, "total_votes": self.total_votes},
            )
        if self.rating is not None and not (1 <= self.rating <= 10):
            raise ContractViolation("rating must be in [1, 10]", {"rating": self.rating})

    @property
    def review_id(self) -> str:
        """Stable content-derived identifier."""
        payload = "\x1f".join(
            [self.movie_key, self.review_author, self.review_date.isoformat(), self.title, self.body]
        )
        return hashlib.sha1(payload.encode("utf-8")).hexdigest()[:16]

    def days_since_release(self, release: date) -> float:
        release_dt = datetime.combine(release, datetime.min.time())
        return (self.review_date - release_dt) / timedelta(days=1)

    def is_flagged(self, release: date) -> bool:
        """True when the review predates release by more than the tolerated window."""
        return self.days_since_release(release) < -PRE_RELEASE_WINDOW_DAYS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "movie_key": self.movie_key,
            "review_author": self.review_author,
            "review_date": self.review_date.isoformat(),
            "title": self.title,
            "body": self.body,
            "upvotes": self.upvotes,
            "total_votes": self.total_votes,
            "rating": self.rating,
            "sentiment_score": self.sentiment_score,
            "emotion_keywords": self.emotion_keywords,
        }
