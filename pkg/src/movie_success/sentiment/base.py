"""
Base class for sentiment extractors.
"""

from abc import ABC, abstractmethod
from typing import Optional

from ..models import MovieRecord, Review


class BaseSentimentExtractor(ABC):
    """
    Abstract base class for sentiment extractors.

    An extractor turns a rendered prompt into the raw text of a JSON answer.
    Parsing and validation happen outside the extractor so that every
    implementation goes through the same repair rules.
    """

    def __init__(
        self,
        name: str = None,
        max_retries: int = 0,
        fallback: Optional["BaseSentimentExtractor"] = None,
    ):
        """
        Initialize the extractor.

        Args:
            name: Optional name for logs and reports
            max_retries: Extra attempts after a failed or malformed answer
            fallback: Extractor used once retries are exhausted
        """
        self.name = name or self.__class__.__name__
        self.max_retries = max_retries
        self.fallback = fallback

    @abstractmethod
    def complete(self, prompt: str, review: Review, movie: MovieRecord) -> str:
        """
        Produce the raw answer for one review.

        Args:
            prompt: Fully rendered analysis prompt
            review: The review being analysed
            movie: Metadata of the reviewed film

        Returns:
            Raw response text, expected to hold one JSON object
        """
        pass

    def close(self):
        """Release network resources, if any."""

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __repr__(self) -> str:
        return f"{self.name}(max_retries={self.max_retries}, fallback={self.fallback!r})"
