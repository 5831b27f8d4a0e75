"""
Chat-completion client for remote sentiment extraction.
"""

import logging
import threading
import time
from typing import Callable, Optional

import httpx
import openai
from openai import OpenAI

from ..config import ExtractorConfig
from ..errors import ExtractorUnavailable
from ..models import MovieRecord, Review
from .base import BaseSentimentExtractor
from .prompt import build_messages
from .stub_extractor import StubSentimentExtractor

logger = logging.getLogger(__name__)

MAX_OUTPUT_TOKENS = 512


class RateLimiter:
    """
    Minimum spacing between requests, shared by all threads of a client.

    Example:
        limiter = RateLimiter(requests_per_second=1.0)
        limiter.wait()   # returns immediately
        limiter.wait()   # sleeps until one second after the first call
    """

    def __init__(
        self,
        requests_per_second: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.interval = 1.0 / requests_per_second
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_slot: Optional[float] = None

    def wait(self) -> float:
        """Block until the next request may be sent; returns the time slept."""
        with self._lock:
            now = self._clock()
            delay = 0.0
            if self._next_slot is not None and now < self._next_slot:
                delay = self._next_slot - now
                self._sleep(delay)
                now = self._next_slot
            self._next_slot = now + self.interval
            return delay


class RemoteSentimentExtractor(BaseSentimentExtractor):
    """
    Sentiment extractor backed by a chat-completion endpoint.

    Requests carry a hard HTTP timeout and are spaced by a rate limiter.
    Transport failures surface as ExtractorUnavailable so the extraction
    loop can retry them like malformed answers.

    Example:
        extractor = RemoteSentimentExtractor(ExtractorConfig(mode="remote"))
        raw = extractor.complete(prompt, review, movie)
    """

    def __init__(
        self,
        config: ExtractorConfig,
        api_key: Optional[str] = None,
        client=None,
        limiter: Optional[RateLimiter] = None,
    ):
        """
        Initialize the client.

        Args:
            config: Endpoint, model, timeout, retry and rate settings
            api_key: Overrides SENTIMENT_API_KEY from the environment
            client: Pre-built OpenAI-compatible client (tests inject fakes)
            limiter: Shared rate limiter; built from the config when omitted
        """
        fallback = StubSentimentExtractor() if config.fallback_to_stub else None
        super().__init__(name="remote", max_retries=config.max_retries, fallback=fallback)
        self.config = config
        self.limiter = limiter or RateLimiter(config.requests_per_second)
        self._http = None
        if client is None:
            key = api_key or config.api_key
            if not key:
                raise ExtractorUnavailable(
                    "SENTIMENT_API_KEY is not set", {"base_url": config.base_url}
                )
            # Hard timeout on the HTTP connection; retries are handled by extract()
            self._http = httpx.Client(timeout=config.timeout)
            client = OpenAI(
                api_key=key,
                base_url=config.base_url,
                http_client=self._http,
                max_retries=0,
            )
        self.client = client

    def complete(self, prompt: str, review: Review, movie: MovieRecord) -> str:
        self.limiter.wait()
        try:
            response = self.client.chat.completions.create(
                model=self.config.model,
                messages=build_messages(prompt),
                temperature=0,
                max_tokens=MAX_OUTPUT_TOKENS,
                response_format={"type": "json_object"},
            )
        except (httpx.TimeoutException, openai.APITimeoutError) as exc:
            raise ExtractorUnavailable(
                f"request timed out after {self.config.timeout}s", {"review_id": review.review_id}
            ) from exc
        except openai.OpenAIError as exc:
            raise ExtractorUnavailable(
                f"request failed: {exc}", {"review_id": review.review_id}
            ) from exc

        content = response.choices[0].message.content if response.choices else None
        return content or ""

    def close(self):
        if self._http is not None:
            self._http.close()
            self._http = None
