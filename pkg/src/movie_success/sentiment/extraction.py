"""
Prompt -> extractor -> parser composition, single and batched.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Mapping, Optional, Sequence, Tuple

from tqdm import tqdm

from ..config import ExtractorConfig
from ..errors import ExtractorUnavailable, MalformedResponse
from ..models import MovieRecord, Review, SentimentVector
from .base import BaseSentimentExtractor
from .parser import parse_extractor_response
from .prompt import build_prompt
from .remote_extractor import RemoteSentimentExtractor
from .stub_extractor import StubSentimentExtractor

logger = logging.getLogger(__name__)


def make_extractor(config: ExtractorConfig) -> BaseSentimentExtractor:
    """Build the extractor named by ``config.mode``."""
    if config.mode == "remote":
        return RemoteSentimentExtractor(config)
    return StubSentimentExtractor()


def extract(review: Review, movie: MovieRecord, extractor: BaseSentimentExtractor) -> SentimentVector:
    """
    Extract the sentiment of one review.

    Malformed or failed answers are retried ``extractor.max_retries`` times;
    after that the extractor's fallback answers instead.

    Raises:
        ExtractorUnavailable: If every attempt failed and there is no fallback
    """
    prompt = build_prompt(movie, review)
    last_error: Optional[Exception] = None
    for attempt in range(extractor.max_retries + 1):
        try:
            return parse_extractor_response(extractor.complete(prompt, review, movie))
        except (MalformedResponse, ExtractorUnavailable) as exc:
            last_error = exc
            logger.warning(
                "%s attempt %d/%d failed for review %s: %s",
                extractor.name, attempt + 1, extractor.max_retries + 1, review.review_id, exc,
            )

    if extractor.fallback is not None:
        logger.warning("Falling back to %s for review %s", extractor.fallback.name, review.review_id)
        return extract(review, movie, extractor.fallback)

    raise ExtractorUnavailable(
        f"{extractor.name} failed after {extractor.max_retries + 1} attempts",
        {"review_id": review.review_id, "last_error": str(last_error)},
    )


def extract_batch(
    items: Sequence[Tuple[Review, MovieRecord]],
    extractor: BaseSentimentExtractor,
    precomputed: Optional[Mapping[str, SentimentVector]] = None,
    max_workers: int = 1,
    progress: bool = True,
) -> Dict[str, SentimentVector]:
    """
    Extract sentiment for many reviews.

    Reviews with a precomputed vector (from the dataset's own score and
    keyword columns) skip extraction. Results are keyed by review_id and
    returned in input order regardless of worker count.

    Args:
        items: (review, movie) pairs
        extractor: Extractor handle
        precomputed: Vectors that bypass extraction, keyed by review_id
        max_workers: Concurrent requests; the extractor's rate limit still applies
        progress: Show a tqdm progress bar

    Returns:
        Dict of review_id -> SentimentVector
    """
    precomputed = precomputed or {}
    pending = [(review, movie) for review, movie in items if review.review_id not in precomputed]
    logger.info(
        "Extracting sentiment for %d reviews (%d precomputed) with %s",
        len(pending), len(items) - len(pending), extractor.name,
    )

    bar = tqdm(total=len(pending), desc="sentiment", unit="review", disable=not progress)

    def _one(pair: Tuple[Review, MovieRecord]) -> SentimentVector:
        vector = extract(pair[0], pair[1], extractor)
        bar.update(1)
        return vector

    try:
        if max_workers > 1 and len(pending) > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                vectors = list(pool.map(_one, pending))
        else:
            vectors = [_one(pair) for pair in pending]
    finally:
        bar.close()

    extracted = {review.review_id: vec for (review, _), vec in zip(pending, vectors)}
    results: Dict[str, SentimentVector] = {}
    for review, _ in items:
        rid = review.review_id
        results[rid] = precomputed[rid] if rid in precomputed else extracted[rid]
    return results
