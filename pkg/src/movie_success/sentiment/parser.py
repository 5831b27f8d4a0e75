"""
Parsing and repair of extractor answers.
"""

import json
import logging
import math
from typing import Any, Dict, List

from ..errors import MalformedResponse
from ..models import SentimentVector
from ..models.review import KEYWORD_COUNT, SUMMARY_MAX_WORDS, keywords_tuple

logger = logging.getLogger(__name__)

SCORE_MIN = 1.0
SCORE_MAX = 10.0


def _strip_fences(raw: str) -> str:
    raw = raw.strip()
    if raw.startswith("```"):
        raw = raw.split("```")[1]
        if raw.startswith("json"):
            raw = raw[4:]
    return raw.strip()


def _keyword_list(value: Any) -> List[str]:
    if value is None:
        return []
    if isinstance(value, str):
        return [part for part in value.split(",")]
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [str(value)]


def parse_extractor_response(raw: str) -> SentimentVector:
    """
    Parse one answer into a SentimentVector.

    The score is clamped into [1, 10]; keywords are padded with "n/a" or
    truncated to five; the summary is cut to 50 words. Every repair is
    recorded in ``flags``.

    Raises:
        MalformedResponse: If the text is not a JSON object or lacks a
            numeric sentiment_score
    """
    text = _strip_fences(raw or "")
    try:
        data: Dict[str, Any] = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedResponse("extractor answer is not valid JSON", {"raw": text[:200]}) from exc
    if not isinstance(data, dict):
        raise MalformedResponse("extractor answer is not a JSON object", {"raw": text[:200]})
    if "sentiment_score" not in data:
        raise MalformedResponse("extractor answer has no sentiment_score", {"keys": sorted(data)})

    try:
        score = float(data["sentiment_score"])
    except (TypeError, ValueError) as exc:
        raise MalformedResponse(
            "sentiment_score is not numeric", {"sentiment_score": data["sentiment_score"]}
        ) from exc
    if not math.isfinite(score):
        raise MalformedResponse("sentiment_score is not finite", {"sentiment_score": score})

    flags = []
    if score < SCORE_MIN or score > SCORE_MAX:
        flags.append("score_clamped")
        score = min(max(score, SCORE_MIN), SCORE_MAX)

    keywords = _keyword_list(data.get("emotion_keywords"))
    if len([k for k in keywords if str(k).strip()]) != KEYWORD_COUNT:
        flags.append("keywords_resized")

    summary = str(data.get("summary") or "").strip()
    words = summary.split()
    if len(words) > SUMMARY_MAX_WORDS:
        flags.append("summary_truncated")
        summary = " ".join(words[:SUMMARY_MAX_WORDS])

    if flags:
        logger.debug("Repaired extractor answer: %s", ", ".join(flags))

    return SentimentVector(
        sentiment_score=score,
        emotion_keywords=keywords_tuple(keywords),
        primary_emotion=str(data.get("primary_emotion") or ""),
        review_focus=str(data.get("review_focus") or ""),
        bias_analysis=str(data.get("bias_analysis") or ""),
        summary=summary,
        flags=tuple(flags),
    )
