"""
Deterministic lexicon extractor for offline runs and tests.
"""

import json
import re
from typing import List, Tuple

from ..models import MovieRecord, Review
from ..models.review import KEYWORD_COUNT
from .base import BaseSentimentExtractor

POSITIVE_WORDS: Tuple[str, ...] = (
    "brilliant", "masterpiece", "thrilling", "gripping", "stunning",
    "moving", "hilarious", "superb", "captivating", "delightful",
    "heartfelt", "clever", "memorable", "beautiful", "excellent",
)

NEGATIVE_WORDS: Tuple[str, ...] = (
    "disappointing", "boring", "dull", "predictable", "messy",
    "forgettable", "tedious", "bland", "clumsy", "awful",
    "pointless", "shallow", "overlong", "lifeless", "weak",
)

FOCUS_WORDS = {
    "plot": ("plot", "story", "script", "ending", "twist"),
    "acting": ("acting", "performance", "cast", "actor", "actress"),
    "visuals": ("visuals", "cinematography", "effects", "shot", "look"),
    "directing": ("directing", "director", "direction", "pacing"),
    "music": ("music", "score", "soundtrack"),
}

NEUTRAL_SCORE = 5.5
SCORE_SPAN = 4.5
SUMMARY_WORDS = 20

_POSITIVE = frozenset(POSITIVE_WORDS)
_NEGATIVE = frozenset(NEGATIVE_WORDS)
_TOKEN = re.compile(r"[a-z']+")


def tokenize(text: str) -> List[str]:
    return _TOKEN.findall((text or "").lower())


def lexicon_score(text: str) -> Tuple[float, int, int, List[str]]:
    """
    Signed lexicon score of a text.

    Returns:
        (score, positive hits, negative hits, hit words in order). The score is
        5.5 + 4.5 * (pos - neg) / (pos + neg), or 5.5 with no hits.
    """
    hits = [tok for tok in tokenize(text) if tok in _POSITIVE or tok in _NEGATIVE]
    pos = sum(1 for tok in hits if tok in _POSITIVE)
    neg = len(hits) - pos
    if not hits:
        return NEUTRAL_SCORE, 0, 0, []
    return NEUTRAL_SCORE + SCORE_SPAN * (pos - neg) / (pos + neg), pos, neg, hits


class StubSentimentExtractor(BaseSentimentExtractor):
    """
    Keyword-lexicon extractor.

    The score comes from lexicon hits in the review body. Without hits it
    backs off to the reviewer's star rating, and to a neutral 5.5 when there
    is none. Output is a JSON string in the same shape a remote model
    returns, so it goes through the regular parser.
    """

    def complete(self, prompt: str, review: Review, movie: MovieRecord) -> str:
        score, pos, neg, hits = lexicon_score(review.body)
        if pos + neg == 0 and review.user_rating is not None:
            score = float(review.user_rating)

        keywords = list(dict.fromkeys(hits))[:KEYWORD_COUNT]
        if score >= 6.0:
            emotion = "admiration"
        elif score < 5.0:
            emotion = "disappointment"
        else:
            emotion = "neutral"

        tokens = set(tokenize(review.body))
        focus = [aspect for aspect, words in FOCUS_WORDS.items() if tokens.intersection(words)]

        answer = {
            "sentiment_score": round(score, 6),
            "emotion_keywords": keywords,
            "primary_emotion": emotion,
            "review_focus": ", ".join(focus) if focus else "general",
            "bias_analysis": f"lexicon estimate from {pos} positive and {neg} negative terms",
            "summary": " ".join(review.body.split()[:SUMMARY_WORDS]),
        }
        return json.dumps(answer, ensure_ascii=False)
