"""
Review sentiment extraction and temporal aggregation.

Extractors are pluggable: the stub scores reviews with a fixed lexicon and
needs no network, the remote extractor calls a chat-completion endpoint.
Both answers go through the same parser.
"""

from .base import BaseSentimentExtractor
from .prompt import build_prompt, build_messages
from .parser import parse_extractor_response
from .stub_extractor import StubSentimentExtractor, POSITIVE_WORDS, NEGATIVE_WORDS, lexicon_score
from .remote_extractor import RemoteSentimentExtractor, RateLimiter
from .extraction import extract, extract_batch, make_extractor
from .aggregation import aggregate_temporal, helpfulness_weight, sentiment_features
from .store import StoredSentiment, read_sentiments, write_sentiments

__all__ = [
    "BaseSentimentExtractor",
    "build_prompt",
    "build_messages",
    "parse_extractor_response",
    "StubSentimentExtractor",
    "POSITIVE_WORDS",
    "NEGATIVE_WORDS",
    "lexicon_score",
    "RemoteSentimentExtractor",
    "RateLimiter",
    "extract",
    "extract_batch",
    "make_extractor",
    "aggregate_temporal",
    "helpfulness_weight",
    "sentiment_features",
    "StoredSentiment",
    "read_sentiments",
    "write_sentiments",
]
