"""
Data models shared across the pipeline.
"""

from .sir import SIRState, SIRParams, SIRTrajectory, SIRFeatures, ReviewTimeline, TimelineEntry
from .movie import MovieRecord, ReviewRecord
from .review import (
    Review,
    SentimentVector,
    AggregationConfig,
    AggregateSentiment,
    SENTIMENT_KEYS,
)
from .features import (
    FeatureGroup,
    FeatureSpec,
    FeatureSchema,
    FeatureVector,
    PCAModel,
    TransformParams,
)

__all__ = [
    "SIRState",
    "SIRParams",
    "SIRTrajectory",
    "SIRFeatures",
    "ReviewTimeline",
    "TimelineEntry",
    "MovieRecord",
    "ReviewRecord",
    "Review",
    "SentimentVector",
    "AggregationConfig",
    "AggregateSentiment",
    "SENTIMENT_KEYS",
    "FeatureGroup",
    "FeatureSpec",
    "FeatureSchema",
    "FeatureVector",
    "PCAModel",
    "TransformParams",
]
