"""
Dataset ingestion.

- loaders: movies/reviews CSV schemas, rejects and round-trip writers
- anonymize: keyed hashing of review authors
- synthetic: planted-signal corpus generator
- state: resumable pipeline state with input hashes and a lock
"""

from .anonymize import anonymize_author
from .loaders import (
    MOVIE_COLUMNS,
    REVIEW_COLUMNS,
    Reject,
    load_movies,
    load_reviews,
    parse_currency,
    write_movies,
    write_rejects,
    write_reviews,
)
from .synthetic import generate_synthetic, success_share
from .state import PIPELINE_STAGES, PipelineState, StageRecord, file_hash

__all__ = [
    "anonymize_author",
    "MOVIE_COLUMNS",
    "REVIEW_COLUMNS",
    "Reject",
    "load_movies",
    "load_reviews",
    "parse_currency",
    "write_movies",
    "write_rejects",
    "write_reviews",
    "generate_synthetic",
    "success_share",
    "PIPELINE_STAGES",
    "PipelineState",
    "StageRecord",
    "file_hash",
]
