"""
Movie Success - predict opening-weekend success from how reviews spread.

Review timing is read as an information-diffusion process, review text as
multidimensional sentiment, and both feed a multi-task network that
classifies success and regresses opening-weekend revenue.

Quick Start:
    from movie_success import RunConfig, build_film_table, evaluate_holdout
    from movie_success.ingest import generate_synthetic

    movies, reviews = generate_synthetic(400, seed=7)
    table = build_film_table(movies, reviews, None, RunConfig())
    result = evaluate_holdout(table, RunConfig())
    print(result.report.accuracy)

Modular Components:
    - models: records, SIR types, feature schema
    - diffusion: SIR integration, estimators and virality features
    - sentiment: extractors, parser and temporal aggregation
    - features / preprocessing: transforms fitted on training rows
    - network: multi-task network, Adam trainer and checkpoints
    - evaluation: metrics, splits, cross-validation and ablation
    - ingest: CSV schemas, anonymization, synthetic data, pipeline state
"""

__version__ = "0.1.0"

from .config import RunConfig, NetworkConfig, SIRConfig, ExtractorConfig, FeatureConfig
from .errors import MovieSuccessError
from .pipeline import build_film_table
from .evaluation import cross_validate, evaluate_holdout, run_ablation

__all__ = [
    "RunConfig",
    "NetworkConfig",
    "SIRConfig",
    "ExtractorConfig",
    "FeatureConfig",
    "MovieSuccessError",
    "build_film_table",
    "cross_validate",
    "evaluate_holdout",
    "run_ablation",
]
