"""
Configuration dataclasses and JSON loading.

Every run resolves one ``RunConfig`` (file values overridden by CLI flags)
and writes it next to its outputs.
"""

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .errors import ContractViolation
from .models import AggregationConfig

API_KEY_ENV = "SENTIMENT_API_KEY"

# Ablation conditions as (label, removed groups, resulting feature count).
ABLATION_CONDITIONS: Tuple[Tuple[str, Tuple[str, ...], int], ...] = (
    ("Full Method", (), 29),
    ("w/o SIR", ("SIR",), 22),
    ("w/o Sentiment", ("Sentiment",), 24),
    ("w/o Events", ("Events",), 28),
    ("w/o SIR & Sentiment", ("SIR", "Sentiment"), 17),
    ("w/o SIR & Events", ("SIR", "Events"), 21),
    ("w/o Sentiment & Events", ("Sentiment", "Events"), 23),
)


@dataclass(frozen=True)
class SIRConfig:
    """Simulation defaults for feature extraction."""
    dt: float = 0.01
    horizon: float = 90.0
    first_week_days: float = 7.0
    gamma_floor: float = 1e-6


@dataclass(frozen=True)
class ExtractorConfig:
    """
    Sentiment extractor settings.

    Attributes:
        mode: "stub" or "remote"
        base_url: Chat-completion endpoint root for the remote extractor
        model: Remote model name
        timeout: Hard HTTP timeout in seconds
        max_retries: Retries on malformed or failed responses
        requests_per_second: Rate limit of the remote client
        fallback_to_stub: Use the stub when retries are exhausted
        max_workers: Upper bound on concurrent remote requests
    """
    mode: str = "stub"
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    timeout: float = 15.0
    max_retries: int = 3
    requests_per_second: float = 1.0
    fallback_to_stub: bool = True
    max_workers: int = 1

    def __post_init__(self):
        if self.mode not in ("stub", "remote"):
            raise ContractViolation(f"extractor mode must be stub or remote, got {self.mode!r}")
        if self.requests_per_second <= 0:
            raise ContractViolation("requests_per_second must be > 0")
        if self.max_retries < 0:
            raise ContractViolation("max_retries must be >= 0")

    @property
    def api_key(self) -> Optional[str]:
        return os.environ.get(API_KEY_ENV)


@dataclass(frozen=True)
class NetworkConfig:
    """Multi-task network hyperparameters."""
    shared_sizes: Tuple[int, ...] = (128, 64)
    clf_sizes: Tuple[int, ...] = (32, 16)
    reg_sizes: Tuple[int, ...] = (64, 32, 16)
    dropout_shared: float = 0.5
    dropout_clf: float = 0.4
    dropout_reg: float = 0.35
    l1: float = 0.0001
    l2: float = 0.001
    alpha_clf: float = 1.0
    alpha_reg: float = 1.5
    learning_rate: float = 0.001
    batch_size: int = 32
    max_epochs: int = 150
    patience: int = 40
    seed: int = 0

    def __post_init__(self):
        sizes = tuple(self.shared_sizes) + tuple(self.clf_sizes) + tuple(self.reg_sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ContractViolation("layer sizes must be positive")
        for name in ("dropout_shared", "dropout_clf", "dropout_reg"):
            rate = getattr(self, name)
            if not (0.0 <= rate < 1.0):
                raise ContractViolation(f"{name} must be in [0, 1)", {name: rate})
        if self.learning_rate <= 0:
            raise ContractViolation("learning_rate must be > 0")
        if self.batch_size <= 0 or self.max_epochs <= 0:
            raise ContractViolation("batch_size and max_epochs must be > 0")
        if self.patience > self.max_epochs:
            raise ContractViolation("patience cannot exceed max_epochs")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key in ("shared_sizes", "clf_sizes", "reg_sizes"):
            data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NetworkConfig":
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in data.items() if k in known}
        for key in ("shared_sizes", "clf_sizes", "reg_sizes"):
            if key in values:
                values[key] = tuple(int(v) for v in values[key])
        return cls(**values)

    def with_overrides(self, **overrides: Any) -> "NetworkConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class FeatureConfig:
    """Feature-engineering settings."""
    sentiment_window_days: float = 7.0
    winsor_low: float = 0.01
    winsor_high: float = 0.99
    pca_components: int = 2
    budget_year_window: int = 2
    event_year_range: Tuple[int, int] = (2004, 2024)


@dataclass(frozen=True)
class SyntheticConfig:
    """
    Constants of the planted-signal generator, loaded from ``synthetic.json``.

    Opening weekend = budget * max(a + b * (latent + offset) + noise, floor),
    where the latent mixes review-visible quality with hidden noise according
    to the signal strength.
    """
    roi_intercept: float = 0.3
    roi_slope: float = 0.5
    quality_offset: float = 0.4
    roi_noise_sd: float = 0.05
    roi_floor: float = 0.05
    budget_log_mu: float = 17.0
    budget_log_sigma: float = 1.2
    gross_multiplier_range: Tuple[float, float] = (2.0, 4.0)
    delay_scale_days: float = 10.0
    delay_quality_slope: float = 0.35
    positive_word_slope: float = 1.5
    sentiment_words_range: Tuple[int, int] = (6, 10)
    rating_quality_slope: float = 0.8
    rating_noise_sd: float = 2.5
    rating_missing_rate: float = 0.1
    repeat_author_prob: float = 0.1
    mean_total_votes: float = 5.0
    helpful_prob: float = 0.6
    missing_runtime_rate: float = 0.02
    director_pool: int = 150
    writer_pool: int = 400
    company_pool: int = 60
    languages: Dict[str, float] = field(default_factory=lambda: {"English": 1.0})
    countries: Dict[str, float] = field(default_factory=lambda: {"United States": 1.0})
    anonymization_salt: str = "synthetic-corpus"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SyntheticConfig":
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in data.items() if k in known}
        for key in ("gross_multiplier_range", "sentiment_words_range"):
            if key in values:
                values[key] = tuple(values[key])
        return cls(**values)

    @classmethod
    def packaged(cls) -> "SyntheticConfig":
        text = resources.files("movie_success.data").joinpath("synthetic.json").read_text("utf-8")
        return cls.from_dict(json.loads(text))


@dataclass
class RunConfig:
    """
    Everything one CLI run needs, resolved from file and flags.

    The API key is read from the environment and never stored here.
    """
    movies_path: Optional[str] = None
    reviews_path: Optional[str] = None
    sentiments_path: Optional[str] = None
    output_dir: str = "output"
    seed: int = 7
    salt: str = "movie-success"
    test_ratio: float = 0.2
    validation_ratio: float = 0.15
    cv_folds: int = 10
    n_jobs: int = 1
    mask: List[str] = field(default_factory=list)
    ablations: List[str] = field(default_factory=lambda: [label for label, _, _ in ABLATION_CONDITIONS])
    sir: SIRConfig = field(default_factory=SIRConfig)
    aggregation: AggregationConfig = field(default_factory=AggregationConfig)
    extractor: ExtractorConfig = field(default_factory=ExtractorConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    network: NetworkConfig = field(default_factory=NetworkConfig)

    def network_config(self) -> NetworkConfig:
        """Network settings with the run's root seed."""
        return replace(self.network, seed=self.seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "movies_path": self.movies_path,
            "reviews_path": self.reviews_path,
            "sentiments_path": self.sentiments_path,
            "output_dir": self.output_dir,
            "seed": self.seed,
            "salt": self.salt,
            "test_ratio": self.test_ratio,
            "validation_ratio": self.validation_ratio,
            "cv_folds": self.cv_folds,
            "n_jobs": self.n_jobs,
            "mask": list(self.mask),
            "ablations": list(self.ablations),
            "sir": asdict(self.sir),
            "aggregation": self.aggregation.to_dict(),
            "extractor": asdict(self.extractor),
            "features": {**asdict(self.features), "event_year_range": list(self.features.event_year_range)},
            "network": self.network_config().to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        simple = {
            k: data[k]
            for k in (
                "movies_path", "reviews_path", "sentiments_path", "output_dir", "seed", "salt",
                "test_ratio", "validation_ratio", "cv_folds", "n_jobs", "mask", "ablations",
            )
            if k in data
        }
        config = cls(**simple)
        if "sir" in data:
            config.sir = SIRConfig(**data["sir"])
        if "aggregation" in data:
            config.aggregation = AggregationConfig.from_dict(data["aggregation"])
        if "extractor" in data:
            config.extractor = ExtractorConfig(**data["extractor"])
        if "features" in data:
            feats = dict(data["features"])
            if "event_year_range" in feats:
                feats["event_year_range"] = tuple(feats["event_year_range"])
            config.features = FeatureConfig(**feats)
        if "network" in data:
            config.network = NetworkConfig.from_dict(data["network"])
        return config

    @classmethod
    def load(cls, path: Optional[str]) -> "RunConfig":
        if path is None:
            return cls()
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ContractViolation(f"cannot read config {path}: {exc}", {"path": str(path)}) from exc
        return cls.from_dict(data)

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path
