"""
Base-group features computed from movie metadata.
"""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from ..errors import ContractViolation
from ..models import MovieRecord

BASE_YEAR = 2004
YEAR_SPAN = 20.0


def month_cycle(month: int) -> Tuple[float, float]:
    """Release month on the unit circle as (sin, cos)."""
    if not (1 <= month <= 12):
        raise ContractViolation(f"release month must be in 1..12, got {month}")
    angle = 2.0 * math.pi * (month - 1) / 12.0
    return math.sin(angle), math.cos(angle)


def release_year_norm(year: int) -> float:
    return (year - BASE_YEAR) / YEAR_SPAN


def director_prior_films(records: Sequence[MovieRecord]) -> Dict[str, int]:
    """Films by the same director released strictly earlier, keyed by title."""
    by_director = defaultdict(list)
    for record in records:
        if record.director:
            by_director[record.director.strip().lower()].append(record.release_date)

    counts = {}
    for record in records:
        dates = by_director.get(record.director.strip().lower(), []) if record.director else []
        counts[record.key] = sum(1 for d in dates if d < record.release_date)
    return counts


@dataclass(frozen=True)
class CategoryVocabulary:
    """
    Top-k most frequent values of a categorical field plus an "other" bucket.

    Ties in frequency are broken alphabetically; empty values map to "other".
    """
    values: Tuple[str, ...]

    @classmethod
    def fit(cls, observed: Iterable[str], top_k: int = 3) -> "CategoryVocabulary":
        counts = Counter(v for v in observed if v)
        ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
        return cls(tuple(value for value, _ in ranked[:top_k]))

    @property
    def width(self) -> int:
        return len(self.values) + 1

    def encode(self, value: str) -> List[float]:
        """One-hot over the vocabulary followed by the "other" slot."""
        onehot = [0.0] * self.width
        try:
            onehot[self.values.index(value)] = 1.0
        except ValueError:
            onehot[-1] = 1.0
        return onehot

    def encode_padded(self, value: str, top_k: int = 3) -> List[float]:
        """Encoding padded to ``top_k + 1`` slots when fewer values were seen."""
        onehot = self.encode(value)
        other = onehot[-1]
        slots = onehot[:-1] + [0.0] * (top_k - len(self.values))
        return slots + [other]

    def to_dict(self) -> Dict:
        return {"values": list(self.values)}


def base_columns(record: MovieRecord, prior_films: int) -> Dict[str, float]:
    """Numeric base columns of one film; categorical one-hots are added later."""
    month_sin, month_cos = month_cycle(record.release_month)
    return {
        "log_budget": math.log(record.budget) if record.budget else float("nan"),
        "runtime": float(record.runtime) if record.runtime is not None else float("nan"),
        "release_month_sin": month_sin,
        "release_month_cos": month_cos,
        "release_year_norm": release_year_norm(record.release_year),
        "production_company_count": float(len(record.company_list)),
        "director_prior_films": float(prior_films),
        "writer_count": float(len(record.writer_list)),
    }
