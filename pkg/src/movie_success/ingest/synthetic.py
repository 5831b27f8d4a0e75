"""
Planted-signal synthetic corpus.

Each film gets a latent quality ``q``. Quality drives how early reviews
arrive, how positive their wording is and how reviewers rate the film, and
(mixed with hidden noise according to ``signal_strength``) its opening-weekend
return on budget. With full signal the success label is recoverable from the
review-derived features; with none it is not.
"""

import logging
import math
from datetime import datetime, timedelta
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import SyntheticConfig
from ..errors import ContractViolation
from ..features.labels import compute_label
from ..models import MovieRecord, ReviewRecord
from ..sentiment.stub_extractor import NEGATIVE_WORDS, POSITIVE_WORDS
from .anonymize import anonymize_author

logger = logging.getLogger(__name__)

MIN_MOVIES = 50
FIRST_RELEASE_YEAR = 2004
LAST_RELEASE_YEAR = 2024
FILLER_WORDS = (
    "the", "film", "story", "cast", "scenes", "plot", "ending", "music",
    "really", "was", "and", "with", "overall", "felt", "quite",
)


def _sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def _pick(rng: np.random.Generator, weights: dict) -> str:
    names = sorted(weights)
    p = np.array([weights[n] for n in names], dtype=float)
    return names[int(rng.choice(len(names), p=p / p.sum()))]


def _names(rng: np.random.Generator, prefix: str, pool: int, low: int, high: int) -> str:
    count = int(rng.integers(low, high + 1))
    ids = sorted(int(k) for k in rng.choice(pool, size=min(count, pool), replace=False))
    return ", ".join(f"{prefix} {k + 1}" for k in ids)


def _review_body(rng: np.random.Generator, quality: float, config: SyntheticConfig) -> str:
    low, high = config.sentiment_words_range
    p_positive = _sigmoid(config.positive_word_slope * quality)
    words = []
    for _ in range(int(rng.integers(low, high + 1))):
        lexicon = POSITIVE_WORDS if rng.random() < p_positive else NEGATIVE_WORDS
        words.append(lexicon[int(rng.integers(len(lexicon)))])
        words.append(FILLER_WORDS[int(rng.integers(len(FILLER_WORDS)))])
    return " ".join(words).capitalize() + "."


def _rating(rng: np.random.Generator, quality: float, config: SyntheticConfig) -> Optional[int]:
    draw = 5.5 + 4.5 * config.rating_quality_slope * math.tanh(quality) + rng.normal(0.0, config.rating_noise_sd)
    if rng.random() < config.rating_missing_rate:
        return None
    return int(np.clip(round(draw), 1, 10))


def generate_synthetic(
    n_movies: int,
    reviews_per_movie_range: Tuple[int, int] = (20, 60),
    seed: int = 7,
    signal_strength: float = 1.0,
    config: Optional[SyntheticConfig] = None,
) -> Tuple[List[MovieRecord], List[ReviewRecord]]:
    """
    Generate films and their reviews with a planted success signal.

    Args:
        n_movies: Number of films, at least 50
        reviews_per_movie_range: Inclusive bounds on reviews per film
        seed: Root seed; the output is a pure function of the arguments
        signal_strength: Share of the success latent explained by quality, in [0, 1]
        config: Generator constants; the packaged ``synthetic.json`` when omitted

    Returns:
        (movies, reviews) in the ingest schemas, authors already anonymized

    Raises:
        ContractViolation: On out-of-range arguments

    Example:
        >>> movies, reviews = generate_synthetic(200, seed=3)
        >>> len(movies)
        200
    """
    if n_movies < MIN_MOVIES:
        raise ContractViolation(f"n_movies must be >= {MIN_MOVIES}", {"n_movies": n_movies})
    if not 0.0 <= signal_strength <= 1.0:
        raise ContractViolation("signal_strength must be in [0, 1]", {"signal_strength": signal_strength})
    low, high = reviews_per_movie_range
    if low < 1 or high < low:
        raise ContractViolation("reviews_per_movie_range must satisfy 1 <= low <= high", {"range": [low, high]})

    config = config or SyntheticConfig.packaged()
    rng = np.random.default_rng(seed)

    quality = rng.standard_normal(n_movies)
    hidden = rng.standard_normal(n_movies)
    latent = signal_strength * quality + math.sqrt(1.0 - signal_strength ** 2) * hidden

    movies: List[MovieRecord] = []
    reviews: List[ReviewRecord] = []
    author_counter = 0

    for j in range(n_movies):
        q = float(quality[j])
        year = int(rng.integers(FIRST_RELEASE_YEAR, LAST_RELEASE_YEAR + 1))
        month = int(rng.integers(1, 13))
        day = int(rng.integers(1, 29))

        budget = float(round(math.exp(rng.normal(config.budget_log_mu, config.budget_log_sigma))))
        roi = config.roi_intercept + config.roi_slope * (float(latent[j]) + config.quality_offset)
        roi = max(roi + rng.normal(0.0, config.roi_noise_sd), config.roi_floor)
        opening = float(round(budget * roi))
        gross = float(round(opening * rng.uniform(*config.gross_multiplier_range)))

        runtime = float(round(np.clip(rng.normal(110.0, 18.0), 70.0, 200.0)))
        if rng.random() < config.missing_runtime_rate:
            runtime = None

        movie = MovieRecord(
            title=f"Synthetic Film {j + 1:04d}",
            director=f"Director {int(rng.integers(config.director_pool)) + 1}",
            writers=_names(rng, "Writer", config.writer_pool, 1, 3),
            gross_worldwide=gross,
            opening_weekend=opening,
            budget=budget,
            language=_pick(rng, config.languages),
            country=_pick(rng, config.countries),
            filming_locations=_pick(rng, config.countries),
            production_companies=_names(rng, "Studio", config.company_pool, 1, 3),
            release_day=day,
            release_month=month,
            release_year=year,
            runtime=runtime,
            imdb_rating=float(round(np.clip(6.5 + 0.8 * q + rng.normal(0.0, 0.7), 1.0, 10.0), 1)),
        )
        movies.append(movie)

        release = datetime(year, month, day)
        delay_scale = config.delay_scale_days * math.exp(-config.delay_quality_slope * q)
        film_authors: List[str] = []
        film_reviews = []
        for _ in range(int(rng.integers(low, high + 1))):
            if film_authors and rng.random() < config.repeat_author_prob:
                author = film_authors[int(rng.integers(len(film_authors)))]
            else:
                author_counter += 1
                author = anonymize_author(f"reviewer-{author_counter}", config.anonymization_salt)
                film_authors.append(author)

            delay_seconds = int(round(rng.exponential(delay_scale) * 86400.0))
            total_votes = int(rng.poisson(config.mean_total_votes))
            film_reviews.append(
                ReviewRecord(
                    movie_key=movie.key,
                    review_author=author,
                    review_date=release + timedelta(seconds=delay_seconds),
                    title=f"Thoughts on {movie.title}",
                    body=_review_body(rng, q, config),
                    upvotes=int(rng.binomial(total_votes, config.helpful_prob)),
                    total_votes=total_votes,
                    rating=_rating(rng, q, config),
                )
            )
        film_reviews.sort(key=lambda r: (r.review_date, r.review_author))
        reviews.extend(film_reviews)

    logger.info(
        "Generated %d films and %d reviews (seed=%d, signal=%.2f)",
        len(movies), len(reviews), seed, signal_strength,
    )
    return movies, reviews


def success_share(movies: Sequence[MovieRecord]) -> float:
    """Share of films whose opening weekend reaches half the budget."""
    return float(np.mean([compute_label(m) for m in movies])) if movies else float("nan")
