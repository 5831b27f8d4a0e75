"""
Orchestration from ingested records to the per-film raw feature table.

The CLI and the end-to-end tests go through these functions, so every
subcommand sees the same review handling, sentiment resolution and SIR
estimation.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from .config import RunConfig
from .diffusion import batch_features, build_timeline, estimate_initial_conditions, estimate_rates
from .errors import EmptyDataset, InconsistentCounts
from .features.labels import BudgetImputer, compute_label, event_indicator
from .features.metadata import base_columns, director_prior_films
from .models import MovieRecord, Review, ReviewRecord, SentimentVector
from .models.review import keywords_tuple
from .preprocessing.dataset import FilmTable
from .sentiment import StoredSentiment, extract_batch, make_extractor, read_sentiments, sentiment_features, write_sentiments
from .sentiment.parser import SCORE_MAX, SCORE_MIN

logger = logging.getLogger(__name__)

SIR_COLUMNS = (
    "beta", "gamma", "basic_reproduction_number", "effective_contact_rate",
    "i0_s0_ratio", "r0_s0_ratio", "peak_infected", "time_to_peak",
)


@dataclass
class FilmReviews:
    """A film and the reviews that survived date checks."""
    movie: MovieRecord
    reviews: List[Review] = field(default_factory=list)
    flagged: int = 0


def to_review(record: ReviewRecord, movie: MovieRecord) -> Review:
    """Sentiment-stage view of a review; pre-release reviews inside the tolerated window move to day 0."""
    return Review(
        review_id=record.review_id,
        author_id=record.review_author,
        timestamp=record.review_date,
        days_since_release=max(record.days_since_release(movie.release_date), 0.0),
        title=record.title,
        body=record.body,
        upvotes=record.upvotes,
        total_votes=record.total_votes,
        user_rating=record.rating,
    )


def group_reviews(movies: Sequence[MovieRecord], reviews: Sequence[ReviewRecord]) -> Dict[str, FilmReviews]:
    """
    Join reviews to their films.

    Reviews of unknown films are ignored and reviews dated more than the
    tolerated window before release are dropped; both are logged.
    """
    grouped = {m.key: FilmReviews(movie=m) for m in movies}
    orphans = 0
    for record in reviews:
        film = grouped.get(record.movie_key)
        if film is None:
            orphans += 1
            continue
        if record.is_flagged(film.movie.release_date):
            film.flagged += 1
            continue
        film.reviews.append(to_review(record, film.movie))

    if orphans:
        logger.warning("Ignored %d reviews of films not in the movie file", orphans)
    flagged = sum(f.flagged for f in grouped.values())
    if flagged:
        logger.warning("Dropped %d reviews posted long before release", flagged)
    return grouped


def precomputed_sentiments(reviews: Sequence[ReviewRecord]) -> Dict[str, SentimentVector]:
    """Vectors from the dataset's own Sentiment_Score / Emotion_Keywords columns."""
    vectors = {}
    for record in reviews:
        if record.sentiment_score is None:
            continue
        score = min(max(record.sentiment_score, SCORE_MIN), SCORE_MAX)
        vectors[record.review_id] = SentimentVector(
            sentiment_score=score,
            emotion_keywords=keywords_tuple(record.emotion_keywords or []),
        )
    return vectors


def extract_sentiments(
    grouped: Mapping[str, FilmReviews],
    reviews: Sequence[ReviewRecord],
    config: RunConfig,
    progress: bool = False,
) -> Dict[str, SentimentVector]:
    """Run the configured extractor over every review lacking a precomputed score."""
    items = [(review, film.movie) for film in grouped.values() for review in film.reviews]
    with make_extractor(config.extractor) as extractor:
        return extract_batch(
            items,
            extractor,
            precomputed=precomputed_sentiments(reviews),
            max_workers=config.extractor.max_workers,
            progress=progress,
        )


def save_sentiments(path, grouped: Mapping[str, FilmReviews], vectors: Mapping[str, SentimentVector]) -> Path:
    records = [
        StoredSentiment(
            review_id=review.review_id,
            movie=film.movie.key,
            timestamp=review.timestamp.isoformat(),
            vector=vectors[review.review_id],
        )
        for film in grouped.values()
        for review in film.reviews
    ]
    return write_sentiments(path, records)


def resolve_sentiments(
    grouped: Mapping[str, FilmReviews],
    reviews: Sequence[ReviewRecord],
    config: RunConfig,
    progress: bool = False,
) -> Dict[str, SentimentVector]:
    """
    Sentiment of every review: the stored file when it covers all reviews,
    otherwise extraction of the missing ones.
    """
    stored: Dict[str, SentimentVector] = {}
    if config.sentiments_path and Path(config.sentiments_path).exists():
        stored = {rid: rec.vector for rid, rec in read_sentiments(config.sentiments_path).items()}
    needed = {review.review_id for film in grouped.values() for review in film.reviews}
    if needed.issubset(stored):
        return {rid: stored[rid] for rid in needed}

    if stored:
        logger.info("Sentiment file covers %d of %d reviews; extracting the rest", len(needed & set(stored)), len(needed))
    extracted = extract_sentiments(grouped, reviews, config, progress)
    return {rid: stored.get(rid, extracted[rid]) for rid in needed}


def _sir_rows(films: Sequence[FilmReviews], vectors: Mapping[str, SentimentVector], config: RunConfig) -> List[Dict[str, float]]:
    nan_row = {name: float("nan") for name in SIR_COLUMNS}
    rows = [dict(nan_row) for _ in films]
    estimable, initials, rates = [], [], []
    for j, film in enumerate(films):
        if not film.reviews:
            continue
        timeline = build_timeline(film.reviews, vectors, config.sir.first_week_days)
        try:
            initial = estimate_initial_conditions(timeline)
        except InconsistentCounts as exc:
            logger.warning("SIR features of %r left undefined: %s", film.movie.title, exc.message)
            continue
        estimable.append(j)
        initials.append(initial)
        rates.append(estimate_rates(timeline, config.sir.gamma_floor))

    for j, params, feats in zip(
        estimable, rates,
        batch_features(initials, rates, dt=config.sir.dt, horizon=config.sir.horizon),
    ):
        rows[j] = {
            "beta": params.beta,
            "gamma": params.gamma,
            **{k: (float("nan") if v is None else float(v)) for k, v in feats.to_dict().items()},
        }
    return rows


def build_film_table(
    movies: Sequence[MovieRecord],
    reviews: Sequence[ReviewRecord],
    sentiments: Optional[Mapping[str, SentimentVector]],
    config: RunConfig,
    progress: bool = False,
) -> FilmTable:
    """
    Per-film raw feature table with labels and revenue targets.

    Budgets are imputed from release-year neighbours, films without an
    opening weekend are dropped, and undefined SIR or sentiment values stay
    NaN for the fitted imputation downstream.

    Args:
        movies: Ingested films
        reviews: Ingested reviews, any order
        sentiments: Vectors keyed by review_id; resolved from the config when None
        config: Run settings
        progress: Show extraction progress

    Returns:
        FilmTable aligned with the surviving films

    Raises:
        EmptyDataset: No film has both a budget and an opening weekend
    """
    filled = BudgetImputer(year_window=config.features.budget_year_window).fit(movies).apply(movies)
    kept = []
    for movie in filled:
        if movie.opening_weekend is None:
            logger.warning("Dropping %r: no opening weekend revenue", movie.title)
            continue
        kept.append(movie)
    if not kept:
        raise EmptyDataset("no film has an opening weekend revenue")

    grouped = group_reviews(kept, reviews)
    if sentiments is None:
        sentiments = resolve_sentiments(grouped, reviews, config, progress)
    films = [grouped[m.key] for m in kept]

    prior = director_prior_films(kept)
    sir_rows = _sir_rows(films, sentiments, config)
    rows = []
    for film, sir_row in zip(films, sir_rows):
        movie = film.movie
        pairs = [(sentiments[r.review_id], r) for r in film.reviews]
        rows.append(
            {
                **sir_row,
                **sentiment_features(pairs, config.features.sentiment_window_days, config.aggregation),
                "event_indicator": event_indicator(movie.release_year, config.features.event_year_range),
                **base_columns(movie, prior[movie.key]),
                "language": movie.primary_language,
                "country": movie.primary_country,
            }
        )

    table = FilmTable(
        raw=pd.DataFrame(rows),
        labels=np.array([compute_label(m) for m in kept], dtype=float),
        opening_weekend=np.array([m.opening_weekend for m in kept], dtype=float),
        titles=tuple(m.title for m in kept),
    )
    logger.info(
        "Built feature table for %d films (%.1f%% successful)", len(table), 100.0 * table.positive_share,
    )
    return table


def sir_fit_frame(movies: Sequence[MovieRecord], reviews: Sequence[ReviewRecord], config: RunConfig) -> pd.DataFrame:
    """
    Estimated initial state and rates per film, from review timing and star
    ratings alone.
    """
    grouped = group_reviews(movies, reviews)
    rows = []
    for movie in movies:
        film = grouped[movie.key]
        row: Dict[str, object] = {"title": movie.title, "reviews": len(film.reviews)}
        try:
            timeline = build_timeline(film.reviews, None, config.sir.first_week_days)
            state = estimate_initial_conditions(timeline)
            params = estimate_rates(timeline, config.sir.gamma_floor)
        except (EmptyDataset, InconsistentCounts) as exc:
            row.update(error=exc.__class__.__name__)
            rows.append(row)
            continue
        row.update(
            s0=state.s, i0=state.i, r0=state.r,
            beta=params.beta, gamma=params.gamma, gamma_floored=params.gamma_floored,
            basic_reproduction_number=params.basic_reproduction_number,
            error="",
        )
        rows.append(row)
    columns = [
        "title", "reviews", "s0", "i0", "r0", "beta", "gamma", "gamma_floored",
        "basic_reproduction_number", "error",
    ]
    return pd.DataFrame(rows, columns=columns)

