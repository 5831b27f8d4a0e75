"""Shared fixtures: seeded generators, a small synthetic corpus and CSV files."""

from datetime import datetime

import numpy as np
import pytest

from movie_success.config import RunConfig
from movie_success.ingest import generate_synthetic, write_movies, write_reviews
from movie_success.models import MovieRecord, Review, ReviewRecord


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def small_corpus():
    """60 films with 8-15 reviews each; cheap enough for pipeline tests."""
    return generate_synthetic(60, reviews_per_movie_range=(8, 15), seed=11)


@pytest.fixture
def corpus_files(tmp_path, small_corpus):
    movies, reviews = small_corpus
    return (
        write_movies(tmp_path / "movies.csv", movies),
        write_reviews(tmp_path / "reviews.csv", reviews),
    )


@pytest.fixture
def fast_config(tmp_path):
    """Run config with a short training schedule."""
    config = RunConfig(output_dir=str(tmp_path / "out"))
    config.network = config.network.with_overrides(max_epochs=12, patience=6, batch_size=16)
    return config


@pytest.fixture
def movie():
    return MovieRecord(
        title="Night Harbour",
        director="A. Director",
        writers="W. One, W. Two",
        gross_worldwide=3.0e7,
        opening_weekend=6.0e6,
        budget=1.0e7,
        language="English",
        country="United States",
        production_companies="Studio A, Studio B",
        release_day=14,
        release_month=3,
        release_year=2014,
        runtime=112.0,
    )


def make_review(day=0.0, author="u_a", body="", upvotes=0, total_votes=0, rating=None, review_id=None):
    return Review(
        review_id=review_id or f"r-{author}-{day}",
        author_id=author,
        timestamp=datetime(2014, 3, 14),
        days_since_release=day,
        body=body,
        upvotes=upvotes,
        total_votes=total_votes,
        user_rating=rating,
    )


def make_record(movie_key="Night Harbour", author="alice", when=datetime(2014, 3, 20), **kwargs):
    return ReviewRecord(movie_key=movie_key, review_author=author, review_date=when, **kwargs)
