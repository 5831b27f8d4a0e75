"""
Reading and writing the movies and reviews CSV files.

Malformed rows are never dropped silently: each becomes a ``Reject`` with
its file row number and reason.
"""

import logging
import math
import re
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

import pandas as pd

from ..errors import ContractViolation, SchemaMismatch
from ..models import MovieRecord, ReviewRecord
from .anonymize import anonymize_author

logger = logging.getLogger(__name__)

T = TypeVar("T")

MOVIE_COLUMNS = (
    "Title", "Director", "Writers", "Gross_Worldwide", "Opening_Weekend", "Budget",
    "Language", "Country", "Filming_Locations", "Production_Companies",
    "Release_Day", "Release_Month", "Release_Year", "Runtime",
)
MOVIE_OPTIONAL = ("IMDb_Rating",)
# Derived columns that may appear in exported datasets; ignored on load.
MOVIE_DERIVED = ("ROI", "Successful_Movie")

REVIEW_COLUMNS = (
    "Title", "Review_Author", "Review_Date", "Review_Title", "Review_Body", "Upvotes", "Total_Votes",
)
REVIEW_OPTIONAL = ("Rating", "Sentiment_Score", "Emotion_Keywords")

MISSING_TOKENS = frozenset({"", "n/a", "na", "nan", "none", "null", "-", "unknown"})
_CURRENCY_NOISE = re.compile(r"[\s$,]")
_LEADING_NUMBER = re.compile(r"^-?\d+(\.\d+)?")


@dataclass(frozen=True)
class Reject:
    """A source row that could not be turned into a record."""
    file: str
    row: int
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {"file": self.file, "row": self.row, "reason": self.reason}


# -- value parsing ------------------------------------------------------------

def _is_missing(value: str) -> bool:
    return value.strip().lower() in MISSING_TOKENS


def parse_currency(value: str) -> Optional[float]:
    """
    "$1,234,567" -> 1234567.0; missing markers -> None.

    Raises:
        ValueError: On text that is neither missing nor a number
    """
    if _is_missing(value):
        return None
    amount = float(_CURRENCY_NOISE.sub("", value))
    if not math.isfinite(amount):
        raise ValueError(f"not a finite amount: {value!r}")
    return amount


def parse_optional_float(value: str) -> Optional[float]:
    """Leading number of the text ("118 min" -> 118.0); None when missing."""
    if _is_missing(value):
        return None
    match = _LEADING_NUMBER.match(value.strip())
    if not match:
        raise ValueError(f"not a number: {value!r}")
    return float(match.group(0))


def parse_int(value: str) -> int:
    number = float(value.strip())
    if not number.is_integer():
        raise ValueError(f"not an integer: {value!r}")
    return int(number)


def parse_optional_int(value: str) -> Optional[int]:
    return None if _is_missing(value) else parse_int(value)


def parse_timestamp(value: str) -> datetime:
    """Naive timestamp; offsets are converted to UTC first."""
    text = value.strip()
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        stamp = pd.to_datetime(text)
        if pd.isna(stamp):
            raise ValueError(f"not a date: {value!r}")
        parsed = stamp.to_pydatetime()
    if parsed.tzinfo is not None:
        parsed = parsed.astimezone(timezone.utc).replace(tzinfo=None)
    return parsed


def parse_keywords(value: str) -> Optional[List[str]]:
    if _is_missing(value):
        return None
    return [part.strip() for part in value.split(",") if part.strip()]


# -- reading ------------------------------------------------------------------

def _read_frame(path, required: Sequence[str], optional: Sequence[str], ignored: Sequence[str] = ()) -> pd.DataFrame:
    """
    Read a CSV as strings and rename its header to canonical column names.

    Raises:
        SchemaMismatch: Required columns missing or unknown columns present
    """
    path = Path(path)
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    canonical = {name.lower(): name for name in (*required, *optional, *ignored)}
    seen = {str(col).strip().lower(): col for col in frame.columns}

    missing = [name for name in required if name.lower() not in seen]
    extra = [seen[key] for key in seen if key not in canonical]
    if missing or extra:
        raise SchemaMismatch(
            f"{path.name} header does not match the expected columns",
            {"file": str(path), "missing": missing, "extra": extra},
        )
    frame = frame.rename(columns={original: canonical[key] for key, original in seen.items()})
    return frame.drop(columns=[c for c in ignored if c in frame.columns])


def _collect(
    frame: pd.DataFrame,
    source: str,
    build: Callable[[Dict[str, str]], T],
    rejects: Optional[List[Reject]],
) -> List[T]:
    records: List[T] = []
    for offset, row in enumerate(frame.to_dict(orient="records")):
        line = offset + 2  # header is line 1
        try:
            records.append(build(row))
        except (ValueError, KeyError, ContractViolation) as exc:
            reject = Reject(source, line, str(exc))
            if rejects is None:
                logger.warning("Rejected %s row %d: %s", source, line, reject.reason)
            else:
                rejects.append(reject)
    return records


def _movie_from_row(row: Dict[str, str]) -> MovieRecord:
    year = parse_int(row["Release_Year"])
    month = parse_int(row["Release_Month"])
    day = parse_int(row["Release_Day"])
    date(year, month, day)
    return MovieRecord(
        title=row["Title"].strip(),
        director=row["Director"].strip(),
        writers=row["Writers"].strip(),
        gross_worldwide=parse_currency(row["Gross_Worldwide"]),
        opening_weekend=parse_currency(row["Opening_Weekend"]),
        budget=parse_currency(row["Budget"]),
        language=row["Language"].strip(),
        country=row["Country"].strip(),
        filming_locations=row["Filming_Locations"].strip(),
        production_companies=row["Production_Companies"].strip(),
        release_day=day,
        release_month=month,
        release_year=year,
        runtime=parse_optional_float(row["Runtime"]),
        imdb_rating=parse_optional_float(row.get("IMDb_Rating", "")),
    )


def load_movies(path, rejects: Optional[List[Reject]] = None) -> List[MovieRecord]:
    """
    Load movies.csv.

    Column names match case-insensitively. Currency cells may carry "$" and
    thousands separators; "N/A" and empty cells become absent values.
    A repeated title is rejected after its first occurrence.

    Args:
        path: CSV file
        rejects: List receiving malformed rows; logged when omitted

    Raises:
        SchemaMismatch: Header lacks a required column or has unknown ones
    """
    frame = _read_frame(path, MOVIE_COLUMNS, MOVIE_OPTIONAL, MOVIE_DERIVED)
    source = Path(path).name
    titles = set()

    def build(row: Dict[str, str]) -> MovieRecord:
        record = _movie_from_row(row)
        if record.title in titles:
            raise ValueError(f"duplicate title {record.title!r}")
        titles.add(record.title)
        return record

    movies = _collect(frame, source, build, rejects)
    logger.info("Loaded %d movies from %s", len(movies), source)
    return movies


def load_reviews(path, salt: Optional[str] = None, rejects: Optional[List[Reject]] = None) -> List[ReviewRecord]:
    """
    Load reviews.csv.

    Args:
        path: CSV file
        salt: Anonymization key; authors are kept verbatim when None
        rejects: List receiving malformed rows; logged when omitted

    Raises:
        SchemaMismatch: Header lacks a required column or has unknown ones
    """
    frame = _read_frame(path, REVIEW_COLUMNS, REVIEW_OPTIONAL)
    source = Path(path).name

    def build(row: Dict[str, str]) -> ReviewRecord:
        author = row["Review_Author"].strip()
        if not author:
            raise ValueError("review author is empty")
        return ReviewRecord(
            movie_key=row["Title"].strip(),
            review_author=anonymize_author(author, salt) if salt is not None else author,
            review_date=parse_timestamp(row["Review_Date"]),
            title=row["Review_Title"],
            body=row["Review_Body"],
            upvotes=parse_optional_int(row["Upvotes"]) or 0,
            total_votes=parse_optional_int(row["Total_Votes"]) or 0,
            rating=parse_optional_int(row.get("Rating", "")),
            sentiment_score=parse_optional_float(row.get("Sentiment_Score", "")),
            emotion_keywords=parse_keywords(row.get("Emotion_Keywords", "")),
        )

    reviews = _collect(frame, source, build, rejects)
    logger.info("Loaded %d reviews from %s", len(reviews), source)
    return reviews


# -- writing ------------------------------------------------------------------

def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, list):
        return ", ".join(value)
    return str(value)


def _write(path, columns: Sequence[str], rows: List[List[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([[_cell(v) for v in row] for row in rows], columns=list(columns), dtype=str)
    frame.to_csv(path, index=False, encoding="utf-8")
    return path


def write_movies(path, movies: Sequence[MovieRecord]) -> Path:
    columns = MOVIE_COLUMNS + MOVIE_OPTIONAL
    rows = [
        [
            m.title, m.director, m.writers, m.gross_worldwide, m.opening_weekend, m.budget,
            m.language, m.country, m.filming_locations, m.production_companies,
            m.release_day, m.release_month, m.release_year, m.runtime, m.imdb_rating,
        ]
        for m in movies
    ]
    return _write(path, columns, rows)


def write_reviews(path, reviews: Sequence[ReviewRecord]) -> Path:
    columns = REVIEW_COLUMNS + REVIEW_OPTIONAL
    rows = [
        [
            r.movie_key, r.review_author, r.review_date, r.title, r.body, r.upvotes, r.total_votes,
            r.rating, r.sentiment_score, r.emotion_keywords,
        ]
        for r in reviews
    ]
    return _write(path, columns, rows)


def write_rejects(path, rejects: Sequence[Reject]) -> Path:
    return _write(path, ("file", "row", "reason"), [[r.file, r.row, r.reason] for r in rejects])
