"""
JSON-lines persistence of per-review sentiment.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable

from ..errors import CorruptState
from ..models import SentimentVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StoredSentiment:
    """One line of the sentiment file."""
    review_id: str
    movie: str
    timestamp: str
    vector: SentimentVector

    def to_dict(self) -> Dict:
        return {
            "review_id": self.review_id,
            "movie": self.movie,
            "timestamp": self.timestamp,
            **self.vector.to_dict(),
        }


def write_sentiments(path: Path, records: Iterable[StoredSentiment]) -> Path:
    """Write one JSON object per line, in the order given."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
            count += 1
    logger.info("Wrote %d sentiment records to %s", count, path)
    return path


def read_sentiments(path: Path) -> Dict[str, StoredSentiment]:
    """
    Load a sentiment file keyed by review_id.

    Raises:
        CorruptState: On an unparsable line
    """
    path = Path(path)
    records: Dict[str, StoredSentiment] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                record = StoredSentiment(
                    review_id=data["review_id"],
                    movie=data.get("movie", ""),
                    timestamp=data.get("timestamp", ""),
                    vector=SentimentVector.from_dict(data),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorruptState(
                    f"bad sentiment record at line {lineno}", {"path": str(path), "line": lineno}
                ) from exc
            records[record.review_id] = record
    return records
