"""
Resumable pipeline state.

``state.json`` records, for every completed stage, the content hash of each
input file and the outputs it wrote. A stage whose inputs hash the same and
whose outputs still exist is fresh and can be skipped.
"""

import hashlib
import json
import logging
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence

from ..errors import CorruptState, StateLocked

logger = logging.getLogger(__name__)

STATE_VERSION = 1
STATE_FILENAME = "state.json"
LOCK_SUFFIX = ".lock"
PIPELINE_STAGES = ("sentiment", "featurize", "train")
_CHUNK = 1 << 20


def file_hash(path) -> str:
    """SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(_CHUNK), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _checksum(body: Dict[str, Any]) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class StageRecord:
    """Completion marker of one stage."""
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"inputs": dict(sorted(self.inputs.items())), "outputs": list(self.outputs)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StageRecord":
        return cls(inputs={str(k): str(v) for k, v in data["inputs"].items()}, outputs=[str(p) for p in data["outputs"]])


@dataclass
class PipelineState:
    """
    Stage markers, input hashes and the seed registry of one output directory.

    Example:
        >>> state = PipelineState.load("output/state.json")
        >>> if not state.is_fresh("featurize", ["movies.csv", "reviews.csv"]):
        ...     ...  # run the stage
        ...     state.mark_complete("featurize", ["movies.csv", "reviews.csv"], ["features_train.csv"])
        ...     state.save()
    """
    path: Path
    stages: Dict[str, StageRecord] = field(default_factory=dict)
    seeds: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "PipelineState":
        """
        Read a state file; a missing file gives an empty state.

        Raises:
            CorruptState: Unparsable file, unknown version or checksum mismatch
        """
        path = Path(path)
        if not path.exists():
            return cls(path=path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            checksum = data.pop("checksum")
            version = data["version"]
        except (OSError, json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
            raise CorruptState(f"cannot read pipeline state: {exc}", {"path": str(path)}) from exc

        if version != STATE_VERSION:
            raise CorruptState("unsupported pipeline state version", {"path": str(path), "version": version})
        if _checksum(data) != checksum:
            raise CorruptState("pipeline state checksum mismatch", {"path": str(path)})
        try:
            stages = {name: StageRecord.from_dict(rec) for name, rec in data["stages"].items()}
            seeds = {str(k): int(v) for k, v in data.get("seeds", {}).items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise CorruptState(f"malformed pipeline state: {exc}", {"path": str(path)}) from exc
        return cls(path=path, stages=stages, seeds=seeds)

    def _body(self) -> Dict[str, Any]:
        return {
            "version": STATE_VERSION,
            "stages": {name: self.stages[name].to_dict() for name in sorted(self.stages)},
            "seeds": dict(sorted(self.seeds.items())),
        }

    def save(self) -> Path:
        """Write atomically through a temporary file in the same directory."""
        body = self._body()
        body["checksum"] = _checksum(self._body())
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=".state-", dir=self.path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(body, indent=2, sort_keys=True) + "\n")
            os.replace(tmp, self.path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return self.path

    def mark_complete(
        self,
        stage: str,
        inputs: Iterable,
        outputs: Iterable = (),
        seed: Optional[int] = None,
    ):
        """Record ``stage`` as done with the current hashes of ``inputs``."""
        self.stages[stage] = StageRecord(
            inputs={str(p): file_hash(p) for p in inputs},
            outputs=[str(p) for p in outputs],
        )
        if seed is not None:
            self.seeds[stage] = int(seed)
        logger.debug("Stage %s marked complete", stage)

    def is_fresh(self, stage: str, inputs: Optional[Sequence] = None) -> bool:
        """
        True when ``stage`` completed, its recorded inputs hash the same and
        its outputs exist. When ``inputs`` is given it must also match the
        recorded input set.
        """
        record = self.stages.get(stage)
        if record is None:
            return False
        if inputs is not None and {str(p) for p in inputs} != set(record.inputs):
            return False
        for name, digest in record.inputs.items():
            if not Path(name).exists() or file_hash(name) != digest:
                return False
        return all(Path(p).exists() for p in record.outputs)

    def stale_stages(self, stages: Iterable[str] = PIPELINE_STAGES) -> List[str]:
        """Stages among ``stages`` (and every recorded one) that must run again."""
        names = list(dict.fromkeys([*stages, *sorted(self.stages)]))
        return [name for name in names if not self.is_fresh(name)]

    @contextmanager
    def lock(self) -> Iterator["PipelineState"]:
        """
        Exclusive advisory lock held for the duration of the block.

        Raises:
            StateLocked: If another process holds the lock
        """
        lock_path = self.path.with_name(self.path.name + LOCK_SUFFIX)
        lock_path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as exc:
            raise StateLocked("pipeline state is locked", {"lock": str(lock_path)}) from exc
        try:
            os.write(fd, str(os.getpid()).encode("ascii"))
            os.close(fd)
            yield self
        finally:
            lock_path.unlink(missing_ok=True)
