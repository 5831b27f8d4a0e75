"""
Versioned JSON checkpoints with hex-encoded little-endian float64 tensors.
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..config import NetworkConfig
from ..errors import CorruptCheckpoint, VersionMismatch
from .params import NetworkParams

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "movie-success-checkpoint"
CHECKPOINT_VERSION = 1
DTYPE = "<f8"


@dataclass
class Checkpoint:
    params: NetworkParams
    config: NetworkConfig
    feature_names: Tuple[str, ...] = ()
    metadata: Optional[Dict[str, Any]] = None


def _encode(array: np.ndarray) -> str:
    return np.ascontiguousarray(array, dtype=DTYPE).tobytes().hex()


def _decode(text: str, shape: Sequence[int]) -> np.ndarray:
    data = np.frombuffer(bytes.fromhex(text), dtype=DTYPE)
    return data.reshape(tuple(shape)).astype(np.float64)


def _checksum(body: Dict[str, Any]) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_checkpoint(
    params: NetworkParams,
    config: NetworkConfig,
    path,
    feature_names: Sequence[str] = (),
    metadata: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Write parameters and their config as a checksummed JSON envelope.

    Args:
        params: Network parameters
        config: Hyperparameters the network was trained with
        path: Output file
        feature_names: Input column names, in order
        metadata: Extra JSON-serializable provenance

    Returns:
        The written path
    """
    body = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "input_width": params.input_width,
        "feature_names": list(feature_names),
        "config": config.to_dict(),
        "metadata": metadata or {},
        "tensors": [
            {"name": name, "shape": list(tensor.shape), "data": _encode(tensor)}
            for name, tensor in params.items()
        ],
    }
    envelope = {**body, "checksum": _checksum(body)}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(envelope, indent=1) + "\n", encoding="utf-8")
    logger.debug("Checkpoint with %d parameters written to %s", params.count(), path)
    return path


def load_checkpoint(path, expected_width: Optional[int] = None) -> Checkpoint:
    """
    Read a checkpoint written by ``save_checkpoint``; parameters come back
    bit-identical.

    Args:
        path: Checkpoint file
        expected_width: Input width the caller will feed, if known

    Raises:
        CorruptCheckpoint: Unreadable, truncated or failing its checksum
        VersionMismatch: Unknown format version or a different input width
    """
    path = Path(path)
    try:
        envelope = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptCheckpoint(f"cannot read checkpoint: {exc}", {"path": str(path)}) from exc
    if not isinstance(envelope, dict) or envelope.get("format") != CHECKPOINT_FORMAT:
        raise CorruptCheckpoint("not a movie-success checkpoint", {"path": str(path)})

    version = envelope.get("version")
    if version != CHECKPOINT_VERSION:
        raise VersionMismatch(
            "unsupported checkpoint version", {"found": version, "supported": CHECKPOINT_VERSION}
        )

    stored = envelope.pop("checksum", None)
    if stored != _checksum(envelope):
        raise CorruptCheckpoint("checkpoint checksum mismatch", {"path": str(path)})

    try:
        tensors = {t["name"]: _decode(t["data"], t["shape"]) for t in envelope["tensors"]}
        params = NetworkParams(tensors)
        config = NetworkConfig.from_dict(envelope["config"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptCheckpoint(f"malformed checkpoint tensors: {exc}", {"path": str(path)}) from exc

    declared = envelope.get("input_width")
    if declared != params.input_width:
        raise CorruptCheckpoint(
            "declared input width disagrees with the tensors",
            {"declared": declared, "tensors": params.input_width},
        )
    if expected_width is not None and expected_width != declared:
        raise VersionMismatch(
            "checkpoint input width differs from the feature table",
            {"checkpoint": declared, "expected": expected_width},
        )
    return Checkpoint(
        params=params,
        config=config,
        feature_names=tuple(envelope.get("feature_names", ())),
        metadata=envelope.get("metadata") or {},
    )
