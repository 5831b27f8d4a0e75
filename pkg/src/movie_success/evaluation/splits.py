"""
Stratified train/test splits and k-fold assignment.
"""

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from ..errors import ContractViolation, EmptyDataset, InsufficientClassMembers


@dataclass(frozen=True)
class SplitPlan:
    """
    Row indices of a split.

    For a hold-out split ``train`` and ``test`` partition the rows and
    ``folds`` is None. For k-fold plans ``folds[i]`` is the fold of row i,
    ``train`` holds every row and ``test`` is empty.
    """
    train: np.ndarray
    test: np.ndarray
    seed: int
    folds: Optional[np.ndarray] = None

    @property
    def n_folds(self) -> int:
        return 0 if self.folds is None else int(self.folds.max()) + 1

    def fold(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """(train, test) indices with fold ``k`` held out."""
        if self.folds is None:
            raise ContractViolation("plan has no folds")
        if not (0 <= k < self.n_folds):
            raise ContractViolation(f"fold {k} out of range", {"n_folds": self.n_folds})
        return np.flatnonzero(self.folds != k), np.flatnonzero(self.folds == k)

    def iter_folds(self) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
        for k in range(self.n_folds):
            train, test = self.fold(k)
            yield k, train, test


def _class_members(labels) -> Tuple[np.ndarray, list]:
    labels = np.asarray(labels).reshape(-1)
    if labels.size == 0:
        raise EmptyDataset("cannot split zero rows")
    classes = np.unique(labels)
    return labels, [np.flatnonzero(labels == c) for c in classes]


def stratified_split(labels, ratio: float = 0.8, seed: int = 0) -> SplitPlan:
    """
    Per-class shuffled split keeping class proportions.

    Each class contributes round(ratio * size) rows to training, kept
    between 1 and size - 1 when the class has at least two members.

    Args:
        labels: Class label of every row
        ratio: Training share, in (0, 1)
        seed: Shuffle seed

    Returns:
        SplitPlan with sorted train and test indices
    """
    if not (0.0 < ratio < 1.0):
        raise ContractViolation(f"split ratio must be in (0, 1), got {ratio}")
    _, members = _class_members(labels)
    rng = np.random.default_rng(seed)

    train, test = [], []
    for idx in members:
        shuffled = rng.permutation(idx)
        n_train = int(math.floor(ratio * idx.size + 0.5))
        if idx.size >= 2:
            n_train = min(max(n_train, 1), idx.size - 1)
        train.append(shuffled[:n_train])
        test.append(shuffled[n_train:])
    return SplitPlan(
        train=np.sort(np.concatenate(train)),
        test=np.sort(np.concatenate(test)),
        seed=seed,
    )


def stratified_kfold(labels, k: int = 10, seed: int = 0) -> SplitPlan:
    """
    Assign rows to ``k`` folds by per-class shuffling then round-robin.

    Each class continues the round-robin where the previous class stopped,
    so fold sizes differ by at most one.

    Raises:
        InsufficientClassMembers: If a class has fewer than ``k`` members
    """
    if k < 2:
        raise ContractViolation(f"k-fold needs k >= 2, got {k}")
    labels, members = _class_members(labels)
    if any(idx.size < k for idx in members):
        raise InsufficientClassMembers(
            f"every class needs at least {k} members for {k}-fold splitting",
            {"k": k, "class_sizes": sorted(int(idx.size) for idx in members)},
        )
    rng = np.random.default_rng(seed)
    folds = np.empty(labels.size, dtype=int)
    offset = 0
    for idx in members:
        shuffled = rng.permutation(idx)
        folds[shuffled] = (offset + np.arange(shuffled.size)) % k
        offset += shuffled.size
    return SplitPlan(
        train=np.arange(labels.size),
        test=np.empty(0, dtype=int),
        seed=seed,
        folds=folds,
    )
