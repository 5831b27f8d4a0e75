"""
Mini-batch training with early stopping.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..config import NetworkConfig
from ..errors import EmptyDataset, NonFiniteLoss, ShapeMismatch
from .model import Batch, backward, forward, loss, loss_from_cache
from .optimizer import Adam
from .params import NetworkParams, init_params

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "train_clf", "train_reg", "val_clf", "val_reg", "u_c", "u_r"]


@dataclass(frozen=True)
class EpochRecord:
    """
    Losses of one epoch.

    ``train_*`` are size-weighted means of the raw task losses (BCE, MSE)
    over the epoch's dropout mini-batches; ``val_*`` are eval-mode losses on
    the validation set and ``val_total`` is the early-stopping criterion.
    """
    epoch: int
    train_clf: float
    train_reg: float
    val_clf: float
    val_reg: float
    val_total: float
    u_c: float
    u_r: float


@dataclass
class TrainReport:
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    stop_reason: str = ""

    @property
    def last_epoch(self) -> int:
        return self.history[-1].epoch if self.history else 0

    @property
    def best(self) -> Optional[EpochRecord]:
        for record in self.history:
            if record.epoch == self.best_epoch:
                return record
        return None

    @property
    def task_uncertainties(self) -> Dict[str, float]:
        """Learned task variances sigma^2 = exp(u) at the best epoch."""
        best = self.best
        if best is None:
            return {}
        return {"clf": math.exp(best.u_c), "reg": math.exp(best.u_r)}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.history], columns=HISTORY_COLUMNS)

    def to_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.10g")
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_epoch": self.best_epoch,
            "last_epoch": self.last_epoch,
            "stop_reason": self.stop_reason,
            "task_uncertainties": self.task_uncertainties,
        }


def train(
    train_set: Batch,
    val_set: Batch,
    config: NetworkConfig,
    progress: bool = False,
) -> Tuple[NetworkParams, TrainReport]:
    """
    Train the multi-task network with Adam and early stopping.

    Runs at most ``config.max_epochs`` epochs and stops once the validation
    total loss has not improved for ``config.patience`` epochs. The returned
    parameters are those of the best validation epoch. All randomness
    (initialization, shuffling, dropout) derives from ``config.seed``.

    Args:
        train_set: Training rows
        val_set: Validation rows, disjoint from ``train_set``
        config: Hyperparameters
        progress: Show a tqdm bar over epochs

    Returns:
        (best parameters, training report)

    Raises:
        EmptyDataset: If either set has no rows
        ShapeMismatch: If the sets differ in width
        NonFiniteLoss: If a loss becomes NaN or infinite
    """
    if len(train_set) == 0 or len(val_set) == 0:
        raise EmptyDataset("training and validation sets must be nonempty",
                           {"train": len(train_set), "validation": len(val_set)})
    if train_set.width != val_set.width:
        raise ShapeMismatch("training and validation widths differ",
                            {"train": train_set.width, "validation": val_set.width})

    init_seq, shuffle_seq, dropout_seq = np.random.SeedSequence(config.seed).spawn(3)
    params = init_params(train_set.width, config, np.random.default_rng(init_seq))
    shuffle_rng = np.random.default_rng(shuffle_seq)
    dropout_rng = np.random.default_rng(dropout_seq)
    optimizer = Adam(config.learning_rate)

    report = TrainReport()
    best_params = params.copy()
    best_loss = math.inf
    n = len(train_set)

    epochs = tqdm(range(1, config.max_epochs + 1), desc="Training", unit="epoch", disable=not progress)
    for epoch in epochs:
        order = shuffle_rng.permutation(n)
        bce_sum = mse_sum = 0.0
        for start in range(0, n, config.batch_size):
            batch = train_set.subset(order[start:start + config.batch_size])
            _, _, cache = forward(batch.x, params, "train", dropout_rng, config)
            try:
                parts = loss_from_cache(cache, batch, params, config)
            except NonFiniteLoss as exc:
                exc.details.update({"epoch": epoch, "batch_start": start})
                raise
            grads = backward(cache, batch, params, config)
            optimizer.step(params, grads)
            bce_sum += parts.bce * len(batch)
            mse_sum += parts.mse * len(batch)

        val_total, val_parts = loss(val_set, params, config)
        record = EpochRecord(
            epoch=epoch,
            train_clf=bce_sum / n,
            train_reg=mse_sum / n,
            val_clf=val_parts.bce,
            val_reg=val_parts.mse,
            val_total=val_total,
            u_c=params.log_var_clf,
            u_r=params.log_var_reg,
        )
        report.history.append(record)
        epochs.set_postfix(val=f"{val_total:.4f}")

        if val_total < best_loss:
            best_loss = val_total
            best_params = params.copy()
            report.best_epoch = epoch
        elif epoch - report.best_epoch >= config.patience:
            report.stop_reason = "early_stopping"
            break
    else:
        report.stop_reason = "max_epochs"

    logger.info(
        "Training stopped at epoch %d (%s); best epoch %d, validation loss %.5f",
        report.last_epoch, report.stop_reason, report.best_epoch, best_loss,
    )
    return best_params, report
