"""
Multi-task feedforward network in numpy.

A shared SELU trunk feeds a sigmoid classification head (success) and a
linear regression head (scaled opening-weekend revenue). The two task losses
are balanced by learned log-variances and trained with Adam.
"""

from .activations import SELU_ALPHA, SELU_SCALE, dropout, selu, sigmoid
from .params import NetworkParams, count_parameters, init_params, single_task_parameter_count
from .model import Batch, ForwardCache, LossBreakdown, Prediction, backward, forward, loss, predict
from .optimizer import Adam
from .trainer import EpochRecord, TrainReport, train
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint

__all__ = [
    "SELU_ALPHA",
    "SELU_SCALE",
    "dropout",
    "selu",
    "sigmoid",
    "NetworkParams",
    "count_parameters",
    "init_params",
    "single_task_parameter_count",
    "Batch",
    "ForwardCache",
    "LossBreakdown",
    "Prediction",
    "backward",
    "forward",
    "loss",
    "predict",
    "Adam",
    "EpochRecord",
    "TrainReport",
    "train",
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
]
