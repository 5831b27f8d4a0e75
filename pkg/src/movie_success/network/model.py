"""
Forward pass, uncertainty-weighted loss, reverse-mode gradients and
prediction for the multi-task network.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..config import NetworkConfig
from ..errors import ContractViolation, EmptyDataset, NonFiniteLoss, ShapeMismatch
from .activations import bce_logit_grad, bce_with_logits, dropout, selu, selu_grad, sigmoid
from .params import LOG_VAR_CLF, LOG_VAR_REG, NetworkParams, tensor_name

DECISION_THRESHOLD = 0.5


@dataclass(frozen=True)
class Batch:
    """Inputs with both targets; labels are 0/1, targets are scaled revenue."""
    x: np.ndarray
    labels: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if self.x.ndim != 2:
            raise ShapeMismatch("batch inputs must be a 2-D array", {"shape": list(self.x.shape)})
        if not (self.x.shape[0] == self.labels.shape[0] == self.targets.shape[0]):
            raise ShapeMismatch("batch inputs and targets differ in length")

    @classmethod
    def from_arrays(cls, x, labels, targets) -> "Batch":
        return cls(
            np.asarray(x, dtype=float),
            np.asarray(labels, dtype=float).reshape(-1),
            np.asarray(targets, dtype=float).reshape(-1),
        )

    def __len__(self) -> int:
        return int(self.x.shape[0])

    @property
    def width(self) -> int:
        return int(self.x.shape[1])

    def subset(self, indices) -> "Batch":
        indices = np.asarray(indices, dtype=int)
        return Batch(self.x[indices], self.labels[indices], self.targets[indices])


@dataclass
class LayerCache:
    name: Tuple[str, Any]
    inputs: np.ndarray
    pre_activation: np.ndarray
    mask: Optional[np.ndarray] = None


@dataclass
class ForwardCache:
    """Everything ``backward`` needs from a forward pass."""
    x: np.ndarray
    shared: List[LayerCache] = field(default_factory=list)
    clf: List[LayerCache] = field(default_factory=list)
    reg: List[LayerCache] = field(default_factory=list)
    clf_head_input: Optional[np.ndarray] = None
    reg_head_input: Optional[np.ndarray] = None
    logits: Optional[np.ndarray] = None
    regression: Optional[np.ndarray] = None


@dataclass(frozen=True)
class LossBreakdown:
    """
    Components of the composite loss.

    ``clf`` and ``reg`` are the uncertainty-weighted task losses
    exp(-u) * raw + u, before the fixed task weights.
    """
    bce: float
    mse: float
    clf: float
    reg: float
    penalty: float
    total: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "bce": self.bce,
            "mse": self.mse,
            "clf": self.clf,
            "reg": self.reg,
            "penalty": self.penalty,
            "total": self.total,
        }


@dataclass(frozen=True)
class Prediction:
    probability: np.ndarray
    decision: np.ndarray
    revenue_scaled: np.ndarray


def _check_width(x: np.ndarray, params: NetworkParams) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != params.input_width:
        raise ShapeMismatch(
            "input width does not match the network",
            {"expected": params.input_width, "got": int(x.shape[-1])},
        )
    return x


def _hidden_stack(
    h: np.ndarray,
    branch: str,
    params: NetworkParams,
    rate: float,
    rng: Optional[np.random.Generator],
    caches: List[LayerCache],
) -> np.ndarray:
    for k in range(params.depth(branch)):
        z = h @ params.weight(branch, k) + params.bias(branch, k)
        a = selu(z)
        mask = None
        if rng is not None:
            a, mask = dropout(a, rate, rng)
        caches.append(LayerCache((branch, k), h, z, mask))
        h = a
    return h


def forward(
    x,
    params: NetworkParams,
    mode: str = "eval",
    rng: Optional[np.random.Generator] = None,
    config: Optional[NetworkConfig] = None,
) -> Tuple[np.ndarray, np.ndarray, ForwardCache]:
    """
    Run the network.

    Args:
        x: Inputs of shape (n, width) or a single row
        params: Network parameters
        mode: "train" applies dropout, "eval" does not
        rng: Dropout stream, required in train mode
        config: Dropout rates, required in train mode

    Returns:
        (success probabilities, scaled revenue predictions, cache)

    Raises:
        ShapeMismatch: If the input width differs from the network's
    """
    if mode not in ("train", "eval"):
        raise ContractViolation(f"mode must be train or eval, got {mode!r}")
    x = _check_width(x, params)
    train = mode == "train"
    if train and (rng is None or config is None):
        raise ContractViolation("train mode needs a random stream and a config")
    stream = rng if train else None
    rates = (
        (config.dropout_shared, config.dropout_clf, config.dropout_reg) if train else (0.0, 0.0, 0.0)
    )

    cache = ForwardCache(x=x)
    trunk = _hidden_stack(x, "shared", params, rates[0], stream, cache.shared)
    clf_h = _hidden_stack(trunk, "clf", params, rates[1], stream, cache.clf)
    reg_h = _hidden_stack(trunk, "reg", params, rates[2], stream, cache.reg)

    cache.clf_head_input = clf_h
    cache.reg_head_input = reg_h
    cache.logits = (clf_h @ params.weight("clf", "out") + params.bias("clf", "out")).reshape(-1)
    cache.regression = (reg_h @ params.weight("reg", "out") + params.bias("reg", "out")).reshape(-1)
    return sigmoid(cache.logits), cache.regression, cache


def _precision(log_var: float) -> float:
    """e^-u, inf instead of OverflowError for a runaway log-variance."""
    with np.errstate(over="ignore"):
        return float(np.exp(-log_var))


def _penalty(params: NetworkParams, config: NetworkConfig) -> float:
    weights = [params[n] for n in params.weight_names()]
    l1 = math.fsum(float(np.sum(np.abs(w))) for w in weights)
    l2 = math.fsum(float(np.sum(w * w)) for w in weights)
    return config.l1 * l1 + config.l2 * l2


def loss_from_cache(cache: ForwardCache, batch: Batch, params: NetworkParams, config: NetworkConfig) -> LossBreakdown:
    """Composite loss of an existing forward pass."""
    if len(batch) == 0:
        raise EmptyDataset("loss of an empty batch")
    bce = bce_with_logits(cache.logits, batch.labels)
    mse = float(np.mean((cache.regression - batch.targets) ** 2))
    u_c, u_r = params.log_var_clf, params.log_var_reg
    clf = _precision(u_c) * bce + u_c
    reg = _precision(u_r) * mse + u_r
    penalty = _penalty(params, config)
    total = config.alpha_clf * clf + config.alpha_reg * reg + penalty
    if not math.isfinite(total):
        raise NonFiniteLoss(
            "loss is not finite",
            {"bce": bce, "mse": mse, "log_var_clf": u_c, "log_var_reg": u_r, "penalty": penalty},
        )
    return LossBreakdown(bce=bce, mse=mse, clf=clf, reg=reg, penalty=penalty, total=total)


def loss(
    batch: Batch,
    params: NetworkParams,
    config: NetworkConfig,
    mode: str = "eval",
    rng: Optional[np.random.Generator] = None,
) -> Tuple[float, LossBreakdown]:
    """
    Total loss alpha_c * (e^-u_c BCE + u_c) + alpha_r * (e^-u_r MSE + u_r)
    + l1 * sum|W| + l2 * sum W^2, regularizing weight matrices only.

    Raises:
        NonFiniteLoss: If any component is NaN or infinite
    """
    _, _, cache = forward(batch.x, params, mode, rng, config)
    parts = loss_from_cache(cache, batch, params, config)
    return parts.total, parts


def _backprop_stack(
    grad: np.ndarray,
    caches: List[LayerCache],
    params: NetworkParams,
    grads: Dict[str, np.ndarray],
) -> np.ndarray:
    for layer in reversed(caches):
        branch, k = layer.name
        if layer.mask is not None:
            grad = grad * layer.mask
        dz = grad * selu_grad(layer.pre_activation)
        grads[tensor_name(branch, k, "weight")] = layer.inputs.T @ dz
        grads[tensor_name(branch, k, "bias")] = dz.sum(axis=0)
        grad = dz @ params.weight(branch, k).T
    return grad


def backward(cache: ForwardCache, batch: Batch, params: NetworkParams, config: NetworkConfig) -> NetworkParams:
    """
    Exact gradient of the total loss for every tensor, log-variances included.

    The L1 subgradient at 0 is 0.

    Raises:
        ShapeMismatch: If the cache does not come from this batch
    """
    n = len(batch)
    if cache.x.shape[0] != n or cache.logits is None:
        raise ShapeMismatch("forward cache does not match the batch", {"cache_rows": int(cache.x.shape[0]), "batch": n})

    u_c, u_r = params.log_var_clf, params.log_var_reg
    w_c = config.alpha_clf * _precision(u_c)
    w_r = config.alpha_reg * _precision(u_r)

    grads: Dict[str, np.ndarray] = {}
    d_logits = (w_c * bce_logit_grad(cache.logits, batch.labels)).reshape(-1, 1)
    d_reg = (w_r * 2.0 * (cache.regression - batch.targets) / n).reshape(-1, 1)

    grads[tensor_name("clf", "out", "weight")] = cache.clf_head_input.T @ d_logits
    grads[tensor_name("clf", "out", "bias")] = d_logits.sum(axis=0)
    grads[tensor_name("reg", "out", "weight")] = cache.reg_head_input.T @ d_reg
    grads[tensor_name("reg", "out", "bias")] = d_reg.sum(axis=0)

    d_clf = _backprop_stack(d_logits @ params.weight("clf", "out").T, cache.clf, params, grads)
    d_reg_h = _backprop_stack(d_reg @ params.weight("reg", "out").T, cache.reg, params, grads)
    _backprop_stack(d_clf + d_reg_h, cache.shared, params, grads)

    bce = bce_with_logits(cache.logits, batch.labels)
    mse = float(np.mean((cache.regression - batch.targets) ** 2))
    grads[LOG_VAR_CLF] = np.array([config.alpha_clf * (1.0 - _precision(u_c) * bce)])
    grads[LOG_VAR_REG] = np.array([config.alpha_reg * (1.0 - _precision(u_r) * mse)])

    for name in params.weight_names():
        w = params[name]
        grads[name] = grads[name] + config.l1 * np.sign(w) + 2.0 * config.l2 * w

    return NetworkParams({name: grads[name] for name in params.names})


def predict(x, params: NetworkParams, threshold: float = DECISION_THRESHOLD) -> Prediction:
    """Eval-mode outputs; a film is predicted successful when p >= threshold."""
    probability, revenue, _ = forward(x, params, mode="eval")
    return Prediction(
        probability=probability,
        decision=(probability >= threshold).astype(int),
        revenue_scaled=revenue,
    )
