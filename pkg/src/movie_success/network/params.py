"""
Parameter container of the multi-task network.
"""

from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..config import NetworkConfig
from ..errors import ShapeMismatch

BRANCHES = ("shared", "clf", "reg")
LOG_VAR_CLF = "log_var_clf"
LOG_VAR_REG = "log_var_reg"


def tensor_name(branch: str, layer, kind: str) -> str:
    return f"{branch}.{layer}.{kind}"


class NetworkParams:
    """
    Ordered named tensors of the network.

    Layout, in order: ``shared.<k>.weight/bias`` for the trunk, then
    ``clf.<k>.*`` and ``clf.out.*`` for the classification head, then
    ``reg.<k>.*`` and ``reg.out.*`` for the regression head, then the two
    task log-variances as 1-element arrays. Weights are (fan_in, fan_out).
    """

    def __init__(self, tensors: Dict[str, np.ndarray]):
        self.tensors: Dict[str, np.ndarray] = dict(tensors)
        self.validate()

    # -- structure ------------------------------------------------------------

    def depth(self, branch: str) -> int:
        """Hidden layers in a branch (the output layer is not counted)."""
        k = 0
        while tensor_name(branch, k, "weight") in self.tensors:
            k += 1
        return k

    def weight(self, branch: str, layer) -> np.ndarray:
        return self.tensors[tensor_name(branch, layer, "weight")]

    def bias(self, branch: str, layer) -> np.ndarray:
        return self.tensors[tensor_name(branch, layer, "bias")]

    @property
    def input_width(self) -> int:
        return int(self.weight("shared", 0).shape[0])

    @property
    def log_var_clf(self) -> float:
        return float(self.tensors[LOG_VAR_CLF][0])

    @property
    def log_var_reg(self) -> float:
        return float(self.tensors[LOG_VAR_REG][0])

    def validate(self):
        """Check that layer shapes chain from the input to both heads."""
        if self.depth("shared") == 0:
            raise ShapeMismatch("network has no shared layer")
        width = self.input_width
        for k in range(self.depth("shared")):
            width = self._check_layer("shared", k, width)
        trunk = width
        for branch in ("clf", "reg"):
            width = trunk
            for k in range(self.depth(branch)):
                width = self._check_layer(branch, k, width)
            out = self._check_layer(branch, "out", width)
            if out != 1:
                raise ShapeMismatch(f"{branch} output layer must have one unit", {"units": out})
        for name in (LOG_VAR_CLF, LOG_VAR_REG):
            if name not in self.tensors or self.tensors[name].shape != (1,):
                raise ShapeMismatch(f"{name} must be a single value")

    def _check_layer(self, branch: str, layer, fan_in: int) -> int:
        try:
            w, b = self.weight(branch, layer), self.bias(branch, layer)
        except KeyError as exc:
            raise ShapeMismatch(f"missing tensor {exc.args[0]}") from exc
        if w.ndim != 2 or w.shape[0] != fan_in or b.shape != (w.shape[1],):
            raise ShapeMismatch(
                f"layer {branch}.{layer} does not chain",
                {"expected_fan_in": fan_in, "weight": list(w.shape), "bias": list(b.shape)},
            )
        return int(w.shape[1])

    # -- container ------------------------------------------------------------

    @property
    def names(self) -> List[str]:
        return list(self.tensors)

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        return iter(self.tensors.items())

    def weight_names(self) -> List[str]:
        """Tensors subject to L1/L2 regularization."""
        return [n for n in self.tensors if n.endswith(".weight")]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def __len__(self) -> int:
        return len(self.tensors)

    def count(self) -> int:
        """Total number of scalar parameters."""
        return int(sum(t.size for t in self.tensors.values()))

    def copy(self) -> "NetworkParams":
        return NetworkParams({n: t.copy() for n, t in self.tensors.items()})

    def zeros_like(self) -> "NetworkParams":
        return NetworkParams({n: np.zeros_like(t) for n, t in self.tensors.items()})

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(t)) for t in self.tensors.values())

    def identical_to(self, other: "NetworkParams") -> bool:
        """Bit-for-bit equality of names, shapes and values."""
        if self.names != other.names:
            return False
        return all(
            t.shape == other[n].shape and t.tobytes() == other[n].tobytes()
            for n, t in self.tensors.items()
        )

    def __repr__(self) -> str:
        return f"NetworkParams(input_width={self.input_width}, tensors={len(self)}, parameters={self.count()})"


def _layer_sizes(config: NetworkConfig) -> Dict[str, Tuple[int, ...]]:
    return {"shared": tuple(config.shared_sizes), "clf": tuple(config.clf_sizes), "reg": tuple(config.reg_sizes)}


def init_params(input_width: int, config: NetworkConfig, rng: Optional[np.random.Generator] = None) -> NetworkParams:
    """
    LeCun-normal weights (variance 1 / fan_in), zero biases, zero log-variances.

    Args:
        input_width: Number of input features
        config: Layer sizes
        rng: Random stream; seeded from ``config.seed`` when omitted
    """
    if input_width <= 0:
        raise ShapeMismatch("input width must be positive", {"input_width": input_width})
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    sizes = _layer_sizes(config)
    tensors: Dict[str, np.ndarray] = {}

    def dense(branch: str, layer, fan_in: int, fan_out: int):
        tensors[tensor_name(branch, layer, "weight")] = rng.normal(0.0, np.sqrt(1.0 / fan_in), (fan_in, fan_out))
        tensors[tensor_name(branch, layer, "bias")] = np.zeros(fan_out)

    width = input_width
    for k, units in enumerate(sizes["shared"]):
        dense("shared", k, width, units)
        width = units
    trunk = width
    for branch in ("clf", "reg"):
        width = trunk
        for k, units in enumerate(sizes[branch]):
            dense(branch, k, width, units)
            width = units
        dense(branch, "out", width, 1)
    tensors[LOG_VAR_CLF] = np.zeros(1)
    tensors[LOG_VAR_REG] = np.zeros(1)
    return NetworkParams(tensors)


def _dense_count(sizes: Tuple[int, ...], fan_in: int) -> Tuple[int, int]:
    total, width = 0, fan_in
    for units in sizes:
        total += width * units + units
        width = units
    return total, width


def count_parameters(input_width: int, config: NetworkConfig) -> int:
    """Parameters of the multi-task network, trunk counted once."""
    sizes = _layer_sizes(config)
    trunk, width = _dense_count(sizes["shared"], input_width)
    total = trunk + 2  # log-variances
    for branch in ("clf", "reg"):
        head, out_in = _dense_count(sizes[branch], width)
        total += head + out_in + 1
    return total


def single_task_parameter_count(input_width: int, config: NetworkConfig) -> int:
    """Parameters of two separate networks, each with its own copy of the trunk."""
    sizes = _layer_sizes(config)
    total = 0
    for branch in ("clf", "reg"):
        trunk, width = _dense_count(sizes["shared"], input_width)
        head, out_in = _dense_count(sizes[branch], width)
        total += trunk + head + out_in + 1
    return total
