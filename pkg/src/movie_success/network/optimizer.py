"""
Adam optimizer over named tensors.
"""

from typing import Dict

import numpy as np

from .params import NetworkParams


class Adam:
    """
    Adam with bias-corrected moments.

    Updates are applied in place, tensor by tensor in the parameters' fixed
    order, so two runs with the same gradients are bit-identical.

    Example:
        optimizer = Adam(learning_rate=1e-3)
        optimizer.step(params, grads)
    """

    def __init__(self, learning_rate: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: Dict[str, np.ndarray] = {}
        self._v: Dict[str, np.ndarray] = {}

    def step(self, params: NetworkParams, grads: NetworkParams):
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for name, value in params.items():
            g = grads[name]
            m = self._m.get(name)
            if m is None:
                m = self._m[name] = np.zeros_like(value)
                self._v[name] = np.zeros_like(value)
            v = self._v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            value -= self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.eps)

    def __repr__(self) -> str:
        return f"Adam(lr={self.learning_rate}, steps={self.t})"
