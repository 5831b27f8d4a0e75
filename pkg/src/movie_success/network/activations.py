"""
Activation functions, dropout and the stable binary cross-entropy.
"""

from typing import Optional, Tuple

import numpy as np

SELU_ALPHA = 1.6732632423543772
SELU_SCALE = 1.0507009873554805

BCE_EPSILON = 1e-7
# Logit at which sigmoid reaches 1 - BCE_EPSILON.
LOGIT_CLIP = float(np.log((1.0 - BCE_EPSILON) / BCE_EPSILON))


def selu(x):
    """Scaled exponential linear unit."""
    x = np.asarray(x, dtype=float)
    out = SELU_SCALE * np.where(x > 0, x, SELU_ALPHA * np.expm1(np.minimum(x, 0.0)))
    return float(out) if out.ndim == 0 else out


def selu_grad(x: np.ndarray) -> np.ndarray:
    """Derivative of ``selu``; the left branch is used at x = 0."""
    return SELU_SCALE * np.where(x > 0, 1.0, SELU_ALPHA * np.exp(np.minimum(x, 0.0)))


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    ez = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))


def clip_logits(z: np.ndarray) -> np.ndarray:
    """Logits limited so that probabilities stay within (eps, 1 - eps)."""
    return np.clip(z, -LOGIT_CLIP, LOGIT_CLIP)


def bce_with_logits(z: np.ndarray, labels: np.ndarray) -> float:
    """
    Mean binary cross-entropy computed from clipped logits.

    Uses max(z, 0) - z*y + log(1 + exp(-|z|)), which never exponentiates a
    large positive number.
    """
    zc = clip_logits(z)
    losses = np.maximum(zc, 0.0) - zc * labels + np.log1p(np.exp(-np.abs(zc)))
    return float(np.mean(losses))


def bce_logit_grad(z: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Gradient of ``bce_with_logits`` w.r.t. each logit (already divided by n)."""
    inside = np.abs(z) < LOGIT_CLIP
    return np.where(inside, sigmoid(clip_logits(z)) - labels, 0.0) / z.shape[0]


def dropout(
    activations: np.ndarray,
    rate: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Inverted dropout: kept units are scaled by 1 / (1 - rate).

    Returns:
        The dropped activations and the scaled mask, or ``(activations, None)``
        when ``rate`` is 0
    """
    if rate <= 0.0:
        return activations, None
    mask = (rng.random(activations.shape) >= rate) / (1.0 - rate)
    return activations * mask, mask
