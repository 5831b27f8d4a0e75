"""
Yeo-Johnson power transform with maximum-likelihood exponent.
"""

import logging
import math
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import ContractViolation, DegenerateColumn
from ..models import TransformParams

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

LAMBDA_BOUNDS = (-5.0, 5.0)
LAMBDA_TOLERANCE = 1e-5
MIN_FIT_SIZE = 10

_EPS = np.spacing(1.0)


def yeo_johnson(x: ArrayLike, lmbda: float) -> ArrayLike:
    """
    Yeo-Johnson transform of a scalar or array.

    Uses the expm1/log1p forms so the result is continuous in lambda at the
    special values 0 and 2.
    """
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(arr)
    pos = arr >= 0

    if abs(lmbda) < _EPS:
        out[pos] = np.log1p(arr[pos])
    else:
        out[pos] = np.expm1(lmbda * np.log1p(arr[pos])) / lmbda

    if abs(lmbda - 2.0) < _EPS:
        out[~pos] = -np.log1p(-arr[~pos])
    else:
        out[~pos] = -np.expm1((2.0 - lmbda) * np.log1p(-arr[~pos])) / (2.0 - lmbda)

    return float(out[0]) if np.ndim(x) == 0 else out


def yeo_johnson_inverse(y: ArrayLike, lmbda: float) -> ArrayLike:
    """Analytic inverse of :func:`yeo_johnson` (the transform keeps the sign of x)."""
    arr = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(arr)
    pos = arr >= 0

    if abs(lmbda) < _EPS:
        out[pos] = np.expm1(arr[pos])
    else:
        out[pos] = np.expm1(np.log1p(lmbda * arr[pos]) / lmbda)

    if abs(lmbda - 2.0) < _EPS:
        out[~pos] = -np.expm1(-arr[~pos])
    else:
        out[~pos] = -np.expm1(np.log1p((lmbda - 2.0) * arr[~pos]) / (2.0 - lmbda))

    return float(out[0]) if np.ndim(y) == 0 else out


def yeo_johnson_llf(lmbda: float, data: np.ndarray) -> float:
    """
    Profile log-likelihood of lambda under a Gaussian model of the
    transformed data, Jacobian term included.
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):
        transformed = yeo_johnson(data, lmbda)
        variance = np.var(transformed)
    if not np.isfinite(variance) or variance <= 0:
        return -math.inf
    jacobian = np.sum(np.sign(data) * np.log1p(np.abs(data)))
    return float(-n / 2.0 * np.log(variance) + (lmbda - 1.0) * jacobian)


def fit_yeo_johnson(column, name: str = "") -> TransformParams:
    """
    Maximum-likelihood Yeo-Johnson exponent of a column.

    Args:
        column: At least 10 finite values
        name: Column name recorded in the result

    Returns:
        TransformParams with lambda in [-5, 5]

    Raises:
        ContractViolation: Fewer than 10 values or non-finite input
        DegenerateColumn: Constant column
    """
    data = np.asarray(column, dtype=float).ravel()
    if data.shape[0] < MIN_FIT_SIZE:
        raise ContractViolation(
            f"need at least {MIN_FIT_SIZE} values to fit Yeo-Johnson", {"column": name, "n": int(data.shape[0])}
        )
    if not np.all(np.isfinite(data)):
        raise ContractViolation("Yeo-Johnson fit needs finite values", {"column": name})
    if np.ptp(data) == 0:
        raise DegenerateColumn("cannot fit Yeo-Johnson on a constant column", {"column": name})

    # Bounded Brent: golden-section steps with parabolic interpolation.
    result = minimize_scalar(
        lambda lm: -yeo_johnson_llf(lm, data),
        bounds=LAMBDA_BOUNDS,
        method="bounded",
        options={"xatol": LAMBDA_TOLERANCE},
    )
    lmbda = float(result.x)
    logger.debug("Yeo-Johnson lambda for %s: %.5f", name or "<column>", lmbda)
    return TransformParams(lambda_yj=lmbda, fitted_on=name)
