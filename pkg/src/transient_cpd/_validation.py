"""Input validation helpers shared by the estimators and numerical routines."""

import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import ConfigurationError


def check_stream(X, *, name="X", allow_empty=False):
    """Return observations as a contiguous 1-D float array.

    Accepts a 1-D sequence or a single-column 2-D array, the two layouts a
    univariate stream takes in the sklearn ecosystem.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ConfigurationError(
                f"{name} must be univariate; got shape {arr.shape}"
            )
        arr = arr[:, 0]
    elif arr.ndim == 0:
        arr = arr.reshape(1)
    elif arr.ndim != 1:
        raise ConfigurationError(f"{name} must be 1-D; got ndim={arr.ndim}")
    if arr.size == 0:
        if allow_empty:
            return arr
        raise ConfigurationError(f"{name} is empty")
    arr = check_array(
        arr.reshape(-1, 1), ensure_all_finite=True, input_name=name
    )[:, 0]
    return np.ascontiguousarray(arr)


def check_positive(value, name, *, strict=True, integer=False):
    if integer:
        if not isinstance(value, numbers.Integral) or isinstance(value, bool):
            raise ConfigurationError(f"{name} must be an integer; got {value!r}")
    elif not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ConfigurationError(f"{name} must be a real number; got {value!r}")
    if not np.isfinite(value):
        raise ConfigurationError(f"{name} must be finite; got {value!r}")
    if (strict and value <= 0) or (not strict and value < 0):
        bound = "> 0" if strict else ">= 0"
        raise ConfigurationError(f"{name} must be {bound}; got {value!r}")
    return value


def check_real(value, name):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ConfigurationError(f"{name} must be a real number; got {value!r}")
    if not np.isfinite(value):
        raise ConfigurationError(f"{name} must be finite; got {value!r}")
    return float(value)


def check_probability(value, name, *, open_interval=False):
    check_real(value, name)
    if open_interval:
        if not 0.0 < value < 1.0:
            raise ConfigurationError(f"{name} must lie in (0, 1); got {value!r}")
    elif not 0.0 <= value <= 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1]; got {value!r}")
    return float(value)
