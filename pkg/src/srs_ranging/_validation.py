"""Input checks for complex subcarrier data (sklearn's ``check_array`` rejects complex)."""

import numbers

import numpy as np


def check_symbols(X, *, n_features=None, name="X"):
    """Return ``X`` as a 2-D complex array of shape ``(n_obs, n_subcarriers)``.

    1-D input is treated as a single observation. Objects exposing
    ``elements`` (received or transmitted grids) are transposed so that
    symbols become rows.
    """
    if hasattr(X, "elements"):
        X = np.asarray(X.elements).T
    X = np.asarray(X)
    if X.dtype.kind not in "biufc":
        raise TypeError(f"{name} must be numeric, got dtype {X.dtype}")
    X = X.astype(complex, copy=False)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got {X.ndim}-D")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError(f"{name} is empty (shape {X.shape})")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or infinity")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"{name} has {X.shape[1]} subcarriers, estimator was fitted with {n_features}")
    return X


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not value > 0:
        raise ValueError(f"{name} must be a positive number, got {value!r}")
    return value
