"""scikit-learn compatible wrapper around the ranging pipeline."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import range_estimator as re_
from ._validation import check_positive, check_symbols
from .exceptions import ShapeError, UnresolvedPeaksError
from .nr_config import SPEED_OF_LIGHT


class SrsRangeEstimator(TransformerMixin, BaseEstimator):
    """Two-path range estimator over demodulated SRS subcarriers.

    ``fit`` stores the transmitted symbols ``a[k]`` of one SRS symbol (zero
    where unoccupied). ``transform`` maps received symbols ``X[k]`` to
    range-profile powers and ``predict`` to range estimates.

    Parameters
    ----------
    delta_f : float
        Subcarrier spacing in Hz.
    n_fft : int
        Coarse profile length; the CZT zoom uses the same number of points.
    mode : {"differential_cable", "differential_radar", "absolute"}
        How refined delays are turned into a range.
    velocity : float
        Propagation speed for ``differential_cable`` in m/s.
    prominence_db : float
        Peaks must exceed the median profile power by this much.
    min_separation_bins : float or None
        Minimum peak spacing; ``None`` uses half the main-lobe width.

    Examples
    --------
    >>> est = SrsRangeEstimator().fit(tx_symbols)          # doctest: +SKIP
    >>> est.predict(rx_symbols)                             # doctest: +SKIP
    """

    def __init__(self, delta_f=120e3, n_fft=re_.DEFAULT_N_FFT, mode=re_.DIFFERENTIAL_CABLE,
                 velocity=re_.DEFAULT_VELOCITY_FACTOR * SPEED_OF_LIGHT,
                 prominence_db=re_.DEFAULT_PROMINENCE_DB, min_separation_bins=None):
        self.delta_f = delta_f
        self.n_fft = n_fft
        self.mode = mode
        self.velocity = velocity
        self.prominence_db = prominence_db
        self.min_separation_bins = min_separation_bins

    def _check_params(self):
        check_positive(self.delta_f, "delta_f")
        check_positive(self.velocity, "velocity")
        if self.mode not in re_.MODES:
            raise ValueError(f"mode must be one of {re_.MODES}, got {self.mode!r}")
        if int(self.n_fft) != self.n_fft or self.n_fft < 4:
            raise ValueError(f"n_fft must be an integer >= 4, got {self.n_fft!r}")

    def fit(self, X, y=None):
        """Store the transmitted symbols of one occupied OFDM symbol.

        ``X`` is a 1-D vector of subcarrier symbols, a single-row 2-D array,
        or a resource grid (its first occupied symbol is used).
        """
        self._check_params()
        A = check_symbols(X, name="transmitted symbols")
        occupied_rows = np.flatnonzero(np.any(A != 0, axis=1))
        if occupied_rows.size == 0:
            raise ValueError("transmitted symbols are all zero")
        tx = A[occupied_rows[0]]
        self.tx_symbols_ = tx
        self.occupied_k_ = np.flatnonzero(tx != 0)
        if self.n_fft < self.occupied_k_[-1] + 1:
            raise ValueError(f"n_fft={self.n_fft} smaller than occupied span up to k={self.occupied_k_[-1]}")
        self.n_features_in_ = tx.size
        return self

    def _equalized(self, row):
        values = np.zeros(self.n_features_in_, dtype=complex)
        k = self.occupied_k_
        values[k] = row[k] / self.tx_symbols_[k]
        return re_.EqualizedVector(values, k, float(self.delta_f))

    def transform(self, X):
        """Range-profile power per observation, shape ``(n_obs, n_fft)``."""
        check_is_fitted(self)
        X = check_symbols(X, n_features=self.n_features_in_)
        return np.vstack([re_.range_profile(self._equalized(row), self.n_fft).power for row in X])

    def estimate(self, X):
        """Full :class:`RangeResult` per observation, ``None`` where unresolved."""
        check_is_fitted(self)
        X = check_symbols(X, n_features=self.n_features_in_)
        out = []
        for row in X:
            eps = self._equalized(row)
            try:
                if self.mode == re_.ABSOLUTE:
                    profile = re_.range_profile(eps, self.n_fft)
                    n_hat = int(np.argmax(profile.power[: profile.period])) or profile.period
                    out.append(re_.estimate_range(re_.refine_peak(eps, n_hat, self.n_fft), self.mode))
                else:
                    result, _ = re_.locate_two_paths([eps], self.n_fft, self.mode, self.velocity,
                                                     self.prominence_db, self.min_separation_bins)
                    out.append(result)
            except (UnresolvedPeaksError, ShapeError):
                out.append(None)
        return out

    def predict(self, X):
        """Estimated range in meters per observation; NaN where unresolved."""
        return np.array([np.nan if r is None else r.range_hat for r in self.estimate(X)])

    def score(self, X, y):
        """Negative mean absolute range error; unresolved rows count as a zero estimate."""
        y = np.asarray(y, dtype=float).ravel()
        r_hat = np.nan_to_num(self.predict(X), nan=0.0)
        if r_hat.shape != y.shape:
            raise ValueError(f"y has {y.size} entries for {r_hat.size} observations")
        return -float(np.mean(np.abs(y - r_hat)))
