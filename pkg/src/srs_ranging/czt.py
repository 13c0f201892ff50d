"""Chirp-Z transform via Bluestein's convolution identity."""

import numpy as np
from scipy.fft import fft, ifft, next_fast_len


def czt(x, m=None, w=None, a=1.0):
    """Evaluate ``X[k] = sum_n x[n] * a**(-n) * w**(n*k)`` for ``k < m``.

    The contour points are ``z_k = a * w**(-k)``; the defaults (``m = len(x)``,
    ``w = exp(-2j*pi/m)``, ``a = 1``) reproduce the DFT.

    Parameters
    ----------
    x : array_like
        Input sequence, transformed along its last axis.
    m : int, optional
        Number of output points.
    w : complex, optional
        Ratio between successive contour points.
    a : complex, optional
        Starting point of the contour.

    Returns
    -------
    numpy.ndarray
        Complex array with ``m`` points along the last axis.
    """
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    if m is None:
        m = n
    if m < 1 or n < 1:
        raise ValueError("czt needs at least one input and one output point")
    if w is None:
        w = np.exp(-2j * np.pi / m)
    log_w = np.log(complex(w))
    log_a = np.log(complex(a))

    size = next_fast_len(n + m - 1)
    k = np.arange(max(n, m))
    chirp = np.exp(log_w * k.astype(float) ** 2 / 2)

    pre = x * np.exp(-log_a * np.arange(n)) * chirp[:n]
    # w**(-(k-n)**2/2) for lags -(n-1) .. m-1, wrapped for circular convolution
    kernel = np.zeros(size, dtype=complex)
    kernel[:m] = 1 / chirp[:m]
    kernel[size - n + 1:] = 1 / chirp[1:n][::-1]

    conv = ifft(fft(pre, size) * fft(kernel), size)
    return conv[..., :m] * chirp[:m]
