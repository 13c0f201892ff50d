"""CP-OFDM modulation and demodulation in complex baseband.

Subcarrier ``k`` of an ``N_s``-subcarrier grid sits at baseband frequency
``(k - N_s/2) * delta_f``. The transform is unnormalized on the transmit
side, so one symbol body of ``n_ifft`` samples carries ``n_ifft`` times the
grid energy of its column; :func:`demodulate` divides by ``n_ifft``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoSignalError, ShapeError
from .nr_config import SYMBOLS_PER_SLOT, CarrierConfig, SlotTiming
from .srs_sequence import ResourceGrid

DEFAULT_N_IFFT = 4096


@dataclass(frozen=True, eq=False)
class BasebandWaveform:
    samples: np.ndarray
    sample_rate: float
    beta: float = 1.0
    n_ifft: int = DEFAULT_N_IFFT
    n_cp: int = 288

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))

    def __len__(self):
        return self.samples.size

    @property
    def symbol_length(self) -> int:
        return self.n_ifft + self.n_cp

    def replace_samples(self, samples) -> "BasebandWaveform":
        return BasebandWaveform(samples, self.sample_rate, self.beta, self.n_ifft, self.n_cp)


@dataclass(frozen=True, eq=False)
class ReceivedGrid:
    """Demodulated ``X_l[k]``; column ``j`` is slot symbol ``first_symbol + j``."""

    elements: np.ndarray
    first_symbol: int = 0
    delta_f: float = 120e3

    @property
    def shape(self):
        return self.elements.shape

    def column(self, symbol_l: int) -> np.ndarray:
        j = symbol_l - self.first_symbol
        if not 0 <= j < self.elements.shape[1]:
            raise ShapeError(f"symbol {symbol_l} not in received grid "
                             f"[{self.first_symbol}, {self.first_symbol + self.elements.shape[1]})")
        return self.elements[:, j]


def cp_samples(timing: SlotTiming, sample_rate: float) -> int:
    return int(round(timing.t_cp * sample_rate))


def _bins(n_subcarriers: int, n_ifft: int) -> np.ndarray:
    return (np.arange(n_subcarriers) - n_subcarriers // 2) % n_ifft


def modulate(grid: ResourceGrid, timing: SlotTiming, carrier: CarrierConfig,
             beta: float = 1.0, n_ifft: int = DEFAULT_N_IFFT) -> BasebandWaveform:
    """Cyclic-prefixed OFDM baseband samples for every column of ``grid``.

    Sample ``i`` of symbol ``l`` evaluates
    ``beta * sum_k a[k,l] exp(j 2 pi (k - N_s/2) delta_f (t_i - T_cp))`` at
    ``t_i = i / sample_rate``, so the first ``n_cp`` samples are the cyclic
    copy of the symbol tail.
    """
    n_sc = carrier.n_grid_subcarriers
    if grid.n_subcarriers != n_sc:
        raise ShapeError(f"grid has {grid.n_subcarriers} subcarriers, carrier expects {n_sc}")
    if n_sc > n_ifft:
        raise ShapeError(f"n_ifft={n_ifft} smaller than grid of {n_sc} subcarriers")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    sample_rate = n_ifft * timing.delta_f
    n_cp = cp_samples(timing, sample_rate)

    spectrum = np.zeros((n_ifft, grid.n_symbols), dtype=complex)
    spectrum[_bins(n_sc, n_ifft)] = grid.elements
    body = np.fft.ifft(spectrum, axis=0) * (n_ifft * beta)
    symbols = np.concatenate([body[-n_cp:], body], axis=0) if n_cp else body
    samples = symbols.T.reshape(-1)
    return BasebandWaveform(samples, sample_rate, beta, n_ifft, n_cp)


def demodulate(waveform: BasebandWaveform, start_sample: int, timing: SlotTiming,
               carrier: CarrierConfig, n_symbols: int = SYMBOLS_PER_SLOT,
               first_symbol: int = 0) -> ReceivedGrid:
    """Strip the cyclic prefix of each symbol and transform back to subcarriers."""
    n_ifft = waveform.n_ifft
    n_cp = cp_samples(timing, waveform.sample_rate)
    sym_len = n_ifft + n_cp
    if start_sample < 0:
        raise ShapeError(f"start_sample must be >= 0, got {start_sample}")
    needed = start_sample + n_symbols * sym_len
    if needed > len(waveform):
        raise ShapeError(f"need {needed} samples, waveform has {len(waveform)}")
    block = waveform.samples[start_sample:needed].reshape(n_symbols, sym_len)[:, n_cp:]
    spectrum = np.fft.fft(block, axis=1).T / n_ifft
    elements = spectrum[_bins(carrier.n_grid_subcarriers, n_ifft)]
    return ReceivedGrid(elements, first_symbol, timing.delta_f)


def moving_average_power(samples: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean of ``|x|**2``; entry ``i`` averages samples ``i-window+1 .. i``."""
    power = np.abs(samples) ** 2
    csum = np.concatenate([[0.0], np.cumsum(power)])
    idx = np.arange(1, power.size + 1)
    return (csum[idx] - csum[np.maximum(idx - window, 0)]) / window


def detect_start(waveform: BasebandWaveform, timing: SlotTiming,
                 threshold: float = 0.9, edge_samples: float = 0.5,
                 noise_sigmas: float = 6.0) -> int:
    """Index of the first sample of the received burst.

    A moving average of ``|x|**2`` over one symbol duration ``T_s`` is formed.
    The first index reaching ``threshold`` times its maximum marks the rising
    edge. From there we step back until the average drops to the pre-burst
    floor plus the larger of ``edge_samples`` samples' worth of burst energy
    and ``noise_sigmas`` standard deviations of the floor.
    """
    window = int(round(timing.t_s * waveform.sample_rate))
    x = waveform.samples
    if x.size < window:
        raise ShapeError(f"waveform shorter than the {window}-sample detection window")
    avg = moving_average_power(x, window)
    peak = avg.max()
    if not peak > 0:
        raise NoSignalError("no signal detected")
    rise = int(np.argmax(avg >= threshold * peak))
    # windows ending a full window before the rise cannot hold burst samples
    quiet = avg[window - 1: rise - window + 1]
    if quiet.size:
        floor = float(np.median(quiet))
        spread = 1.4826 * float(np.median(np.abs(quiet - floor)))
    else:
        floor = spread = 0.0
    level = floor + max((avg[rise] - floor) * edge_samples / window, noise_sigmas * spread)
    # prepend the empty window preceding sample 0
    ext = np.concatenate([[0.0], avg[: rise + 1]])
    below = np.flatnonzero(ext <= level)
    # ext[j] is the window ending at sample j-1, so the burst starts at j
    return int(below[-1]) if below.size else 0
