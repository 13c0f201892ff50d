"""OFDM-radar range estimation on SRS subcarriers.

The received symbols are divided by the transmitted ones, the quotient is
transformed over the subcarrier index into a delay profile, and each peak
is refined on a delay grid ``n_fft/2`` times finer with a chirp-Z transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .czt import czt
from .exceptions import ShapeError, UnresolvedPeaksError
from .nr_config import SPEED_OF_LIGHT
from .ofdm_modem import ReceivedGrid
from .srs_sequence import ResourceGrid

DEFAULT_N_FFT = 4096
DEFAULT_PROMINENCE_DB = 6.0
DEFAULT_VELOCITY_FACTOR = 0.7
# first sidelobe of a uniformly weighted aperture
RECT_FIRST_SIDELOBE_DB = -13.26
SIDELOBE_MARGIN_DB = 1.0

ABSOLUTE = "absolute"
DIFFERENTIAL_RADAR = "differential_radar"
DIFFERENTIAL_CABLE = "differential_cable"
MODES = (ABSOLUTE, DIFFERENTIAL_RADAR, DIFFERENTIAL_CABLE)

SIDELOBE_SUSPECT = "sidelobe_suspect"


@dataclass(frozen=True, eq=False)
class EqualizedVector:
    """``X[k] / a[k]`` on the full subcarrier axis, exact zeros off the comb."""

    values: np.ndarray
    occupied_k: np.ndarray
    delta_f: float

    @property
    def compact(self) -> np.ndarray:
        return self.values[self.occupied_k]

    @property
    def stride(self) -> int:
        if self.occupied_k.size < 2:
            return 1
        return int(np.gcd.reduce(np.diff(self.occupied_k)))

    @property
    def span(self) -> int:
        """Occupied extent in subcarrier spacings, ``k_tc * m_sc`` for a comb."""
        return int(self.occupied_k[-1] - self.occupied_k[0]) + self.stride


@dataclass(frozen=True, eq=False)
class RangeProfile:
    power: np.ndarray
    tau_grid: np.ndarray
    n_fft: int
    delta_f: float
    period: int
    resolution_bins: float
    values: np.ndarray = field(default=None, repr=False)

    @property
    def bin_width(self) -> float:
        return 1.0 / (self.n_fft * self.delta_f)

    @property
    def unambiguous_delay(self) -> float:
        return self.period * self.bin_width


@dataclass(frozen=True, eq=False)
class CztRefinement:
    power: np.ndarray
    tau_grid: np.ndarray
    n_hat: int
    values: np.ndarray = field(default=None, repr=False)

    @property
    def step(self) -> float:
        return self.tau_grid[1] - self.tau_grid[0]


@dataclass(frozen=True)
class PeakEstimate:
    tau_hat: float
    n_hat: int
    m_hat: int
    peak_power: float


@dataclass(frozen=True)
class RangeResult:
    tau_ref: float
    tau_target: float
    tau_delta: float
    range_hat: float
    mode: str
    flags: tuple[str, ...] = ()

    @property
    def suspect(self) -> bool:
        return SIDELOBE_SUSPECT in self.flags


def equalize(rx: ReceivedGrid, tx: ResourceGrid, symbol_l: int) -> EqualizedVector:
    """Element-wise ``X_l[k] / a[k, l]`` on the occupied subcarriers of symbol ``l``."""
    rx_col = rx.column(symbol_l)
    if rx_col.shape[0] != tx.n_subcarriers:
        raise ShapeError(f"received grid has {rx_col.shape[0]} subcarriers, transmitted {tx.n_subcarriers}")
    mask = tx.occupied_mask[:, symbol_l]
    occupied = np.flatnonzero(mask)
    if occupied.size == 0:
        raise ShapeError(f"symbol {symbol_l} carries no transmitted symbols")
    values = np.zeros(tx.n_subcarriers, dtype=complex)
    values[occupied] = rx_col[occupied] / tx.elements[occupied, symbol_l]
    return EqualizedVector(values, occupied, rx.delta_f)


def range_profile(eps: EqualizedVector, n_fft: int = DEFAULT_N_FFT) -> RangeProfile:
    """``|sum_k eps[k] exp(j 2 pi k delta_f tau_n)|**2`` on ``tau_n = n/(n_fft delta_f)``.

    A path delayed by ``tau`` peaks near bin ``tau * n_fft * delta_f``.
    """
    top = int(eps.occupied_k[-1])
    if n_fft < top + 1:
        raise ShapeError(f"n_fft={n_fft} smaller than occupied span up to k={top}")
    values = np.fft.ifft(eps.values[: top + 1], n_fft) * n_fft
    power = np.abs(values) ** 2
    tau = np.arange(n_fft) / (n_fft * eps.delta_f)
    period = n_fft // math.gcd(eps.stride, n_fft)
    return RangeProfile(power, tau, n_fft, eps.delta_f, period,
                        resolution_bins=n_fft / eps.span, values=values)


def czt_refine(eps: EqualizedVector, n_hat: int, n_fft: int = DEFAULT_N_FFT) -> CztRefinement:
    """Zoom the profile kernel onto ``[tau_(n_hat-1), tau_(n_hat+1))`` with ``n_fft`` points.

    The fine step is ``2 / (n_fft**2 delta_f)``; point ``n_fft/2`` coincides
    with the coarse bin ``n_hat``.
    """
    if not 1 <= n_hat <= n_fft - 2:
        raise ShapeError(f"n_hat={n_hat} too close to the profile edge (need 1..{n_fft - 2})")
    top = int(eps.occupied_k[-1])
    a = np.exp(-2j * np.pi * (n_hat - 1) / n_fft)
    w = np.exp(2j * np.pi * 2 / n_fft**2)
    values = czt(eps.values[: top + 1], n_fft, w, a)
    tau = ((n_hat - 1) + 2 * np.arange(n_fft) / n_fft) / (n_fft * eps.delta_f)
    return CztRefinement(np.abs(values) ** 2, tau, n_hat, values)


def refine_peak(eps, n_hat: int, n_fft: int = DEFAULT_N_FFT) -> PeakEstimate:
    """Refined peak around coarse bin ``n_hat``.

    ``eps`` may be a sequence of equalized symbols; their refinement powers
    are then averaged before the argmax.
    """
    eps_list = [eps] if isinstance(eps, EqualizedVector) else list(eps)
    refinements = [czt_refine(e, n_hat, n_fft) for e in eps_list]
    power = np.mean([r.power for r in refinements], axis=0)
    m_hat = int(np.argmax(power))
    return PeakEstimate(float(refinements[0].tau_grid[m_hat]), n_hat, m_hat, float(power[m_hat]))


def _local_maxima(p: np.ndarray) -> np.ndarray:
    left = np.roll(p, 1)
    right = np.roll(p, -1)
    return np.flatnonzero((p > left) & (p >= right))


def find_two_peaks(profile: RangeProfile, min_separation_bins: float | None = None,
                   prominence_db: float = DEFAULT_PROMINENCE_DB) -> tuple[int, int]:
    """Bins of the two strongest local maxima at least ``min_separation_bins`` apart.

    Only the first alias period is searched, treating it as circular. A
    maximum qualifies if it lies ``prominence_db`` above the median profile
    power. The peak that precedes the other by less than half a period is
    returned first as the reference.
    """
    period = profile.period
    p = profile.power[:period]
    if min_separation_bins is None:
        min_separation_bins = profile.resolution_bins
    floor = np.median(p) * 10 ** (prominence_db / 10)
    maxima = _local_maxima(p)
    maxima = maxima[p[maxima] >= floor]
    maxima = maxima[np.argsort(-p[maxima], kind="stable")]
    if maxima.size < 2:
        raise UnresolvedPeaksError(f"found {maxima.size} qualifying peak(s), need 2")
    first = int(maxima[0])
    for cand in maxima[1:]:
        d = abs(int(cand) - first)
        if min(d, period - d) >= min_separation_bins:
            second = int(cand)
            break
    else:
        raise UnresolvedPeaksError(f"no second peak at least {min_separation_bins:.3g} bins from bin {first}")
    lo, hi = sorted((first, second))
    if hi - lo <= period / 2:
        return lo, hi
    return hi, lo


def sidelobe_suspect(ref_power: float, target_power: float) -> bool:
    """True if the weaker peak is no stronger than a sidelobe of the stronger."""
    weak, strong = sorted((ref_power, target_power))
    if strong <= 0:
        return True
    return 10 * np.log10(max(weak, 1e-300) / strong) <= RECT_FIRST_SIDELOBE_DB + SIDELOBE_MARGIN_DB


def estimate_range(peaks, mode: str = DIFFERENTIAL_CABLE,
                   velocity: float = DEFAULT_VELOCITY_FACTOR * SPEED_OF_LIGHT,
                   unambiguous_delay: float | None = None,
                   flags: Sequence[str] = ()) -> RangeResult:
    """Convert refined peak delays to a range.

    ``absolute``: ``c0/2 * tau``. ``differential_radar``: ``c0/2 * tau_delta``.
    ``differential_cable``: ``velocity * tau_delta``, with
    ``tau_delta = tau_target - tau_ref``. If ``unambiguous_delay`` is given the
    difference is wrapped into ``[0, unambiguous_delay)`` first.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if isinstance(peaks, PeakEstimate):
        peaks = (peaks,)
    peaks = tuple(peaks)
    if mode == ABSOLUTE:
        tau = peaks[-1].tau_hat
        return RangeResult(0.0, tau, tau, SPEED_OF_LIGHT / 2 * tau, mode, tuple(flags))
    if len(peaks) != 2:
        raise ValueError(f"{mode} mode needs a (reference, target) pair")
    ref, tgt = peaks
    tau_delta = tgt.tau_hat - ref.tau_hat
    if unambiguous_delay is not None:
        tau_delta %= unambiguous_delay
    if tau_delta < 0:
        raise ValueError(f"negative delay difference {tau_delta:.6g} s; reference/target labels swapped")
    scale = SPEED_OF_LIGHT / 2 if mode == DIFFERENTIAL_RADAR else velocity
    return RangeResult(ref.tau_hat, tgt.tau_hat, tau_delta, scale * tau_delta, mode, tuple(flags))


def average_profiles(profiles: Sequence[RangeProfile]) -> RangeProfile:
    """Noncoherent (power) average of profiles sharing one delay grid."""
    profiles = list(profiles)
    if not profiles:
        raise ValueError("no profiles to average")
    first = profiles[0]
    for p in profiles[1:]:
        if (p.n_fft != first.n_fft or p.delta_f != first.delta_f or p.period != first.period):
            raise ShapeError("profiles are on different delay grids")
    power = np.mean([p.power for p in profiles], axis=0)
    return RangeProfile(power, first.tau_grid, first.n_fft, first.delta_f, first.period,
                        first.resolution_bins)


def locate_two_paths(eps_list: Sequence[EqualizedVector], n_fft: int = DEFAULT_N_FFT,
                     mode: str = DIFFERENTIAL_CABLE,
                     velocity: float = DEFAULT_VELOCITY_FACTOR * SPEED_OF_LIGHT,
                     prominence_db: float = DEFAULT_PROMINENCE_DB,
                     min_separation_bins: float | None = None) -> tuple[RangeResult, RangeProfile]:
    """Coarse profile, two-peak search, CZT refinement of both peaks, range.

    Several equalized symbols are combined by averaging their powers.
    Raises :class:`UnresolvedPeaksError` when two peaks cannot be separated.
    """
    eps_list = list(eps_list)
    profile = average_profiles([range_profile(e, n_fft) for e in eps_list])
    n_ref, n_tgt = find_two_peaks(profile, min_separation_bins, prominence_db)
    # an alias copy of bin 0 keeps the zoom window inside the array
    n_ref = n_ref or profile.period
    n_tgt = n_tgt or profile.period
    ref = refine_peak(eps_list, n_ref, n_fft)
    tgt = refine_peak(eps_list, n_tgt, n_fft)
    flags = (SIDELOBE_SUSPECT,) if sidelobe_suspect(ref.peak_power, tgt.peak_power) else ()
    result = estimate_range((ref, tgt), mode, velocity, profile.unambiguous_delay, flags)
    return result, profile


def write_profile_text(profile, path) -> None:
    """Two columns: delay in seconds and power in dB relative to the maximum."""
    power = np.asarray(profile.power)
    ref = power.max() if power.max() > 0 else 1.0
    db = 10 * np.log10(np.maximum(power / ref, 1e-300))
    np.savetxt(path, np.column_stack([profile.tau_grid, db]), fmt="%.12g", header="tau_s power_db")
