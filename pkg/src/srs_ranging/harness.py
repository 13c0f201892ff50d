"""End-to-end trials, bandwidth sweeps and offline capture processing."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import range_estimator as re_
from .channel import REFERENCE, TARGET, ChannelConfig, apply_channel, two_path_factory
from .exceptions import CaptureFormatError, ShapeError, SrsRangingError, UnresolvedPeaksError
from .iqfile import read_capture
from .nr_config import (
    SPEED_OF_LIGHT,
    CarrierConfig,
    SrsConfig,
    centered_comb_offset,
    occupied_bandwidth,
    slot_timing,
    validate_carrier,
    validate_srs,
)
from .ofdm_modem import DEFAULT_N_IFFT, BasebandWaveform, cp_samples, demodulate, detect_start, modulate
from .srs_sequence import ResourceGrid, generate_srs_grid

log = logging.getLogger(__name__)

CSV_HEADER = ("m_sc", "bandwidth_hz", "r_true_m", "r_hat_m", "abs_error_m", "resolved", "seed")
DEFAULT_SWEEP_POINTS = 32


@dataclass(frozen=True)
class EstimatorOptions:
    n_fft: int = re_.DEFAULT_N_FFT
    mode: str = re_.DIFFERENTIAL_CABLE
    velocity: float = re_.DEFAULT_VELOCITY_FACTOR * SPEED_OF_LIGHT
    prominence_db: float = re_.DEFAULT_PROMINENCE_DB
    min_separation_bins: Optional[float] = None
    average: bool = False
    # samples the FFT window is pulled back into the cyclic prefix
    timing_backoff: int = 32


@dataclass(frozen=True)
class TrialSpec:
    carrier: CarrierConfig = CarrierConfig()
    srs: SrsConfig = SrsConfig()
    channel: ChannelConfig = field(default_factory=lambda: two_path_factory(2.76, 0.7 * SPEED_OF_LIGHT))
    options: EstimatorOptions = EstimatorOptions()
    rng_seed: int = 0
    root_u: int = 0
    beta: float = 1.0
    n_ifft: int = DEFAULT_N_IFFT
    # zero samples before the slot; None means one symbol duration
    lead_in: Optional[int] = None
    # locate the burst with the moving-average detector, or assume known timing
    detect: bool = True


@dataclass(frozen=True, eq=False)
class TrialResult:
    result: Optional[re_.RangeResult]
    r_true: float
    bandwidth_hz: float
    resolved: bool
    diagnostic: str = ""
    start_sample: Optional[int] = None
    profile: Optional[re_.RangeProfile] = None
    waveform: Optional[BasebandWaveform] = None

    @property
    def r_hat(self) -> float:
        return self.result.range_hat if self.result is not None else float("nan")

    @property
    def abs_error(self) -> float:
        return abs(self.r_true - self.r_hat)


@dataclass(frozen=True)
class SweepRow:
    m_sc: int
    bandwidth_hz: float
    r_true_m: float
    r_hat_m: float
    abs_error_m: float
    resolved: bool
    seed: int
    diagnostic: str = ""


def min_bandwidth(r_meters: float) -> float:
    """Smallest bandwidth ``c0 / R`` that separates two responses ``R`` apart."""
    if not r_meters > 0:
        raise ValueError(f"range must be positive, got {r_meters}")
    return SPEED_OF_LIGHT / r_meters


def true_range(channel: ChannelConfig, mode: str, velocity: float) -> float:
    """Ground truth implied by the injected path delays."""
    if mode == re_.ABSOLUTE:
        return SPEED_OF_LIGHT / 2 * channel.max_delay
    tau_delta = channel.path(TARGET).delay_s - channel.path(REFERENCE).delay_s
    scale = SPEED_OF_LIGHT / 2 if mode == re_.DIFFERENTIAL_RADAR else velocity
    return scale * tau_delta


def default_m_sc_list(n_points: int = DEFAULT_SWEEP_POINTS, lo: int = 24, hi: int = 1584) -> list[int]:
    return [int(m) for m in np.unique(np.round(np.geomspace(lo, hi, n_points)).astype(int))]


def _estimate(rx: BasebandWaveform, grid: ResourceGrid, carrier: CarrierConfig, srs: SrsConfig,
              opts: EstimatorOptions, start: Optional[int] = None):
    """Shared receive chain from start detection to the range result."""
    timing = slot_timing(carrier.mu)
    if start is None:
        start = detect_start(rx, timing)
    start_sample = max(start - opts.timing_backoff, 0)
    n_sym = srs.n_symb_srs
    rx_grid = demodulate(rx, start_sample, timing, carrier, n_sym, first_symbol=srs.start_symbol)
    symbols = list(srs.occupied_symbols) if opts.average else [srs.start_symbol]
    eps = [re_.equalize(rx_grid, grid, l) for l in symbols]
    if opts.mode == re_.ABSOLUTE:
        profile = re_.average_profiles([re_.range_profile(e, opts.n_fft) for e in eps])
        n_hat = int(np.argmax(profile.power[: profile.period])) or profile.period
        peak = re_.refine_peak(eps, n_hat, opts.n_fft)
        # undo the backoff so the delay is measured from the burst start
        shifted = replace(peak, tau_hat=peak.tau_hat - (start - start_sample) / rx.sample_rate)
        return re_.estimate_range(shifted, re_.ABSOLUTE), profile, start
    result, profile = re_.locate_two_paths(
        eps, opts.n_fft, opts.mode, opts.velocity, opts.prominence_db, opts.min_separation_bins)
    return result, profile, start


def synthesize(spec: TrialSpec) -> tuple[ResourceGrid, BasebandWaveform]:
    """Transmit grid and the received (channel-applied, padded) capture."""
    validate_srs(spec.srs, validate_carrier(spec.carrier))
    timing = slot_timing(spec.carrier.mu)
    grid = generate_srs_grid(spec.srs, spec.carrier, spec.root_u)
    tx = modulate(grid, timing, spec.carrier, spec.beta, spec.n_ifft)
    lead = tx.symbol_length if spec.lead_in is None else spec.lead_in
    padded = np.concatenate([np.zeros(lead, complex), tx.samples, np.zeros(tx.n_cp, complex)])
    channel = replace(spec.channel, rng_seed=spec.rng_seed)
    rx = apply_channel(tx.replace_samples(padded), channel)
    return grid, rx


def run_trial(spec: TrialSpec, keep_waveform: bool = False) -> TrialResult:
    """Generate, transmit, propagate and range one SRS slot.

    Unresolvable peaks are reported through ``resolved=False`` with a
    diagnostic rather than raised.
    """
    opts = spec.options
    bandwidth = occupied_bandwidth(spec.srs, spec.carrier.mu)
    r_true = true_range(spec.channel, opts.mode, opts.velocity)
    grid, rx = synthesize(spec)
    start = None
    if not spec.detect:
        lead = rx.symbol_length if spec.lead_in is None else spec.lead_in
        start = lead + spec.srs.start_symbol * rx.symbol_length
    try:
        result, profile, start = _estimate(rx, grid, spec.carrier, spec.srs, opts, start)
    except (UnresolvedPeaksError, ShapeError) as exc:
        log.debug("trial unresolved: %s", exc)
        return TrialResult(None, r_true, bandwidth, False, str(exc), start,
                           waveform=rx if keep_waveform else None)
    resolved = not result.suspect
    diag = "" if resolved else "second peak at sidelobe level; target likely unresolved"
    return TrialResult(result, r_true, bandwidth, resolved, diag, start, profile,
                       rx if keep_waveform else None)


def _sweep_cell(base: TrialSpec, m_sc: int, seed: int, center: bool) -> SweepRow:
    offset = (centered_comb_offset(base.srs.k_tc, m_sc, base.carrier.n_grid_subcarriers)
              if center else base.srs.comb_offset)
    srs = replace(base.srs, m_sc=m_sc, comb_offset=offset)
    bandwidth = occupied_bandwidth(srs, base.carrier.mu)
    try:
        out = run_trial(replace(base, srs=srs, rng_seed=seed))
    except SrsRangingError as exc:
        r_true = true_range(base.channel, base.options.mode, base.options.velocity)
        return SweepRow(m_sc, bandwidth, r_true, float("nan"), float("nan"), False, seed, str(exc))
    return SweepRow(m_sc, bandwidth, out.r_true, out.r_hat, out.abs_error, out.resolved, seed, out.diagnostic)


def sweep_bandwidth(base: TrialSpec, m_sc_list: Sequence[int], seeds: Sequence[int] = (0,),
                    center: bool = True, n_jobs: int = 1) -> list[SweepRow]:
    """One row per ``(m_sc, seed)`` in list order.

    With ``center=True`` every allocation is centered on the carrier, so
    only the bandwidth changes along the sweep. Failing cells are recorded,
    never raised.
    """
    cells = [(m, s) for m in m_sc_list for s in seeds]
    if n_jobs == 1:
        return [_sweep_cell(base, m, s, center) for m, s in cells]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(lambda c: _sweep_cell(base, c[0], c[1], center), cells))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.9g}"


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
    return buf.getvalue()


def process_capture(iq_file, carrier: CarrierConfig, srs: SrsConfig, root_u: int = 0,
                    options: EstimatorOptions = EstimatorOptions(),
                    n_ifft: int = DEFAULT_N_IFFT) -> re_.RangeResult:
    """Range a recorded capture against the SRS grid it is expected to contain.

    Raises :class:`CaptureFormatError` on malformed files or metadata that
    disagree with ``carrier``, and :class:`UnresolvedPeaksError` if the two
    paths cannot be separated.
    """
    samples, meta = read_capture(iq_file)
    if meta["mu"] != carrier.mu:
        raise CaptureFormatError(f"capture numerology mu={meta['mu']} != configured mu={carrier.mu}")
    n_ifft = meta.get("n_ifft", n_ifft)
    timing = slot_timing(carrier.mu)
    expected = n_ifft * timing.delta_f
    if abs(meta["sample_rate_hz"] - expected) > 1e-6 * expected:
        raise CaptureFormatError(
            f"capture sample rate {meta['sample_rate_hz']:.9g} Hz != {expected:.9g} Hz expected for mu={carrier.mu}")
    rx = BasebandWaveform(samples, expected, 1.0, n_ifft, cp_samples(timing, expected))
    validate_srs(srs, validate_carrier(carrier))
    grid = generate_srs_grid(srs, carrier, root_u)
    result, _, _ = _estimate(rx, grid, carrier, srs, options)
    return result
