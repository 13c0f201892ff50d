"""Multipath delay-gain channel with seeded complex AWGN."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ChannelError
from .nr_config import SPEED_OF_LIGHT
from .ofdm_modem import BasebandWaveform

REFERENCE = "reference"
TARGET = "target"


@dataclass(frozen=True)
class PathSpec:
    delay_s: float
    gain: complex = 1.0
    label: str = TARGET

    def __post_init__(self):
        if self.delay_s < 0:
            raise ChannelError(f"path delay must be >= 0, got {self.delay_s}")
        if not abs(self.gain) > 0:
            raise ChannelError("path gain must be nonzero")
        if self.label not in (REFERENCE, TARGET):
            raise ChannelError(f"path label must be {REFERENCE!r} or {TARGET!r}, got {self.label!r}")


@dataclass(frozen=True)
class ChannelConfig:
    """Ordered paths, SNR in dB (``None`` for noiseless), carrier and seed."""

    paths: tuple[PathSpec, ...]
    snr_db: Optional[float] = None
    f0: float = 25e9
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        if not self.paths:
            raise ChannelError("channel needs at least one path")

    @property
    def max_delay(self) -> float:
        return max(p.delay_s for p in self.paths)

    def path(self, label: str) -> PathSpec:
        matches = [p for p in self.paths if p.label == label]
        if len(matches) != 1:
            raise ChannelError(f"expected exactly one {label!r} path, found {len(matches)}")
        return matches[0]


def delay_samples(samples: np.ndarray, delay: float, sample_rate: float) -> np.ndarray:
    """Circularly delay ``samples`` by ``delay`` seconds with a spectral phase ramp."""
    if delay == 0:
        return samples.copy()
    freqs = np.fft.fftfreq(samples.size, d=1.0 / sample_rate)
    shift = delay * sample_rate
    if abs(shift - round(shift)) < 1e-9:
        # whole-sample delay: reduce the ramp phase exactly in integers
        n = samples.size
        ramp = np.exp(-2j * np.pi * ((np.arange(n) * round(shift)) % n) / n)
    else:
        ramp = np.exp(-2j * np.pi * freqs * delay)
    return np.fft.ifft(np.fft.fft(samples) * ramp)


def apply_channel(waveform: BasebandWaveform, ch: ChannelConfig, *,
                  noise_reference_power: Optional[float] = None) -> BasebandWaveform:
    """Sum of delayed, scaled and carrier-rotated copies of ``waveform`` plus noise.

    Each path contributes ``gain * exp(-j 2 pi f0 delay) * x(t - delay)``.
    Noise power is set against the mean power of the noiseless composite over
    the input's occupied (nonzero) samples unless ``noise_reference_power`` is
    given explicitly.
    """
    x = waveform.samples
    if x.size == 0:
        raise ChannelError("empty waveform")
    t_cp = waveform.n_cp / waveform.sample_rate
    for p in ch.paths:
        if p.delay_s >= t_cp:
            raise ChannelError(f"delay exceeds CP: {p.delay_s:.6g} s >= t_cp {t_cp:.6g} s")

    y = np.zeros_like(x)
    for p in ch.paths:
        rot = p.gain * np.exp(-2j * np.pi * ch.f0 * p.delay_s)
        y += rot * delay_samples(x, p.delay_s, waveform.sample_rate)

    if ch.snr_db is not None:
        if noise_reference_power is None:
            n_occ = np.count_nonzero(x)
            noise_reference_power = float(np.sum(np.abs(y) ** 2)) / max(n_occ, 1)
        noise_power = noise_reference_power / 10 ** (ch.snr_db / 10)
        rng = np.random.default_rng(ch.rng_seed)
        noise = rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size)
        y = y + noise * np.sqrt(noise_power / 2)
    return waveform.replace_samples(y)


def two_path_factory(r_meters: float, velocity: float, tau_ref: float = 0.0,
                     gain_ref: complex = 1.0, gain_target: complex = 0.5, *,
                     round_trip: bool = False, f0: float = 25e9,
                     snr_db: Optional[float] = None, rng_seed: int = 0) -> ChannelConfig:
    """Reference (leakage) path plus a target path ``r_meters`` further away.

    By default the extra length is traversed once, as in a cable network, so
    the target delay is ``tau_ref + r/velocity``. ``round_trip=True`` gives the
    radar convention ``tau_ref + 2r/velocity``.
    """
    if not r_meters > 0:
        raise ChannelError(f"range must be positive, got {r_meters}")
    if not 0 < velocity <= SPEED_OF_LIGHT:
        raise ChannelError(f"velocity must be in (0, c0], got {velocity}")
    extra = (2.0 if round_trip else 1.0) * r_meters / velocity
    return ChannelConfig(
        paths=(PathSpec(tau_ref, gain_ref, REFERENCE), PathSpec(tau_ref + extra, gain_target, TARGET)),
        snr_db=snr_db, f0=f0, rng_seed=rng_seed,
    )


def single_path(delay_s: float, gain: complex = 1.0, *, f0: float = 25e9,
                snr_db: Optional[float] = None, rng_seed: int = 0) -> ChannelConfig:
    return ChannelConfig((PathSpec(delay_s, gain, TARGET),), snr_db=snr_db, f0=f0, rng_seed=rng_seed)


def gain_from_db(gain_db: float, phase_deg: float = 0.0) -> complex:
    return complex(10 ** (gain_db / 20) * np.exp(1j * np.deg2rad(phase_deg)))

