"""Raw IQ captures: interleaved little-endian float32 I/Q plus a metadata sidecar.

Sample ``i`` occupies bytes ``[8i, 8i + 8)`` as ``(I, Q)``. The sidecar is
``<capture>.meta``, an INI file with a single ``[capture]`` section.
"""

from __future__ import annotations

import configparser
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .exceptions import CaptureFormatError
from .ofdm_modem import BasebandWaveform

IQ_DTYPE = np.dtype("<f4")
SECTION = "capture"
REQUIRED_KEYS = ("sample_rate_hz", "f0_hz", "mu")


def metadata_path(path) -> Path:
    return Path(f"{os.fspath(path)}.meta")


def write_capture(path, waveform: BasebandWaveform, *, f0_hz: float, mu: int,
                  timestamp: str | None = None) -> Path:
    """Write ``waveform`` and its sidecar; returns the sidecar path."""
    path = Path(path)
    iq = np.empty(2 * len(waveform), dtype=IQ_DTYPE)
    iq[0::2] = waveform.samples.real
    iq[1::2] = waveform.samples.imag
    path.write_bytes(iq.tobytes())

    meta = configparser.ConfigParser()
    meta[SECTION] = {
        "sample_rate_hz": repr(float(waveform.sample_rate)),
        "f0_hz": repr(float(f0_hz)),
        "mu": str(int(mu)),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
        "n_samples": str(len(waveform)),
        "n_ifft": str(waveform.n_ifft),
        "n_cp": str(waveform.n_cp),
    }
    side = metadata_path(path)
    with open(side, "w") as fh:
        meta.write(fh)
    return side


def read_metadata(path) -> dict:
    side = metadata_path(path)
    if not side.exists():
        raise CaptureFormatError(f"missing metadata sidecar {side}")
    meta = configparser.ConfigParser()
    try:
        meta.read(side)
    except configparser.Error as exc:
        raise CaptureFormatError(f"unreadable metadata {side}: {exc}") from exc
    if SECTION not in meta:
        raise CaptureFormatError(f"metadata {side} lacks a [{SECTION}] section")
    sec = meta[SECTION]
    missing = [k for k in REQUIRED_KEYS if k not in sec]
    if missing:
        raise CaptureFormatError(f"metadata {side} lacks keys: {', '.join(missing)}")
    try:
        out = {
            "sample_rate_hz": float(sec["sample_rate_hz"]),
            "f0_hz": float(sec["f0_hz"]),
            "mu": int(sec["mu"]),
            "timestamp": sec.get("timestamp", ""),
        }
        for key in ("n_samples", "n_ifft", "n_cp"):
            if key in sec:
                out[key] = int(sec[key])
    except ValueError as exc:
        raise CaptureFormatError(f"bad value in metadata {side}: {exc}") from exc
    return out


def read_capture(path) -> tuple[np.ndarray, dict]:
    """Complex samples (complex128) and parsed metadata of a capture."""
    path = Path(path)
    meta = read_metadata(path)
    raw = path.read_bytes()
    if len(raw) % 8:
        raise CaptureFormatError(f"{path}: {len(raw)} bytes is not a whole number of IQ pairs (truncated?)")
    n = len(raw) // 8
    if "n_samples" in meta and meta["n_samples"] != n:
        raise CaptureFormatError(f"{path}: metadata declares {meta['n_samples']} samples, file holds {n}")
    iq = np.frombuffer(raw, dtype=IQ_DTYPE)
    return iq[0::2].astype(float) + 1j * iq[1::2].astype(float), meta
