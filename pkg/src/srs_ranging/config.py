"""INI configuration files for trials and sweeps.

Example::

    [carrier]
    mu = 3
    f0_hz = 25e9
    n_grid_subcarriers = 3276

    [srs]
    k_tc = 2
    comb_offset = center      ; or an integer subcarrier index
    m_sc = 833
    n_symb_srs = 1
    start_symbol = 8
    root_u = 0

    [channel]
    snr_db = noiseless
    seed = 0
    range_m = 2.76            ; two-path cable scenario
    velocity_factor = 0.7
    gain_ref_db = 0
    gain_target_db = -6.0206

    [path.target]             ; explicit paths replace the two-path scenario
    delay_ns = 13.15          ; or range_m + velocity_factor
    gain_db = -6
    phase_deg = 0

    [estimator]
    n_fft = 4096
    mode = differential_cable
    prominence_db = 6
    average = false

    [sweep]
    m_sc_list = 24, 48, 96
    seeds = 0
"""

from __future__ import annotations

import configparser
import os
from typing import Any, Mapping

from .channel import ChannelConfig, PathSpec, gain_from_db, two_path_factory
from .exceptions import ConfigError
from .harness import EstimatorOptions, TrialSpec, default_m_sc_list
from .nr_config import SPEED_OF_LIGHT, CarrierConfig, Numerology, SrsConfig, centered_comb_offset

CONFIG_ENV_VAR = "SRS_RANGING_CONFIG"

DEFAULTS: dict[str, dict[str, Any]] = {
    "carrier": {"mu": 3, "f0_hz": 25e9, "n_grid_subcarriers": 3276},
    "srs": {"k_tc": 2, "comb_offset": "center", "m_sc": 833, "n_symb_srs": 1, "start_symbol": 8, "root_u": 0},
    "channel": {"snr_db": "noiseless", "seed": 0, "range_m": 2.76, "velocity_factor": 0.7,
                "tau_ref_ns": 0.0, "gain_ref_db": 0.0, "gain_target_db": -6.0206, "phase_target_deg": 0.0,
                "beta": 1.0},
    "estimator": {"n_fft": 4096, "mode": "differential_cable", "prominence_db": 6.0,
                  "min_separation_bins": "auto", "average": False, "timing_backoff": 32, "detect": True},
    "sweep": {"m_sc_list": "auto", "n_points": 32, "seeds": "0", "center": True},
}


def load_config(path=None) -> dict[str, dict[str, str]]:
    """Raw sections of an INI file; ``path=None`` falls back to ``$SRS_RANGING_CONFIG``."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return {}
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError([("unreadable config", f"{path}: {exc}")]) from exc
    return {name: dict(parser[name]) for name in parser.sections()}


def merged(raw: Mapping[str, Mapping[str, Any]], overrides: Mapping[str, Mapping[str, Any]] = ()) -> dict:
    out = {sec: dict(vals) for sec, vals in DEFAULTS.items()}
    for source in (raw, dict(overrides)):
        for sec, vals in source.items():
            out.setdefault(sec, {}).update({k: v for k, v in vals.items() if v is not None})
    return out


def _num(value, cast, key):
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigError([("bad value", f"{key} = {value!r} is not a valid {cast.__name__}")]) from None


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError([("bad value", f"{value!r} is not a boolean")])


def _int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [_num(v.strip(), int, "list item") for v in str(value).split(",") if v.strip()]


def _path_from_section(name: str, sec: Mapping[str, Any]) -> PathSpec:
    label = sec.get("label", name.split(".", 1)[1])
    if "delay_ns" in sec:
        delay = _num(sec["delay_ns"], float, f"{name}.delay_ns") * 1e-9
    elif "range_m" in sec:
        vf = _num(sec.get("velocity_factor", 1.0), float, f"{name}.velocity_factor")
        delay = _num(sec["range_m"], float, f"{name}.range_m") / (vf * SPEED_OF_LIGHT)
    else:
        raise ConfigError([("incomplete path", f"[{name}] needs delay_ns or range_m")])
    gain = gain_from_db(_num(sec.get("gain_db", 0.0), float, f"{name}.gain_db"),
                        _num(sec.get("phase_deg", 0.0), float, f"{name}.phase_deg"))
    return PathSpec(delay, gain, label)


def build_trial_spec(cfg: Mapping[str, Mapping[str, Any]]) -> TrialSpec:
    """Typed :class:`TrialSpec` from merged config sections (no validation)."""
    c, s, ch, e = cfg["carrier"], cfg["srs"], cfg["channel"], cfg["estimator"]
    carrier = CarrierConfig(f0=_num(c["f0_hz"], float, "carrier.f0_hz"),
                            numerology=Numerology(_num(c["mu"], int, "carrier.mu")),
                            n_grid_subcarriers=_num(c["n_grid_subcarriers"], int, "carrier.n_grid_subcarriers"))
    k_tc = _num(s["k_tc"], int, "srs.k_tc")
    m_sc = _num(s["m_sc"], int, "srs.m_sc")
    center = str(s["comb_offset"]).strip().lower() == "center"
    offset = (centered_comb_offset(k_tc, m_sc, carrier.n_grid_subcarriers) if center
              else _num(s["comb_offset"], int, "srs.comb_offset"))
    srs = SrsConfig(k_tc=k_tc, comb_offset=offset, m_sc=m_sc,
                    n_symb_srs=_num(s["n_symb_srs"], int, "srs.n_symb_srs"),
                    start_symbol=_num(s["start_symbol"], int, "srs.start_symbol"))

    snr = ch["snr_db"]
    snr_db = None if str(snr).strip().lower() == "noiseless" else _num(snr, float, "channel.snr_db")
    seed = _num(ch["seed"], int, "channel.seed")
    vf = _num(ch["velocity_factor"], float, "channel.velocity_factor")
    path_sections = sorted(k for k in cfg if k.startswith("path."))
    if path_sections:
        paths = tuple(_path_from_section(k, cfg[k]) for k in path_sections)
        channel = ChannelConfig(paths, snr_db, carrier.f0, seed)
    else:
        channel = two_path_factory(
            _num(ch["range_m"], float, "channel.range_m"), vf * SPEED_OF_LIGHT,
            tau_ref=_num(ch["tau_ref_ns"], float, "channel.tau_ref_ns") * 1e-9,
            gain_ref=gain_from_db(_num(ch["gain_ref_db"], float, "channel.gain_ref_db")),
            gain_target=gain_from_db(_num(ch["gain_target_db"], float, "channel.gain_target_db"),
                                     _num(ch["phase_target_deg"], float, "channel.phase_target_deg")),
            round_trip=str(e["mode"]) == "differential_radar",
            f0=carrier.f0, snr_db=snr_db, rng_seed=seed)

    min_sep = e["min_separation_bins"]
    options = EstimatorOptions(
        n_fft=_num(e["n_fft"], int, "estimator.n_fft"),
        mode=str(e["mode"]),
        velocity=vf * SPEED_OF_LIGHT,
        prominence_db=_num(e["prominence_db"], float, "estimator.prominence_db"),
        min_separation_bins=None if str(min_sep) == "auto" else _num(min_sep, float, "estimator.min_separation_bins"),
        average=_bool(e["average"]),
        timing_backoff=_num(e["timing_backoff"], int, "estimator.timing_backoff"),
    )
    return TrialSpec(carrier=carrier, srs=srs, channel=channel, options=options, rng_seed=seed,
                     root_u=_num(s["root_u"], int, "srs.root_u"),
                     beta=_num(ch["beta"], float, "channel.beta"),
                     detect=_bool(e["detect"]))


def sweep_settings(cfg: Mapping[str, Mapping[str, Any]]) -> tuple[list[int], list[int], bool]:
    sw = cfg["sweep"]
    if str(sw["m_sc_list"]).strip().lower() == "auto":
        m_sc_list = default_m_sc_list(_num(sw["n_points"], int, "sweep.n_points"))
    else:
        m_sc_list = _int_list(sw["m_sc_list"])
    return m_sc_list, _int_list(sw["seeds"]), _bool(sw["center"])

