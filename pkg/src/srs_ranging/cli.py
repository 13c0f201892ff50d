"""Command-line entry point: ``srs-ranging {trial,sweep,process,validate}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import config as cfgmod
from .exceptions import SrsRangingError, UnresolvedPeaksError
from .harness import min_bandwidth, process_capture, rows_to_csv, run_trial, sweep_bandwidth, true_range
from .iqfile import write_capture
from .nr_config import carrier_violations, occupied_bandwidth, slot_timing, srs_violations
from .range_estimator import write_profile_text
from .srs_sequence import generate_srs_grid, write_grid_dump

log = logging.getLogger("srs_ranging")

# (section, key, flag, type)
OVERRIDES = [
    ("carrier", "mu", "--mu", int),
    ("carrier", "f0_hz", "--f0-hz", float),
    ("carrier", "n_grid_subcarriers", "--n-grid-subcarriers", int),
    ("srs", "k_tc", "--k-tc", int),
    ("srs", "comb_offset", "--comb-offset", str),
    ("srs", "m_sc", "--m-sc", int),
    ("srs", "n_symb_srs", "--n-symb-srs", int),
    ("srs", "start_symbol", "--start-symbol", int),
    ("srs", "root_u", "--root-u", int),
    ("channel", "snr_db", "--snr-db", str),
    ("channel", "seed", "--seed", int),
    ("channel", "range_m", "--range-m", float),
    ("channel", "velocity_factor", "--velocity-factor", float),
    ("channel", "gain_ref_db", "--gain-ref-db", float),
    ("channel", "gain_target_db", "--gain-target-db", float),
    ("estimator", "n_fft", "--n-fft", int),
    ("estimator", "mode", "--mode", str),
    ("estimator", "prominence_db", "--prominence-db", float),
    ("estimator", "min_separation_bins", "--min-separation-bins", str),
    ("estimator", "average", "--average", str),
    ("estimator", "timing_backoff", "--timing-backoff", int),
]


def _dest(section, key):
    return f"{section}__{key}"


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", help=f"INI config file (default: ${cfgmod.CONFIG_ENV_VAR})")
    for section, key, flag, typ in OVERRIDES:
        p.add_argument(flag, dest=_dest(section, key), type=typ, default=None, help=f"override {section}.{key}")


def _load(args) -> dict:
    overrides = {}
    for section, key, _, _ in OVERRIDES:
        value = getattr(args, _dest(section, key))
        if value is not None:
            overrides.setdefault(section, {})[key] = value
    extra = {}
    if getattr(args, "m_sc_list", None):
        extra["m_sc_list"] = args.m_sc_list
    if getattr(args, "seeds", None):
        extra["seeds"] = args.seeds
    if getattr(args, "n_points", None):
        extra["n_points"] = args.n_points
    if extra:
        overrides["sweep"] = extra
    return cfgmod.merged(cfgmod.load_config(args.config), overrides)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def cmd_validate(args) -> int:
    cfg = _load(args)
    spec = cfgmod.build_trial_spec(cfg)
    problems = carrier_violations(spec.carrier) + srs_violations(spec.srs, spec.carrier)
    t_cp = slot_timing(spec.carrier.mu).t_cp if not carrier_violations(spec.carrier) else math.inf
    for p in spec.channel.paths:
        if p.delay_s + spec.options.timing_backoff / (spec.n_ifft * spec.carrier.delta_f) >= t_cp:
            problems.append(("delay exceeds CP", f"{p.label} path delay {p.delay_s:.6g} s does not fit in the CP"))
    if problems:
        for code, msg in problems:
            print(f"error: {code}: {msg}")
        return 2
    print("valid")
    print(f"bandwidth_hz: {_fmt(occupied_bandwidth(spec.srs, spec.carrier.mu))}")
    return 0


def cmd_trial(args) -> int:
    spec = cfgmod.build_trial_spec(_load(args))
    out = run_trial(spec, keep_waveform=bool(args.capture_out))
    report = {
        "resolved": out.resolved,
        "bandwidth_hz": out.bandwidth_hz,
        "r_true_m": out.r_true,
        "r_hat_m": out.r_hat,
        "abs_error_m": out.abs_error,
        "start_sample": out.start_sample,
        "diagnostic": out.diagnostic,
    }
    if out.result is not None:
        report.update(tau_ref_s=out.result.tau_ref, tau_target_s=out.result.tau_target,
                      tau_delta_s=out.result.tau_delta, mode=out.result.mode)
    if args.profile_out and out.profile is not None:
        write_profile_text(out.profile, args.profile_out)
    if args.grid_out:
        write_grid_dump(generate_srs_grid(spec.srs, spec.carrier, spec.root_u), args.grid_out)
    if args.capture_out:
        write_capture(args.capture_out, out.waveform, f0_hz=spec.carrier.f0, mu=spec.carrier.mu)
    if args.json:
        print(json.dumps(report, default=str))
    else:
        for k, v in report.items():
            print(f"{k}: {_fmt(v)}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    spec = cfgmod.build_trial_spec(cfg)
    m_sc_list, seeds, center = cfgmod.sweep_settings(cfg)
    rows = sweep_bandwidth(spec, m_sc_list, seeds, center=center, n_jobs=args.jobs)
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    r_true = true_range(spec.channel, spec.options.mode, spec.options.velocity)
    if r_true > 0:
        print(f"b_min_hz: {min_bandwidth(r_true):.9g}", file=sys.stderr)
    return 0 if any(r.resolved for r in rows) else 1


def cmd_process(args) -> int:
    spec = cfgmod.build_trial_spec(_load(args))
    try:
        result = process_capture(args.capture, spec.carrier, spec.srs, spec.root_u, spec.options, spec.n_ifft)
    except UnresolvedPeaksError as exc:
        print(f"resolved: False\ndiagnostic: {exc}")
        return 0
    print(f"resolved: {not result.suspect}")
    for k in ("tau_ref", "tau_target", "tau_delta", "range_hat", "mode"):
        print(f"{k}: {_fmt(getattr(result, k))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srs-ranging", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a configuration")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("trial", help="simulate and range a single slot")
    _add_common(p)
    p.add_argument("--json", action="store_true", help="print the result as JSON")
    p.add_argument("--profile-out", help="write the range profile (tau_s, power_db)")
    p.add_argument("--capture-out", help="write the received capture as an IQ file")
    p.add_argument("--grid-out", help="write the transmitted grid as text")
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("sweep", help="range error versus SRS bandwidth, as CSV")
    _add_common(p)
    p.add_argument("--m-sc-list", help="comma-separated sequence lengths (default: log-spaced)")
    p.add_argument("--n-points", type=int, help="number of log-spaced lengths when no list is given")
    p.add_argument("--seeds", help="comma-separated noise seeds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("process", help="range a recorded IQ capture")
    _add_common(p)
    p.add_argument("capture", help="IQ file; metadata is read from <capture>.meta")
    p.set_defaults(func=cmd_process)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except SrsRangingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
