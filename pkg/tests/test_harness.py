import math
from dataclasses import replace

import numpy as np
import pytest

from srs_ranging import harness as H
from srs_ranging.channel import two_path_factory
from srs_ranging.exceptions import CaptureFormatError
from srs_ranging.iqfile import write_capture
from srs_ranging.nr_config import SPEED_OF_LIGHT, CarrierConfig, SrsConfig, centered_comb_offset

VP = 0.7 * SPEED_OF_LIGHT


def spec_for(m_sc, r=2.76, **kw):
    srs = SrsConfig(m_sc=m_sc, comb_offset=centered_comb_offset(2, m_sc, 3276))
    return H.TrialSpec(srs=srs, channel=two_path_factory(r, VP), **kw)


def test_min_bandwidth_examples():
    assert H.min_bandwidth(2.76) == pytest.approx(108.62e6, rel=1e-4)
    assert H.min_bandwidth(5.53) == pytest.approx(54.21e6, rel=1e-4)
    r = np.geomspace(0.1, 1e3, 50)
    assert np.all(np.diff([H.min_bandwidth(x) for x in r]) < 0)


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_min_bandwidth_rejects_nonpositive(r):
    with pytest.raises(ValueError):
        H.min_bandwidth(r)


def test_default_m_sc_list():
    m = H.default_m_sc_list()
    assert len(m) == 32 and m[0] == 24 and m[-1] == 1584
    assert m == sorted(set(m))


def test_trial_wide_band_centimeter():
    out = H.run_trial(spec_for(1000))
    assert out.resolved
    assert out.bandwidth_hz >= 200e6
    assert out.r_true == pytest.approx(2.76)
    assert out.abs_error < 0.05


def test_trial_below_min_bandwidth_fails_visibly():
    out = H.run_trial(spec_for(48))
    assert out.bandwidth_hz < H.min_bandwidth(2.76)
    assert not out.resolved or out.abs_error > 1.0
    if not out.resolved:
        assert out.diagnostic


def test_tiny_separation_not_silent():
    out = H.run_trial(spec_for(1584, r=0.05))
    assert not out.resolved or out.abs_error < 0.05


def test_trial_deterministic():
    spec = spec_for(400)
    spec = replace(spec, channel=replace(spec.channel, snr_db=10.0))
    a, b = H.run_trial(replace(spec, rng_seed=3)), H.run_trial(replace(spec, rng_seed=3))
    assert a.r_hat == b.r_hat


def test_known_timing_agrees_with_detection():
    a = H.run_trial(spec_for(833))
    b = H.run_trial(replace(spec_for(833), detect=False))
    assert b.r_hat == pytest.approx(a.r_hat, abs=1e-3)


def test_root_invariance():
    r = {u: H.run_trial(replace(spec_for(600), root_u=u)).r_hat for u in (0, 7, 29)}
    assert max(r.values()) - min(r.values()) < 1e-9


def test_radar_mode_round_trip():
    opts = H.EstimatorOptions(mode="differential_radar")
    spec = H.TrialSpec(srs=SrsConfig(m_sc=1584, comb_offset=centered_comb_offset(2, 1584, 3276)),
                       channel=two_path_factory(3.0, SPEED_OF_LIGHT, round_trip=True), options=opts)
    out = H.run_trial(spec)
    assert out.r_true == pytest.approx(3.0)
    assert out.resolved and out.abs_error < 0.05


def test_sweep_rows_and_order():
    rows = H.sweep_bandwidth(spec_for(833), [1584, 48, 833], seeds=[0, 1])
    assert [(r.m_sc, r.seed) for r in rows] == [(1584, 0), (1584, 1), (48, 0), (48, 1), (833, 0), (833, 1)]
    for r in rows:
        if r.resolved:
            assert r.abs_error_m == pytest.approx(abs(r.r_true_m - r.r_hat_m))


def test_sweep_empty():
    assert H.sweep_bandwidth(spec_for(833), []) == []
    assert H.rows_to_csv([]) == "m_sc,bandwidth_hz,r_true_m,r_hat_m,abs_error_m,resolved,seed\n"


def test_sweep_records_invalid_cells():
    rows = H.sweep_bandwidth(spec_for(833), [5000])
    assert len(rows) == 1 and not rows[0].resolved and rows[0].diagnostic


def test_sweep_parallel_matches_serial():
    m = [96, 300, 833, 1584]
    assert H.rows_to_csv(H.sweep_bandwidth(spec_for(833), m, n_jobs=4)) == \
        H.rows_to_csv(H.sweep_bandwidth(spec_for(833), m))


def test_csv_determinism_with_noise():
    base = spec_for(833)
    base = replace(base, channel=replace(base.channel, snr_db=15.0))
    texts = [H.rows_to_csv(H.sweep_bandwidth(base, [200, 833], seeds=[4, 5])) for _ in range(2)]
    assert texts[0] == texts[1]
    header, first = texts[0].splitlines()[:2]
    assert header == "m_sc,bandwidth_hz,r_true_m,r_hat_m,abs_error_m,resolved,seed"
    assert first.split(",")[0] == "200"


def test_median_error_shrinks_with_bandwidth():
    r = 5.53
    rows = H.sweep_bandwidth(spec_for(833, r=r), H.default_m_sc_list())
    b_min = H.min_bandwidth(r)
    low = [x.abs_error_m for x in rows if b_min <= x.bandwidth_hz < 2 * b_min]
    high = [x.abs_error_m for x in rows if x.bandwidth_hz >= 4 * b_min]
    assert low and high
    assert np.median(high) < np.median(low)


def _capture(tmp_path, spec, lead=0):
    _, rx = H.synthesize(spec)
    rx = rx.replace_samples(np.r_[np.zeros(lead, complex), rx.samples])
    path = tmp_path / "cap.iq"
    write_capture(path, rx, f0_hz=spec.carrier.f0, mu=spec.carrier.mu, timestamp="t0")
    return path


def test_process_capture_matches_trial(tmp_path):
    spec = spec_for(833)
    path = _capture(tmp_path, spec)
    res = H.process_capture(path, spec.carrier, spec.srs, options=spec.options)
    trial = H.run_trial(spec)
    # float32 storage is the only difference
    assert res.range_hat == pytest.approx(trial.r_hat, abs=1e-6)
    again = H.process_capture(path, spec.carrier, spec.srs, options=spec.options)
    assert again.range_hat == res.range_hat


def test_process_capture_leading_silence(tmp_path):
    spec = spec_for(833)
    a = H.process_capture(_capture(tmp_path, spec), spec.carrier, spec.srs, options=spec.options)
    b = H.process_capture(_capture(tmp_path, spec, lead=1777), spec.carrier, spec.srs, options=spec.options)
    fine = 2 / (4096**2 * 120e3)
    assert abs(a.tau_delta - b.tau_delta) <= fine


def test_process_capture_truncated(tmp_path):
    spec = spec_for(833)
    path = _capture(tmp_path, spec)
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(CaptureFormatError):
        H.process_capture(path, spec.carrier, spec.srs)


def test_process_capture_wrong_numerology(tmp_path):
    spec = spec_for(833)
    path = _capture(tmp_path, spec)
    other = CarrierConfig(f0=spec.carrier.f0, numerology=type(spec.carrier.numerology)(1))
    with pytest.raises(CaptureFormatError, match="mu"):
        H.process_capture(path, other, spec.srs)


def test_process_capture_sample_rate_mismatch(tmp_path):
    spec = spec_for(833)
    path = _capture(tmp_path, spec)
    meta = path.with_name(path.name + ".meta")
    text = meta.read_text().replace("491520000.0", "491600000.0")
    meta.write_text(text)
    with pytest.raises(CaptureFormatError, match="sample rate"):
        H.process_capture(path, spec.carrier, spec.srs)


def test_true_range_modes():
    ch = two_path_factory(2.0, VP, tau_ref=1e-9)
    assert H.true_range(ch, "differential_cable", VP) == pytest.approx(2.0)
    assert H.true_range(ch, "absolute", VP) == pytest.approx(SPEED_OF_LIGHT / 2 * ch.max_delay)
    assert math.isfinite(H.true_range(ch, "differential_radar", VP))
