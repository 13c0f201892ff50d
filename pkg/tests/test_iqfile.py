import numpy as np
import pytest

from srs_ranging.exceptions import CaptureFormatError
from srs_ranging.iqfile import metadata_path, read_capture, read_metadata, write_capture
from srs_ranging.ofdm_modem import BasebandWaveform


@pytest.fixture
def wave(rng):
    x = (rng.standard_normal(1000) + 1j * rng.standard_normal(1000)).astype(np.complex64)
    return BasebandWaveform(x.astype(complex), 491.52e6)


def test_roundtrip(tmp_path, wave):
    path = tmp_path / "a.iq"
    side = write_capture(path, wave, f0_hz=25e9, mu=3, timestamp="2026-01-01T00:00:00")
    assert side == metadata_path(path) and side.name == "a.iq.meta"
    x, meta = read_capture(path)
    assert x.dtype == np.complex128
    assert np.array_equal(x, wave.samples)
    assert meta == {"sample_rate_hz": 491.52e6, "f0_hz": 25e9, "mu": 3, "timestamp": "2026-01-01T00:00:00",
                    "n_samples": 1000, "n_ifft": 4096, "n_cp": 288}


def test_byte_layout(tmp_path):
    w = BasebandWaveform(np.array([1 + 2j, -3.5 + 0.25j]), 1.0)
    path = tmp_path / "b.iq"
    write_capture(path, w, f0_hz=1.0, mu=0)
    assert np.array_equal(np.frombuffer(path.read_bytes(), "<f4"), [1, 2, -3.5, 0.25])


def test_truncated(tmp_path, wave):
    path = tmp_path / "c.iq"
    write_capture(path, wave, f0_hz=25e9, mu=3)
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(CaptureFormatError, match="truncated"):
        read_capture(path)


def test_sample_count_mismatch(tmp_path, wave):
    path = tmp_path / "d.iq"
    write_capture(path, wave, f0_hz=25e9, mu=3)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(CaptureFormatError, match="declares"):
        read_capture(path)


def test_missing_sidecar(tmp_path):
    path = tmp_path / "e.iq"
    path.write_bytes(b"\0" * 16)
    with pytest.raises(CaptureFormatError, match="sidecar"):
        read_capture(path)


@pytest.mark.parametrize("text, match", [
    ("[other]\nmu = 3\n", "section"),
    ("[capture]\nmu = 3\n", "lacks keys"),
    ("[capture]\nsample_rate_hz = fast\nf0_hz = 1\nmu = 3\n", "bad value"),
    ("no header", "unreadable"),
])
def test_bad_metadata(tmp_path, text, match):
    path = tmp_path / "f.iq"
    path.write_bytes(b"\0" * 8)
    metadata_path(path).write_text(text)
    with pytest.raises(CaptureFormatError, match=match):
        read_metadata(path)
