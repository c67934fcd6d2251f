import json
import struct

import numpy as np
import pytest
from scipy.signal.windows import dpss

import ofdmgen


def read_container_numpy(path):
    """Container reader written against the on-disk layout only."""
    with open(path, "rb") as f:
        blob = f.read()
    assert blob[:4] == b"OFDG"
    version, header_len = struct.unpack_from("<IQ", blob, 4)
    header = json.loads(blob[16 : 16 + header_len].decode("utf-8"))
    payload = np.frombuffer(blob, dtype="<f4", offset=16 + header_len)
    return version, header, payload.reshape([header["count"], *header["item_shape"]])


def test_presets():
    names = ofdmgen.presets()
    assert "complexity-256-medium" in names
    assert "channel-eva70" in names
    spec = ofdmgen.preset("modorder-64")
    assert spec["mod_order"] == 64
    assert spec["cp_fraction"] == [1, 4]


def test_generate_shape_and_determinism():
    a = ofdmgen.generate("complexity-256-small", 5, seed=3)
    b = ofdmgen.generate("complexity-256-small", 5, seed=3)
    c = ofdmgen.generate("complexity-256-small", 5, seed=4)
    assert a.shape == (5, 1920)
    assert a.dtype == np.complex128
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_spec_dict_and_modulation_round_trip():
    spec = ofdmgen.preset("complexity-128-medium")
    spec["target_evm_db"] = None
    g = ofdmgen.generate_waveform(spec, 2)
    assert g["grid"].shape == (6, 38)
    assert g["bits"].size == 6 * 38 * 4
    np.testing.assert_allclose(ofdmgen.demodulate(g["waveform"], spec), g["grid"], atol=1e-10)
    np.testing.assert_allclose(ofdmgen.modulate(g["grid"], spec), g["waveform"], atol=1e-12)
    assert ofdmgen.evm_db(g["grid"].ravel(), 16) == -150.0


def test_constellation_unit_power():
    for m in (4, 16, 32, 64):
        pts = ofdmgen.constellation(m)
        assert pts.size == m
        assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0, rel=1e-12)


def test_stft_round_trip_and_shape():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(960) + 1j * rng.standard_normal(960)
    s = ofdmgen.stft(x, 128)
    assert s.shape == (128, 33)
    np.testing.assert_allclose(ofdmgen.istft(s, 960), x, atol=1e-10)


def test_multitaper_matches_numpy_reference():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(960) + 1j * rng.standard_normal(960)
    tapers = dpss(960, 4, 7)
    ref = np.mean([np.abs(np.fft.fft(h * x, 1024)) ** 2 for h in tapers], axis=0)
    ref = np.fft.fftshift(ref)
    out = ofdmgen.multitaper_psd(x)
    assert out["frequency"][0] == -0.5
    np.testing.assert_allclose(out["psd"], ref, rtol=1e-8)


def test_psd_distance_formula():
    rng = np.random.default_rng(2)
    pg = rng.uniform(0.5, 2.0, 256)
    pt = rng.uniform(0.5, 2.0, 256)
    r = np.log(pg / pt)
    df = 1.0 / 256
    ref = np.sqrt(np.sum(r**2) * df - (np.sum(r) * df) ** 2)
    assert ofdmgen.psd_distance(pg, pt) == pytest.approx(ref, rel=1e-10)
    assert ofdmgen.psd_distance(pg, 3.0 * pg) == pytest.approx(0.0, abs=1e-7)


def test_cp_correlation_peak():
    spec = ofdmgen.preset("complexity-512-medium")
    x = ofdmgen.generate_waveform(spec, 0)["waveform"]
    r = ofdmgen.cp_correlation(x, spec)
    assert r["expected_relative_lag"] == 384
    assert r["peak_relative_lag"] == [384] * 6
    assert r["max"] > 0.95


def test_container_files(tmp_path):
    raw = tmp_path / "raw.ofdg"
    ofdmgen.generate_file("complexity-128-small", 20, 7, str(raw))
    header, data = ofdmgen.read_container(str(raw))
    assert header["representation"] == "raw"
    assert data.shape == (20, 960, 2)

    version, h2, payload = read_container_numpy(raw)
    assert version == 1
    assert h2 == header
    np.testing.assert_array_equal(payload, data)

    x = ofdmgen.generate("complexity-128-small", 20, 7)
    np.testing.assert_array_equal(data[..., 0] + 1j * data[..., 1], x)

    stft_path = tmp_path / "stft.ofdg"
    ofdmgen.convert_file(str(raw), str(stft_path), "stft", "featurewise")
    version, h3, payload = read_container_numpy(stft_path)
    assert h3["item_shape"] == [2, 128, 33]
    assert h3["scaling"]["mode"] == "featurewise"
    assert payload.min() >= -1.0 and payload.max() <= 1.0
    np.testing.assert_allclose(ofdmgen.read_waveforms(str(stft_path)), x, atol=1e-6)


def test_channel_and_evaluate():
    spec = ofdmgen.preset("channel-epa5")
    gen = ofdmgen.generate(spec, 8, 1)
    tgt = ofdmgen.generate(spec, 8, 2)
    report = ofdmgen.evaluate(gen, tgt, spec)
    for key in ("psd_distance", "evm_db", "cp_relerr_pct", "coherence_bandwidth"):
        assert key in report
    assert report["coherence_bandwidth"] is not None

    x = ofdmgen.generate_waveform("complexity-128-small")["waveform"]
    y = ofdmgen.apply_channel(x, "ETU", 300.0, seed=5)
    assert y.shape == x.shape
    np.testing.assert_array_equal(y, ofdmgen.apply_channel(x, "ETU", 300.0, seed=5))


def test_errors_carry_codes(tmp_path):
    with pytest.raises(ofdmgen.Error) as e:
        ofdmgen.preset("nope")
    assert e.value.code == "invalid_argument"
    bad = tmp_path / "bad.ofdg"
    bad.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(ofdmgen.Error) as e:
        ofdmgen.read_container(str(bad))
    assert e.value.code == "format"
    with pytest.raises(ValueError):
        ofdmgen.generate({"symbol_len": 100}, 1, 1)
