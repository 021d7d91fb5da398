import cmath
import json
import math

import pytest

import edgenilm


def test_sampling_rate():
    assert edgenilm.sampling_rate(1e6, 1, 1000) == pytest.approx(1000.0)
    assert edgenilm.sampling_rate(21_714_286, 4, 810.5) == pytest.approx(21_714_286 / 4 / 810.5)


def test_fft_matches_direct_sum():
    x = [math.sin(0.3 * k) + 0.1 * k for k in range(16)]
    spec = edgenilm.fft(x)
    for k, value in enumerate(spec):
        ref = sum(x[j] * cmath.exp(-2j * math.pi * j * k / 16) for j in range(16))
        assert abs(value - ref) < 1e-9
    assert edgenilm.fft_skip_reorder(x, [1, 3]) == [spec[1], spec[3]]


def test_power_and_harmonics():
    n = 512
    v = [math.sqrt(2) * 230 * math.sin(2 * math.pi * 4 * k / n) for k in range(n)]
    i = [math.sqrt(2) * math.sin(2 * math.pi * 4 * k / n - math.pi / 3) for k in range(n)]
    pf = edgenilm.power_features(v, i)
    assert pf["P"] == pytest.approx(115.0)
    assert pf["Q"] == pytest.approx(199.186, rel=1e-6)
    orders, mags, _ = edgenilm.odd_harmonics(i)
    assert orders[0] == 1 and mags[0] == pytest.approx(math.sqrt(2))


def test_dtw_and_detection():
    distance, path = edgenilm.dtw([1, 2, 3], [1, 2, 2, 3])
    assert distance == 0.0 and path[0] == (0, 0)
    events = edgenilm.detect_events([0.0] * 51 + [60.0] * 100)
    assert events == [(50, "on", 60.0)]


def test_pipeline_on_default_recording():
    v, i, fs = edgenilm.synth_scenario()
    events = edgenilm.extract_events(v, i, fs)
    assert [e["dir"] for e in events] == ["on", "off"]
    assert events[0]["feature"][0] == pytest.approx(60.0, rel=0.05)
    current = edgenilm.extract_events([], i, fs, mode="current")
    assert len(current[0]["feature"]) == 17


def test_model_round_trip_and_errors():
    model = edgenilm.MobileMini(20, 5, seed=3)
    probs = model.predict_proba([0.0] * 20)
    assert sum(probs) == pytest.approx(1.0)
    clone = edgenilm.MobileMini.from_json(model.to_json())
    assert clone.predict_proba([0.5] * 20) == model.predict_proba([0.5] * 20)
    with pytest.raises(edgenilm.Error):
        model.predict_proba([0.0] * 17)


def test_metrics_and_split():
    m = edgenilm.evaluate([0] * 8 + [1] * 2 + [0] * 3 + [1] * 7, [0] * 10 + [1] * 10, 2)
    assert m["accuracy"] == pytest.approx(0.75)
    train, val, test = edgenilm.split_dataset([0] * 20 + [1] * 20, seed=1)
    assert (len(train), len(val), len(test)) == (28, 4, 8)
    assert json.loads(edgenilm.default_config_json())["seed"] == 7
