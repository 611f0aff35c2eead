"""Tests for measurement noise and network files."""

import json

import numpy as np
import pytest

import pyesdp as pe
from pyesdp.network.noise import standard_normal_draw


def test_zero_noise_keeps_true_distances(small_network):
    """sigma = 0 measures every edge exactly."""
    mn = pe.apply_noise(small_network, 0.0, noise_seed=5)
    for key in small_network.edge_keys:
        assert mn.noise_samples[key] == 0.0
        assert mn.measured_distances[key] == small_network.true_distances[key]
        assert mn.squared_measurement(key) == small_network.true_distances[key] ** 2


def test_noise_scales_the_same_draws(small_network):
    """Two noise levels with one seed scale identical standard draws."""
    low = pe.apply_noise(small_network, 0.01, noise_seed=3)
    high = pe.apply_noise(small_network, 0.1, noise_seed=3)
    for key in small_network.edge_keys:
        assert high.noise_samples[key] == pytest.approx(
            10 * low.noise_samples[key], rel=1e-12
        )
        assert low.noise_samples[key] == pytest.approx(
            0.01 * standard_normal_draw(3, key), rel=1e-15
        )


def test_noise_is_deterministic_per_edge(small_network):
    """The draw of an edge depends only on the seed and the edge."""
    a = pe.apply_noise(small_network, 0.1, noise_seed=9)
    b = pe.apply_noise(small_network, 0.1, noise_seed=9)
    c = pe.apply_noise(small_network, 0.1, noise_seed=10)
    assert a == b
    assert a != c
    key = small_network.edge_keys[0]
    assert standard_normal_draw(9, key) == standard_normal_draw(9, key)


def test_measured_distance_is_absolute(small_network):
    """Measured lengths are |d + noise| and never negative."""
    mn = pe.apply_noise(small_network, 1.0, noise_seed=1)
    for key in small_network.edge_keys:
        signed = small_network.true_distances[key] + mn.noise_samples[key]
        assert mn.measured_distances[key] == abs(signed)
        assert mn.squared_measurement(key) == pytest.approx(signed**2)


def test_apply_noise_rejects_bad_input(small_network):
    with pytest.raises(pe.InvalidParameterError):
        pe.apply_noise(small_network, -0.1)
    with pytest.raises(pe.OptionNotAvailableError):
        pe.apply_noise(small_network, 0.1, noise_model="uniform")


def test_save_and_load_network(tmp_path, small_network):
    """A saved network loads back equal."""
    path = tmp_path / "net.json"
    pe.save_network(small_network, path)
    assert pe.load_network(path) == small_network


def test_save_and_load_measured_network(tmp_path, small_measured):
    """A saved measured network loads back equal, samples included."""
    path = tmp_path / "nested" / "measured.json"
    pe.save_network(small_measured, path)
    loaded = pe.load_network(path)
    assert isinstance(loaded, pe.MeasuredNetwork)
    assert loaded == small_measured

    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["version"] == 1
    assert data["kind"] == "measured"
    assert list(data["true_distances"]) == small_measured.edge_keys


def test_load_rejects_other_version(tmp_path, small_network):
    path = tmp_path / "net.json"
    pe.save_network(small_network, path)
    data = json.loads(path.read_text(encoding="utf-8"))
    data["version"] = 99
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(pe.SchemaVersionError):
        pe.load_network(path)


def test_load_names_the_bad_field(tmp_path, small_network):
    path = tmp_path / "net.json"
    pe.save_network(small_network, path)
    data = json.loads(path.read_text(encoding="utf-8"))
    data["sensors"] = "not a list"
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(pe.SchemaError, match="sensors"):
        pe.load_network(path)


def test_load_reports_json_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "version": 1,\n  "sensors": [\n}', encoding="utf-8")
    with pytest.raises(pe.SchemaError, match="line"):
        pe.load_network(path)


def test_load_detects_tampered_measurement(tmp_path, small_measured):
    """measured_distances must equal |true + noise| exactly."""
    path = tmp_path / "measured.json"
    pe.save_network(small_measured, path)
    data = json.loads(path.read_text(encoding="utf-8"))
    key = small_measured.edge_keys[0]
    data["measured_distances"][key] += 1e-3
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(pe.NetworkValidationError, match=key):
        pe.load_network(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(pe.PyEsdpFileNotFoundError):
        pe.load_network(tmp_path / "missing.json")


def test_noise_variance_over_many_edges():
    """sigma = 0.1 gives a sample variance within 10% of 0.01."""
    dense = pe.generate_network(150, 4, 2.0, max_neighbors=149, seed=11)
    assert len(dense.edge_keys) >= 10_000
    mn = pe.apply_noise(dense, 0.1, noise_seed=12)
    samples = np.array(list(mn.noise_samples.values()))
    assert np.var(samples, ddof=1) == pytest.approx(0.01, rel=0.1)
    assert abs(samples.mean()) <= 0.01


def test_round_trip_on_random_instances(tmp_path):
    for seed in range(100):
        net = pe.generate_network(
            8, 4, 0.5, max_neighbors=3, seed=seed, anchor_layout="random"
        )
        mn = pe.apply_noise(net, 0.1, noise_seed=seed)
        net_path = tmp_path / f"net-{seed}.json"
        mn_path = tmp_path / f"measured-{seed}.json"
        pe.save_network(net, net_path)
        pe.save_network(mn, mn_path)
        assert pe.load_network(net_path) == net, seed
        assert pe.load_network(mn_path) == mn, seed


@pytest.mark.parametrize(
    "field, value", [("max_neighbors", "5"), ("seed", 1.5), ("seed", True)]
)
def test_load_checks_optional_integer_fields(tmp_path, small_network, field, value):
    path = tmp_path / "net.json"
    pe.save_network(small_network, path)
    data = json.loads(path.read_text(encoding="utf-8"))
    data[field] = value
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(pe.SchemaError, match=field):
        pe.load_network(path)
