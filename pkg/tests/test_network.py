"""Tests for network generation and validation."""

import numpy as np
import pytest

import pyesdp as pe
from pyesdp.network.network import parse_edge_key


def test_generate_network_is_deterministic():
    """The same inputs give an equal network, another seed does not."""
    first = pe.generate_network(30, 5, 0.3, seed=11)
    second = pe.generate_network(30, 5, 0.3, seed=11)
    other = pe.generate_network(30, 5, 0.3, seed=12)
    assert first == second
    assert first != other


def test_generated_networks_hold_invariants():
    """Edges are in range, sorted, capped and carry exact distances."""
    for seed in range(20):
        net = pe.generate_network(30, 4, 0.3, max_neighbors=5, seed=seed)
        pe.validate_network(net)

        for i, j in net.sensor_edges:
            assert i < j
            d = np.linalg.norm(net.sensors[i] - net.sensors[j])
            assert d < net.radio_range
            assert net.true_distances[pe.sensor_edge_key(i, j)] == pytest.approx(
                d, abs=1e-12
            )

        expected = {
            (j, k)
            for j in range(net.n)
            for k in range(net.m)
            if np.linalg.norm(net.sensors[j] - net.anchors[k]) < 0.3
        }
        assert set(net.anchor_edges) == expected
        assert list(net.sensor_edges) == sorted(net.sensor_edges)
        assert np.all(net.sensors >= -0.5) and np.all(net.sensors <= 0.5)


def test_neighbor_cap_is_respected():
    """No sensor keeps more sensor edges than max_neighbors."""
    net = pe.generate_network(60, 5, 0.5, max_neighbors=3, seed=2)
    degree = np.zeros(net.n, dtype=int)
    for i, j in net.sensor_edges:
        degree[i] += 1
        degree[j] += 1
    assert degree.max() <= 3
    assert len(net.sensor_edges) > 0


def test_network_without_edges():
    """Sensors out of range of everything give an empty edge set."""
    net = pe.build_network(
        [[-0.4, -0.4], [0.4, 0.4]], [[0.0, 0.45]], radio_range=0.1
    )
    assert net.sensor_edges == ()
    assert net.anchor_edges == ()
    summary = pe.network_summary(net)
    assert summary["isolated_sensors"] == 2
    assert summary["unanchored_sensors"] == 2


def test_trilateration_network(trilateration_network):
    """One sensor, three anchor edges, no sensor edges."""
    net = trilateration_network
    assert (net.n, net.m) == (1, 3)
    assert net.sensor_edges == ()
    assert net.anchor_edges == ((0, 0), (0, 1), (0, 2))
    assert net.edge_keys == ["a:0-0", "a:0-1", "a:0-2"]


def test_symmetric_anchor_layout():
    """Five anchors are the four corners and the center."""
    anchors = pe.symmetric_anchor_layout(5)
    expected = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5], [0, 0]]
    np.testing.assert_allclose(anchors, expected)
    assert pe.symmetric_anchor_layout(8).shape == (8, 2)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n": 0, "m": 5, "radio_range": 0.3},
        {"n": 10, "m": 0, "radio_range": 0.3},
        {"n": 10, "m": 5, "radio_range": 0.0},
        {"n": 10, "m": 5, "radio_range": 0.3, "region": (0.5, 0.5)},
        {"n": 10, "m": 5, "radio_range": 0.3, "anchor_layout": "grid"},
        {"n": 10, "m": 5, "radio_range": 0.3, "max_neighbors": 0},
    ],
)
def test_generate_network_rejects_bad_input(kwargs):
    """Nonpositive sizes, a degenerate region or unknown layouts fail."""
    with pytest.raises(pe.InvalidParameterError):
        pe.generate_network(**kwargs)


def test_validation_rejects_wrong_distance():
    """A stored distance that disagrees with the geometry is rejected."""
    with pytest.raises(pe.NetworkValidationError, match="s:0-1"):
        pe.Network(
            sensors=[[0.0, 0.0], [0.1, 0.0]],
            anchors=[[0.4, 0.4]],
            radio_range=0.3,
            sensor_edges=((0, 1),),
            anchor_edges=(),
            true_distances={"s:0-1": 0.2},
        )


def test_validation_rejects_out_of_range_edge():
    """Edges must be strictly shorter than the radio range."""
    with pytest.raises(pe.NetworkValidationError, match="radio range"):
        pe.Network(
            sensors=[[0.0, 0.0], [0.3, 0.0]],
            anchors=[[0.4, 0.4]],
            radio_range=0.3,
            sensor_edges=((0, 1),),
            anchor_edges=(),
            true_distances={"s:0-1": 0.3},
        )


def test_validation_rejects_unsorted_edges():
    """Edge lists are canonical: sorted and without duplicates."""
    with pytest.raises(pe.NetworkValidationError, match="sorted"):
        pe.Network(
            sensors=[[0.0, 0.0], [0.1, 0.0], [0.0, 0.1]],
            anchors=[[0.4, 0.4]],
            radio_range=0.3,
            sensor_edges=((0, 2), (0, 1)),
            anchor_edges=(),
            true_distances={"s:0-1": 0.1, "s:0-2": 0.1},
        )


def test_edge_keys():
    """Keys are canonical and parse back to their endpoints."""
    assert pe.sensor_edge_key(4, 2) == "s:2-4"
    assert pe.anchor_edge_key(3, 1) == "a:3-1"
    assert parse_edge_key("s:2-4") == ("s", 2, 4)
    for bad in ("x:1-2", "s:1", "s:a-b", "s:-1-2"):
        with pytest.raises(pe.InvalidParameterError):
            parse_edge_key(bad)
