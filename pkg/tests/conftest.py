"""Shared fixtures for pyesdp tests."""

import os
import sys

import pytest

# Add src to path for testing
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import pyesdp as pe

TRILATERATION_ANCHORS = [[0.3, 0.0], [0.0, 0.3], [-0.3, 0.0]]
TRILATERATION_SENSOR = [0.1, 0.05]


@pytest.fixture
def trilateration_network():
    """One sensor in range of three anchors, no sensor edges."""
    return pe.build_network(
        [TRILATERATION_SENSOR], TRILATERATION_ANCHORS, radio_range=1.0
    )


@pytest.fixture
def small_network():
    """Five sensors, anchors at the corners and center, plenty of edges."""
    return pe.generate_network(
        5, 5, 0.7, max_neighbors=3, seed=3, anchor_layout="symmetric"
    )


@pytest.fixture
def small_measured(small_network):
    return pe.apply_noise(small_network, 0.05, noise_seed=7)


@pytest.fixture
def settings():
    return pe.SolveSettings(tolerance=1e-7, max_iterations=50_000)
