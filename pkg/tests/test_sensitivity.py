"""Tests for the perturbation sensitivity check."""

import os

import pytest

import pyesdp as pe

run_slow = pytest.mark.skipif(
    os.getenv("PYESDP_RUN_SLOW", "0") in ("", "0"), reason="PYESDP_RUN_SLOW not set"
)


@pytest.mark.parametrize("eps", [0.0, 1e-6, 0.05])
def test_step_out_of_range(small_measured, eps):
    with pytest.raises(pe.InvalidParameterError, match="eps"):
        pe.sensitivity_check(small_measured, eps=eps)


def test_negative_perturbation(small_measured):
    with pytest.raises(pe.InvalidParameterError, match="nonnegative"):
        pe.sensitivity_check(small_measured, p=-0.1)


def test_network_too_large():
    net = pe.generate_network(11, 4, 0.4, seed=0)
    with pytest.raises(pe.InvalidParameterError, match="at most 10"):
        pe.sensitivity_check(pe.apply_noise(net, 0.1, noise_seed=0))


def _five_sensor_instance(seed, sigma=0.1):
    net = pe.generate_network(5, 4, 0.6, max_neighbors=4, seed=seed)
    return pe.apply_noise(net, sigma, noise_seed=seed)


@pytest.mark.slow
@run_slow
def test_flat_direction_on_exact_instance(small_network):
    """With exact distances every p > 0 keeps the truth optimal, so p* is flat."""
    mn = pe.apply_noise(small_network, 0.0)
    report = pe.sensitivity_check(
        mn, p=0.1, eps=1e-3, settings=pe.SolveSettings(max_iterations=400_000)
    )
    change = abs(report.objective_at_p_eps - report.objective_at_p)
    assert change <= report.noise_floor * report.eps
    assert not report.kink
    assert report.agrees


@pytest.mark.slow
@run_slow
def test_halving_the_step_does_not_hurt():
    mn = _five_sensor_instance(3)
    settings = pe.SolveSettings(max_iterations=400_000)
    full = pe.sensitivity_check(mn, p=0.1, eps=1e-3, settings=settings)
    half = pe.sensitivity_check(mn, p=0.1, eps=5e-4, settings=settings)
    assert half.predicted == pytest.approx(full.predicted, abs=1e-6)
    assert half.absolute_error <= (
        full.absolute_error + full.noise_floor + half.noise_floor
    )


@pytest.mark.slow
@run_slow
def test_slope_matches_dual_trace_on_ten_networks():
    """d(optimal value)/dp agrees with -sum trace(S) on five-sensor networks.

    Networks whose solves stop short of 1e-9 are counted, not hidden.
    """
    settings = pe.SolveSettings(max_iterations=400_000)
    reports, unresolved = {}, []
    for seed in range(10):
        try:
            reports[seed] = pe.sensitivity_check(
                _five_sensor_instance(seed), p=0.1, eps=1e-3, settings=settings
            )
        except pe.NotOptimalError:
            unresolved.append(seed)

    for seed, report in reports.items():
        # S blocks are PSD, so the prediction is never positive
        assert report.predicted <= report.noise_floor, seed
        assert report.relative_error >= 0.0
    agreeing = [seed for seed, report in reports.items() if report.agrees]
    assert len(unresolved) <= 2, unresolved
    assert len(agreeing) >= 6, {
        seed: (r.finite_difference, r.predicted, r.kink) for seed, r in reports.items()
    }
