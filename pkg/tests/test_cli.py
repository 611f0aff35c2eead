"""Tests for sweep configs, the sweep runner, the report and the CLI."""

import json

import numpy as np
import pandas as pd
import pytest

import pyesdp as pe
from pyesdp.cli.config import config_from_dict
from pyesdp.cli.main import main
from pyesdp.cli.summary import cell_column, load_results
from pyesdp.cli.sweep import derive_seeds, plan_tasks
from pyesdp.utils.schemas import (
    PAIRS_COLUMNS,
    RESULTS_COLUMNS,
    SUMMARY_COLUMNS,
    WALL_TIME_COLUMNS,
)

TINY = {
    "n": 6,
    "m": 4,
    "r": 0.5,
    "max_neighbors": 3,
    "sigma_grid": [0.0, 0.05, 0.1, 0.2],
    "repetitions": 10,
    "anchor_layout": "symmetric",
    "solver": {"tolerance": 1e-5, "max_iterations": 2000},
}


@pytest.fixture(scope="module")
def tiny_config():
    return pe.ExperimentConfig(**TINY)


@pytest.fixture(scope="module")
def tiny_results(tiny_config):
    return pe.run_sweep(tiny_config, workers=1)


def _row(method, sigma, seed, delta, time_s, n=40, iterations=100):
    return {
        "run_id": f"deadbeef-{method}-c0-s{seed}",
        "method": method,
        "n": n,
        "m": 5,
        "r": 0.3,
        "sigma": sigma,
        "p": 0.1 if method == "pesdp" else 0.0,
        "net_seed": seed,
        "noise_seed": seed,
        "status": "Optimal",
        "objective": 0.0,
        "dual_objective": 0.0,
        "gap": 0.0,
        "iterations": iterations,
        "formulation_time_s": 0.01,
        "solve_time_s": time_s,
        "delta": delta,
    }


@pytest.fixture
def noise_results():
    rows = [
        _row("esdp", 0.0, 0, 0.01, 1.0),
        _row("esdp", 0.0, 1, 0.03, 3.0),
        _row("esdp", 0.1, 0, 0.10, 2.0),
        _row("esdp", 0.1, 1, 0.20, 2.0),
        _row("pesdp", 0.0, 0, 0.01, 1.0),
        _row("pesdp", 0.0, 1, 0.01, 1.0),
        _row("pesdp", 0.1, 0, 0.08, 1.0),
        _row("pesdp", 0.1, 1, np.nan, 3.0),
    ]
    return pd.DataFrame(rows, columns=RESULTS_COLUMNS)


# ExperimentConfig


def test_default_config_is_desk_scale():
    config = pe.ExperimentConfig()
    assert config.cells() == [(40, 0.0), (40, 0.05), (40, 0.1), (40, 0.2)]
    assert config.methods == ("esdp", "pesdp")
    assert not config.is_size_sweep
    assert config.perturbation("esdp") == 0.0
    assert config.perturbation("pesdp") == 0.1


def test_size_sweep_cells():
    config = pe.ExperimentConfig(size_grid=[20, 40], size_sigma=0.05)
    assert config.is_size_sweep
    assert config.cells() == [(20, 0.05), (40, 0.05)]


def test_full_scale_keeps_grids():
    config = pe.ExperimentConfig(sigma_grid=[0.0, 0.3]).full_scale()
    assert (config.n, config.r, config.repetitions) == (300, 0.2, 50)
    assert config.sigma_grid == (0.0, 0.3)


def test_hash_ignores_workers_and_paths(tiny_config):
    same = tiny_config.replace(workers=4, results_path="elsewhere.csv")
    assert same.hash() == tiny_config.hash()
    assert tiny_config.replace(p=0.2).hash() != tiny_config.hash()
    assert len(tiny_config.hash()) == 64


@pytest.mark.parametrize(
    "changes",
    [
        {"methods": ["sdp"]},
        {"methods": []},
        {"methods": ["esdp", "esdp"]},
        {"n": 0},
        {"r": 0.0},
        {"repetitions": 0},
        {"sigma_grid": [-0.1]},
        {"sigma_grid": []},
        {"size_grid": [0, 10]},
        {"p": -0.1},
        {"workers": 0},
        {"solver": {"tolerance": -1.0}},
    ],
)
def test_invalid_config_values(changes):
    with pytest.raises(pe.InvalidParameterError):
        pe.ExperimentConfig(**changes)


def test_unknown_keys_are_configuration_errors():
    with pytest.raises(pe.ConfigurationError, match="sigmas"):
        config_from_dict({"sigmas": [0.1]})
    with pytest.raises(pe.ConfigurationError, match="alpha"):
        pe.ExperimentConfig(solver={"alpha": 1.0})
    with pytest.raises(pe.ConfigurationError):
        config_from_dict([1, 2])


def test_repetitions_alias():
    assert config_from_dict({"L": 3}).repetitions == 3
    assert config_from_dict({"L": 3}) == pe.ExperimentConfig(repetitions=3)
    with pytest.raises(pe.ConfigurationError, match="same field"):
        config_from_dict({"L": 3, "repetitions": 4})


def test_load_config(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"n": 12, "sigma_grid": [0.1]}), encoding="utf-8")
    config = pe.load_config(path)
    assert config.cells() == [(12, 0.1)]

    path.write_text('{"n": }', encoding="utf-8")
    with pytest.raises(pe.ConfigurationError, match="Cannot parse"):
        pe.load_config(path)
    with pytest.raises(pe.PyEsdpFileNotFoundError):
        pe.load_config(tmp_path / "missing.json")


# Sweep


def test_seeds_are_derived_per_instance(tiny_config):
    tasks = plan_tasks(tiny_config)
    assert len(tasks) == 4 * 10
    assert tasks[13][:2] == (1, 3)
    assert (tasks[13].net_seed, tasks[13].noise_seed) == derive_seeds(0, 1, 3)
    seeds = {(t.net_seed, t.noise_seed) for t in tasks}
    assert len(seeds) == len(tasks)
    assert derive_seeds(1, 1, 3) != derive_seeds(0, 1, 3)


def test_sweep_rows(tiny_config, tiny_results):
    results = tiny_results
    assert list(results.columns) == RESULTS_COLUMNS
    assert len(results) == 2 * 4 * 10

    expected = [
        (method, cell, seed)
        for method in ("esdp", "pesdp")
        for cell in range(4)
        for seed in range(10)
    ]
    prefix = tiny_config.hash()[:8]
    assert results["run_id"].tolist() == [
        f"{prefix}-{method}-c{cell}-s{seed}" for method, cell, seed in expected
    ]
    assert results["sigma"].tolist() == [
        TINY["sigma_grid"][cell] for _, cell, _ in expected
    ]
    assert set(results["status"]) <= {s.value for s in pe.SolveStatus}
    assert (results["iterations"] <= 2000).all()


def test_methods_share_network_and_noise(tiny_results):
    esdp = tiny_results[tiny_results["method"] == "esdp"].reset_index(drop=True)
    pesdp = tiny_results[tiny_results["method"] == "pesdp"].reset_index(drop=True)
    for column in ("net_seed", "noise_seed", "n", "sigma"):
        assert esdp[column].tolist() == pesdp[column].tolist()
    assert (esdp["p"] == 0.0).all()
    assert (pesdp["p"] == 0.1).all()


def test_sweep_is_deterministic(tiny_config):
    config = tiny_config.replace(sigma_grid=[0.1], repetitions=2)
    first = pe.run_sweep(config, workers=1).drop(columns=WALL_TIME_COLUMNS)
    second = pe.run_sweep(config, workers=1).drop(columns=WALL_TIME_COLUMNS)
    pd.testing.assert_frame_equal(first, second)


def test_instance_without_edges_keeps_its_rows():
    config = pe.ExperimentConfig(
        n=1, m=1, r=1e-6, sigma_grid=[0.0], repetitions=2, workers=1
    )
    results = pe.run_sweep(config, workers=1)
    assert len(results) == 4
    assert (results["status"] == "FormulationError").all()
    assert results["delta"].isna().all()
    assert (results["iterations"] == 0).all()


def test_cmd_sweep_writes_csv(tmp_path, tiny_config):
    config = tiny_config.replace(sigma_grid=[0.05], repetitions=1)
    out = tmp_path / "out" / "results.csv"
    written = pe.cmd_sweep(config, out, workers=1)
    back = load_results(out)
    assert len(back) == len(written) == 2
    assert back["run_id"].tolist() == written["run_id"].tolist()


# Report


def test_summarize_noise_sweep(noise_results):
    summary = pe.summarize(noise_results)
    assert list(summary.columns) == SUMMARY_COLUMNS
    assert cell_column(noise_results) == "sigma"

    rows = summary.set_index(["method", "cell"])
    assert rows.loc[("esdp", 0.0), "mean_PE"] == pytest.approx(0.02)
    assert rows.loc[("esdp", 0.0), "std_PE"] == pytest.approx(np.sqrt(2) * 0.01)
    assert rows.loc[("esdp", 0.0), "mean_solve_time_s"] == pytest.approx(2.0)
    assert rows.loc[("pesdp", 0.1), "mean_PE"] == pytest.approx(0.08)
    assert rows.loc[("pesdp", 0.1), "count"] == 1
    assert rows.loc[("pesdp", 0.1), "mean_solve_time_s"] == pytest.approx(2.0)


def test_cmd_report(tmp_path, noise_results):
    results_path = tmp_path / "results.csv"
    noise_results.to_csv(results_path, index=False)
    summary_path = tmp_path / "summary.csv"
    plot_path = tmp_path / "plot.csv"
    pairs_path = tmp_path / "pairs.csv"

    summary = pe.cmd_report(results_path, summary_path, plot_path, pairs_path)
    assert len(summary) == 4
    assert pd.read_csv(summary_path).columns.tolist() == SUMMARY_COLUMNS

    plot = pd.read_csv(plot_path)
    assert plot.columns.tolist() == [
        "cell",
        "mean_PE_esdp",
        "mean_PE_pesdp",
        "mean_solve_time_s_esdp",
        "mean_solve_time_s_pesdp",
    ]
    assert plot["mean_PE_esdp"].tolist() == pytest.approx([0.02, 0.15])
    assert pd.read_csv(pairs_path).columns.tolist() == PAIRS_COLUMNS


def test_report_needs_result_columns(tmp_path, noise_results):
    path = tmp_path / "results.csv"
    noise_results.drop(columns=["delta"]).to_csv(path, index=False)
    with pytest.raises(pe.SchemaError, match="delta"):
        pe.cmd_report(path, tmp_path / "summary.csv")
    with pytest.raises(pe.PyEsdpFileNotFoundError):
        pe.cmd_report(tmp_path / "missing.csv", tmp_path / "summary.csv")


def test_noise_orderings(noise_results):
    checks = pe.assess_orderings(pe.summarize(noise_results), noise_results)
    assert checks["kind"] == "noise"
    assert checks["pe_nondecreasing"] == {"esdp": True, "pesdp": True}
    assert checks["pesdp_pe_not_worse_at_max_sigma"] is True
    assert checks["pesdp_pairs_not_worse_at_max_sigma"] == (1, 2)


def test_paired_table(noise_results):
    pairs = pe.paired_table(noise_results)
    assert pairs.columns.tolist() == PAIRS_COLUMNS
    assert len(pairs) == 4
    top = pairs[pairs["cell"] == 0.1].set_index("net_seed")
    assert top.loc[0, "delta_diff"] == pytest.approx(-0.02)
    assert bool(top.loc[0, "pesdp_not_worse"])
    # a missing PESDP delta never counts in its favour
    assert np.isnan(top.loc[1, "delta_diff"])
    assert not bool(top.loc[1, "pesdp_not_worse"])
    assert top.loc[1, "status_pesdp"] == "Optimal"
    assert top.loc[1, "iterations_esdp"] == 100


def test_paired_table_needs_both_methods(noise_results):
    with pytest.raises(pe.SchemaError, match="pesdp"):
        pe.paired_table(noise_results[noise_results["method"] == "esdp"])


@pytest.mark.parametrize(
    "curve, expected",
    [
        ([0.1, 0.099, 0.2], True),
        ([0.1, 0.05, 0.2], False),
        ([0.1, 0.099, 0.2, 0.199], False),
        ([0.3, 0.2, 0.1], False),
    ],
)
def test_single_small_inversion_is_tolerated(curve, expected):
    summary = pd.DataFrame(
        {
            "method": ["esdp"] * len(curve),
            "cell": [0.05 * k for k in range(len(curve))],
            "mean_PE": curve,
            "std_PE": 0.0,
            "mean_solve_time_s": 1.0,
            "count": 10,
        }
    )
    assert pe.assess_orderings(summary)["pe_nondecreasing"]["esdp"] is expected


def test_size_orderings():
    results = pd.DataFrame(
        [
            _row("esdp", 0.1, 0, 0.05, 2.0, n=20, iterations=400),
            _row("pesdp", 0.1, 0, 0.04, 1.0, n=20, iterations=200),
            _row("esdp", 0.1, 0, 0.05, 2.0, n=40, iterations=400),
            _row("pesdp", 0.1, 0, 0.04, 3.0, n=40, iterations=900),
        ],
        columns=RESULTS_COLUMNS,
    )
    assert cell_column(results) == "n"
    checks = pe.assess_orderings(pe.summarize(results), results)
    assert checks["kind"] == "size"
    assert checks["pesdp_time_not_worse"] == {20: True, 40: False}


# Command line


def test_main_generate_and_solve(tmp_path):
    net_path = tmp_path / "net.json"
    report_path = tmp_path / "report.json"
    code = main(
        [
            "--log-level",
            "WARNING",
            "generate",
            "--sensors",
            "5",
            "--anchors",
            "4",
            "--radio",
            "0.6",
            "--seed",
            "2",
            "--anchor-layout",
            "symmetric",
            "--out",
            str(net_path),
        ]
    )
    assert code == 0
    assert pe.load_network(net_path).n == 5

    code = main(
        [
            "--log-level",
            "WARNING",
            "solve",
            "--net",
            str(net_path),
            "--method",
            "pesdp",
            "--sigma",
            "0.05",
            "--noise-seed",
            "1",
            "--max-iterations",
            "500",
            "--out",
            str(report_path),
        ]
    )
    assert code == 0
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["method"] == "pesdp"
    assert report["noise_std"] == 0.05
    assert len(report["estimated_positions"]) == 5


def test_main_usage_errors(tmp_path):
    assert main(["--log-level", "WARNING", "solve", "--net", "x.json"]) == 2
    code = main(
        [
            "--log-level",
            "WARNING",
            "solve",
            "--net",
            str(tmp_path / "missing.json"),
            "--method",
            "sdp",
            "--out",
            str(tmp_path / "r.json"),
        ]
    )
    assert code == 2
    code = main(
        [
            "--log-level",
            "WARNING",
            "solve",
            "--net",
            str(tmp_path / "missing.json"),
            "--method",
            "esdp",
            "--out",
            str(tmp_path / "r.json"),
        ]
    )
    assert code == 2


def test_main_report(tmp_path, noise_results):
    results_path = tmp_path / "results.csv"
    noise_results.to_csv(results_path, index=False)
    summary_path = tmp_path / "summary.csv"
    code = main(
        [
            "--log-level",
            "WARNING",
            "report",
            "--in",
            str(results_path),
            "--out",
            str(summary_path),
            "--pairs",
            str(tmp_path / "pairs.csv"),
        ]
    )
    assert code == 0
    assert len(pd.read_csv(summary_path)) == 4
    assert len(pd.read_csv(tmp_path / "pairs.csv")) == 4


def test_init_writes_loadable_configs(tmp_path):
    assert main(["--log-level", "WARNING", "init", "--dir", str(tmp_path)]) == 0
    noise = pe.load_config(tmp_path / "sweep.json")
    assert noise == pe.ExperimentConfig()
    size = pe.load_config(tmp_path / "sweep_size.json")
    assert size.cells() == [(20, 0.1), (40, 0.1), (60, 0.1)]
    full = pe.load_config(tmp_path / "sweep_full.json")
    assert (full.n, full.repetitions, full.workers) == (300, 50, 4)
    assert (tmp_path / ".env").exists()
    assert (tmp_path / ".gitignore").exists()
