from pathlib import Path

import numpy as np
import pandas as pd

from ..utils.exceptions import PyEsdpFileNotFoundError, SchemaError
from ..utils.logging import get_logger
from ..utils.schemas import PAIRS_COLUMNS, RESULTS_COLUMNS, SUMMARY_COLUMNS

logger = get_logger(__name__)

# Relative size of the single decrease allowed in a PE curve
INVERSION_TOLERANCE = 0.05


def load_results(path: str | Path) -> pd.DataFrame:
    """
    Reads a results CSV written by a sweep.

    Raises:
        PyEsdpFileNotFoundError: If the file does not exist.
        SchemaError: If columns are missing.
    """
    path = Path(path)
    if not path.exists():
        raise PyEsdpFileNotFoundError(f"Results file not found: {path}")
    results = pd.read_csv(path)
    missing = [c for c in RESULTS_COLUMNS if c not in results.columns]
    if missing:
        raise SchemaError(f"{path} is missing result columns {missing}.")
    return results


def cell_column(results: pd.DataFrame) -> str:
    """``"n"`` when the sensor count varies (a size sweep), else ``"sigma"``."""
    return "n" if results["n"].nunique() > 1 else "sigma"


def summarize(results: pd.DataFrame) -> pd.DataFrame:
    """
    Mean position error and solve time per (method, cell).

    ``mean_PE`` averages ``delta`` over the rows where it is available and
    ``count`` is the number of those rows. ``std_PE`` is the sample
    standard deviation. ``mean_solve_time_s`` covers every row of the cell.

    Args:
        results (pandas.DataFrame): Rows of a results CSV.

    Returns:
        pandas.DataFrame: Columns ``method, cell, mean_PE, std_PE,
        mean_solve_time_s, count``, sorted by method and cell.

    Examples:
        ```python
        summarize(load_results('results.csv'))
        ```
    """
    column = cell_column(results)
    grouped = results.assign(cell=results[column]).groupby(
        ["method", "cell"], sort=True
    )
    summary = grouped.agg(
        mean_PE=("delta", "mean"),
        std_PE=("delta", "std"),
        mean_solve_time_s=("solve_time_s", "mean"),
        count=("delta", "count"),
    ).reset_index()
    return summary[SUMMARY_COLUMNS]


def plot_data(summary: pd.DataFrame) -> pd.DataFrame:
    """
    One row per cell with a PE and a time column per method.

    Columns are ``cell``, then ``mean_PE_<method>`` and
    ``mean_solve_time_s_<method>`` for each method.
    """
    table = summary.pivot(
        index="cell", columns="method", values=["mean_PE", "mean_solve_time_s"]
    )
    table.columns = [f"{value}_{method}" for value, method in table.columns]
    return table.reset_index()


def paired_table(results: pd.DataFrame) -> pd.DataFrame:
    """
    ESDP and PESDP side by side for every network of a sweep.

    Rows are matched on ``(cell, net_seed)``; both methods saw the same
    noise draw. ``delta_diff`` is ``delta_pesdp - delta_esdp`` and
    ``pesdp_not_worse`` is true where that difference is at most zero.
    Pairs with a missing delta on either side keep ``NaN`` and are never
    counted as not worse.

    Raises:
        SchemaError: If the results lack rows of either method.

    Examples:
        ```python
        pairs = paired_table(load_results("results.csv"))
        pairs.groupby("cell")["pesdp_not_worse"].sum()
        ```
    """
    missing = {"esdp", "pesdp"} - set(results["method"].unique())
    if missing:
        raise SchemaError(
            f"Paired comparison needs rows of both methods, missing {sorted(missing)}."
        )
    keyed = results.assign(cell=results[cell_column(results)])[
        ["cell", "net_seed", "method", "delta", "status", "iterations"]
    ]
    esdp, pesdp = (
        keyed[keyed["method"] == method].drop(columns="method")
        for method in ("esdp", "pesdp")
    )
    table = esdp.merge(
        pesdp, on=["cell", "net_seed"], how="outer", suffixes=("_esdp", "_pesdp")
    )
    table["delta_diff"] = table["delta_pesdp"] - table["delta_esdp"]
    table["pesdp_not_worse"] = table["delta_diff"] <= 0.0
    return table[PAIRS_COLUMNS].sort_values(["cell", "net_seed"], ignore_index=True)


def _nondecreasing(values: list[float]) -> tuple[bool, list[int]]:
    inversions = [
        k
        for k in range(1, len(values))
        if values[k] < values[k - 1]
    ]
    if not inversions:
        return True, []
    if len(inversions) > 1:
        return False, inversions
    k = inversions[0]
    larger = max(values[k - 1], values[k])
    return values[k - 1] - values[k] <= INVERSION_TOLERANCE * larger, inversions


def assess_orderings(
    summary: pd.DataFrame, results: pd.DataFrame | None = None
) -> dict:
    """
    Qualitative checks on a sweep summary.

    For a noise sweep: whether mean PE is nondecreasing in sigma for each
    method (one inversion of at most 5% of the larger value is allowed),
    and whether PESDP's mean PE is at most ESDP's at the largest sigma.
    For a size sweep: whether PESDP's mean solve time is at most ESDP's at
    every size; violations are logged with mean iteration counts taken
    from ``results``.

    Checks are logged and returned, never raised.

    Args:
        summary (pandas.DataFrame): Output of :func:`summarize`.
        results (pandas.DataFrame | None): The raw rows, for iteration
            counts and to tell the sweep kind apart.

    Returns:
        dict: ``kind`` and the individual checks.
    """
    kind = (
        "size"
        if results is not None and cell_column(results) == "n"
        else "noise"
    )
    methods = sorted(summary["method"].unique())
    checks = {"kind": kind}

    if kind == "noise":
        monotone = {}
        for method in methods:
            curve = summary[summary["method"] == method].sort_values("cell")
            ok, inversions = _nondecreasing(curve["mean_PE"].tolist())
            monotone[method] = ok
            level = logger.info if ok else logger.warning
            level(
                f"{method}: mean PE nondecreasing in sigma: {ok}"
                + (f" (inversions at cells {inversions})" if inversions else "")
            )
        checks["pe_nondecreasing"] = monotone
        if {"esdp", "pesdp"} <= set(methods):
            top = summary["cell"].max()
            at_top = summary[summary["cell"] == top].set_index("method")
            better = bool(
                at_top.loc["pesdp", "mean_PE"] <= at_top.loc["esdp", "mean_PE"]
            )
            checks["pesdp_pe_not_worse_at_max_sigma"] = better
            level = logger.info if better else logger.warning
            level(
                f"At sigma={top}: PESDP PE {at_top.loc['pesdp', 'mean_PE']:.4e}, "
                f"ESDP PE {at_top.loc['esdp', 'mean_PE']:.4e}"
            )
            if results is not None:
                pairs = paired_table(results)
                pairs = pairs[pairs["cell"] == top]
                wins = int(pairs["pesdp_not_worse"].sum())
                checks["pesdp_pairs_not_worse_at_max_sigma"] = (wins, len(pairs))
                logger.info(
                    f"At sigma={top}: PESDP not worse on {wins} of {len(pairs)} "
                    f"paired networks, median difference "
                    f"{pairs['delta_diff'].median():+.4e}"
                )
        return checks

    if {"esdp", "pesdp"} <= set(methods):
        times = summary.pivot(
            index="cell", columns="method", values="mean_solve_time_s"
        )
        faster = {}
        for size, row in times.iterrows():
            ok = bool(row["pesdp"] <= row["esdp"])
            faster[int(size)] = ok
            if not ok:
                iterations = (
                    results[results["n"] == size]
                    .groupby("method")["iterations"]
                    .mean()
                )
                logger.warning(
                    f"n={size}: PESDP time {row['pesdp']:.3f}s > ESDP time "
                    f"{row['esdp']:.3f}s (mean iterations: PESDP "
                    f"{iterations.get('pesdp', np.nan):.0f}, ESDP "
                    f"{iterations.get('esdp', np.nan):.0f})"
                )
        checks["pesdp_time_not_worse"] = faster
    return checks


def cmd_report(
    results_path: str | Path,
    out: str | Path,
    plot_data_path: str | Path | None = None,
    pairs_path: str | Path | None = None,
) -> pd.DataFrame:
    """
    Aggregates a results CSV into a summary CSV and a plot-data CSV.

    Args:
        results_path (str | Path): Results CSV from a sweep.
        out (str | Path): Summary CSV path.
        plot_data_path (str | Path | None): Plot-data CSV path, skipped
            when ``None``.
        pairs_path (str | Path | None): Per-network ESDP / PESDP pairs CSV
            (see :func:`paired_table`), skipped when ``None``.

    Returns:
        pandas.DataFrame: The summary.

    Examples:
        ```python
        cmd_report('results.csv', 'summary.csv', 'plot.csv', 'pairs.csv')
        ```
    """
    results = load_results(results_path)
    summary = summarize(results)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    summary.to_csv(out, index=False)
    logger.success(f"Summary of {len(results)} rows written to {out}")
    if plot_data_path is not None:
        plot_data(summary).to_csv(plot_data_path, index=False)
        logger.success(f"Plot data written to {plot_data_path}")
    if pairs_path is not None:
        paired_table(results).to_csv(pairs_path, index=False)
        logger.success(f"Paired comparison written to {pairs_path}")
    assess_orderings(summary, results)
    return summary
