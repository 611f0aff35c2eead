import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import NamedTuple

import numpy as np
import pandas as pd

from ..analysis.report import localize
from ..network.network import generate_network
from ..network.noise import apply_noise
from ..utils.exceptions import FormulationError, SolverError
from ..utils.logging import get_logger
from ..utils.schemas import RESULTS_COLUMNS
from ..utils.settings import load_env_settings
from .config import ExperimentConfig

logger = get_logger(__name__)

# Statuses written when a solve raises instead of returning
SOLVER_ERROR_STATUS = "SolverError"
FORMULATION_ERROR_STATUS = "FormulationError"


class SweepTask(NamedTuple):
    """One (cell, seed) instance, solved by every method of the sweep."""

    cell_index: int
    seed_index: int
    n: int
    sigma: float
    net_seed: int
    noise_seed: int


def derive_seeds(
    base_seed: int, cell_index: int, seed_index: int
) -> tuple[int, int]:
    """
    Network and noise seeds of one instance.

    Both come from ``SeedSequence((base_seed, cell_index, seed_index))``,
    so every instance is reproducible on its own and independent of the
    order the sweep runs in.
    """
    state = np.random.SeedSequence(
        (base_seed, cell_index, seed_index)
    ).generate_state(2)
    return int(state[0]), int(state[1])


def plan_tasks(config: ExperimentConfig) -> list[SweepTask]:
    """Every (cell, seed) instance of a sweep, in cell then seed order."""
    tasks = []
    for cell_index, (n, sigma) in enumerate(config.cells()):
        for seed_index in range(config.repetitions):
            net_seed, noise_seed = derive_seeds(
                config.base_seed, cell_index, seed_index
            )
            tasks.append(
                SweepTask(cell_index, seed_index, n, sigma, net_seed, noise_seed)
            )
    return tasks


def run_id(config_hash: str, method: str, task: SweepTask) -> str:
    return f"{config_hash[:8]}-{method}-c{task.cell_index}-s{task.seed_index}"


def run_task(config: ExperimentConfig, task: SweepTask) -> dict[str, dict]:
    """
    Solves one instance with every method.

    Both methods see the same network and the same noise realisation. A
    method whose program cannot be built or solved keeps its row, with
    status ``FormulationError`` or ``SolverError`` and NaN results.

    Returns:
        dict[str, dict]: Method to its results row.
    """
    net = generate_network(
        task.n,
        config.m,
        config.r,
        max_neighbors=config.max_neighbors,
        seed=task.net_seed,
        anchor_layout=config.anchor_layout,
    )
    mn = apply_noise(net, task.sigma, noise_seed=task.noise_seed)
    settings = config.solve_settings()
    digest = config.hash()

    rows = {}
    for method in config.methods:
        p = config.perturbation(method)
        row = {
            "run_id": run_id(digest, method, task),
            "method": method,
            "n": task.n,
            "m": config.m,
            "r": config.r,
            "sigma": task.sigma,
            "p": p,
            "net_seed": task.net_seed,
            "noise_seed": task.noise_seed,
        }
        started = time.monotonic()
        try:
            report = localize(mn, method, p, settings)
        except (FormulationError, SolverError) as e:
            status = (
                FORMULATION_ERROR_STATUS
                if isinstance(e, FormulationError)
                else SOLVER_ERROR_STATUS
            )
            logger.warning(f"{row['run_id']}: {status}: {e}")
            row.update(
                status=status,
                objective=np.nan,
                dual_objective=np.nan,
                gap=np.nan,
                iterations=0,
                formulation_time_s=np.nan,
                solve_time_s=time.monotonic() - started,
                delta=np.nan,
            )
        else:
            row.update(
                status=report.status.value,
                objective=report.primal_objective,
                dual_objective=report.dual_objective,
                gap=report.gap,
                iterations=report.iterations,
                formulation_time_s=report.formulation_time_s,
                solve_time_s=report.solve_time_s,
                delta=report.delta,
            )
        rows[method] = row
    return rows


def _resolve_workers(config: ExperimentConfig, workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    return max(1, load_env_settings().get("workers", config.workers))


def run_sweep(
    config: ExperimentConfig, workers: int | None = None
) -> pd.DataFrame:
    """
    Runs every (method, cell, seed) solve of a sweep.

    Instances may be solved in worker processes; the rows are always
    returned in (method, cell, seed) order. Non-optimal solves keep their
    row with the solver status.

    Args:
        config (ExperimentConfig): The sweep.
        workers (int | None): Worker processes. Defaults to
            ``PYESDP_WORKERS`` and then ``config.workers``.

    Returns:
        pandas.DataFrame: One row per solve, columns as the results CSV.

    Examples:
        ```python
        run_sweep(load_config('sweep.json'), workers=4)
        ```
    """
    tasks = plan_tasks(config)
    workers = _resolve_workers(config, workers)
    logger.info(
        f"Sweep {config.hash()[:8]}: {len(tasks)} instances x "
        f"{len(config.methods)} methods on {workers} worker(s)"
    )

    finished = {}
    if workers == 1:
        for done, task in enumerate(tasks, start=1):
            finished[task[:2]] = run_task(config, task)
            logger.debug(f"Instance {done}/{len(tasks)} done")
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {
                executor.submit(run_task, config, task): task for task in tasks
            }
            for done, future in enumerate(as_completed(futures), start=1):
                task = futures[future]
                finished[task[:2]] = future.result()
                logger.debug(f"Instance {done}/{len(tasks)} done")

    records = [
        finished[task[:2]][method]
        for method in config.methods
        for task in tasks
    ]
    results = pd.DataFrame.from_records(records, columns=RESULTS_COLUMNS)
    not_optimal = int((results["status"] != "Optimal").sum())
    if not_optimal:
        logger.warning(f"{not_optimal} of {len(results)} solves not optimal")
    return results


def cmd_sweep(
    config: ExperimentConfig,
    out: str | Path,
    full_scale: bool = False,
    workers: int | None = None,
) -> pd.DataFrame:
    """
    Runs a sweep and writes the results CSV.

    Args:
        config (ExperimentConfig): The sweep.
        out (str | Path): Results CSV path.
        full_scale (bool): Swap in the full-scale network and repetition
            count, keeping the grids.
        workers (int | None): Worker processes.

    Returns:
        pandas.DataFrame: The rows written.
    """
    if full_scale:
        config = config.full_scale()
        logger.warning(
            f"Full-scale sweep: n={config.n}, r={config.r}, "
            f"{config.repetitions} seeds per cell. This is a long run."
        )
    results = run_sweep(config, workers)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    results.to_csv(out, index=False)
    logger.success(f"Wrote {len(results)} rows to {out}")
    return results
