import time
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, NamedTuple

import numpy as np

from ..formulation.builder import (
    DEFAULT_PERTURBATION,
    FormulationMap,
    build_program,
)
from ..formulation.layout import true_solution_vector
from ..network.network import Network
from ..network.noise import MeasuredNetwork
from ..solver.admm import solve
from ..solver.settings import SolveResult, SolveSettings, SolveStatus
from ..utils.logging import get_logger
from ..utils.schemas import REPORT_SCHEMA_VERSION
from ..utils.utils import write_json
from .duals import extract_dual_blocks, extract_z_blocks
from .metrics import POSITION_STATUSES, extract_positions, position_error
from .rank import DEFAULT_ABS_TOL, DEFAULT_REL_TOL, numerical_rank

logger = get_logger(__name__)


class BlockData(NamedTuple):
    """Primal and dual block of one sensor edge at the optimum."""

    edge: str
    z_block: np.ndarray
    s_block: np.ndarray
    complementarity: float
    rank_z: int
    rank_s: int
    spectrum_z: np.ndarray
    spectrum_s: np.ndarray


@dataclass
class LocalizationReport:
    """
    Result of localizing one measured network.

    ``z_block`` in :class:`BlockData` is ``Z_block + p I``. ``blocks`` and
    ``trace_sum`` are only filled for optimal solves; positions and
    ``delta`` need an ``Optimal`` or ``MaxIterations`` status and are NaN
    otherwise.
    """

    method: str
    status: SolveStatus
    estimated_positions: np.ndarray
    delta: float
    primal_objective: float
    dual_objective: float
    gap: float
    iterations: int
    formulation_time_s: float
    solve_time_s: float
    n: int
    m: int
    noise_std: float
    noise_seed: int
    perturbation: dict[str, float] = field(default_factory=dict)
    blocks: list[BlockData] = field(default_factory=list)
    trace_sum: float = float("nan")
    unconstrained_sensors: tuple[int, ...] = ()


def build_report(
    result: SolveResult,
    mn: MeasuredNetwork,
    fmap: FormulationMap,
    formulation_time_s: float = 0.0,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
) -> LocalizationReport:
    """
    Collects positions, error, objectives and per-edge block data.

    Args:
        result (SolveResult): The solve.
        mn (MeasuredNetwork): The measured network.
        fmap (FormulationMap): The map of the solved program.
        formulation_time_s (float): Time spent building the program.
        rel_tol (float): Relative rank tolerance.
        abs_tol (float): Absolute rank floor.

    Returns:
        LocalizationReport: The report.
    """
    if result.status in POSITION_STATUSES:
        positions = extract_positions(result, fmap)
        delta = position_error(positions, mn.network.sensors)
    else:
        positions = np.full((mn.n, 2), np.nan)
        delta = float("nan")

    blocks = []
    trace_sum = float("nan")
    if result.is_optimal:
        s_blocks = extract_dual_blocks(result, fmap)
        z_blocks = extract_z_blocks(result.y, fmap)
        for key in fmap.psd_block_registry:
            z, s = z_blocks[key], s_blocks[key]
            rank_z, spectrum_z = numerical_rank(z, rel_tol, abs_tol)
            rank_s, spectrum_s = numerical_rank(s, rel_tol, abs_tol)
            blocks.append(
                BlockData(
                    edge=key,
                    z_block=z,
                    s_block=s,
                    complementarity=float(np.trace(z @ s)),
                    rank_z=rank_z,
                    rank_s=rank_s,
                    spectrum_z=spectrum_z,
                    spectrum_s=spectrum_s,
                )
            )
        trace_sum = float(sum(np.trace(b.s_block) for b in blocks))

    return LocalizationReport(
        method=fmap.method,
        status=result.status,
        estimated_positions=positions,
        delta=delta,
        primal_objective=result.primal_objective,
        dual_objective=result.dual_objective,
        gap=result.gap,
        iterations=result.iterations,
        formulation_time_s=formulation_time_s,
        solve_time_s=result.wall_time_seconds,
        n=mn.n,
        m=mn.m,
        noise_std=mn.noise_std,
        noise_seed=mn.noise_seed,
        perturbation=dict(fmap.perturbation),
        blocks=blocks,
        trace_sum=trace_sum,
        unconstrained_sensors=fmap.unconstrained_sensors,
    )


def localize(
    mn: MeasuredNetwork,
    method: Literal["esdp", "pesdp"] = "pesdp",
    p: float | Mapping[str, float] = DEFAULT_PERTURBATION,
    settings: SolveSettings | None = None,
    single_sensor_blocks: bool = False,
) -> LocalizationReport:
    """
    Builds, solves and reports one relaxation of a measured network.

    Args:
        mn (MeasuredNetwork): The measured network.
        method (str): ``"esdp"`` or ``"pesdp"``.
        p (float | Mapping[str, float]): Perturbation for ``"pesdp"``.
        settings (SolveSettings | None): Solver parameters.
        single_sensor_blocks (bool): Add 3x3 blocks for anchored sensors
            without sensor edges.

    Returns:
        LocalizationReport: The report.

    Raises:
        OptionNotAvailableError: For an unknown method.

    Examples:
        ```python
        net = generate_network(40, 5, 0.3, seed=1)
        report = localize(apply_noise(net, 0.1, noise_seed=2), 'pesdp', p=0.1)
        report.delta
        ```
    """
    started = time.monotonic()
    program, fmap = build_program(
        mn, method, p, single_sensor_blocks=single_sensor_blocks
    )
    formulation_time = time.monotonic() - started
    result = solve(program, settings)
    report = build_report(result, mn, fmap, formulation_time)
    logger.info(
        f"{method} on n={mn.n}, sigma={mn.noise_std}: status {result.status.value}, "
        f"delta={report.delta:.4e}"
    )
    return report


def block_perturbations(
    result: SolveResult | np.ndarray, fmap: FormulationMap, net: Network
) -> dict[str, float]:
    """
    Frobenius distance of every edge block from its true value.

    Compares ``Z_block`` of the solve (without ``p I``) with the block
    built from the true positions.

    Args:
        result (SolveResult | np.ndarray): A solve or a decision vector.
        fmap (FormulationMap): The map of the program.
        net (Network): The network with the true positions.

    Returns:
        dict[str, float]: Sensor edge key to ``||Z_noisy - Z_true||_F``.
    """
    y = result.y if isinstance(result, SolveResult) else np.asarray(result)
    solved = extract_z_blocks(y, fmap, perturbed=False)
    truth = extract_z_blocks(
        true_solution_vector(net, fmap.z_layout), fmap, perturbed=False
    )
    return {
        key: float(np.linalg.norm(solved[key] - truth[key])) for key in solved
    }


def _number(value: float) -> float | None:
    return None if value is None or not np.isfinite(value) else float(value)


def report_to_dict(report: LocalizationReport) -> dict:
    """
    JSON form of a report.

    Non-finite numbers become ``null``. Block matrices are written as
    nested lists.
    """
    return {
        "version": REPORT_SCHEMA_VERSION,
        "method": report.method,
        "status": report.status.value,
        "n": report.n,
        "m": report.m,
        "noise_std": report.noise_std,
        "noise_seed": report.noise_seed,
        "delta": _number(report.delta),
        "primal_objective": _number(report.primal_objective),
        "dual_objective": _number(report.dual_objective),
        "gap": _number(report.gap),
        "iterations": report.iterations,
        "formulation_time_s": report.formulation_time_s,
        "solve_time_s": report.solve_time_s,
        "trace_sum": _number(report.trace_sum),
        "unconstrained_sensors": list(report.unconstrained_sensors),
        "estimated_positions": [
            [_number(v) for v in point]
            for point in report.estimated_positions
        ],
        "blocks": [
            {
                "edge": block.edge,
                "p": report.perturbation.get(block.edge, 0.0),
                "complementarity": block.complementarity,
                "rank_z": block.rank_z,
                "rank_s": block.rank_s,
                "z_block": block.z_block.tolist(),
                "s_block": block.s_block.tolist(),
                "spectrum_z": block.spectrum_z.tolist(),
                "spectrum_s": block.spectrum_s.tolist(),
            }
            for block in report.blocks
        ],
    }


def save_report(report: LocalizationReport, path: str | Path) -> None:
    """
    Writes a report as JSON.

    Examples:
        ```python
        save_report(localize(mn, 'esdp'), 'reports/esdp.json')
        ```
    """
    write_json(report_to_dict(report), path)
    logger.success(f"Report saved to {path}")
