import numpy as np

from ..formulation.builder import FormulationMap
from ..formulation.layout import assemble_z
from ..network.noise import MeasuredNetwork
from ..solver.cones import smat
from ..solver.settings import SolveResult
from ..utils.exceptions import FormulationError, NotOptimalError
from ..utils.logging import get_logger

logger = get_logger(__name__)


def _require_optimal(result: SolveResult, what: str) -> None:
    if not result.is_optimal:
        raise NotOptimalError(
            f"{what} needs an optimal solve, got status {result.status.value} "
            f"after {result.iterations} iterations. Rerun with a higher "
            "max_iterations or a looser tolerance."
        )


def _check_sizes(result: SolveResult, fmap: FormulationMap) -> None:
    if result.y.size != fmap.n_variables:
        raise FormulationError(
            f"Result has {result.y.size} variables, the map expects {fmap.n_variables}."
        )


def extract_dual_blocks(
    result: SolveResult, fmap: FormulationMap
) -> dict[str, np.ndarray]:
    """
    Dual PSD block ``S`` of every sensor edge.

    Args:
        result (SolveResult): An optimal solve.
        fmap (FormulationMap): The map of the solved program.

    Returns:
        dict[str, np.ndarray]: Sensor edge key to its 4x4 ``S`` block.

    Raises:
        NotOptimalError: If the solve is not optimal.

    Examples:
        ```python
        blocks = extract_dual_blocks(result, fmap)
        sum(np.trace(S) for S in blocks.values())
        ```
    """
    _require_optimal(result, "Dual block extraction")
    _check_sizes(result, fmap)
    return {
        key: smat(result.lam[block.rows])
        for key, block in fmap.psd_block_registry.items()
    }


def extract_z_blocks(
    y: np.ndarray, fmap: FormulationMap, perturbed: bool = True
) -> dict[str, np.ndarray]:
    """
    Principal submatrix ``Z[{0, 1, 2+i, 2+j}]`` of every sensor edge.

    Args:
        y (np.ndarray): Decision vector.
        fmap (FormulationMap): The map of the program.
        perturbed (bool): Add ``p_ij * I4`` to each block.

    Returns:
        dict[str, np.ndarray]: Sensor edge key to its 4x4 block.
    """
    z = assemble_z(y, fmap.z_layout)
    blocks = {}
    for key, block in fmap.psd_block_registry.items():
        index = np.array(block.z_indices)
        sub = z[np.ix_(index, index)]
        if perturbed:
            sub = sub + fmap.perturbation[key] * np.eye(len(index))
        blocks[key] = sub
    return blocks


def complementarity_residuals(
    result: SolveResult, fmap: FormulationMap
) -> dict[str, float]:
    """
    ``trace((Z_block + p I) S_block)`` for every sensor edge.

    Raises:
        NotOptimalError: If the solve is not optimal.
    """
    s_blocks = extract_dual_blocks(result, fmap)
    z_blocks = extract_z_blocks(result.y, fmap)
    return {
        key: float(np.trace(z_blocks[key] @ s_blocks[key])) for key in s_blocks
    }


def evaluate_dual_objective(
    result: SolveResult, mn: MeasuredNetwork, fmap: FormulationMap
) -> float:
    """
    Dual objective assembled from the individual multipliers.

    With ``omega_e = -lam[edge row]`` and ``u = -lam[base rows]`` the value
    is ``sum_e omega_e (d_e + noise_e)^2 + u_11 + u_22
    - sum_ij p_ij trace(S_ij)``, the same quantity as ``-b' lam``.

    Args:
        result (SolveResult): An optimal solve.
        mn (MeasuredNetwork): The measured network the program came from.
        fmap (FormulationMap): The map of the solved program.

    Returns:
        float: The dual objective.

    Raises:
        NotOptimalError: If the solve is not optimal.

    Examples:
        ```python
        evaluate_dual_objective(result, mn, fmap) - result.dual_objective
        ```
    """
    _require_optimal(result, "Dual objective evaluation")
    _check_sizes(result, fmap)
    lam = result.lam

    edge_term = sum(
        -lam[row] * mn.squared_measurement(key)
        for key, row in fmap.edge_rows.items()
    )
    base = fmap.equality_rows["base"]
    identity_term = -lam[base[0]] - lam[base[1]]
    trace_term = sum(
        fmap.perturbation[key] * np.trace(smat(lam[block.rows]))
        for key, block in fmap.psd_block_registry.items()
    )
    return float(edge_term + identity_term - trace_term)
