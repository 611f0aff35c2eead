from collections.abc import Sequence

import numpy as np

from ..formulation.builder import FormulationMap
from ..solver.settings import SolveResult, SolveStatus
from ..utils.exceptions import (
    FormulationError,
    InvalidParameterError,
    NotOptimalError,
)
from ..utils.logging import get_logger

logger = get_logger(__name__)

POSITION_STATUSES = (SolveStatus.OPTIMAL, SolveStatus.MAX_ITERATIONS)


def extract_positions(
    result: SolveResult | np.ndarray, fmap: FormulationMap
) -> np.ndarray:
    """
    Reads the estimated sensor positions ``(Z[0, 2+j], Z[1, 2+j])``.

    Sensors without any edge have no variables and are placed at
    ``fmap.fallback_position``.

    Args:
        result (SolveResult | np.ndarray): A solve result, or a decision
            vector such as the output of ``true_solution_vector``.
        fmap (FormulationMap): The map of the program that was solved.

    Returns:
        np.ndarray: Positions, shape (n, 2).

    Raises:
        NotOptimalError: If the result status is neither ``Optimal`` nor
            ``MaxIterations``.
        FormulationError: If the decision vector does not fit the map.

    Examples:
        ```python
        positions = extract_positions(solve(program), fmap)
        ```
    """
    if isinstance(result, SolveResult):
        if result.status not in POSITION_STATUSES:
            raise NotOptimalError(
                f"Cannot read positions from a solve with status {result.status.value}."
            )
        y = result.y
    else:
        y = np.asarray(result, dtype=float)

    if y.shape != (fmap.n_variables,):
        raise FormulationError(
            f"Decision vector has shape {y.shape}, the map expects ({fmap.n_variables},)."
        )

    layout = fmap.z_layout
    positions = np.tile(fmap.fallback_position, (layout.n, 1)).astype(float)
    for j in layout.located_sensors:
        first, second = layout.x_slots(j)
        positions[j] = (y[first], y[second])
    return positions


def position_error(estimated: np.ndarray, truth: np.ndarray) -> float:
    """
    Mean Euclidean distance between estimated and true positions.

    Args:
        estimated (np.ndarray): Estimated positions, shape (n, 2).
        truth (np.ndarray): True positions, shape (n, 2).

    Returns:
        float: The per-network error.

    Raises:
        InvalidParameterError: If the shapes differ or are empty.

    Examples:
        ```python
        position_error(truth + [0.1, 0.0], truth)   # 0.1
        ```
    """
    estimated = np.asarray(estimated, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimated.shape != truth.shape:
        raise InvalidParameterError(
            f"Position arrays differ in shape: {estimated.shape} vs {truth.shape}."
        )
    if truth.size == 0:
        raise InvalidParameterError("Cannot compute the error of no positions.")
    return float(np.mean(np.linalg.norm(estimated - truth, axis=-1)))


def average_position_error(deltas: Sequence[float]) -> float:
    """
    Arithmetic mean of per-network errors.

    Raises:
        InvalidParameterError: If ``deltas`` is empty.
    """
    values = np.asarray(list(deltas), dtype=float)
    if values.size == 0:
        raise InvalidParameterError(
            "average_position_error needs at least one value."
        )
    return float(np.mean(values))
