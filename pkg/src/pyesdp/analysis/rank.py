from collections.abc import Mapping

import numpy as np

from ..utils.decorators import df
from ..utils.exceptions import InvalidParameterError
from ..utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_REL_TOL = 1e-6
# Blocks whose singular values all sit below this are reported as rank 0
DEFAULT_ABS_TOL = 1e-7


def numerical_rank(
    matrix: np.ndarray,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = 0.0,
) -> tuple[int, np.ndarray]:
    """
    Number of singular values above ``max(rel_tol * largest, abs_tol)``.

    Args:
        matrix (np.ndarray): The matrix.
        rel_tol (float): Threshold relative to the largest singular value,
            in (0, 1).
        abs_tol (float): Absolute floor of the threshold.

    Returns:
        tuple[int, np.ndarray]: The rank and the singular values in
        decreasing order.

    Raises:
        InvalidParameterError: For a non-finite matrix or a tolerance out
            of range.

    Examples:
        ```python
        numerical_rank(np.diag([1.0, 1e-12, 0.0, 0.0]))   # (1, array([...]))
        ```
    """
    if not 0 < rel_tol < 1:
        raise InvalidParameterError(
            f"rel_tol must lie in (0, 1), got {rel_tol}."
        )
    if abs_tol < 0:
        raise InvalidParameterError(
            f"abs_tol must be nonnegative, got {abs_tol}."
        )
    matrix = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise InvalidParameterError("numerical_rank got a non-finite matrix.")
    if matrix.size == 0:
        return 0, np.zeros(0)
    values = np.linalg.svd(np.atleast_2d(matrix), compute_uv=False)
    threshold = max(rel_tol * values[0], abs_tol)
    return int(np.sum(values > threshold)), values


@df
def rank_relation_report(
    z_blocks: Mapping[str, np.ndarray],
    s_blocks: Mapping[str, np.ndarray],
    q: int = 2,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
) -> list[dict]:
    """
    Per-edge ranks of the primal and dual blocks of one solve.

    For every sensor edge the table holds ``rank(Z + pI)``, ``rank(S)``,
    whether ``rank(S) + 4 <= 2q`` (``dual_rank_condition``), whether
    ``rank(Z + pI) + rank(S) <= 4`` (``complementarity_bound``), the trace
    of ``S`` and both spectra. Neither condition is asserted; a summary is
    logged.

    Args:
        z_blocks (Mapping[str, np.ndarray]): Edge key to ``Z_block + p I``.
        s_blocks (Mapping[str, np.ndarray]): Edge key to ``S_block``.
        q (int): Target rank of the relaxation.
        rel_tol (float): Relative rank tolerance.
        abs_tol (float): Absolute rank floor.
        df (bool): Return a DataFrame (default) or a list of dicts.

    Returns:
        pandas.DataFrame | list[dict]: One row per edge.

    Raises:
        InvalidParameterError: If the two maps cover different edges.

    Examples:
        ```python
        rank_relation_report(z_blocks, s_blocks)
        rank_relation_report(z_blocks, s_blocks, q=2, df=False)
        ```
    """
    if set(z_blocks) != set(s_blocks):
        only_z = sorted(set(z_blocks) - set(s_blocks))
        only_s = sorted(set(s_blocks) - set(z_blocks))
        raise InvalidParameterError(
            f"Block maps cover different edges (only primal: {only_z[:3]}, only dual: {only_s[:3]})."
        )

    records = []
    for key in z_blocks:
        rank_z, spectrum_z = numerical_rank(z_blocks[key], rel_tol, abs_tol)
        rank_s, spectrum_s = numerical_rank(s_blocks[key], rel_tol, abs_tol)
        records.append(
            {
                "edge": key,
                "rank_z": rank_z,
                "rank_s": rank_s,
                "dual_rank_condition": rank_s + 4 <= 2 * q,
                "complementarity_bound": rank_z + rank_s <= 4,
                "trace_s": float(np.trace(s_blocks[key])),
                "spectrum_z": spectrum_z.tolist(),
                "spectrum_s": spectrum_s.tolist(),
            }
        )

    if records:
        held = sum(r["dual_rank_condition"] for r in records)
        bounded = sum(r["complementarity_bound"] for r in records)
        logger.info(
            f"Rank relation over {len(records)} edges: rank(S)+4<=2q on {held}, "
            f"rank(Z+pI)+rank(S)<=4 on {bounded}"
        )
    return records
