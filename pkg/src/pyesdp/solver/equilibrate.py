from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..utils.logging import get_logger
from .cones import ConeDims, svec_size

logger = get_logger(__name__)

MIN_SCALING = 1e-4
MAX_SCALING = 1e4


class Equilibration(NamedTuple):
    """
    A scaled copy of the program data.

    The scaled program is ``(D A E, D b, E c)``. A solution of it maps back
    with ``y = E y_hat``, ``s = s_hat / D`` and ``lam = D lam_hat``.
    """

    A: sp.csc_matrix
    b: np.ndarray
    c: np.ndarray
    row_scale: np.ndarray
    col_scale: np.ndarray


def _block_max(norms: np.ndarray, cones: ConeDims) -> np.ndarray:
    """Replace the row norms of every PSD block by the block maximum."""
    if not cones.psd:
        return norms
    start = cones.zero + cones.nonneg
    sizes = np.array([svec_size(k) for k in cones.psd])
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    block_max = np.maximum.reduceat(norms[start:], starts)
    out = norms.copy()
    out[start:] = np.repeat(block_max, sizes)
    return out


def _clip(norms: np.ndarray) -> np.ndarray:
    norms = np.where(norms < MIN_SCALING, 1.0, norms)
    return np.minimum(norms, MAX_SCALING)


def ruiz_equilibrate(
    A: sp.spmatrix,
    b: np.ndarray,
    c: np.ndarray,
    cones: ConeDims,
    iterations: int = 15,
) -> Equilibration:
    """
    Ruiz equilibration of a conic program.

    Each pass divides every row and every column of ``A`` by the square root
    of its infinity norm. Rows of one PSD block share a single factor (the
    block maximum) so the scaled slack stays in the same cone.

    Args:
        A (sp.spmatrix): Constraint matrix, shape (rows, variables).
        b (np.ndarray): Right-hand side.
        c (np.ndarray): Cost vector.
        cones (ConeDims): The cone product of the rows.
        iterations (int): Number of passes.

    Returns:
        Equilibration: Scaled data and the row and column factors.

    Examples:
        ```python
        scaled = ruiz_equilibrate(prog.A, prog.b, prog.c, prog.cones)
        ```
    """
    scaled = sp.csc_matrix(A, dtype=float, copy=True)
    n_rows, n_cols = scaled.shape
    row_scale = np.ones(n_rows)
    col_scale = np.ones(n_cols)

    for _ in range(iterations):
        if scaled.nnz == 0:
            break
        col_norms = _clip(np.ravel(spla.norm(scaled, ord=np.inf, axis=0)))
        row_norms = _clip(
            _block_max(
                np.ravel(spla.norm(scaled, ord=np.inf, axis=1)), cones
            )
        )
        d = 1.0 / np.sqrt(row_norms)
        e = 1.0 / np.sqrt(col_norms)
        scaled = sp.diags(d) @ scaled @ sp.diags(e)
        row_scale *= d
        col_scale *= e

    scaled = sp.csc_matrix(scaled)
    logger.debug(
        f"Ruiz scaling: rows in [{row_scale.min():.3e}, {row_scale.max():.3e}], "
        f"columns in [{col_scale.min():.3e}, {col_scale.max():.3e}]"
    )
    return Equilibration(
        A=scaled,
        b=row_scale * np.asarray(b, dtype=float),
        c=col_scale * np.asarray(c, dtype=float),
        row_scale=row_scale,
        col_scale=col_scale,
    )
