"""
Cone bookkeeping and projections.

The cone product is ordered as zero cone rows, then nonnegative rows, then
one block per PSD cone. A PSD block of order ``k`` takes ``k(k+1)/2`` rows
holding ``svec`` of the matrix: the column-stacked upper triangle with the
off-diagonal entries multiplied by ``sqrt(2)``, so that
``svec(A) @ svec(B) == trace(A @ B)``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..utils.exceptions import InvalidParameterError

SQRT2 = np.sqrt(2.0)


def svec_size(k: int) -> int:
    """Number of svec rows of an order ``k`` block."""
    return k * (k + 1) // 2


def svec_index(i: int, j: int) -> int:
    """Position of entry ``(i, j)`` inside an svec vector."""
    if i > j:
        i, j = j, i
    return j * (j + 1) // 2 + i


@lru_cache(maxsize=None)
def _svec_pattern(k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # np.tril_indices walks (row, col) with col <= row in row order, which
    # read transposed is the column-stacked upper triangle
    cols, rows = np.tril_indices(k)
    scale = np.where(rows == cols, 1.0, SQRT2)
    for array in (rows, cols, scale):
        array.setflags(write=False)
    return rows, cols, scale


def _order_from_length(length: int) -> int:
    k = int(round((np.sqrt(8 * length + 1) - 1) / 2))
    if svec_size(k) != length or length == 0:
        raise InvalidParameterError(
            f"Length {length} is not the svec length of a square matrix."
        )
    return k


@dataclass(frozen=True)
class ConeDims:
    """
    Sizes of the cone product.

    Attributes:
        zero (int): Rows in the zero cone.
        nonneg (int): Rows in the nonnegative cone.
        psd (tuple[int, ...]): Order of every PSD block, in row order.
    """

    zero: int = 0
    nonneg: int = 0
    psd: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "psd", tuple(int(k) for k in self.psd))
        if self.zero < 0 or self.nonneg < 0 or any(k < 1 for k in self.psd):
            raise InvalidParameterError(f"Invalid cone sizes: {self}.")

    def rows(self) -> int:
        """Total number of rows of the product."""
        return self.zero + self.nonneg + sum(svec_size(k) for k in self.psd)

    def psd_offsets(self) -> list[int]:
        """First row of every PSD block."""
        offsets = []
        row = self.zero + self.nonneg
        for k in self.psd:
            offsets.append(row)
            row += svec_size(k)
        return offsets


def svec(matrix: np.ndarray) -> np.ndarray:
    """
    Vectorizes a symmetric matrix, preserving the trace inner product.

    The input is symmetrized first.

    Args:
        matrix (np.ndarray): Square matrix, shape (k, k).

    Returns:
        np.ndarray: Vector of length ``k(k+1)/2``.

    Raises:
        InvalidParameterError: If the input is not square.

    Examples:
        ```python
        svec(np.eye(4))   # ones on slots 0, 2, 5, 9
        ```
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidParameterError(
            f"svec needs a square matrix, got shape {matrix.shape}."
        )
    matrix = (matrix + matrix.T) / 2
    rows, cols, scale = _svec_pattern(matrix.shape[0])
    return matrix[rows, cols] * scale


def smat(vector: np.ndarray) -> np.ndarray:
    """
    Inverse of :func:`svec`.

    Args:
        vector (np.ndarray): svec vector of length ``k(k+1)/2``.

    Returns:
        np.ndarray: Symmetric matrix, shape (k, k).

    Raises:
        InvalidParameterError: If the length is not triangular.
    """
    vector = np.asarray(vector, dtype=float).ravel()
    k = _order_from_length(vector.size)
    rows, cols, scale = _svec_pattern(k)
    matrix = np.zeros((k, k))
    matrix[rows, cols] = vector / scale
    matrix[cols, rows] = vector / scale
    return matrix


def svec_batch(matrices: np.ndarray) -> np.ndarray:
    """svec of a stack of matrices, shape (B, k, k) to (B, k(k+1)/2)."""
    rows, cols, scale = _svec_pattern(matrices.shape[-1])
    return matrices[:, rows, cols] * scale


def smat_batch(vectors: np.ndarray, k: int) -> np.ndarray:
    """smat of a stack of svec vectors, shape (B, k(k+1)/2) to (B, k, k)."""
    rows, cols, scale = _svec_pattern(k)
    matrices = np.zeros((vectors.shape[0], k, k))
    values = vectors / scale
    matrices[:, rows, cols] = values
    matrices[:, cols, rows] = values
    return matrices


def project_psd(matrix: np.ndarray) -> np.ndarray:
    """
    Nearest positive semidefinite matrix in Frobenius norm.

    Negative eigenvalues are clipped to zero.

    Args:
        matrix (np.ndarray): Symmetric matrix.

    Returns:
        np.ndarray: The projection.

    Raises:
        InvalidParameterError: If the input is not square or holds NaN.

    Examples:
        ```python
        project_psd(np.diag([3.0, -2.0, 0.0, 1.0]))   # diag(3, 0, 0, 1)
        ```
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidParameterError(
            f"project_psd needs a square matrix, got shape {matrix.shape}."
        )
    if not np.all(np.isfinite(matrix)):
        raise InvalidParameterError("project_psd got a non-finite matrix.")
    values, vectors = np.linalg.eigh((matrix + matrix.T) / 2)
    if values[0] >= 0:
        return (matrix + matrix.T) / 2
    projected = (vectors * np.maximum(values, 0.0)) @ vectors.T
    return (projected + projected.T) / 2


class ConeProjector:
    """
    Projection onto a fixed cone product.

    The PSD blocks are grouped by order and projected with one batched
    eigendecomposition per group.
    """

    def __init__(self, cones: ConeDims):
        self.cones = cones
        self.n_rows = cones.rows()
        self.nonneg = slice(cones.zero, cones.zero + cones.nonneg)
        self.groups = []
        offsets = cones.psd_offsets()
        for k in sorted(set(cones.psd)):
            starts = np.array(
                [o for o, order in zip(offsets, cones.psd) if order == k],
                dtype=int,
            )
            index = starts[:, None] + np.arange(svec_size(k))[None, :]
            self.groups.append((k, index))

    def __call__(self, s: np.ndarray) -> np.ndarray:
        if s.shape != (self.n_rows,):
            raise InvalidParameterError(
                f"Slack has length {s.size}, the cones have {self.n_rows} rows."
            )
        out = np.empty_like(s)
        out[: self.cones.zero] = 0.0
        out[self.nonneg] = np.maximum(s[self.nonneg], 0.0)
        for k, index in self.groups:
            matrices = smat_batch(s[index], k)
            values, vectors = np.linalg.eigh(matrices)
            clipped = np.maximum(values, 0.0)
            projected = (vectors * clipped[:, None, :]) @ np.swapaxes(
                vectors, 1, 2
            )
            out[index] = svec_batch(projected)
        return out

    def block_min_eigenvalues(self, v: np.ndarray) -> list[tuple[int, np.ndarray, np.ndarray]]:
        """Smallest eigenvalue and Frobenius norm of every PSD block of ``v``."""
        found = []
        for k, index in self.groups:
            matrices = smat_batch(v[index], k)
            values = np.linalg.eigvalsh(matrices)
            norms = np.linalg.norm(matrices, axis=(1, 2))
            found.append((k, values[:, 0], norms))
        return found


def project_cones(s: np.ndarray, cones: ConeDims) -> np.ndarray:
    """
    Projects a slack vector onto the cone product.

    Zero rows become 0, nonnegative rows are clipped at 0 and every PSD
    block is replaced by ``svec(project_psd(smat(block)))``.

    Args:
        s (np.ndarray): Slack vector.
        cones (ConeDims): The cone product.

    Returns:
        np.ndarray: The projected vector.

    Raises:
        InvalidParameterError: If the length does not match the cones or
            the vector holds NaN.
    """
    s = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(s)):
        raise InvalidParameterError("project_cones got a non-finite vector.")
    return ConeProjector(cones)(s)


def cone_violation(
    v: np.ndarray, cones: ConeDims, dual: bool = False, atol: float = 0.0
) -> float:
    """
    Largest violation of cone membership.

    Nonnegative rows contribute ``max(-v)``. PSD blocks contribute
    ``(-smallest_eigenvalue - atol) / ||block||_F``, and nothing when the
    block is zero. Zero rows contribute ``max|v|`` for the primal cone and
    nothing for its dual, the free cone.

    Args:
        v (np.ndarray): Slack or multiplier vector.
        cones (ConeDims): The cone product.
        dual (bool): Check the dual cone instead.
        atol (float): Eigenvalue shortfall ignored on every PSD block.

    Returns:
        float: ``0.0`` for a member, a positive number otherwise.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (cones.rows(),):
        raise InvalidParameterError(
            f"Vector has length {v.size}, the cones have {cones.rows()} rows."
        )
    violation = 0.0
    if not dual and cones.zero:
        violation = max(violation, float(np.max(np.abs(v[: cones.zero]))))
    if cones.nonneg:
        segment = v[cones.zero : cones.zero + cones.nonneg]
        violation = max(violation, float(np.max(-segment)))
    for _, smallest, norms in ConeProjector(cones).block_min_eigenvalues(v):
        shortfall = -np.asarray(smallest) - atol
        norms = np.asarray(norms)
        relative = np.divide(
            shortfall, norms, out=np.zeros_like(shortfall), where=norms > 0
        )
        violation = max(violation, float(np.max(relative)))
    return max(violation, 0.0)


def in_dual_cone(
    lam: np.ndarray, cones: ConeDims, tol: float = 1e-6, atol: float = 1e-12
) -> bool:
    """
    Whether ``lam`` lies in the dual cone product within ``tol``.

    Zero rows are free, nonnegative rows need ``lam >= -tol`` and every PSD
    block needs a smallest eigenvalue ``>= -tol * ||block||_F - atol``.
    ``atol`` covers rounding on blocks that are numerically zero.

    Examples:
        ```python
        in_dual_cone(result.lam, program.cones, tol=1e-6)
        ```
    """
    return cone_violation(lam, cones, dual=True, atol=atol) <= tol
