from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..utils.exceptions import InvalidParameterError
from .cones import ConeDims


@dataclass(frozen=True, eq=False)
class ConicProgram:
    """
    A conic program in standard form.

    ``min c'y  subject to  A y + s = b,  s in K`` where ``K`` is the product
    described by ``cones`` (zero rows, nonnegative rows, PSD blocks in svec
    form). The arrays are made read-only on construction.
    """

    c: np.ndarray
    A: sp.csc_matrix
    b: np.ndarray
    cones: ConeDims

    def __post_init__(self):
        c = np.array(self.c, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        A = sp.csc_matrix(self.A, dtype=float)
        A.sort_indices()
        if A.shape != (b.size, c.size):
            raise InvalidParameterError(
                f"A has shape {A.shape}, expected ({b.size}, {c.size})."
            )
        if self.cones.rows() != b.size:
            raise InvalidParameterError(
                f"The cones hold {self.cones.rows()} rows but b has {b.size}."
            )
        if not (
            np.all(np.isfinite(c))
            and np.all(np.isfinite(b))
            and np.all(np.isfinite(A.data))
        ):
            raise InvalidParameterError("Program data must be finite.")
        c.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A", A)

    @property
    def n_variables(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b.size

    def implied_slack(self, y: np.ndarray) -> np.ndarray:
        """``b - A y``: the slack that makes ``y`` satisfy the rows exactly."""
        return self.b - self.A @ np.asarray(y, dtype=float)
