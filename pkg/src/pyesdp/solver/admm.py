"""
Operator-splitting solver for conic programs in standard form.

Every iteration solves one linear system with a cached factorization of the
quasi-definite matrix ``[[sigma I, A'], [A, -R^-1]]``, projects a relaxed
slack onto the cone product and updates the multipliers. ``R`` is diagonal:
``rho`` on cone rows and ``rho * equality_rho_scale`` on zero-cone rows.
"""

import time

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..utils.exceptions import DivergenceError, FactorizationError
from ..utils.logging import get_logger
from .cones import ConeProjector
from .equilibrate import ruiz_equilibrate
from .program import ConicProgram
from .settings import SolveResult, SolveSettings, SolveStatus

logger = get_logger(__name__)

RHO_MIN = 1e-6
RHO_MAX = 1e6
# Rebalance only when the residuals are this far apart
ADAPTIVE_RHO_TRIGGER = 5.0


def _inf_norm(v: np.ndarray) -> float:
    return float(np.max(np.abs(v))) if v.size else 0.0


class _KKTSolver:
    """Sparse LU factorization of the ADMM linear system."""

    def __init__(self, A: sp.csc_matrix, rho: np.ndarray, sigma: float):
        n = A.shape[1]
        kkt = sp.bmat(
            [
                [sigma * sp.identity(n, format="csc"), A.T],
                [A, sp.diags(-1.0 / rho)],
            ],
            format="csc",
        )
        try:
            self.factor = spla.splu(kkt)
        except RuntimeError as e:
            raise FactorizationError(
                f"Cannot factorize the {kkt.shape[0]}x{kkt.shape[1]} KKT matrix ({e}). "
                "Enable equilibration or check the program for empty rows."
            ) from e

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self.factor.solve(rhs)


def _rho_vector(settings: SolveSettings, rho: float, n_rows: int, zero: int):
    vector = np.full(n_rows, rho)
    vector[:zero] *= settings.equality_rho_scale
    return vector


def solve(
    prog: ConicProgram, settings: SolveSettings | None = None
) -> SolveResult:
    """
    Solves ``min c'y  s.t.  A y + s = b,  s in K``.

    The iteration stops with status ``Optimal`` as soon as the primal
    residual, dual residual and gap (measured on the unscaled program) are
    all below ``settings.tolerance``, and with ``MaxIterations`` or
    ``TimeLimit`` when a limit is hit first. ``InfeasibleSuspected`` is
    returned when the primal residual grows ``divergence_ratio`` times over
    its best value, or when the multipliers blow up past that ratio while
    the primal residual stays above tolerance.

    Args:
        prog (ConicProgram): The program.
        settings (SolveSettings | None): Solver parameters, defaults if None.

    Returns:
        SolveResult: Primal point, slack, multipliers and diagnostics.

    Raises:
        FactorizationError: If the linear system cannot be factorized.
        DivergenceError: If the iterates stop being finite. Carries the
            iteration number.

    Examples:
        ```python
        result = solve(program, SolveSettings(tolerance=1e-8))
        result.status, result.primal_objective
        ```
    """
    settings = settings or SolveSettings()
    start = time.monotonic()
    cones = prog.cones
    n_rows, n_cols = prog.n_rows, prog.n_variables

    if settings.equilibrate:
        A, b, c, row_scale, col_scale = ruiz_equilibrate(
            prog.A, prog.b, prog.c, cones, settings.ruiz_iterations
        )
    else:
        A, b, c = prog.A, prog.b.copy(), prog.c.copy()
        row_scale, col_scale = np.ones(n_rows), np.ones(n_cols)

    rho = settings.rho
    rho_vec = _rho_vector(settings, rho, n_rows, cones.zero)
    kkt = _KKTSolver(A, rho_vec, settings.sigma)
    project = ConeProjector(cones)
    setup_time = time.monotonic() - start

    b_norm = _inf_norm(prog.b)
    c_norm = _inf_norm(prog.c)
    alpha = settings.over_relaxation
    sigma = settings.sigma

    x = np.zeros(n_cols)
    s = np.zeros(n_rows)
    # Multiplier of the scaled program, in the polar cone; lam = -D y
    y = np.zeros(n_rows)

    best_primal = np.inf
    status = SolveStatus.MAX_ITERATIONS
    logger.debug(
        f"ADMM start: {n_cols} variables, {n_rows} rows "
        f"(zero={cones.zero}, nonneg={cones.nonneg}, psd blocks={len(cones.psd)}), "
        f"setup {setup_time:.3f}s"
    )

    iteration = 0
    for iteration in range(1, settings.max_iterations + 1):
        rhs = np.concatenate((sigma * x - c, b - s + y / rho_vec))
        sol = kkt.solve(rhs)
        x_tilde, nu = sol[:n_cols], sol[n_cols:]
        s_tilde = s - (nu + y) / rho_vec

        x = alpha * x_tilde + (1 - alpha) * x
        s_relaxed = alpha * s_tilde + (1 - alpha) * s
        s = project(s_relaxed + y / rho_vec)
        y = y + rho_vec * (s_relaxed - s)

        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DivergenceError(
                f"Iterates became non-finite at iteration {iteration}.",
                iteration=iteration,
            )

        y_out = col_scale * x
        s_out = s / row_scale
        lam = -row_scale * y

        primal_objective = float(prog.c @ y_out)
        dual_objective = float(-(prog.b @ lam))
        primal_residual = _inf_norm(prog.A @ y_out + s_out - prog.b) / (
            1 + b_norm
        )
        dual_residual = _inf_norm(prog.A.T @ lam + prog.c) / (1 + c_norm)
        gap = abs(primal_objective - dual_objective) / (
            1 + abs(primal_objective) + abs(dual_objective)
        )

        if iteration % settings.log_every == 0:
            logger.debug(
                f"it {iteration:>7d} | pobj {primal_objective:+.6e} | "
                f"dobj {dual_objective:+.6e} | rp {primal_residual:.2e} | "
                f"rd {dual_residual:.2e} | gap {gap:.2e} | rho {rho:.2e}"
            )

        if max(primal_residual, dual_residual, gap) <= settings.tolerance:
            status = SolveStatus.OPTIMAL
            break

        best_primal = min(best_primal, primal_residual)
        diverging = primal_residual > settings.divergence_ratio * max(
            best_primal, settings.tolerance
        )
        exploding = (
            _inf_norm(lam) > settings.divergence_ratio * (1 + c_norm)
            and primal_residual > settings.tolerance
        )
        if diverging or exploding:
            status = SolveStatus.INFEASIBLE_SUSPECTED
            break

        if (
            settings.time_limit is not None
            and time.monotonic() - start > settings.time_limit
        ):
            status = SolveStatus.TIME_LIMIT
            break

        if settings.adaptive_rho and iteration % settings.adaptive_rho_interval == 0:
            new_rho = _balanced_rho(rho, A, b, c, x, s, y)
            if new_rho != rho:
                rho = new_rho
                rho_vec = _rho_vector(settings, rho, n_rows, cones.zero)
                kkt = _KKTSolver(A, rho_vec, sigma)
                logger.debug(f"it {iteration:>7d} | rho updated to {rho:.3e}")

    wall_time = time.monotonic() - start
    result = SolveResult(
        status=status,
        y=y_out,
        s=s_out,
        lam=lam,
        primal_objective=primal_objective,
        dual_objective=dual_objective,
        primal_residual=primal_residual,
        dual_residual=dual_residual,
        gap=gap,
        iterations=iteration,
        wall_time_seconds=wall_time,
        setup_time_seconds=setup_time,
    )
    if status is SolveStatus.OPTIMAL:
        logger.success(
            f"Optimal after {iteration} iterations ({wall_time:.3f}s), "
            f"objective {primal_objective:.6e}"
        )
    else:
        logger.warning(
            f"Solver stopped with status {status.value} after {iteration} iterations: "
            f"rp={primal_residual:.2e}, rd={dual_residual:.2e}, gap={gap:.2e}"
        )
    return result


def _balanced_rho(
    rho: float,
    A: sp.csc_matrix,
    b: np.ndarray,
    c: np.ndarray,
    x: np.ndarray,
    s: np.ndarray,
    y: np.ndarray,
) -> float:
    """Residual-balancing penalty update on the scaled program."""
    Ax = A @ x
    Aty = A.T @ y
    primal = _inf_norm(Ax + s - b) / max(
        _inf_norm(Ax), _inf_norm(s), _inf_norm(b), 1e-10
    )
    dual = _inf_norm(c - Aty) / max(_inf_norm(Aty), _inf_norm(c), 1e-10)
    if primal == 0 or dual == 0:
        return rho
    ratio = np.sqrt(primal / dual)
    if 1 / ADAPTIVE_RHO_TRIGGER < ratio < ADAPTIVE_RHO_TRIGGER:
        return rho
    return float(np.clip(rho * ratio, RHO_MIN, RHO_MAX))
