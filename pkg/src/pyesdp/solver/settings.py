import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from ..utils.exceptions import InvalidParameterError
from ..utils.settings import load_env_settings


@dataclass(frozen=True)
class SolveSettings:
    """
    Parameters of the operator-splitting solver.

    Attributes:
        tolerance (float): Target for the primal, dual and gap residuals.
        max_iterations (int): Iteration limit.
        over_relaxation (float): Relaxation factor, strictly between 1 and 2.
        rho (float): Penalty on the cone rows.
        equilibrate (bool): Apply Ruiz scaling before iterating.
        time_limit (float | None): Wall-clock limit in seconds.
        sigma (float): Proximal regularization on the decision vector.
        equality_rho_scale (float): Multiplier of ``rho`` on zero-cone rows.
        adaptive_rho (bool): Rebalance ``rho`` from the residual ratio. The
            check runs on a fixed iteration schedule, so solves stay
            deterministic.
        adaptive_rho_interval (int): Iterations between rebalancing checks.
        ruiz_iterations (int): Equilibration passes.
        divergence_ratio (float): Growth of the primal residual over its
            best value that marks the problem as suspected infeasible.
        log_every (int): Iterations between DEBUG progress lines.
    """

    tolerance: float = 1e-6
    max_iterations: int = 100_000
    over_relaxation: float = 1.6
    rho: float = 1.0
    equilibrate: bool = True
    time_limit: float | None = None
    sigma: float = 1e-6
    equality_rho_scale: float = 1e3
    adaptive_rho: bool = True
    adaptive_rho_interval: int = 25
    ruiz_iterations: int = 15
    divergence_ratio: float = 1e8
    log_every: int = 500

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InvalidParameterError(
                f"tolerance must be positive, got {self.tolerance}."
            )
        if self.max_iterations < 1:
            raise InvalidParameterError(
                f"max_iterations must be at least 1, got {self.max_iterations}."
            )
        if not 1 < self.over_relaxation < 2:
            raise InvalidParameterError(
                f"over_relaxation must lie in (1, 2), got {self.over_relaxation}."
            )
        if not self.rho > 0:
            raise InvalidParameterError(f"rho must be positive, got {self.rho}.")
        if not self.sigma > 0:
            raise InvalidParameterError(
                f"sigma must be positive, got {self.sigma}."
            )
        if not self.equality_rho_scale >= 1:
            raise InvalidParameterError(
                f"equality_rho_scale must be at least 1, got {self.equality_rho_scale}."
            )
        if self.time_limit is not None and not self.time_limit > 0:
            raise InvalidParameterError(
                f"time_limit must be positive, got {self.time_limit}."
            )
        if self.adaptive_rho_interval < 1 or self.log_every < 1:
            raise InvalidParameterError(
                "adaptive_rho_interval and log_every must be at least 1."
            )
        if self.ruiz_iterations < 0:
            raise InvalidParameterError(
                f"ruiz_iterations must be nonnegative, got {self.ruiz_iterations}."
            )
        if not self.divergence_ratio > 1:
            raise InvalidParameterError(
                f"divergence_ratio must exceed 1, got {self.divergence_ratio}."
            )

    def replace(self, **changes) -> "SolveSettings":
        """Copy with some fields changed, validated again."""
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_env(cls, dotenv_path: str | None = None, **overrides) -> "SolveSettings":
        """
        Settings with ``PYESDP_TOLERANCE`` and ``PYESDP_MAX_ITERATIONS``
        applied from the environment, then ``overrides`` on top.

        Examples:
            ```python
            SolveSettings.from_env(time_limit=60)
            ```
        """
        env = load_env_settings(dotenv_path)
        values = {
            key: env[key]
            for key in ("tolerance", "max_iterations")
            if key in env
        }
        values.update(overrides)
        return cls(**values)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    MAX_ITERATIONS = "MaxIterations"
    TIME_LIMIT = "TimeLimit"
    INFEASIBLE_SUSPECTED = "InfeasibleSuspected"

    def __str__(self) -> str:
        return self.value


class SolveResult(NamedTuple):
    """
    Outcome of a solve, in the coordinates of the unscaled program.

    ``lam`` holds one multiplier per row and satisfies ``A.T @ lam + c = 0``
    at a dual feasible point, with ``lam`` in the dual cone. Residuals use
    infinity norms: the primal residual is ``||A y + s - b|| / (1 + ||b||)``,
    the dual residual ``||A.T lam + c|| / (1 + ||c||)`` and the gap
    ``|c'y + b'lam| / (1 + |c'y| + |b'lam|)``.
    """

    status: SolveStatus
    y: np.ndarray
    s: np.ndarray
    lam: np.ndarray
    primal_objective: float
    dual_objective: float
    primal_residual: float
    dual_residual: float
    gap: float
    iterations: int
    wall_time_seconds: float
    setup_time_seconds: float = 0.0

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL
