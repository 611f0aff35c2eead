import math
from typing import NamedTuple

from ..formulation.builder import build_pesdp
from ..network.noise import MeasuredNetwork
from ..solver.admm import solve
from ..solver.settings import SolveSettings
from ..utils.exceptions import InvalidParameterError, NotOptimalError
from ..utils.logging import get_logger
from .duals import extract_dual_blocks

logger = get_logger(__name__)

EPS_RANGE = (1e-5, 1e-2)
MAX_SENSORS = 10
SENSITIVITY_TOLERANCE = 1e-9
# Objective change a tolerance-accurate solve may show on a flat direction
NOISE_FLOOR_FACTOR = 10.0


class SensitivityReport(NamedTuple):
    """
    Finite-difference slopes of the optimal value against ``-sum tr(S)``.

    ``backward_difference`` is NaN when ``p < eps`` or when the solve at
    ``p - eps`` did not reach ``Optimal``. ``kink`` marks a value function
    whose one-sided slopes at ``p`` differ, where the dual blocks are not
    unique and any slope between the two is a valid prediction.
    """

    p: float
    eps: float
    objective_at_p: float
    objective_at_p_eps: float
    finite_difference: float
    backward_difference: float
    predicted: float
    absolute_error: float
    relative_error: float
    noise_floor: float
    kink: bool
    agrees: bool
    iterations: tuple[int, ...]


def _solve_at(mn: MeasuredNetwork, p: float, settings: SolveSettings):
    program, fmap = build_pesdp(mn, p)
    return solve(program, settings), fmap


def sensitivity_check(
    mn: MeasuredNetwork,
    p: float = 0.1,
    eps: float = 1e-3,
    settings: SolveSettings | None = None,
    rtol: float = 1e-2,
) -> SensitivityReport:
    """
    Checks that the slope of the optimal value in ``p`` equals
    ``-sum trace(S_block)``.

    The perturbed program is solved at ``p`` and ``p + eps`` with tolerance
    1e-9 and the forward difference is compared with the dual prediction at
    ``p``. The relative error is ``|fd - predicted| / max(|fd|, |predicted|)``
    (0 when both vanish).

    The optimal value is convex and nonincreasing in ``p``. When ``p >= eps``
    a third solve at ``p - eps`` gives the backward slope; if the two
    one-sided slopes differ the value function has a kink at ``p``.

    The check agrees when the absolute error is within
    ``rtol * max(|fd|, |predicted|) + noise_floor``, or, at a kink, when the
    prediction lies between the backward and forward slopes. ``noise_floor``
    is ``10 * tolerance * (1 + |p*(p)| + |p*(p + eps)|) / eps``, the slope
    error two tolerance-accurate objectives can produce.

    Args:
        mn (MeasuredNetwork): A small measured network (at most 10 sensors).
        p (float): Uniform perturbation, ``>= 0``.
        eps (float): Step, within [1e-5, 1e-2].
        settings (SolveSettings | None): Base settings; the tolerance is
            always tightened to 1e-9.
        rtol (float): Relative error accepted as agreement.

    Returns:
        SensitivityReport: The objectives, the slopes and the errors.

    Raises:
        InvalidParameterError: For an out-of-range step, a negative ``p``
            or a network that is too large.
        NotOptimalError: If the solve at ``p`` or ``p + eps`` is not optimal.

    Examples:
        ```python
        report = sensitivity_check(apply_noise(net, 0.1, noise_seed=4))
        report.relative_error, report.agrees
        ```
    """
    low, high = EPS_RANGE
    if not low <= eps <= high:
        raise InvalidParameterError(
            f"eps must lie in [{low}, {high}], got {eps}."
        )
    if not p >= 0:
        raise InvalidParameterError(f"p must be nonnegative, got {p}.")
    if mn.n > MAX_SENSORS:
        raise InvalidParameterError(
            f"sensitivity_check handles at most {MAX_SENSORS} sensors, got {mn.n}."
        )

    settings = (settings or SolveSettings()).replace(
        tolerance=SENSITIVITY_TOLERANCE
    )
    base, fmap = _solve_at(mn, p, settings)
    shifted, _ = _solve_at(mn, p + eps, settings)
    for label, result in (("p", base), ("p + eps", shifted)):
        if not result.is_optimal:
            raise NotOptimalError(
                f"The solve at {label} ended with status {result.status.value} "
                f"after {result.iterations} iterations."
            )
    iterations = [base.iterations, shifted.iterations]

    blocks = extract_dual_blocks(base, fmap)
    predicted = -sum(float(S.trace()) for S in blocks.values())
    finite_difference = (
        shifted.primal_objective - base.primal_objective
    ) / eps
    noise_floor = (
        NOISE_FLOOR_FACTOR
        * SENSITIVITY_TOLERANCE
        * (1 + abs(base.primal_objective) + abs(shifted.primal_objective))
        / eps
    )

    backward_difference = math.nan
    if p >= eps:
        before, _ = _solve_at(mn, p - eps, settings)
        iterations.append(before.iterations)
        if before.is_optimal:
            backward_difference = (
                base.primal_objective - before.primal_objective
            ) / eps
        else:
            logger.warning(
                f"Backward solve at p - eps ended with status {before.status.value}; "
                "skipping the kink test."
            )

    absolute_error = abs(finite_difference - predicted)
    scale = max(abs(finite_difference), abs(predicted))
    relative_error = absolute_error / scale if scale > 0 else 0.0

    kink = bool(
        not math.isnan(backward_difference)
        and finite_difference - backward_difference
        > rtol * max(abs(finite_difference), abs(backward_difference))
        + 2 * noise_floor
    )
    agrees = absolute_error <= rtol * scale + noise_floor
    if kink and not agrees:
        agrees = (
            backward_difference - noise_floor
            <= predicted
            <= finite_difference + noise_floor
        )

    report = SensitivityReport(
        p=float(p),
        eps=float(eps),
        objective_at_p=base.primal_objective,
        objective_at_p_eps=shifted.primal_objective,
        finite_difference=finite_difference,
        backward_difference=backward_difference,
        predicted=predicted,
        absolute_error=absolute_error,
        relative_error=relative_error,
        noise_floor=noise_floor,
        kink=kink,
        agrees=bool(agrees),
        iterations=tuple(iterations),
    )
    logger.info(
        f"Sensitivity at p={p}, eps={eps}: fd={finite_difference:.6e}, "
        f"bd={backward_difference:.6e}, -sum tr(S)={predicted:.6e}, "
        f"relative error {relative_error:.2e}, kink={kink}, agrees={report.agrees}"
    )
    return report
