"""Reach solvers: how many logical qubits a finite-scalability architecture supports.

Evaluates the success condition linking algorithm size to physical qubit
budget, solves its maximum in closed form via the Lambert W function, bounds
it, cross-checks it by integer search, and generates the contour / regime-grid
data behind the headline figures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .models import (
    AboveThresholdError,
    AlgorithmCostModel,
    ScalabilityKind,
    ScalabilityModel,
    SurfaceCodeModel,
    _check_positive_count,
    _log_max_physical_qubits,
    burden_factor,
    logical_error_rate,
    max_physical_qubits,
    optimal_physical_qubits,
    physical_error_rate,
    physical_qubits_for_code,
    tolerable_logical_error,
)

#: Q_phys^max band over which architectures gain fault-tolerant non-Clifford
#: operations (NISQ -> EFTQC).
NISQ_TO_EFTQC_BAND = (1e2, 1e4)
#: Q_phys^max band over which problem size stops being qubit-limited
#: (EFTQC -> FTQC).
EFTQC_TO_FTQC_BAND = (1e6, 1e8)

#: Contour levels emitted with every regimes grid.
REGIME_CONTOUR_LEVELS = (1e2, 1e4, 1e6, 1e8)

_RELATIVE_BISECTION_TOL = 1e-9


class TrivialSuccessError(ValueError):
    """The success-condition logarithm argument is <= 1: the algorithm is
    trivially satisfiable and the condition carries no information."""


class DistanceMode(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE_ODD = "discrete_odd"


class ReachMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    LOWER_BOUND = "lower_bound"
    NUMERIC_SEARCH = "numeric_search"


@dataclass(frozen=True)
class ReachProblem:
    """Everything entering the success condition for one architecture/algorithm pair."""

    scalability: ScalabilityModel
    code: SurfaceCodeModel
    cost: AlgorithmCostModel
    distance_mode: DistanceMode = DistanceMode.CONTINUOUS

    def __post_init__(self) -> None:
        if self.scalability.p0 >= self.code.p_th:
            raise AboveThresholdError(
                f"p0={self.scalability.p0} must be below p_th={self.code.p_th}"
            )
        if not isinstance(self.distance_mode, DistanceMode):
            raise ValueError("distance_mode must be a DistanceMode")


@dataclass(frozen=True)
class ReachResult:
    q_logical_max: int
    q_phys_opt: float
    q_phys_max: float
    method: ReachMethod


@dataclass(frozen=True)
class ContourPoint:
    q_logical: int
    q_phys_required: float  # NaN when infeasible
    feasible: bool


@dataclass(frozen=True)
class ContourSeries:
    points: tuple[ContourPoint, ...]
    scalability_label: str


@dataclass(frozen=True)
class RegimesGrid:
    """Grid of Q_phys^max = (p_th/p0)^s over scalability and error-rate-ratio axes."""

    s_values: tuple[float, ...]
    ratio_values: tuple[float, ...]  # p0 / p_th, in (0, 1)
    q_max: tuple[tuple[float, ...], ...]  # q_max[i][j] for s_values[i], ratio_values[j]
    contour_levels: tuple[float, ...] = REGIME_CONTOUR_LEVELS


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function (w with w*exp(w) = x).

    Halley iteration from the asymptotic guess ln(x) - ln(ln(x)) for x > e and
    x/(1+x) otherwise; a branch-point series seeds the iteration near x = -1/e.
    The residual |w*exp(w) - x| is driven below 1e-12 * max(1, |x|).
    """
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"x must be numeric, got {x!r}")
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"x must be finite, got {x}")
    branch = -math.exp(-1.0)
    if x < branch:
        # tolerate float rounding of -1/e itself
        if x < branch * (1.0 + 1e-12):
            raise ValueError(f"x={x} is below the branch point -1/e")
        x = branch
    if x == 0.0:
        return 0.0

    if x <= -0.25:
        # series about the branch point: w = -1 + p - p^2/3 + (11/72) p^3, p = sqrt(2(1+e*x))
        p = math.sqrt(max(2.0 * (1.0 + math.e * x), 0.0))
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))
        if p < 1e-5:
            # derivative of w*e^w vanishes at the branch point; the series is
            # already past float accuracy there and Halley would divide by ~0
            return w
    elif x > math.e:
        lx = math.log(x)
        w = lx - math.log(lx)
    else:
        w = x / (1.0 + x)

    tol = 1e-13 * max(1.0, abs(x))
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol:
            break
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w -= f / denom
        if w < -1.0:
            w = -1.0
    return w


def _lambert_w0_from_log(log_x: float) -> float:
    """W(exp(log_x)) for log_x too large to exponentiate; Newton on w + ln w = log_x."""
    if log_x <= 700.0:
        return lambert_w0(math.exp(log_x))
    w = log_x - math.log(log_x)
    for _ in range(50):
        f = w + math.log(w) - log_x
        step = f / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 1e-14 * w:
            break
    return w


def success_lhs(cost: AlgorithmCostModel, code: SurfaceCodeModel, q_logical: int) -> float:
    """Left side of the success condition: sqrt(8 Q_L) * ln(B * Q_L^beta).

    B is the burden factor (mode-aware).  Natural logarithms throughout.
    """
    q_logical = _check_positive_count("q_logical", q_logical)
    burden = burden_factor(cost, code)
    argument = burden * q_logical ** cost.beta
    if argument <= 1.0:
        raise TrivialSuccessError(
            f"burden * Q_L^beta = {argument} <= 1: any sub-threshold code distance succeeds"
        )
    return math.sqrt(8.0 * q_logical) * math.log(argument)


def success_rhs(scalability: ScalabilityModel, code: SurfaceCodeModel, q_phys: float) -> float:
    """Right side of the success condition: sqrt(Q_phys) * ln(p_th / p_phys(Q_phys)).

    Negative beyond max_physical_qubits, which is how infeasibility surfaces.
    """
    p = physical_error_rate(scalability, q_phys)
    if p <= 0.0 or math.isinf(p):
        return -math.inf
    return math.sqrt(q_phys) * math.log(code.p_th / p)


def _largest_odd_distance(q_phys: float, q_logical: int) -> Optional[int]:
    """Largest odd d >= 1 with 2*(d+1)^2*q_logical <= q_phys, or None."""
    if q_phys < 8.0 * q_logical:
        return None
    d = int(math.sqrt(q_phys / (2.0 * q_logical))) - 1
    if d % 2 == 0:
        d -= 1
    while physical_qubits_for_code(d + 2, q_logical) <= q_phys:
        d += 2
    return d if d >= 1 else None


def satisfies_success_condition(problem: ReachProblem, q_logical: int, q_phys: float) -> bool:
    """Whether ``q_logical`` logical qubits succeed within ``q_phys`` physical qubits.

    Continuous mode compares the two sides of the success condition directly.
    Discrete mode rounds q_phys down to the largest odd-distance code layout
    and checks the underlying requirement p_L <= tolerable logical error.
    """
    q_logical = _check_positive_count("q_logical", q_logical)
    if problem.distance_mode is DistanceMode.CONTINUOUS:
        lhs = success_lhs(problem.cost, problem.code, q_logical)
        return lhs <= success_rhs(problem.scalability, problem.code, q_phys)

    d = _largest_odd_distance(q_phys, q_logical)
    if d is None:
        return False
    q_used = physical_qubits_for_code(d, q_logical)
    p = physical_error_rate(problem.scalability, q_used)
    if p >= 1.0:
        return False
    p_l = logical_error_rate(problem.code, p, d)
    return p_l <= tolerable_logical_error(problem.cost, q_logical)


def max_logical_qubits_closed_form(problem: ReachProblem) -> float:
    """Continuous-relaxation reach Q_opt / (8 s^2 beta^2 W(x)^2).

    x = sqrt(B^(1/beta) * Q_opt / (8 s^2 beta^2)).  Power-law scalability with
    finite s and beta > 0 only; other problems need the numeric search.
    """
    model = problem.scalability
    if model.kind is not ScalabilityKind.POWER_LAW or model.scale_independent:
        raise ValueError("closed form requires finite power-law scalability")
    if problem.cost.beta == 0.0:
        raise ValueError("closed form requires a positive gate-count exponent")
    s = model.scale
    beta = problem.cost.beta
    burden = burden_factor(problem.cost, problem.code)
    if burden <= 1.0:
        raise TrivialSuccessError(f"burden factor {burden} <= 1")
    # evaluated in log space so extreme scalability parameters cannot overflow
    log_q_opt = _log_max_physical_qubits(model, problem.code) - 2.0
    log_denom = math.log(8.0 * s * s * beta * beta)
    log_x = 0.5 * (math.log(burden) / beta + log_q_opt - log_denom)
    w = _lambert_w0_from_log(log_x)
    try:
        return math.exp(log_q_opt - log_denom - 2.0 * math.log(w))
    except OverflowError:
        return math.inf


def max_logical_qubits_lower_bound(problem: ReachProblem) -> float:
    """Closed-form lower bound obtained from W(x) <= ln(x)."""
    model = problem.scalability
    if model.kind is not ScalabilityKind.POWER_LAW or model.scale_independent:
        raise ValueError("lower bound requires finite power-law scalability")
    if problem.cost.beta == 0.0:
        raise ValueError("lower bound requires a positive gate-count exponent")
    s = model.scale
    beta = problem.cost.beta
    burden = burden_factor(problem.cost, problem.code)
    if burden <= 1.0:
        raise TrivialSuccessError(f"burden factor {burden} <= 1")
    ratio_term = s * math.log(problem.code.p_th / model.p0)  # ln((p_th/p0)^s)
    log_arg = math.log(burden) / beta + ratio_term - math.log(8.0 * math.e**2 * s * s * beta * beta)
    if log_arg <= 0.0:
        raise ValueError("lower-bound logarithm argument must exceed 1")
    try:
        numerator = math.exp(ratio_term)
    except OverflowError:
        return math.inf
    return numerator / (2.0 * math.e**2 * s * s * beta * beta * log_arg * log_arg)


def _reach_reference_q_phys(problem: ReachProblem) -> float:
    q_opt = optimal_physical_qubits(problem.scalability, problem.code)
    if math.isinf(q_opt):
        raise ValueError(
            "reach is unbounded for scale-independent scalability; "
            "use the success condition directly"
        )
    # an optimal budget below one qubit means the architecture supports nothing;
    # evaluating the condition at a single qubit keeps the search well-defined
    return max(q_opt, 1.0)


def max_logical_qubits_numeric(problem: ReachProblem) -> int:
    """Largest integer Q_L satisfying the success condition at the optimal Q_phys.

    Independent of the closed form: doubling then binary search over integers.
    Returns 0 when even a single logical qubit is infeasible.
    """
    q_phys = _reach_reference_q_phys(problem)

    def feasible(q_logical: int) -> bool:
        try:
            return satisfies_success_condition(problem, q_logical, q_phys)
        except TrivialSuccessError:
            return True

    if not feasible(1):
        return 0
    lo = 1
    hi = 2
    while feasible(hi):
        lo = hi
        hi *= 2
        if hi > 2**62:
            raise ValueError("reach exceeds search budget; parameters look degenerate")
    # invariant: feasible(lo) and not feasible(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def required_physical_qubits(problem: ReachProblem, q_logical: int) -> Optional[float]:
    """Smallest physical qubit count supporting ``q_logical``, or None if infeasible.

    Continuous mode bisects the success condition between the distance-1
    layout cost and the optimal qubit count; discrete mode walks odd code
    distances until the error budget is met.
    """
    q_logical = _check_positive_count("q_logical", q_logical)
    if problem.distance_mode is DistanceMode.DISCRETE_ODD:
        return _required_discrete(problem, q_logical)

    lo = physical_qubits_for_code(1.0, q_logical)

    def rhs(q: float) -> float:
        return success_rhs(problem.scalability, problem.code, q)

    try:
        lhs = success_lhs(problem.cost, problem.code, q_logical)
    except TrivialSuccessError:
        # any sub-threshold layout works; the d = 1 layout is the cheapest
        return lo if rhs(lo) >= 0.0 else None

    q_opt = optimal_physical_qubits(problem.scalability, problem.code)
    if math.isinf(q_opt):
        # scale-independent: rhs grows without bound, expand until satisfied
        hi = max(lo, 2.0)
        for _ in range(2000):
            if rhs(hi) >= lhs:
                break
            hi *= 2.0
        else:
            return None
        if rhs(lo) >= lhs:
            return lo
    else:
        if lo >= q_opt:
            return lo if rhs(lo) >= lhs else None
        if rhs(q_opt) < lhs:
            return None
        if rhs(lo) >= lhs:
            return lo
        hi = q_opt

    # rhs is increasing on [lo, hi]; find the crossing
    while (hi - lo) > _RELATIVE_BISECTION_TOL * hi:
        mid = 0.5 * (lo + hi)
        if rhs(mid) >= lhs:
            hi = mid
        else:
            lo = mid
    return hi


def _required_discrete(problem: ReachProblem, q_logical: int) -> Optional[float]:
    tolerable = tolerable_logical_error(problem.cost, q_logical)
    q_max = max_physical_qubits(problem.scalability, problem.code)
    d = 1
    while True:
        q_used = physical_qubits_for_code(d, q_logical)
        if q_used > q_max:
            return None
        p = physical_error_rate(problem.scalability, q_used)
        if p < 1.0 and logical_error_rate(problem.code, p, d) <= tolerable:
            return q_used
        d += 2


def contour(
    problem: ReachProblem,
    q_logical_range: tuple[int, int],
    step: int = 1,
) -> ContourSeries:
    """Required-physical-qubit contour across an inclusive logical-qubit range."""
    lo, hi = q_logical_range
    lo = _check_positive_count("q_logical_range start", lo)
    hi = _check_positive_count("q_logical_range stop", hi)
    step = _check_positive_count("step", step)
    if hi < lo:
        raise ValueError(f"empty range: {q_logical_range}")
    points = []
    for q_logical in range(lo, hi + 1, step):
        required = required_physical_qubits(problem, q_logical)
        if required is None:
            points.append(ContourPoint(q_logical, math.nan, False))
        else:
            points.append(ContourPoint(q_logical, required, True))
    return ContourSeries(tuple(points), problem.scalability.describe())


def regimes_grid(
    s_range: tuple[float, float] = (0.25, 5.0),
    ratio_range: tuple[float, float] = (0.05, 0.95),
    resolution: tuple[int, int] = (20, 19),
) -> RegimesGrid:
    """Q_phys^max = (1/ratio)^s over a (scalability, p0/p_th) grid.

    The default grid steps land exactly on s = 1.75 and ratio = 0.5, the
    operating point of a representative present-day device.
    """
    s_lo, s_hi = s_range
    r_lo, r_hi = ratio_range
    n_s, n_r = resolution
    if not (0.0 < r_lo <= r_hi < 1.0):
        raise ValueError(f"ratio range must lie in (0, 1), got {ratio_range}")
    if not (0.0 < s_lo <= s_hi) or n_s < 1 or n_r < 1:
        raise ValueError("invalid scalability range or resolution")
    s_values = tuple(_linspace(s_lo, s_hi, n_s))
    ratio_values = tuple(_linspace(r_lo, r_hi, n_r))
    rows = []
    for s in s_values:
        row = []
        for ratio in ratio_values:
            try:
                row.append((1.0 / ratio) ** s)
            except OverflowError:
                row.append(math.inf)
        rows.append(tuple(row))
    return RegimesGrid(s_values, ratio_values, tuple(rows))


def classify_regime(q_phys_max: float) -> str:
    """Advisory regime label for a Q_phys^max value."""
    if q_phys_max < NISQ_TO_EFTQC_BAND[0]:
        return "NISQ"
    if q_phys_max <= NISQ_TO_EFTQC_BAND[1]:
        return "NISQ-EFTQC transition"
    if q_phys_max < EFTQC_TO_FTQC_BAND[0]:
        return "EFTQC"
    if q_phys_max <= EFTQC_TO_FTQC_BAND[1]:
        return "EFTQC-FTQC transition"
    return "FTQC"


def apply_burden_reduction(problem: ReachProblem, factor: float) -> ReachProblem:
    """Scale the gate-count prefactor down by ``factor`` (burden reduction)."""
    if not (math.isfinite(factor) and factor >= 1.0):
        raise ValueError(f"reduction factor must be >= 1, got {factor}")
    cost = replace(problem.cost, alpha=problem.cost.alpha / factor)
    return replace(problem, cost=cost)


def solve_reach(problem: ReachProblem, method: ReachMethod) -> ReachResult:
    """Package one reach estimate together with the qubit budget landmarks."""
    q_opt = optimal_physical_qubits(problem.scalability, problem.code)
    q_max = max_physical_qubits(problem.scalability, problem.code)
    if method is ReachMethod.CLOSED_FORM:
        q_l = int(max_logical_qubits_closed_form(problem))
    elif method is ReachMethod.LOWER_BOUND:
        q_l = int(max_logical_qubits_lower_bound(problem))
    else:
        q_l = max_logical_qubits_numeric(problem)
    return ReachResult(q_l, q_opt, q_max, method)


def _linspace(lo: float, hi: float, n: int) -> list[float]:
    if n == 1:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]
