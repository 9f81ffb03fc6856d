"""Closed-form models for finite-scalability fault-tolerant architectures.

Covers the scalability profiles (power-law and logarithmic), the surface-code
error-suppression and qubit-overhead laws, the algorithm gate-count / error
budget model, and the minimum magic-state-distillation footprints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class AboveThresholdError(ValueError):
    """Base error rate meets or exceeds the code threshold: no sub-threshold regime."""


class ScalabilityKind(str, Enum):
    POWER_LAW = "power_law"
    LOGARITHMIC = "logarithmic"


class ErrorBudgetMode(str, Enum):
    UNION_BOUND = "union_bound"
    LOG_REFINED = "log_refined"


class FactoryQuality(str, Enum):
    HIGH = "high"
    LOWER = "lower"


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


def _check_positive_count(name: str, value) -> int:
    # Accepts ints and integral floats; rejects everything else.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
        value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value


@dataclass(frozen=True)
class ScalabilityModel:
    """Worst-case physical error rate as a function of physical qubit count.

    ``scale`` is the scalability parameter: ``s`` for the power-law kind
    (p0 * Q^(1/s)) and ``sigma`` for the logarithmic kind
    (p0 * (1 + ln(Q)/sigma)).  ``scale = inf`` is the scale-independent
    sentinel; the error rate is then p0 at every qubit count.
    """

    kind: ScalabilityKind
    p0: float
    scale: float

    def __post_init__(self) -> None:
        _require(isinstance(self.kind, ScalabilityKind), "kind must be a ScalabilityKind")
        _require(math.isfinite(self.p0), "p0 must be finite")
        _require(0.0 < self.p0 < 1.0, f"p0 must lie in (0, 1), got {self.p0}")
        _require(not math.isnan(self.scale), "scale must not be NaN")
        _require(self.scale > 0.0, f"scale must be > 0, got {self.scale}")

    @classmethod
    def power_law(cls, p0: float, s: float) -> "ScalabilityModel":
        return cls(ScalabilityKind.POWER_LAW, p0, s)

    @classmethod
    def logarithmic(cls, p0: float, sigma: float) -> "ScalabilityModel":
        return cls(ScalabilityKind.LOGARITHMIC, p0, sigma)

    @property
    def scale_independent(self) -> bool:
        return math.isinf(self.scale)

    def describe(self) -> str:
        symbol = "s" if self.kind is ScalabilityKind.POWER_LAW else "sigma"
        return f"{self.kind.value}(p0={self.p0:g}, {symbol}={self.scale:g})"


@dataclass(frozen=True)
class SurfaceCodeModel:
    """Surface-code error suppression: p_L = A * (p_phys / p_th)^((d+1)/2)."""

    A: float = 0.1
    p_th: float = 0.01

    def __post_init__(self) -> None:
        _require(math.isfinite(self.A) and self.A > 0.0, f"A must be > 0, got {self.A}")
        _require(0.0 < self.p_th < 1.0, f"p_th must lie in (0, 1), got {self.p_th}")


@dataclass(frozen=True)
class AlgorithmCostModel:
    """Gate-count scaling G = alpha * Q_L^beta and tolerable circuit error p_C."""

    alpha: float = 4.12e9
    beta: float = 0.515
    p_C: float = 0.1
    error_budget_mode: ErrorBudgetMode = ErrorBudgetMode.UNION_BOUND

    def __post_init__(self) -> None:
        _require(math.isfinite(self.alpha) and self.alpha > 0.0, f"alpha must be > 0, got {self.alpha}")
        # beta = 0 is the degenerate size-independent gate count, useful in analysis.
        _require(math.isfinite(self.beta) and self.beta >= 0.0, f"beta must be >= 0, got {self.beta}")
        _require(0.0 < self.p_C < 1.0, f"p_C must lie in (0, 1), got {self.p_C}")
        _require(isinstance(self.error_budget_mode, ErrorBudgetMode), "error_budget_mode must be an ErrorBudgetMode")


@dataclass(frozen=True)
class MsdFactoryRecord:
    """One row of the minimum magic-state-distillation footprint table."""

    name: str
    p_phys: float
    q_factory: int
    p_out: float
    q_min_eftqc: int
    p_L: float


_MSD_RECORDS = {
    FactoryQuality.HIGH: MsdFactoryRecord(
        name="(15-to-1)_{5,3,3}",
        p_phys=1e-4,
        q_factory=522,
        p_out=4.7e-6,
        q_min_eftqc=554,
        p_L=1e-5,
    ),
    FactoryQuality.LOWER: MsdFactoryRecord(
        name="(15-to-1)_{7,3,3}",
        p_phys=1e-3,
        q_factory=810,
        p_out=5.4e-4,
        q_min_eftqc=842,
        p_L=1e-3,
    ),
}


def msd_minimum_footprint(quality: FactoryQuality) -> MsdFactoryRecord:
    """Built-in footprint of the smallest viable distillation-backed computation."""
    return _MSD_RECORDS[FactoryQuality(quality)]


def physical_error_rate(model: ScalabilityModel, q_phys: float) -> float:
    """Evaluate the scalability profile at ``q_phys`` qubits.

    ``q_phys`` may be any real >= 1; continuous values support contour and
    optimizer work.  The result is not clipped: values >= 1 mean no valid
    operation is possible at that size and must be handled by the caller.
    """
    if not (isinstance(q_phys, (int, float)) and not isinstance(q_phys, bool)):
        raise ValueError(f"q_phys must be numeric, got {q_phys!r}")
    if math.isnan(q_phys) or q_phys < 1:
        raise ValueError(f"q_phys must be >= 1, got {q_phys}")
    if model.kind is ScalabilityKind.POWER_LAW:
        if model.scale_independent:
            return model.p0
        try:
            return model.p0 * q_phys ** (1.0 / model.scale)
        except OverflowError:
            return math.inf
    # logarithmic: ln(q)/inf == 0.0 handles the sentinel for free
    return model.p0 * (1.0 + math.log(q_phys) / model.scale)


def _log_max_physical_qubits(model: ScalabilityModel, code: SurfaceCodeModel) -> float:
    """ln of the qubit count at which the profile crosses p_th (inf if never)."""
    if model.p0 >= code.p_th:
        raise AboveThresholdError(
            f"base error rate p0={model.p0} is not below threshold p_th={code.p_th}; "
            "the architecture is never sub-threshold"
        )
    if model.scale_independent:
        return math.inf
    if model.kind is ScalabilityKind.POWER_LAW:
        return model.scale * math.log(code.p_th / model.p0)
    return model.scale * (code.p_th - model.p0) / model.p0


def max_physical_qubits(model: ScalabilityModel, code: SurfaceCodeModel) -> float:
    """Largest qubit count with physical error rate still at or below threshold.

    Power law: (p_th/p0)^s.  Logarithmic: exp(sigma * (p_th - p0) / p0), the
    value obtained by solving the profile equation for p_phys = p_th.
    """
    log_q = _log_max_physical_qubits(model, code)
    try:
        return math.exp(log_q)
    except OverflowError:
        return math.inf


def optimal_physical_qubits(model: ScalabilityModel, code: SurfaceCodeModel) -> float:
    """Qubit count maximizing the reach-governing quantity sqrt(Q)*ln(p_th/p_phys(Q)).

    Power law: exactly max_physical_qubits / e^2.  Logarithmic: located by
    golden-section search in log-space (no closed form exists).
    """
    log_qmax = _log_max_physical_qubits(model, code)
    if math.isinf(log_qmax):
        return math.inf
    if model.kind is ScalabilityKind.POWER_LAW:
        try:
            return math.exp(log_qmax - 2.0)
        except OverflowError:
            return math.inf

    def log_objective(u: float) -> float:
        # u = ln(Q).  The objective sqrt(Q)*ln(p_th/p(Q)) is positive on the
        # interior, so maximizing u/2 + ln(ln(p_th/p)) locates the same argmax
        # without overflowing e^(u/2) for extreme scalability parameters.
        p = model.p0 * (1.0 + u / model.scale)
        margin = math.log(code.p_th / p) if p < code.p_th else 0.0
        if margin <= 0.0:
            return -math.inf
        return u / 2.0 + math.log(margin)

    u_star = _golden_section_max(log_objective, 0.0, log_qmax)
    try:
        return math.exp(u_star)
    except OverflowError:
        return math.inf


def _golden_section_max(f, a: float, b: float, tol: float = 1e-12) -> float:
    """Golden-section maximizer of a unimodal function on [a, b]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    # absolute tolerance scaled to interval size; ~70 iterations worst case
    while (b - a) > tol * max(1.0, abs(a), abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def logical_error_rate(code: SurfaceCodeModel, p_phys: float, d: float) -> float:
    """Surface-code logical error rate A * (p_phys/p_th)^((d+1)/2).

    ``d`` may be a positive real (continuous-distance analysis) or an odd
    integer (point estimates).  Values above 1 are returned as-is and mean
    certain failure.
    """
    _require(math.isfinite(p_phys) and p_phys > 0.0, f"p_phys must be > 0, got {p_phys}")
    _require(math.isfinite(d) and d >= 1.0, f"d must be >= 1, got {d}")
    return code.A * (p_phys / code.p_th) ** ((d + 1.0) / 2.0)


def physical_qubits_for_code(d: float, q_logical: int) -> float:
    """Physical qubit cost 2*(d+1)^2 per logical qubit, times ``q_logical``."""
    _require(math.isfinite(d) and d >= 1.0, f"d must be >= 1, got {d}")
    q_logical = _check_positive_count("q_logical", q_logical)
    return 2.0 * (d + 1.0) ** 2 * q_logical


def circuit_gate_count(cost: AlgorithmCostModel, q_logical: int) -> float:
    """Logical operation count alpha * q_logical^beta."""
    q_logical = _check_positive_count("q_logical", q_logical)
    return cost.alpha * q_logical ** cost.beta


def tolerable_logical_error(cost: AlgorithmCostModel, q_logical: int) -> float:
    """Largest logical error rate compatible with total circuit error p_C.

    Union-bound mode divides p_C by the gate count; log-refined mode uses the
    tighter ln(1/(1-p_C)) numerator, which always dominates the union bound.
    """
    gates = circuit_gate_count(cost, q_logical)
    if cost.error_budget_mode is ErrorBudgetMode.LOG_REFINED:
        return math.log(1.0 / (1.0 - cost.p_C)) / gates
    return cost.p_C / gates


def burden_factor(cost: AlgorithmCostModel, code: SurfaceCodeModel) -> float:
    """Fault-tolerance burden A*alpha/p_C (or its log-refined variant)."""
    if cost.error_budget_mode is ErrorBudgetMode.LOG_REFINED:
        return code.A * cost.alpha / math.log(1.0 / (1.0 - cost.p_C))
    return code.A * cost.alpha / cost.p_C
