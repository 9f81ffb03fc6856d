"""Resource estimation and algorithm simulation for finite-scalability quantum architectures."""

from .models import (
    AboveThresholdError,
    AlgorithmCostModel,
    ErrorBudgetMode,
    FactoryQuality,
    MsdFactoryRecord,
    ScalabilityKind,
    ScalabilityModel,
    SurfaceCodeModel,
    burden_factor,
    circuit_gate_count,
    logical_error_rate,
    max_physical_qubits,
    msd_minimum_footprint,
    optimal_physical_qubits,
    physical_error_rate,
    physical_qubits_for_code,
    tolerable_logical_error,
)
from .reach import (
    ContourPoint,
    ContourSeries,
    DistanceMode,
    ReachMethod,
    ReachProblem,
    ReachResult,
    RegimesGrid,
    TrivialSuccessError,
    apply_burden_reduction,
    classify_regime,
    contour,
    lambert_w0,
    max_logical_qubits_closed_form,
    max_logical_qubits_lower_bound,
    max_logical_qubits_numeric,
    regimes_grid,
    required_physical_qubits,
    satisfies_success_condition,
    solve_reach,
    success_lhs,
    success_rhs,
)
from .rfe import (
    CalibrationBudgetError,
    EtaResample,
    FailureRate,
    NoiseKind,
    NoiseModel,
    RfeExperiment,
    RfeResult,
    burden_reduction_from_depth,
    calibrate_samples,
    circular_error,
    estimate_failure_rate,
    expected_spectrum,
    outcome_probability,
    run_rfe,
    sample_shot,
    shot_estimator,
    wilson_interval,
)
from .calibration import (
    CalibrationDataError,
    CalibrationPoint,
    CalibrationSeries,
    FitError,
    FitReport,
    compare_fits,
    fit_log_model,
    fit_power_law,
    load_calibration_csv,
)

__version__ = "0.1.0"
