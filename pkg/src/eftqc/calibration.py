"""Fit scalability models to device calibration data.

Input is a series of (qubit count, worst-case two-qubit error rate)
measurements; output is a fitted power-law or logarithmic scalability model
with regression diagnostics.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .models import ScalabilityModel


class CalibrationDataError(ValueError):
    """Malformed or out-of-range calibration input."""


class FitError(ValueError):
    """The requested model cannot be fit to the data."""


@dataclass(frozen=True)
class CalibrationPoint:
    q_phys: int
    error_rate: float
    std_dev: Optional[float] = None


@dataclass(frozen=True)
class CalibrationSeries:
    points: tuple[CalibrationPoint, ...]
    source_label: str = ""

    def __post_init__(self) -> None:
        for point in self.points:
            if point.q_phys < 1:
                raise CalibrationDataError(f"qubit count must be >= 1, got {point.q_phys}")
            if not (0.0 < point.error_rate < 1.0):
                raise CalibrationDataError(
                    f"error rate must lie in (0, 1), got {point.error_rate}"
                )
            if point.std_dev is not None and not (math.isfinite(point.std_dev) and point.std_dev >= 0.0):
                raise CalibrationDataError(f"std_dev must be >= 0, got {point.std_dev}")


@dataclass(frozen=True)
class FitReport:
    """Fitted model plus diagnostics.

    residual_rms lives in the fit's own transformed space (log-log for the
    power law, semi-log for the logarithmic model); raw_rms is the error-rate
    -space RMS used to compare across models.
    """

    model: ScalabilityModel
    residual_rms: float
    r_squared: float
    n_points: int
    raw_rms: float


_REQUIRED_COLUMNS = ("qubit_count", "worst_two_qubit_error")
_OPTIONAL_COLUMNS = ("std_dev",)


def load_calibration_csv(path: Union[str, Path]) -> CalibrationSeries:
    """Parse a calibration CSV with header qubit_count,worst_two_qubit_error[,std_dev].

    Duplicate qubit counts are retained as separate observations (the fits
    average them).  Every malformed row is rejected with its line number.
    """
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CalibrationDataError(f"{path}: file is empty") from None
        header = [column.strip() for column in header]
        for column in _REQUIRED_COLUMNS:
            if column not in header:
                raise CalibrationDataError(f"{path}: missing required column {column!r}")
        known = set(_REQUIRED_COLUMNS) | set(_OPTIONAL_COLUMNS)
        unknown = [column for column in header if column not in known]
        if unknown:
            raise CalibrationDataError(f"{path}: unknown columns {unknown}")
        index = {column: header.index(column) for column in header}

        points = []
        for line_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise CalibrationDataError(
                    f"{path}:{line_number}: expected {len(header)} fields, got {len(row)}"
                )
            q = _parse_int(path, line_number, "qubit_count", row[index["qubit_count"]])
            error = _parse_float(path, line_number, "worst_two_qubit_error", row[index["worst_two_qubit_error"]])
            std: Optional[float] = None
            if "std_dev" in index and row[index["std_dev"]].strip():
                std = _parse_float(path, line_number, "std_dev", row[index["std_dev"]])
                if std < 0.0:
                    raise CalibrationDataError(f"{path}:{line_number}: std_dev must be >= 0")
            if q < 1:
                raise CalibrationDataError(f"{path}:{line_number}: qubit_count must be >= 1")
            if not (0.0 < error < 1.0):
                raise CalibrationDataError(
                    f"{path}:{line_number}: worst_two_qubit_error must lie in (0, 1), got {error}"
                )
            points.append(CalibrationPoint(q, error, std))

    if not points:
        raise CalibrationDataError(f"{path}: no data rows")
    return CalibrationSeries(tuple(points), source_label=path.name)


def _parse_int(path: Path, line: int, column: str, text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise CalibrationDataError(f"{path}:{line}: {column} must be an integer, got {text!r}") from None


def _parse_float(path: Path, line: int, column: str, text: str) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        raise CalibrationDataError(f"{path}:{line}: {column} must be a number, got {text!r}") from None
    if not math.isfinite(value):
        raise CalibrationDataError(f"{path}:{line}: {column} must be finite, got {text!r}")
    return value


def _grouped(series: CalibrationSeries, transform) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Average transformed observations per distinct qubit count.

    Returns (x = ln q, y = mean transformed error, weight).  Weights are
    1/std^2 sums when every point carries a positive std_dev, else counts.
    """
    weighted = all(p.std_dev is not None and p.std_dev > 0.0 for p in series.points)
    buckets: dict[int, list[tuple[float, float]]] = {}
    for p in series.points:
        w = 1.0 / (p.std_dev**2) if weighted else 1.0
        buckets.setdefault(p.q_phys, []).append((transform(p.error_rate), w))
    qs = sorted(buckets)
    x = np.log(np.array(qs, dtype=float))
    y = np.array([sum(v * w for v, w in buckets[q]) / sum(w for _, w in buckets[q]) for q in qs])
    weight = np.array([sum(w for _, w in buckets[q]) for q in qs])
    return x, y, weight


def _weighted_line(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Weighted least-squares line y = intercept + slope * x."""
    sw = w.sum()
    xm = (w * x).sum() / sw
    ym = (w * y).sum() / sw
    sxx = (w * (x - xm) ** 2).sum()
    if sxx == 0.0:
        raise FitError("need at least 2 distinct qubit counts to fit a scalability model")
    slope = (w * (x - xm) * (y - ym)).sum() / sxx
    return float(ym - slope * xm), float(slope)


def _diagnostics(x: np.ndarray, y: np.ndarray, intercept: float, slope: float) -> tuple[float, float]:
    predicted = intercept + slope * x
    residuals = y - predicted
    rms = float(np.sqrt(np.mean(residuals**2)))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(residuals**2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return rms, r_squared


def _raw_rms(series: CalibrationSeries, model: ScalabilityModel) -> float:
    from .models import physical_error_rate

    errors = [physical_error_rate(model, p.q_phys) - p.error_rate for p in series.points]
    return float(np.sqrt(np.mean(np.square(errors))))


def fit_power_law(series: CalibrationSeries) -> FitReport:
    """Least squares of ln(p) on ln(Q): p = p0 * Q^(1/s).

    Duplicate qubit counts are averaged in log space before the regression;
    points are weighted by 1/std_dev^2 when every row carries one.
    """
    if len(series.points) < 2:
        raise FitError("need at least 2 points")
    x, y, w = _grouped(series, math.log)
    intercept, slope = _weighted_line(x, y, w)
    if slope <= 0.0:
        raise FitError("error rates do not increase with qubit count; power-law model inapplicable")
    p0 = math.exp(intercept)
    try:
        model = ScalabilityModel.power_law(p0=p0, s=1.0 / slope)
    except ValueError as error:
        raise FitError(f"power-law fit produced invalid parameters: {error}") from None
    rms, r_squared = _diagnostics(x, y, intercept, slope)
    return FitReport(model, rms, r_squared, len(series.points), _raw_rms(series, model))


def fit_log_model(series: CalibrationSeries) -> FitReport:
    """Least squares of p on ln(Q): p = p0 * (1 + ln(Q)/sigma).

    The line p = a + b*ln(Q) maps to p0 = a, sigma = a/b; fits with a <= 0 or
    b <= 0 are rejected because the model requires a positive base rate and
    error growing with size.
    """
    if len(series.points) < 2:
        raise FitError("need at least 2 points")
    x, y, w = _grouped(series, lambda p: p)
    intercept, slope = _weighted_line(x, y, w)
    if slope <= 0.0 or intercept <= 0.0:
        raise FitError(
            "logarithmic model inapplicable to data: requires positive base rate and increasing error"
        )
    try:
        model = ScalabilityModel.logarithmic(p0=intercept, sigma=intercept / slope)
    except ValueError as error:
        raise FitError(f"logarithmic fit produced invalid parameters: {error}") from None
    rms, r_squared = _diagnostics(x, y, intercept, slope)
    return FitReport(model, rms, r_squared, len(series.points), _raw_rms(series, model))


def compare_fits(series: CalibrationSeries) -> list[FitReport]:
    """Fit every applicable model, best raw-space RMS first.

    Models that cannot be fit are skipped; if none applies the last failure
    propagates.
    """
    reports = []
    failure: Optional[FitError] = None
    for fitter in (fit_power_law, fit_log_model):
        try:
            reports.append(fitter(series))
        except FitError as error:
            failure = error
    if not reports:
        assert failure is not None
        raise failure
    return sorted(reports, key=lambda report: report.raw_rms)
