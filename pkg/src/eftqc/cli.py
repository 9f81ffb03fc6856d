"""Command-line entry point: reproducible runs with manifest + file outputs.

Every run resolves its parameters (defaults < preset < config file < --set
overrides < --seed), echoes them into ``manifest.json`` in the output
directory, and writes ``result.json`` plus command-specific CSVs.  Outputs
carry no timestamps, so re-running a manifest reproduces identical bytes.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Any, Optional

from . import calibration, config as config_mod, models, output, reach, rfe

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NONCONVERGENCE = 4
EXIT_DOMAIN = 5


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eftqc",
        description="Resource estimation and algorithm simulation for finite-scalability quantum architectures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=None, help="TOML/JSON config (or an emitted manifest.json)")
        p.add_argument("--preset", choices=sorted(config_mod.PRESETS), default=None)
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key (repeatable), e.g. --set scalability.scale=4.5")
        p.add_argument("--out", type=Path, default=Path("eftqc-out"), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override rfe.seed")
        p.add_argument("--error-budget-mode", choices=[m.value for m in models.ErrorBudgetMode], default=None)
        p.add_argument("--distance-mode", choices=[m.value for m in reach.DistanceMode],
                       default=reach.DistanceMode.CONTINUOUS.value)

    p = sub.add_parser("fit", help="fit scalability models to calibration data")
    add_common(p)
    p.add_argument("--input", type=Path, required=True, help="calibration CSV")

    p = sub.add_parser("reach", help="maximum logical qubit count for the configured problem")
    add_common(p)
    p.add_argument("--method", choices=["all", "closed_form", "lower_bound", "numeric"], default="all")
    p.add_argument("--burden-reduction", type=float, default=None,
                   help="divide the gate-count prefactor by this factor (e.g. a J/K depth reduction)")

    p = sub.add_parser("contour", help="required physical qubits across a logical-qubit range")
    add_common(p)
    p.add_argument("--q-min", type=int, default=1)
    p.add_argument("--q-max", type=int, default=300)
    p.add_argument("--step", type=int, default=1)

    p = sub.add_parser("regimes", help="Q_phys^max grid over scalability and p0/p_th")
    add_common(p)
    p.add_argument("--s-min", type=float, default=0.25)
    p.add_argument("--s-max", type=float, default=5.0)
    p.add_argument("--s-points", type=int, default=20)
    p.add_argument("--ratio-min", type=float, default=0.05)
    p.add_argument("--ratio-max", type=float, default=0.95)
    p.add_argument("--ratio-points", type=int, default=19)

    p = sub.add_parser("rfe-sim", help="run one RFE experiment and estimate its failure rate")
    add_common(p)
    p.add_argument("--trials", type=int, default=200, help="failure-rate trials")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("rfe-calibrate", help="calibrate the shot count for a target failure rate")
    add_common(p)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--trials-per-probe", type=int, default=200)
    p.add_argument("--m-ceiling", type=int, default=10**8)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("msd", help="emit the minimum distillation-footprint table")
    add_common(p)

    return parser


def _resolved_config(args: argparse.Namespace) -> dict[str, Any]:
    cfg = config_mod.resolve_config(
        preset=args.preset,
        config_path=args.config,
        overrides=args.overrides,
        seed=args.seed,
    )
    if args.error_budget_mode is not None:
        cfg["algorithm"]["error_budget_mode"] = args.error_budget_mode
    return cfg


def _manifest(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    options = {
        key: (str(value) if isinstance(value, Path) else value)
        for key, value in vars(args).items()
        if key not in {"command", "config", "preset", "overrides", "out", "seed", "error_budget_mode"}
    }
    return {"command": args.command, "options": options, "config": cfg}


def _model_payload(model: models.ScalabilityModel) -> dict[str, Any]:
    return {"kind": model.kind.value, "p0": model.p0, "scale": model.scale}


def _problem_payload(problem: reach.ReachProblem) -> dict[str, Any]:
    return {
        "scalability": _model_payload(problem.scalability),
        "surface_code": {"A": problem.code.A, "p_th": problem.code.p_th},
        "algorithm": {
            "alpha": problem.cost.alpha,
            "beta": problem.cost.beta,
            "p_C": problem.cost.p_C,
            "error_budget_mode": problem.cost.error_budget_mode.value,
        },
        "distance_mode": problem.distance_mode.value,
    }


def _cmd_fit(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    series = calibration.load_calibration_csv(args.input)
    inapplicable = {}
    for name, fitter in (("power_law", calibration.fit_power_law),
                         ("logarithmic", calibration.fit_log_model)):
        try:
            fitter(series)
        except calibration.FitError as error:
            inapplicable[name] = str(error)
    reports = calibration.compare_fits(series)
    return {
        "source": series.source_label,
        "n_points": len(series.points),
        "reports": [
            {
                "model": _model_payload(report.model),
                "residual_rms": report.residual_rms,
                "r_squared": report.r_squared,
                "n_points": report.n_points,
                "raw_rms": report.raw_rms,
            }
            for report in reports
        ],
        "inapplicable": inapplicable,
    }


def _cmd_reach(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    problem = config_mod.reach_problem_from(cfg, reach.DistanceMode(args.distance_mode))
    if args.burden_reduction is not None:
        problem = reach.apply_burden_reduction(problem, args.burden_reduction)
    closed_form_ok = (
        problem.scalability.kind is models.ScalabilityKind.POWER_LAW
        and not problem.scalability.scale_independent
        and problem.cost.beta > 0.0
    )
    if args.method in ("closed_form", "lower_bound") and not closed_form_ok:
        raise config_mod.ConfigError(
            f"method {args.method} requires finite power-law scalability with beta > 0; "
            "use --method numeric"
        )
    result: dict[str, Any] = {
        "problem": _problem_payload(problem),
        "q_phys_opt": models.optimal_physical_qubits(problem.scalability, problem.code),
        "q_phys_max": models.max_physical_qubits(problem.scalability, problem.code),
        "closed_form": None,
        "lower_bound": None,
        "numeric": None,
    }
    if args.method in ("all", "closed_form") and closed_form_ok:
        result["closed_form"] = reach.max_logical_qubits_closed_form(problem)
    if args.method in ("all", "lower_bound") and closed_form_ok:
        result["lower_bound"] = reach.max_logical_qubits_lower_bound(problem)
    if args.method in ("all", "numeric"):
        result["numeric"] = reach.max_logical_qubits_numeric(problem)
    return result


def _cmd_contour(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    problem = config_mod.reach_problem_from(cfg, reach.DistanceMode(args.distance_mode))
    series = reach.contour(problem, (args.q_min, args.q_max), args.step)
    output.write_contour_csv(args.out / "contour.csv", series)
    feasible = [point.q_logical for point in series.points if point.feasible]
    return {
        "problem": _problem_payload(problem),
        "label": series.scalability_label,
        "q_range": [args.q_min, args.q_max],
        "step": args.step,
        "n_points": len(series.points),
        "last_feasible_q_logical": max(feasible) if feasible else None,
        "csv": "contour.csv",
    }


def _cmd_regimes(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    grid = reach.regimes_grid(
        (args.s_min, args.s_max),
        (args.ratio_min, args.ratio_max),
        (args.s_points, args.ratio_points),
    )
    output.write_regimes_csv(args.out / "regimes.csv", grid)
    return {
        "s_range": [args.s_min, args.s_max],
        "ratio_range": [args.ratio_min, args.ratio_max],
        "resolution": [args.s_points, args.ratio_points],
        "contour_levels": list(grid.contour_levels),
        "nisq_to_eftqc_band": list(reach.NISQ_TO_EFTQC_BAND),
        "eftqc_to_ftqc_band": list(reach.EFTQC_TO_FTQC_BAND),
        "csv": "regimes.csv",
    }


def _cmd_rfe_sim(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    experiment = config_mod.experiment_from(cfg)
    result = rfe.run_rfe(experiment)
    stats = rfe.estimate_failure_rate(experiment, args.trials, workers=args.workers)
    output.write_spectrum_csv(args.out / "spectrum.csv", result.spectrum)
    return {
        "theta_true": experiment.theta_true,
        "K": experiment.K,
        "J": experiment.J,
        "M": experiment.M,
        "seed": experiment.seed,
        "noise": {
            "kind": experiment.noise.kind.value,
            "sigma": experiment.noise.sigma,
            "lambda": experiment.noise.lam,
            "eta_resample": experiment.noise.eta_resample.value,
        },
        "theta_hat": result.theta_hat,
        "peak_index": result.peak_index,
        "epsilon": experiment.epsilon,
        "circular_error": rfe.circular_error(result.theta_hat, experiment.theta_true),
        "clamp_events": result.clamp_events,
        "failure": {
            "trials": args.trials,
            "rate": stats.rate,
            "ci_low": stats.ci_low,
            "ci_high": stats.ci_high,
        },
        "csv": "spectrum.csv",
    }


def _cmd_rfe_calibrate(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    experiment = config_mod.experiment_from(cfg)
    m = rfe.calibrate_samples(
        experiment,
        delta=args.delta,
        trials_per_probe=args.trials_per_probe,
        m_ceiling=args.m_ceiling,
        workers=args.workers,
    )
    return {
        "M": m,
        "delta": args.delta,
        "trials_per_probe": args.trials_per_probe,
        "theta_true": experiment.theta_true,
        "K": experiment.K,
        "J": experiment.J,
        "seed": experiment.seed,
        "noise": {
            "kind": experiment.noise.kind.value,
            "sigma": experiment.noise.sigma,
            "lambda": experiment.noise.lam,
        },
    }


def _cmd_msd(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    rows = {}
    for quality in models.FactoryQuality:
        record = models.msd_minimum_footprint(quality)
        rows[quality.value] = dataclasses.asdict(record)
    return {"factories": rows}


_COMMANDS = {
    "fit": _cmd_fit,
    "reach": _cmd_reach,
    "contour": _cmd_contour,
    "regimes": _cmd_regimes,
    "rfe-sim": _cmd_rfe_sim,
    "rfe-calibrate": _cmd_rfe_calibrate,
    "msd": _cmd_msd,
}


def _summary_line(command: str, result: dict[str, Any]) -> str:
    if command == "reach":
        parts = [f"{key}={result[key]:.6g}" if isinstance(result[key], float) else f"{key}={result[key]}"
                 for key in ("closed_form", "lower_bound", "numeric") if result[key] is not None]
        return "reach: " + " ".join(parts)
    if command == "fit":
        best = result["reports"][0]["model"]
        return f"fit: best {best['kind']} p0={best['p0']:.6g} scale={best['scale']:.6g}"
    if command == "contour":
        return f"contour: {result['n_points']} points, last feasible Q_L = {result['last_feasible_q_logical']}"
    if command == "rfe-sim":
        return (f"rfe-sim: theta_hat={result['theta_hat']:.6g} peak={result['peak_index']} "
                f"failure_rate={result['failure']['rate']:.3g}")
    if command == "rfe-calibrate":
        return f"rfe-calibrate: M={result['M']}"
    if command == "regimes":
        return "regimes: grid written"
    return f"{command}: done"


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolved_config(args)
        args.out.mkdir(parents=True, exist_ok=True)
        result = _COMMANDS[args.command](args, cfg)
        output.write_json(args.out / "manifest.json", _manifest(args, cfg))
        output.write_json(args.out / "result.json", result)
    except config_mod.ConfigError as error:
        return _fail(EXIT_CONFIG, error)
    except calibration.CalibrationDataError as error:
        return _fail(EXIT_DATA, error)
    except FileNotFoundError as error:
        return _fail(EXIT_DATA, error)
    except calibration.FitError as error:
        return _fail(EXIT_DATA, error)
    except rfe.CalibrationBudgetError as error:
        return _fail(EXIT_NONCONVERGENCE, error)
    except (models.AboveThresholdError, reach.TrivialSuccessError, ValueError) as error:
        return _fail(EXIT_DOMAIN, error)
    print(_summary_line(args.command, result))
    print(f"outputs: {args.out / 'manifest.json'} {args.out / 'result.json'}")
    return EXIT_OK


def _fail(code: int, error: Exception) -> int:
    print(json.dumps({"error": {"type": type(error).__name__, "message": str(error)}}), file=sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
