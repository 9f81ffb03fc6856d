"""Configuration loading, merging, and validation.

Configs are nested key/value sections (TOML or JSON on disk) layered as
defaults < preset < file < --set overrides.  Unknown keys are hard errors.
"""
from __future__ import annotations

import copy
import json
import math
from pathlib import Path
from typing import Any, Optional, Union

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .models import (
    AlgorithmCostModel,
    ErrorBudgetMode,
    ScalabilityKind,
    ScalabilityModel,
    SurfaceCodeModel,
)
from .reach import DistanceMode, ReachProblem
from .rfe import EtaResample, NoiseKind, NoiseModel, RfeExperiment


class ConfigError(ValueError):
    """Configuration is malformed, has unknown keys, or fails validation."""


DEFAULTS: dict[str, Any] = {
    "scalability": {"kind": "power_law", "p0": 1e-4, "scale": 3.5},
    "surface_code": {"A": 0.1, "p_th": 0.01},
    "algorithm": {
        "alpha": 4.12e9,
        "beta": 0.515,
        "p_C": 0.1,
        "error_budget_mode": "union_bound",
    },
    "rfe": {
        "theta": math.pi / 4,
        "K": 32,
        "J": 32,
        "M": 200,
        "noise": {"kind": "ideal", "sigma": 0.0, "lambda": 0.0, "eta_resample": "per_k"},
        "seed": 0,
    },
}

#: Named parameter sets for one-command reproduction of the headline numbers.
PRESETS: dict[str, dict[str, Any]] = {
    # the reach / contour operating point behind the "about 90 logical qubits" result
    "reference-reach": {
        "scalability": {"kind": "power_law", "p0": 1e-4, "scale": 3.5},
        "surface_code": {"A": 0.1, "p_th": 0.01},
        "algorithm": {"alpha": 4.12e9, "beta": 0.515, "p_C": 0.1},
    },
    # a small ideal-noise phase-estimation run on the default grid
    "reference-rfe": {
        "rfe": {
            "theta": math.pi / 4,
            "K": 32,
            "J": 32,
            "M": 200,
            "noise": {"kind": "ideal"},
            "seed": 7,
        }
    },
    # present-day device operating point from the worst-case two-qubit-error fit
    "reference-device": {
        "scalability": {"kind": "power_law", "p0": 0.005, "scale": 1.75},
    },
}


def load_config_file(path: Union[str, Path]) -> dict[str, Any]:
    """Read a TOML or JSON config; a run manifest is accepted and unwrapped."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix == ".toml":
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    elif path.suffix == ".json":
        with path.open() as handle:
            data = json.load(handle)
    else:
        raise ConfigError(f"unsupported config format {path.suffix!r} (use .toml or .json)")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    if "config" in data and "command" in data:  # emitted manifest
        data = data["config"]
    return data


def parse_overrides(assignments: list[str]) -> dict[str, Any]:
    """Turn --set KEY=VALUE strings into a nested dict (JSON-parsed scalars)."""
    tree: dict[str, Any] = {}
    for assignment in assignments:
        key, sep, text = assignment.partition("=")
        if not sep or not key:
            raise ConfigError(f"override must look like section.key=value, got {assignment!r}")
        try:
            value: Any = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} conflicts with an earlier scalar override")
        node[parts[-1]] = value
    return tree


def _merge(base: dict[str, Any], extra: dict[str, Any], path: str = "") -> None:
    for key, value in extra.items():
        here = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key: {here}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {here} must be a section")
            _merge(base[key], value, here + ".")
        else:
            if isinstance(value, dict):
                raise ConfigError(f"config key {here} must be a value, not a section")
            base[key] = value


def resolve_config(
    preset: Optional[str] = None,
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[list[str]] = None,
    seed: Optional[int] = None,
) -> dict[str, Any]:
    """Layer defaults, preset, file, and overrides into one resolved config."""
    resolved = copy.deepcopy(DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; available: {sorted(PRESETS)}")
        _merge(resolved, copy.deepcopy(PRESETS[preset]))
    if config_path is not None:
        _merge(resolved, load_config_file(config_path))
    if overrides:
        _merge(resolved, parse_overrides(overrides))
    if seed is not None:
        resolved["rfe"]["seed"] = seed
    return resolved


def _as_float(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}") from None


def _as_int(section: str, key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, (float, str)):
        try:
            as_float = float(value)
        except ValueError:
            raise ConfigError(f"{section}.{key} must be an integer, got {value!r}") from None
        if as_float.is_integer():
            return int(as_float)
    raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")


def _as_enum(section: str, key: str, value: Any, enum_type):
    try:
        return enum_type(value)
    except ValueError:
        allowed = [member.value for member in enum_type]
        raise ConfigError(f"{section}.{key} must be one of {allowed}, got {value!r}") from None


def scalability_from(config: dict[str, Any]) -> ScalabilityModel:
    section = config["scalability"]
    kind = _as_enum("scalability", "kind", section["kind"], ScalabilityKind)
    try:
        return ScalabilityModel(kind, _as_float("scalability", "p0", section["p0"]),
                                _as_float("scalability", "scale", section["scale"]))
    except ValueError as error:
        raise ConfigError(f"scalability: {error}") from None


def surface_code_from(config: dict[str, Any]) -> SurfaceCodeModel:
    section = config["surface_code"]
    try:
        return SurfaceCodeModel(_as_float("surface_code", "A", section["A"]),
                                _as_float("surface_code", "p_th", section["p_th"]))
    except ValueError as error:
        raise ConfigError(f"surface_code: {error}") from None


def cost_from(config: dict[str, Any]) -> AlgorithmCostModel:
    section = config["algorithm"]
    mode = _as_enum("algorithm", "error_budget_mode", section["error_budget_mode"], ErrorBudgetMode)
    try:
        return AlgorithmCostModel(
            alpha=_as_float("algorithm", "alpha", section["alpha"]),
            beta=_as_float("algorithm", "beta", section["beta"]),
            p_C=_as_float("algorithm", "p_C", section["p_C"]),
            error_budget_mode=mode,
        )
    except ValueError as error:
        raise ConfigError(f"algorithm: {error}") from None


def reach_problem_from(
    config: dict[str, Any],
    distance_mode: DistanceMode = DistanceMode.CONTINUOUS,
) -> ReachProblem:
    try:
        return ReachProblem(
            scalability=scalability_from(config),
            code=surface_code_from(config),
            cost=cost_from(config),
            distance_mode=distance_mode,
        )
    except ValueError as error:
        if isinstance(error, ConfigError):
            raise
        raise ConfigError(str(error)) from None


def noise_from(config: dict[str, Any]) -> NoiseModel:
    section = config["rfe"]["noise"]
    kind = _as_enum("rfe.noise", "kind", section["kind"], NoiseKind)
    resample = _as_enum("rfe.noise", "eta_resample", section["eta_resample"], EtaResample)
    sigma = _as_float("rfe.noise", "sigma", section["sigma"])
    lam = _as_float("rfe.noise", "lambda", section["lambda"])
    try:
        if kind is NoiseKind.IDEAL:
            return NoiseModel.ideal()
        if kind is NoiseKind.GAUSSIAN:
            return NoiseModel(kind, sigma=sigma, eta_resample=resample)
        return NoiseModel(kind, lam=lam)
    except ValueError as error:
        raise ConfigError(f"rfe.noise: {error}") from None


def experiment_from(config: dict[str, Any]) -> RfeExperiment:
    section = config["rfe"]
    try:
        return RfeExperiment(
            theta_true=_as_float("rfe", "theta", section["theta"]),
            K=_as_int("rfe", "K", section["K"]),
            J=_as_int("rfe", "J", section["J"]),
            M=_as_int("rfe", "M", section["M"]),
            noise=noise_from(config),
            seed=_as_int("rfe", "seed", section["seed"]),
        )
    except ValueError as error:
        if isinstance(error, ConfigError):
            raise
        raise ConfigError(f"rfe: {error}") from None
