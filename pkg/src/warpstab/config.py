"""Scenario configuration: JSON schema, validation and named presets."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .asymptotics import RadialMeasureModel
from .conformal import ConformalProbe
from .errors import ConfigError, WarpstabError
from .expr import parse
from .quadrature import QuadratureSpec
from .space import WarpedSpace
from .variation import RadialProfile

__all__ = ["ScenarioConfig", "PRESETS", "load_config", "preset_config"]

PRESETS: dict[str, dict] = {
    # hyperbolic base, stable minimal slice at t = 0
    "paper-sec4": {
        "space": {"kappa": -1, "g": "1 - 2*t^2", "f": "-2*t^2",
                  "t_min": -0.45, "t_max": 0.45},
        "slice": {"t0": 0.0},
        "variation": {"profile": "cosine", "rho_max": 2.0},
        "spectrum": {"rho_max": 2.0, "grid": 64},
        "flow": {"t1": 0.4, "steps": 800, "rho_max": 2.0},
    },
    # spherical base, exponential warp, quadratic weight (bounded-f
    # counterexample model); minimal slice at t = 1/2
    "paper-remark": {
        "space": {"kappa": 1, "g": "exp(t)", "f": "t^2",
                  "t_min": -5.0, "t_max": 5.0},
        "slice": {"t0": 0.5},
        "variation": {"profile": "cosine", "rho_max": 2.0},
        "spectrum": {"rho_max": 2.0, "grid": 64},
        "flow": {"t1": 1.5, "steps": 400, "rho_max": 2.0},
    },
    "flat": {
        "space": {"kappa": 0, "g": "1", "f": "0", "t_min": -1.0, "t_max": 1.0},
        "slice": {"t0": 0.0},
        "variation": {"profile": "cosine", "rho_max": 1.0},
        "spectrum": {"rho_max": 1.0, "grid": 64},
        "flow": {"t1": 0.5, "steps": 400, "rho_max": 1.0},
    },
    "cylinder": {
        "space": {"kappa": 1, "g": "1", "f": "0", "t_min": -1.0, "t_max": 1.0},
        "slice": {"t0": 0.0},
        "variation": {"profile": "cosine", "rho_max": 1.0},
        "spectrum": {"rho_max": 1.0, "grid": 64},
        "flow": {"t1": 0.5, "steps": 400, "rho_max": 1.0},
    },
}

_SHARED_DEFAULTS = {
    "asymptotics": {
        "m": 3, "warp": "r^2", "weight": "0", "r_min": 0.1, "r_max": 9.0,
        "r1": 1.0, "r2": 2.0, "R": 2.5,
        "a_grid": [1e2, 1e3, 1e4, 1e5], "growth_derivative": "2*r",
    },
    "conformal": {"R": 1.0, "a": 0.875, "t": 1e-3, "f": "0", "samples": 200},
    "quadrature": {"panels": 2000, "tol": 1e-8},
    "output": {},
}


def _merged_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(
            f"unknown preset '{name}' (available: {', '.join(sorted(PRESETS))})"
        )
    data = copy.deepcopy(_SHARED_DEFAULTS)
    data.update(copy.deepcopy(PRESETS[name]))
    return data


def _require(data: dict, section: str, needed_for: str) -> dict:
    if section not in data:
        raise ConfigError(
            f"config section '{section}' is required (needed for {needed_for})"
        )
    value = data[section]
    if not isinstance(value, dict):
        raise ConfigError(f"config section '{section}' must be an object")
    return value


def _number(section: dict, key: str, where: str, default=None) -> float:
    if key not in section:
        if default is not None:
            return float(default)
        raise ConfigError(f"missing '{key}' in {where}")
    try:
        return float(section[key])
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' in {where} must be a number")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario; ``raw`` is the resolved dictionary the digest
    and the report echo are computed from."""

    raw: dict

    @property
    def digest(self) -> str:
        body = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(body.encode()).hexdigest()

    # -- section builders --------------------------------------------------

    def space(self) -> WarpedSpace:
        sec = _require(self.raw, "space", "the model geometry")
        kappa = sec.get("kappa")
        if kappa not in (-1, 0, 1):
            raise ConfigError("space.kappa must be -1, 0 or 1")
        for key in ("g", "f"):
            if not isinstance(sec.get(key), str):
                raise ConfigError(f"space.{key} must be an expression string")
        try:
            return WarpedSpace(
                int(kappa),
                parse(sec["g"], "t"),
                parse(sec["f"], "t"),
                _number(sec, "t_min", "space"),
                _number(sec, "t_max", "space"),
            )
        except (ValueError, WarpstabError) as exc:
            raise ConfigError(f"invalid space: {exc}") from exc

    def quadrature(self, tol_override: float | None = None) -> QuadratureSpec:
        sec = self.raw.get("quadrature", {})
        return QuadratureSpec(
            panels=int(_number(sec, "panels", "quadrature", 2000)),
            tol=tol_override if tol_override is not None
            else _number(sec, "tol", "quadrature", 1e-8),
        )

    def slice_t0(self) -> float:
        return _number(_require(self.raw, "slice", "the slice parameter t0"), "t0", "slice")

    def profile(self) -> RadialProfile:
        sec = _require(self.raw, "variation", "the variation profile")
        kind = sec.get("profile", "cosine")
        rho_max = _number(sec, "rho_max", "variation")
        try:
            if kind == "cosine":
                return RadialProfile.cosine_cap(rho_max)
            if kind == "log":
                return RadialProfile.log_cutoff(_number(sec, "a", "variation"))
            if kind == "expression":
                text = sec.get("expression")
                if not isinstance(text, str):
                    raise ConfigError(
                        "variation.expression must be given for profile 'expression'"
                    )
                return RadialProfile.from_expression(text, rho_max)
        except (ValueError, WarpstabError) as exc:
            raise ConfigError(f"invalid variation profile: {exc}") from exc
        raise ConfigError(f"unknown variation profile kind '{kind}'")

    def spectrum_params(self) -> tuple[float, int]:
        sec = _require(self.raw, "spectrum", "the spectral window")
        return (
            _number(sec, "rho_max", "spectrum"),
            int(_number(sec, "grid", "spectrum", 64)),
        )

    def flow_params(self) -> tuple[float, int, float]:
        sec = _require(self.raw, "flow", "the flow interval")
        return (
            _number(sec, "t1", "flow"),
            int(_number(sec, "steps", "flow", 400)),
            _number(sec, "rho_max", "flow", 2.0),
        )

    def measure_model(self) -> RadialMeasureModel:
        sec = _require(self.raw, "asymptotics", "the measure model")
        try:
            return RadialMeasureModel(
                int(_number(sec, "m", "asymptotics", 3)),
                parse(sec.get("warp", "r^2"), "r"),
                parse(sec.get("weight", "0"), "r"),
                _number(sec, "r_min", "asymptotics"),
                _number(sec, "r_max", "asymptotics"),
            )
        except (ValueError, WarpstabError) as exc:
            raise ConfigError(f"invalid asymptotics model: {exc}") from exc

    def comparison_radii(self) -> tuple[float, float, float]:
        sec = _require(self.raw, "asymptotics", "the measure model")
        return (
            _number(sec, "r1", "asymptotics"),
            _number(sec, "r2", "asymptotics"),
            _number(sec, "R", "asymptotics"),
        )

    def cutoff_params(self):
        sec = _require(self.raw, "asymptotics", "the cutoff grid")
        grid = sec.get("a_grid")
        if not isinstance(grid, list) or len(grid) < 4:
            raise ConfigError("asymptotics.a_grid must list at least 4 scales")
        vp = sec.get("growth_derivative", "2*r")
        if not isinstance(vp, str):
            raise ConfigError("asymptotics.growth_derivative must be a string")
        try:
            return parse(vp, "r"), [float(a) for a in grid]
        except (ValueError, WarpstabError) as exc:
            raise ConfigError(f"invalid cutoff parameters: {exc}") from exc

    def conformal_probe(self) -> tuple[ConformalProbe, int]:
        sec = _require(self.raw, "conformal", "the conformal probe")
        try:
            probe = ConformalProbe(
                R=_number(sec, "R", "conformal", 1.0),
                a=_number(sec, "a", "conformal", 0.875),
                t=_number(sec, "t", "conformal", 1e-3),
                background_weight=parse(sec.get("f", "0"), "r"),
            )
        except (ValueError, WarpstabError) as exc:
            raise ConfigError(f"invalid conformal probe: {exc}") from exc
        return probe, int(_number(sec, "samples", "conformal", 200))

    def output_paths(self) -> dict:
        sec = self.raw.get("output", {})
        return {"report": sec.get("report"), "csv_dir": sec.get("csv_dir")}


def preset_config(name: str) -> ScenarioConfig:
    return ScenarioConfig(raw=_merged_preset(name))


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    merged = copy.deepcopy(_SHARED_DEFAULTS)
    merged.update(data)
    return ScenarioConfig(raw=merged)
