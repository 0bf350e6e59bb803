# SPDX-License-Identifier: GPL-3.0+

""" Run configuration: flat key = value text or JSON, merged onto DEFAULTS.

Text format, one key per line, '#' starts a comment:

    A = 1
    alpha = 0.5
    methods = series, laplace

Lists are comma separated; JSON files (.json suffix) hold one flat object.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from .dynamics import DensityMatrix, RoutingConfig
from .errors import ConfigError
from .oracles import PARTS, TimeGrid
from .reservoir import Z0_FORMS, ReservoirConfig
from .sample import Method

log = logging.getLogger(__name__)

_ROUTING = RoutingConfig()

DEFAULTS: Dict[str, object] = {
    "A": 1.0,
    "a": 1.0,
    "alpha": 0.5,
    "omega0": 1.0,
    "z0_form": "transform",
    # grid; t_max = None means 1000 tau
    "t_min": 0.01,
    "t_max": None,
    "points": 200,
    "scale": "log",
    "methods": ["auto"],
    "part": "total",
    "tol": 1e-8,
    "compare_tol": 1e-6,
    "asymptotic_gate": 0.1,
    # initial state
    "rho11_0": 1.0,
    "rho10_0_re": 0.0,
    "rho10_0_im": 0.0,
    # routing
    "series_margin": _ROUTING.series_margin,
    "root_residual_gate": _ROUTING.root_residual_gate,
    "ml_max_arg": _ROUTING.ml_max_arg,
    "series_tol": _ROUTING.series_tol,
    "laplace_nodes": _ROUTING.laplace_nodes,
    "volterra_step": _ROUTING.volterra_step,
    "volterra_t_max": _ROUTING.volterra_t_max,
    "volterra_tol": _ROUTING.volterra_tol,
    "asymptotic_shells": _ROUTING.asymptotic_shells,
    # sweep and tail fit, window in units of tau
    "sweep_alphas": [0.2, 0.4, 0.6, 0.8],
    "sweep_amplitudes": [1.0],
    "fit_window_min": 100.0,
    "fit_window_max": 1000.0,
    "fit_points": 40,
}

_LISTS = {"methods", "sweep_alphas", "sweep_amplitudes"}
_INTS = {"points", "laplace_nodes", "asymptotic_shells", "fit_points"}
_STRINGS = {"z0_form", "scale", "part"}


@dataclass(frozen=True)
class RunSpec:
    reservoir: ReservoirConfig
    z0_form: str
    t_min: float
    t_max: Optional[float]
    points: int
    scale: str
    methods: Tuple[str, ...]
    part: str
    tol: float
    compare_tol: float
    asymptotic_gate: float
    rho0: DensityMatrix
    routing: RoutingConfig
    sweep_alphas: Tuple[float, ...]
    sweep_amplitudes: Tuple[float, ...]
    fit_window: Tuple[float, float]
    fit_points: int

    def grid(self, tau: float) -> TimeGrid:
        """ Output grid; an unset t_max becomes 1000 tau. """
        t_max = self.t_max if self.t_max is not None else 1000.0 * tau
        if t_max <= self.t_min:
            raise ConfigError(f"t_max = {t_max:.6g} must exceed t_min = {self.t_min:.6g}")
        if self.scale == "log":
            return TimeGrid.log(self.t_min, t_max, self.points)
        return TimeGrid.uniform(self.t_min, t_max, self.points)

    def fit_grid(self, tau: float) -> TimeGrid:
        return TimeGrid.log(self.fit_window[0] * tau, self.fit_window[1] * tau, self.fit_points)

    def with_reservoir(self, reservoir: ReservoirConfig) -> "RunSpec":
        values = dict(self.__dict__)
        values["reservoir"] = reservoir
        return RunSpec(**values)


def _coerce(key: str, value):
    if key in _LISTS:
        if isinstance(value, str):
            value = [v.strip() for v in value.split(",") if v.strip()]
        if not isinstance(value, (list, tuple)):
            value = [value]
        if key == "methods":
            return [str(v) for v in value]
        try:
            return [float(v) for v in value]
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a list of numbers (got {value!r})") from None
    if key in _STRINGS:
        return str(value)
    if value is None or (isinstance(value, str) and value.lower() in ("none", "")):
        if key != "t_max":
            raise ConfigError(f"{key} needs a value")
        return None
    try:
        if key in _INTS:
            number = float(value)
            if not number.is_integer():
                raise ValueError
            return int(number)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be {'an integer' if key in _INTS else 'a number'} (got {value!r})") from None


def parse_text(text: str) -> Dict[str, object]:
    values: Dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value' (got {line!r})")
        key, raw = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: missing key")
        values[key] = raw
    return values


def load_file(path: str) -> Dict[str, object]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if os.path.splitext(path)[1].lower() == ".json":
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return values
    return parse_text(text)


def merge(overrides: Mapping[str, object]) -> Dict[str, object]:
    """ DEFAULTS updated with overrides; unknown keys are rejected. """
    unknown = sorted(set(overrides) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    values = dict(DEFAULTS)
    for key, value in overrides.items():
        values[key] = _coerce(key, value)
    return values


def build_spec(values: Mapping[str, object]) -> RunSpec:
    v = merge(values)
    reservoir = ReservoirConfig(v["A"], v["a"], v["alpha"], v["omega0"])
    if v["z0_form"] not in Z0_FORMS:
        raise ConfigError(f"z0_form must be one of {Z0_FORMS} (got {v['z0_form']!r})")
    if v["scale"] not in ("log", "uniform"):
        raise ConfigError(f"scale must be 'log' or 'uniform' (got {v['scale']!r})")
    if v["part"] not in PARTS:
        raise ConfigError(f"part must be one of {PARTS} (got {v['part']!r})")
    if not v["methods"]:
        raise ConfigError("at least one method must be selected")
    methods = tuple("auto" if m == "auto" else Method.parse(m).value for m in v["methods"])
    if len(set(methods)) != len(methods):
        raise ConfigError(f"methods listed twice: {', '.join(methods)}")
    if not (v["t_min"] >= 0 and math.isfinite(v["t_min"])):
        raise ConfigError(f"t_min must be >= 0 (got {v['t_min']})")
    if v["scale"] == "log" and v["t_min"] <= 0:
        raise ConfigError("a log grid needs t_min > 0")
    if v["points"] < 1:
        raise ConfigError(f"points must be >= 1 (got {v['points']})")
    for key in ("tol", "compare_tol", "asymptotic_gate"):
        if not v[key] > 0:
            raise ConfigError(f"{key} must be > 0 (got {v[key]})")
    if not 0 < v["fit_window_min"] < v["fit_window_max"]:
        raise ConfigError("fit window needs 0 < fit_window_min < fit_window_max")
    if not v["sweep_alphas"] or not v["sweep_amplitudes"]:
        raise ConfigError("sweep lists must not be empty")
    routing = RoutingConfig(
        series_margin=v["series_margin"], root_residual_gate=v["root_residual_gate"], ml_max_arg=v["ml_max_arg"],
        series_tol=v["series_tol"], laplace_nodes=v["laplace_nodes"], laplace_tol=v["tol"],
        volterra_step=v["volterra_step"], volterra_t_max=v["volterra_t_max"], volterra_tol=v["volterra_tol"],
        asymptotic_shells=v["asymptotic_shells"])
    rho0 = DensityMatrix(v["rho11_0"], complex(v["rho10_0_re"], v["rho10_0_im"]))
    return RunSpec(
        reservoir=reservoir, z0_form=v["z0_form"], t_min=v["t_min"], t_max=v["t_max"], points=v["points"],
        scale=v["scale"], methods=methods, part=v["part"], tol=v["tol"], compare_tol=v["compare_tol"],
        asymptotic_gate=v["asymptotic_gate"], rho0=rho0, routing=routing,
        sweep_alphas=tuple(v["sweep_alphas"]), sweep_amplitudes=tuple(v["sweep_amplitudes"]),
        fit_window=(v["fit_window_min"], v["fit_window_max"]), fit_points=v["fit_points"])


def load_spec(path: Optional[str] = None, overrides: Optional[Mapping[str, object]] = None) -> RunSpec:
    """ Config file (if any) with command-line overrides applied last. """
    values = load_file(path) if path else {}
    values.update(overrides or {})
    spec = build_spec(values)
    log.debug("run spec: %s", spec)
    return spec
