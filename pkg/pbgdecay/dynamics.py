# SPDX-License-Identifier: GPL-3.0+

""" Reduced qubit state from the survival amplitude, and trajectories over a time grid. """

from __future__ import annotations

import cmath
import logging
import math
import threading
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from . import asymptotics, oracles, rational, series
from .errors import ConfigError, EvaluationError, NumericalError
from .oracles import TailFit, TimeGrid, fit_tail_exponent
from .outputs import write_csv
from .reservoir import BoundState, ReservoirConfig, bound_state, derive_params
from .sample import GSample, Method

log = logging.getLogger(__name__)

# slack on the density-matrix inequalities for amplitudes computed to finite accuracy
STATE_SLACK = 1e-6

TRAJECTORY_HEADER = ("t", "rho11", "Re(rho10)", "Im(rho10)", "abs_rho10", "method", "err_bound")


@dataclass(frozen=True)
class DensityMatrix:
    """ Qubit state stored as (rho11, rho10); trace and hermiticity are structural. """
    rho11: float
    rho10: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "rho11", float(self.rho11))
        object.__setattr__(self, "rho10", complex(self.rho10))
        if not (math.isfinite(self.rho11) and cmath.isfinite(self.rho10)):
            raise ConfigError("density matrix entries must be finite")
        if not -STATE_SLACK <= self.rho11 <= 1 + STATE_SLACK:
            raise ConfigError(f"rho11 must lie in [0, 1] (got {self.rho11})")
        if self.positivity_margin < -STATE_SLACK:
            raise ConfigError(f"state is not positive: rho11 (1 - rho11) < |rho10|^2 for {self}")

    @property
    def rho00(self) -> float:
        return 1.0 - self.rho11

    @property
    def rho01(self) -> complex:
        return self.rho10.conjugate()

    @property
    def trace(self) -> float:
        return self.rho00 + self.rho11

    @property
    def positivity_margin(self) -> float:
        return self.rho11 * (1 - self.rho11) - abs(self.rho10) ** 2

    def as_matrix(self) -> np.ndarray:
        """ Matrix in the basis (|1>, |0>). """
        return np.array([[self.rho11, self.rho10], [self.rho01, self.rho00]], dtype=complex)

    @classmethod
    def excited(cls) -> "DensityMatrix":
        return cls(1.0, 0j)

    @classmethod
    def maximally_coherent(cls) -> "DensityMatrix":
        return cls(0.5, 0.5)


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    state: DensityMatrix
    sample: GSample


@dataclass(frozen=True)
class RoutingConfig:
    """ Thresholds of the automatic method choice and the per-method tolerances. """
    series_margin: float = 0.9
    root_residual_gate: float = 1e-10
    ml_max_arg: float = series.ML_MAX_ARG
    series_tol: float = series.SERIES_TOL
    laplace_nodes: int = oracles.LAPLACE_NODES
    laplace_tol: float = oracles.LAPLACE_TOL
    volterra_step: float = oracles.VOLTERRA_STEP
    volterra_t_max: float = oracles.VOLTERRA_T_MAX
    volterra_tol: float = oracles.VOLTERRA_TOL
    asymptotic_shells: int = 0

    def __post_init__(self):
        if not 0 < self.series_margin <= 1:
            raise ConfigError(f"series_margin must lie in (0, 1] (got {self.series_margin})")
        for name in ("root_residual_gate", "ml_max_arg", "series_tol", "laplace_tol", "volterra_step",
                     "volterra_t_max", "volterra_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0 (got {getattr(self, name)})")
        if self.laplace_nodes < 4:
            raise ConfigError(f"laplace_nodes must be >= 4 (got {self.laplace_nodes})")


def evolve(rho0: DensityMatrix, t: float, g: GSample, omega0: float) -> DensityMatrix:
    """ rho11(t) = rho11(0) |G|^2, rho10(t) = rho10(0) exp(-i omega0 t) G. """
    amp = g.value
    if abs(amp) > 1 + max(STATE_SLACK, g.error_bound):
        raise NumericalError(f"|G({t:.6g})| = {abs(amp):.9g} exceeds 1 ({g.method.value})")
    return DensityMatrix(rho0.rho11 * abs(amp) ** 2, rho0.rho10 * cmath.exp(-1j * omega0 * t) * amp)


class Evaluator:
    """ G(t) for one reservoir, either by a fixed method or routed per time.

    Automatic routing uses the series inside series_margin * converged_domain,
    then the rational path when alpha = p/q and its roots pass the residual
    gate, and the Laplace oracle everywhere else. part="continuum" removes the
    bound-state exponential from every method's result.
    """

    def __init__(self, cfg: ReservoirConfig, routing: Optional[RoutingConfig] = None, method: str = "auto",
                 part: str = "total", z0_form: str = "transform"):
        if part not in oracles.PARTS:
            raise ConfigError(f"part must be one of {oracles.PARTS} (got {part!r})")
        self.cfg = cfg
        self.params = derive_params(cfg, z0_form)
        self.routing = routing or RoutingConfig()
        self.method = method if method == "auto" else Method.parse(method)
        self.part = part
        self._lock = threading.Lock()
        self._window: Optional[float] = None
        self._rational = None
        self._rational_checked = False
        self._bound: Optional[BoundState] = None

    @property
    def bound(self) -> BoundState:
        with self._lock:
            if self._bound is None:
                self._bound = bound_state(self.params)
            return self._bound

    def series_window(self) -> float:
        with self._lock:
            if self._window is None:
                self._window = self.routing.series_margin * series.converged_domain(
                    self.params, self.routing.series_tol, self.routing.ml_max_arg)
            return self._window

    def rational_path(self):
        """ (order, roots, residue table) when the rational path is usable, else None. """
        with self._lock:
            if not self._rational_checked:
                self._rational_checked = True
                order = rational.rational_order(self.params.alpha)
                if order is not None:
                    try:
                        rs = rational.find_roots(rational.build_q_polynomial(order, self.params))
                        table = rational.residue_coefficients(rs, order, self.params)
                    except NumericalError as e:
                        log.warning("rational path disabled: %s", e)
                    else:
                        if rs.max_residual <= self.routing.root_residual_gate and not any(table.ill_conditioned):
                            self._rational = (order, rs, table)
                        else:
                            log.info("rational path disabled: root residual %.3g", rs.max_residual)
            return self._rational

    def choose(self, t: float) -> Method:
        if self.method != "auto":
            return self.method
        if t <= self.series_window():
            return Method.SERIES
        if self.rational_path() is not None:
            return Method.RATIONAL
        return Method.LAPLACE

    def _raw(self, t: float, method: Method) -> GSample:
        r = self.routing
        if method == Method.SERIES:
            return series.g_series(t, self.params, r.series_tol, ml_max_arg=r.ml_max_arg)
        if method == Method.STAR_SERIES:
            return series.g_star_series(t, self.params, r.series_tol)
        if method == Method.RATIONAL:
            path = self.rational_path()
            if path is None:
                raise ConfigError(f"alpha = {self.params.alpha} has no usable rational path")
            order, rs, table = path
            return rational.g_rational(t, order, rs, table)
        if method == Method.ASYMPTOTIC:
            if self.part == "continuum":
                return asymptotics.g_asymptotic(t, self.params, r.asymptotic_shells)
            return asymptotics.long_time_form(t, self.params, r.asymptotic_shells)
        if method == Method.LAPLACE:
            return oracles.laplace_invert(self.params, t, self.part, r.laplace_nodes, r.laplace_tol)
        if method == Method.VOLTERRA:
            return self.evaluate_grid(TimeGrid(np.array([0.0, t]) if t > 0 else np.array([0.0])))[-1]
        raise ConfigError(f"unknown method {method!r}")

    def _continuum(self, sample: GSample) -> GSample:
        if self.part != "continuum" or sample.method in (Method.LAPLACE, Method.ASYMPTOTIC):
            return sample
        return sample.shifted(-complex(self.bound.amplitude(sample.t)))

    def evaluate(self, t: float) -> GSample:
        t = float(t)
        method = self.choose(t)
        try:
            sample = self._raw(t, method)
            if method == Method.SERIES or method == Method.STAR_SERIES or method == Method.RATIONAL:
                sample = self._continuum(sample)
            return sample
        except NumericalError as e:
            if self.method == "auto" and method == Method.SERIES:
                log.info("series failed at t=%.6g inside its window (%s); using the Laplace oracle", t, e)
                return oracles.laplace_invert(self.params, t, self.part, self.routing.laplace_nodes,
                                              self.routing.laplace_tol)
            raise

    def evaluate_grid(self, grid: TimeGrid) -> List[GSample]:
        """ Volterra marches once over the whole grid; the other methods go point by point. """
        if self.method == Method.VOLTERRA:
            r = self.routing
            samples = oracles.volterra_solve(self.cfg, grid, tol=r.volterra_tol, step=r.volterra_step,
                                             t_max=r.volterra_t_max)
            return [self._continuum(s) for s in samples]
        return [self.evaluate(t) for t in grid]


def trajectory(rho0: DensityMatrix, grid: TimeGrid, evaluator: Evaluator,
               progress: bool = False) -> List[TrajectoryPoint]:
    """ Evolve rho0 over the grid; failures carry the method and the time. """
    omega0 = evaluator.cfg.omega0
    if evaluator.method == Method.VOLTERRA:
        try:
            samples = evaluator.evaluate_grid(grid)
        except NumericalError as e:
            raise EvaluationError(str(e), Method.VOLTERRA.value, float(grid.points[-1])) from e
        return [TrajectoryPoint(s.t, evolve(rho0, s.t, s, omega0), s) for s in samples]
    out = []
    for t in tqdm(grid, total=len(grid), unit="pt", disable=not progress, leave=False):
        method = evaluator.choose(t)
        try:
            sample = evaluator.evaluate(t)
            state = evolve(rho0, t, sample, omega0)
        except NumericalError as e:
            raise EvaluationError(str(e), method.value, t) from e
        out.append(TrajectoryPoint(t, state, sample))
    return out


def population_tail(points: Sequence[TrajectoryPoint], window: Optional[Tuple[float, float]] = None,
                    max_residual: float = 0.05) -> TailFit:
    """ Power-law fit of rho11 over the window (all points when None). """
    lo, hi = window if window is not None else (-math.inf, math.inf)
    data = [(p.t, p.state.rho11) for p in points if lo <= p.t <= hi and p.t > 0]
    return fit_tail_exponent(data, max_residual)


def write_trajectory_csv(path: str, points: Sequence[TrajectoryPoint]):
    rows = ((p.t, p.state.rho11, p.state.rho10.real, p.state.rho10.imag, abs(p.state.rho10),
             p.sample.method.value, p.sample.error_bound) for p in points)
    write_csv(path, TRAJECTORY_HEADER, rows)
