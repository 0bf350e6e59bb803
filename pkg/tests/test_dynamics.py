# SPDX-License-Identifier: GPL-3.0+

import cmath
import csv

import numpy as np
import pytest

from pbgdecay.asymptotics import d_alpha
from pbgdecay.dynamics import (DensityMatrix, Evaluator, RoutingConfig, evolve, population_tail, trajectory,
                               write_trajectory_csv)
from pbgdecay.errors import ConfigError, EvaluationError, NumericalError
from pbgdecay.oracles import TimeGrid, laplace_invert
from pbgdecay.reservoir import ReservoirConfig
from pbgdecay.sample import GSample, Method


@pytest.mark.parametrize("rho11, rho10", [(1.2, 0), (-0.1, 0), (0.5, 0.6), (0.9, 0.5j)])
def test_invalid_states(rho11, rho10):
    with pytest.raises(ConfigError):
        DensityMatrix(rho11, rho10)


def test_structural_properties():
    rho = DensityMatrix(0.7, 0.3 + 0.2j)
    assert rho.trace == 1.0
    m = rho.as_matrix()
    assert np.allclose(m, m.conj().T)
    assert rho.rho01 == 0.3 - 0.2j
    assert rho.positivity_margin == pytest.approx(0.21 - 0.13)
    assert DensityMatrix.excited().rho00 == 0.0
    assert DensityMatrix.maximally_coherent().positivity_margin == pytest.approx(0.0)


def test_evolve():
    rho0 = DensityMatrix(0.8, 0.2 - 0.1j)
    t, omega0 = 2.0, 3.0
    g = GSample(t, 0.5j, 0.0, Method.LAPLACE)
    rho = evolve(rho0, t, g, omega0)
    assert rho.rho11 == pytest.approx(0.2)
    assert rho.rho10 == pytest.approx((0.2 - 0.1j) * cmath.exp(-1j * omega0 * t) * 0.5j)


def test_evolve_rejects_growth():
    with pytest.raises(NumericalError):
        evolve(DensityMatrix.excited(), 1.0, GSample(1.0, 1.5 + 0j, 1e-9, Method.SERIES), 1.0)


def test_coherence_magnitude_independent_of_omega0():
    rho0 = DensityMatrix.maximally_coherent()
    g = GSample(4.0, 0.3 - 0.4j, 0.0, Method.LAPLACE)
    a = evolve(rho0, 4.0, g, 1.0)
    b = evolve(rho0, 4.0, g, 7.5)
    assert abs(a.rho10) == pytest.approx(abs(b.rho10), rel=1e-15)
    assert a.rho11 == b.rho11


def test_routing_validation():
    with pytest.raises(ConfigError):
        RoutingConfig(series_margin=0.0)
    with pytest.raises(ConfigError):
        RoutingConfig(laplace_nodes=2)
    with pytest.raises(ConfigError):
        RoutingConfig(volterra_step=-1.0)


def test_evaluator_rejects_bad_inputs(half_cfg):
    with pytest.raises(ConfigError):
        Evaluator(half_cfg, part="bound")
    with pytest.raises(ConfigError):
        Evaluator(half_cfg, method="magic")


def test_auto_routing(half_cfg):
    ev = Evaluator(half_cfg)
    assert ev.choose(1e-3) == Method.SERIES
    assert ev.choose(500.0) == Method.RATIONAL
    irrational = Evaluator(ReservoirConfig(1.0, 1.0, 0.55))
    assert irrational.rational_path() is None
    assert irrational.choose(500.0) == Method.LAPLACE


def test_fixed_method_is_used(half_cfg):
    ev = Evaluator(half_cfg, method="laplace")
    assert ev.choose(1e-3) == Method.LAPLACE
    assert ev.evaluate(2.0).method == Method.LAPLACE


def test_zero_grid_returns_initial_state(half_cfg):
    rho0 = DensityMatrix(0.6, 0.2 + 0.3j)
    points = trajectory(rho0, TimeGrid(np.array([0.0])), Evaluator(half_cfg))
    assert len(points) == 1
    assert points[0].state == rho0


def test_trajectory_invariants(half_cfg):
    rho0 = DensityMatrix(0.7, 0.3 + 0.2j)
    points = trajectory(rho0, TimeGrid.log(0.01, 100.0, 25), Evaluator(half_cfg))
    assert {p.sample.method for p in points} <= {Method.SERIES, Method.RATIONAL, Method.LAPLACE}
    for p in points:
        assert p.state.trace == pytest.approx(1.0, abs=1e-15)
        assert p.state.positivity_margin >= -1e-12
        assert abs(p.sample.value) <= 1 + 1e-9


def test_routed_values_agree_with_oracle(half_cfg):
    ev = Evaluator(half_cfg)
    for t in (0.01, 0.5, 30.0):
        assert abs(ev.evaluate(t).value - laplace_invert(ev.params, t).value) <= 1e-6


def test_continuum_part_for_every_method(half_cfg):
    oracle = Evaluator(half_cfg, method="laplace", part="continuum")
    for method in ("series", "rational"):
        ev = Evaluator(half_cfg, method=method, part="continuum")
        assert abs(ev.evaluate(1.0).value - oracle.evaluate(1.0).value) <= 1e-6


def test_failure_carries_method_and_time(half_cfg):
    ev = Evaluator(half_cfg, method="series")
    with pytest.raises(EvaluationError) as info:
        trajectory(DensityMatrix.excited(), TimeGrid(np.array([0.1, 1000.0])), ev)
    assert info.value.method == "series"
    assert info.value.t == 1000.0
    assert "t=1000.0" in str(info.value)


@pytest.mark.slow
def test_ground_state_collapse_of_continuum(half_cfg):
    ev = Evaluator(half_cfg, method="laplace", part="continuum")
    tau = ev.params.tau
    points = trajectory(DensityMatrix.excited(), TimeGrid(np.array([10 * tau, 1000 * tau])), ev)
    assert points[1].state.rho11 < points[0].state.rho11 / 100


@pytest.mark.slow
def test_population_tail(half_cfg):
    ev = Evaluator(half_cfg, method="laplace", part="continuum")
    tau = ev.params.tau
    points = trajectory(DensityMatrix.excited(), TimeGrid.log(100 * tau, 1000 * tau, 30), ev)
    rho11 = [p.state.rho11 for p in points]
    assert all(b < a for a, b in zip(rho11, rho11[1:]))
    assert population_tail(points).exponent == pytest.approx(-3.0, abs=0.04)


def test_trapped_population(half_cfg):
    ev = Evaluator(half_cfg, method="laplace")
    t = 1000 * ev.params.tau
    state = evolve(DensityMatrix.excited(), t, ev.evaluate(t), half_cfg.omega0)
    assert state.rho11 == pytest.approx(ev.bound.residue ** 2, abs=1e-6)


@pytest.mark.slow
def test_volterra_grid(half_cfg):
    ev = Evaluator(half_cfg, method="volterra")
    grid = TimeGrid.uniform(0.0, 2.0, 5)
    for s in ev.evaluate_grid(grid):
        assert abs(s.value - laplace_invert(ev.params, s.t).value) <= 1e-5


def test_write_trajectory_csv(tmp_path, half_cfg):
    points = trajectory(DensityMatrix.maximally_coherent(), TimeGrid.uniform(0.0, 1.0, 3),
                        Evaluator(half_cfg, method="laplace"))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(str(path), points)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "rho11", "Re(rho10)", "Im(rho10)", "abs_rho10", "method", "err_bound"]
    assert len(rows) == 4
    assert all(row[5] == "laplace" for row in rows[1:])


def test_coherence_follows_power_law_at_ten_tau(half_cfg):
    ev = Evaluator(half_cfg, method="laplace", part="continuum")
    t = 10 * ev.params.tau
    state = evolve(DensityMatrix.maximally_coherent(), t, ev.evaluate(t), half_cfg.omega0)
    want = 0.5 * abs(d_alpha(ev.params)) * t ** -1.5
    assert abs(state.rho10) == pytest.approx(want, rel=0.1)
