# SPDX-License-Identifier: GPL-3.0+

import numpy as np
import pytest

from pbgdecay.errors import ConfigError, SeriesDivergenceError
from pbgdecay.oracles import laplace_invert
from pbgdecay.reservoir import ReservoirConfig, derive_params, total_weight
from pbgdecay.sample import Method
from pbgdecay.series import converged_domain, g_series, g_star_series


def test_value_at_zero(half_params):
    sample = g_series(0.0, half_params)
    assert sample.value == 1 and sample.error_bound == 0.0
    assert sample.method == Method.SERIES


def test_negative_time(half_params):
    with pytest.raises(ConfigError):
        g_series(-0.1, half_params)


def test_short_time_quadratic_decay(half_cfg, half_params):
    t = 1e-3
    g = g_series(t, half_params).value
    assert abs(g - (1 - total_weight(half_cfg) * t * t / 2)) < 1e-8


@pytest.mark.parametrize("t", [0.05, 0.3, 1.0])
def test_matches_laplace(half_params, t):
    series = g_series(t, half_params)
    assert series.error_bound <= 1e-10
    assert abs(series.value - laplace_invert(half_params, t).value) <= 1e-7


def test_large_argument_is_refused(half_params):
    with pytest.raises(SeriesDivergenceError, match="exceeds"):
        g_series(20.0, half_params)


def test_star_series_equals_series_at_a_star(half_cfg):
    params = derive_params(ReservoirConfig(half_cfg.A_star, 1.0, 0.5))
    for t in (0.2, 1.0, 2.0):
        star = g_star_series(t, params)
        assert star.method == Method.STAR_SERIES
        assert abs(star.value - g_series(t, params).value) <= 1e-9


def test_star_series_needs_z1_zero(half_params):
    with pytest.raises(ConfigError, match="z1"):
        g_star_series(1.0, half_params)


def test_converged_domain(half_params):
    window = converged_domain(half_params)
    assert window > 0.1
    t = 0.5 * window
    assert abs(g_series(t, half_params).value - laplace_invert(half_params, t).value) <= 1e-7


@pytest.mark.slow
def test_series_agrees_with_oracle_inside_window(reference_cfg):
    params = derive_params(reference_cfg)
    window = 0.9 * converged_domain(params)
    assert window > 0
    for t in np.geomspace(1e-3 / params.a, window, 20):
        assert abs(g_series(t, params).value - laplace_invert(params, t).value) <= 1e-6


@pytest.mark.slow
def test_converged_domain_grows_with_tolerance(half_params):
    windows = [converged_domain(half_params, tol=tol) for tol in (1e-10, 1e-8, 1e-6)]
    assert windows == sorted(windows)
