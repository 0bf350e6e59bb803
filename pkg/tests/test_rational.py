# SPDX-License-Identifier: GPL-3.0+

import math

import numpy as np
import pytest

from pbgdecay.errors import ConfigError, InapplicableError, RootFindingError
from pbgdecay.oracles import laplace_invert
from pbgdecay.rational import (RationalOrder, RootSet, build_q_polynomial, find_roots, g_rational,
                               modulation_density, partial_fractions, rational_order, residue_coefficients,
                               rootset_to_dict)
from pbgdecay.reservoir import ReservoirConfig, derive_params


@pytest.fixture
def half_path(half_params):
    order = rational_order(half_params.alpha)
    rs = find_roots(build_q_polynomial(order, half_params))
    return order, rs, residue_coefficients(rs, order, half_params)


@pytest.mark.parametrize("alpha, pq", [(0.5, (1, 2)), (0.25, (1, 4)), (2 / 3, (2, 3)), (0.75, (3, 4)),
                                       (1 / 3, (1, 3))])
def test_rational_order(alpha, pq):
    order = rational_order(alpha)
    assert (order.p, order.q) == pq
    assert order.alpha == pytest.approx(alpha)


@pytest.mark.parametrize("alpha", [math.sqrt(0.5), 0.0, 1.0, 1 / 13])
def test_irrational_or_out_of_range(alpha):
    assert rational_order(alpha) is None


@pytest.mark.parametrize("p, q", [(2, 4), (3, 2), (0, 1)])
def test_order_validation(p, q):
    with pytest.raises(ConfigError):
        RationalOrder(p, q)


def test_q_polynomial_layout(half_params):
    coeffs = build_q_polynomial(RationalOrder(1, 2), half_params)
    assert len(coeffs) == 7
    assert coeffs[0] == 1
    assert coeffs[4] == half_params.z1
    assert coeffs[5] == half_params.z_alpha
    assert coeffs[6] == half_params.z0
    with pytest.raises(ConfigError):
        build_q_polynomial(RationalOrder(1, 3), half_params)


def test_half_order_root_set(half_path):
    _, rs, _ = half_path
    assert sum(rs.multiplicities) == rs.degree == 6
    assert rs.max_residual <= 1e-10
    assert len(rs.expanded()) == 6
    out = rootset_to_dict(rs)
    assert out["degree"] == 6 and len(out["roots"]) == len(rs.roots)


def test_removable_root_present(half_path, half_params):
    # u = a is a common zero of numerator and denominator: z = sqrt(a) is a root of Q
    _, rs, table = half_path
    i = int(np.argmin([abs(z - 1.0) for z in rs.roots]))
    assert abs(rs.roots[i] - 1.0) < 1e-10
    assert abs(table.coefficients[i][0]) < 1e-9


def test_partial_fraction_reconstruction(half_path, half_params):
    _, _, table = half_path
    coeffs = build_q_polynomial(RationalOrder(1, 2), half_params)
    rng = np.random.default_rng(7)
    probes = 3.0 * np.exp(2j * math.pi * rng.random(20)) * (0.5 + rng.random(20))
    for z in probes:
        want = (z ** 4 - 1.0) / np.polyval(coeffs, z)
        assert abs(table.evaluate(z) - want) <= 1e-8 * max(1.0, abs(want))


def test_double_root_is_clustered():
    rs = find_roots(np.poly([1.0, 1.0, -2.0]).astype(complex))
    assert sorted(rs.multiplicities) == [1, 2]
    double = rs.roots[rs.multiplicities.index(2)]
    assert abs(double - 1.0) < 1e-7


def test_partial_fractions_with_double_root():
    rs = find_roots(np.poly([1.0, 1.0, -2.0]).astype(complex))
    table = partial_fractions([1.0, 0.0], rs)
    l = rs.multiplicities.index(2)
    # z / ((z - 1)^2 (z + 2)) = (2/9)/(z - 1) + (1/3)/(z - 1)^2 - (2/9)/(z + 2)
    assert table.coefficients[l][0] == pytest.approx(2 / 9, abs=1e-6)
    assert table.coefficients[l][1] == pytest.approx(1 / 3, abs=1e-6)
    assert table.b(l, 1) == pytest.approx(1 / 3, abs=1e-6)
    assert table.b(l, 2) == pytest.approx(2 / 9, abs=1e-6)
    with pytest.raises(IndexError):
        table.b(l, 3)


def test_root_set_multiplicity_mismatch():
    with pytest.raises(RootFindingError):
        RootSet((1 + 0j,), (1,), (0.0,), 2)


def test_non_monic_rejected():
    with pytest.raises(RootFindingError):
        find_roots([2.0, 1.0])


def test_rational_at_zero(half_path):
    order, rs, table = half_path
    sample = g_rational(0.0, order, rs, table)
    assert sample.value == 1 and sample.error_bound == 0.0


@pytest.mark.parametrize("t", [0.5, 2.0, 10.0, 50.0])
def test_rational_matches_laplace(half_path, half_params, t):
    order, rs, table = half_path
    got = g_rational(t, order, rs, table)
    assert abs(got.value - laplace_invert(half_params, t).value) <= 1e-6


def test_rational_third_order():
    params = derive_params(ReservoirConfig(1.0, 1.0, 1 / 3))
    order = rational_order(1 / 3)
    rs = find_roots(build_q_polynomial(order, params))
    table = residue_coefficients(rs, order, params)
    for t in (1.0, 5.0):
        assert abs(g_rational(t, order, rs, table).value - laplace_invert(params, t).value) <= 1e-6


def test_double_form_inapplicable_with_bound_state(half_path):
    order, rs, table = half_path
    with pytest.raises(InapplicableError):
        g_rational(1.0, order, rs, table, form="double")


def test_unknown_form(half_path):
    order, rs, table = half_path
    with pytest.raises(ConfigError):
        g_rational(1.0, order, rs, table, form="triple")


@pytest.mark.slow
def test_double_form_matches_cut_for_decaying_roots():
    roots = (-3.0 + 0j, -2.0 + 0j, -1.5 - 0.5j, -1.5 + 0.5j, -1.0 - 1.0j, -1.0 + 1.0j)
    rs = RootSet(roots, (1,) * 6, (0.0,) * 6, 6)
    table = partial_fractions([1.0, 0.0, 0.0, 0.0, -1.0], rs)
    order = RationalOrder(1, 2)
    for t in (0.5, 2.0):
        cut = g_rational(t, order, rs, table, tol=1e-8)
        double = g_rational(t, order, rs, table, form="double", tol=1e-7)
        assert abs(cut.value - double.value) <= 1e-6


def test_modulation_density_vanishes_on_axes():
    roots = (-1.0 - 1.0j, -1.0 + 1.0j)
    table = partial_fractions([1.0], RootSet(roots, (1, 1), (0.0, 0.0), 2))
    order = RationalOrder(1, 2)
    assert modulation_density(0.0, 2.0, order, table) == 0
    assert modulation_density(1.5, 0.0, order, table) == 0
    assert modulation_density(1.5, 2.0, order, table) != 0


def test_triple_roots_keep_their_multiplicity():
    # (z - 1)^3 (z + 2)^3
    rs = find_roots(np.poly([1.0, 1.0, 1.0, -2.0, -2.0, -2.0]))
    assert rs.multiplicities == (3, 3)
    assert abs(rs.roots[0] + 2.0) < 1e-8
    assert abs(rs.roots[1] - 1.0) < 1e-8
    assert rs.max_residual <= 1e-10
    denominator = np.poly(rs.expanded())
    table = partial_fractions([1.0, 0.0, 1.0], rs, np.poly([1.0, 1.0, 1.0, -2.0, -2.0, -2.0]))
    assert not any(table.ill_conditioned)
    for z in (0.3 + 0.7j, -1.0 + 1.0j):
        want = (z * z + 1) / np.polyval(denominator, z)
        assert abs(table.evaluate(z) - want) <= 1e-8 * abs(want)


def test_wrong_roots_are_flagged():
    rs = RootSet((-2.0 + 0j, 1.0 + 0j), (1, 1), (0.0, 0.0), 2)
    table = partial_fractions([1.0], rs, np.poly([-2.0, 1.5]))
    assert all(table.ill_conditioned)
    assert not any(partial_fractions([1.0], rs).ill_conditioned)


@pytest.mark.parametrize("alpha", [0.5, 1 / 3, 2 / 3, 0.75])
def test_vieta_relations(alpha):
    params = derive_params(ReservoirConfig(1.0, 1.0, alpha))
    order = rational_order(alpha)
    rs = find_roots(build_q_polynomial(order, params))
    assert sum(rs.multiplicities) == rs.degree == 3 * order.q
    expanded = rs.expanded()
    assert abs(expanded.sum()) <= 1e-10
    assert np.prod(-expanded) == pytest.approx(params.z0, rel=1e-9)


@pytest.mark.parametrize("alpha", [2 / 3, 0.75])
def test_rational_matches_laplace_higher_q(alpha):
    params = derive_params(ReservoirConfig(1.0, 1.0, alpha))
    order = rational_order(alpha)
    rs = find_roots(build_q_polynomial(order, params))
    table = residue_coefficients(rs, order, params)
    assert not any(table.ill_conditioned)
    for t in (1.0, 5.0, 20.0):
        assert abs(g_rational(t, order, rs, table).value - laplace_invert(params, t).value) <= 1e-6
