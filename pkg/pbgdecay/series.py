# SPDX-License-Identifier: GPL-3.0+

""" Exact double series for G(t) in generalized Mittag-Leffler functions.

In units a = 1, with s = a t and beta = 3n - alpha k + 1,

    G(s) = sum_n sum_k (-1)^n C(n, k) z_alpha^k z0^(n-k) s^(beta-1)
           * [E^(n+1)_{2,beta}(-z1 s^2) - s^2 E^(n+1)_{2,beta+2}(-z1 s^2)]

Shells of fixed n are summed in increasing n; each Mittag-Leffler value is
carried in the Gamma(beta)-scaled form so that large n stays representable.
"""

from __future__ import annotations

import cmath
import logging
import math

import numpy as np
from scipy import special

from .errors import ConfigError, NumericalError, SeriesDivergenceError
from .oracles import laplace_invert
from .reservoir import ReservoirParams
from .sample import GSample, Method
from .specfun import EPS, mittag_leffler_scaled_batch

log = logging.getLogger(__name__)

SERIES_TOL = 1e-10
MAX_SHELLS = 200
# |z1| (a t)^2 above which the Mittag-Leffler arguments are handed to the oracles
ML_MAX_ARG = 50.0
QUIET_SHELLS = 3
STAR_Z1_TOL = 1e-12

PROBE_POINTS = 40
PROBE_RANGE = (1e-3, 50.0)


def _log_coeffs(n: int, dl) -> np.ndarray:
    """ log of C(n, k) z_alpha^k z0^(n-k) for k = 0..n, as complex logs. """
    k = np.arange(n + 1)
    log_binom = special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)
    return log_binom + k * cmath.log(dl.z_alpha) + (n - k) * cmath.log(dl.z0)


def _shell(n: int, s: float, dl, star: bool):
    """ Terms of shell n at scaled time s > 0; returns (terms, ml_error_bound). """
    alpha = dl.alpha
    k = np.arange(n + 1)
    beta = 3 * n - alpha * k + 1
    logs = _log_coeffs(n, dl) + (beta - 1) * math.log(s) - special.gammaln(beta)
    sign = -1.0 if n % 2 else 1.0
    lead = sign * np.exp(logs)
    # s^(beta+1)/Gamma(beta+2) relative to s^(beta-1)/Gamma(beta)
    corr = s * s / (beta * (beta + 1))
    if star:
        return lead * (1 - corr), np.zeros(n + 1)
    w = -dl.z1 * s * s
    e1, err1 = mittag_leffler_scaled_batch(2.0, n + 1.0, beta, w)
    e3, err3 = mittag_leffler_scaled_batch(2.0, n + 1.0, beta + 2, w)
    terms = lead * (e1 - corr * e3)
    return terms, np.abs(lead) * (err1 + corr * err3)


def _sum_shells(t: float, params: ReservoirParams, tol: float, star: bool, method: Method,
                max_shells: int) -> GSample:
    t = float(t)
    if t < 0:
        raise ConfigError(f"t must be >= 0 (got {t})")
    if t == 0.0:
        return GSample(0.0, 1.0 + 0j, 0.0, method)
    dl = params.dimensionless()
    s = params.a * t
    re, im = [], []
    error = 0.0
    biggest = 0.0
    quiet = 0
    for n in range(max_shells + 1):
        terms, ml_err = _shell(n, s, dl, star)
        size = float(np.abs(terms).sum())
        re.extend(terms.real)
        im.extend(terms.imag)
        error += float(ml_err.sum())
        biggest = max(biggest, float(np.abs(terms).max()))
        if not math.isfinite(size) or not math.isfinite(biggest):
            raise SeriesDivergenceError(f"series overflowed at shell {n} (t = {t:.6g})")
        quiet = quiet + 1 if size < tol / 10 else 0
        if quiet >= QUIET_SHELLS:
            break
    else:
        raise SeriesDivergenceError(f"series did not settle within {max_shells} shells (t = {t:.6g})")
    value = complex(math.fsum(re), math.fsum(im))
    rounding = 16 * EPS * biggest * (n + 1)
    # shells beyond the quiet run shrink at least as fast as the last one
    truncation = 2 * size
    error += rounding + truncation
    if biggest > abs(value) / tol or rounding > tol:
        raise SeriesDivergenceError(
            f"cancellation: largest term {biggest:.3g} against sum {abs(value):.3g} (t = {t:.6g})")
    if error > tol:
        raise SeriesDivergenceError(f"series error {error:.3g} above tolerance {tol:.3g} (t = {t:.6g})")
    log.debug("series at t=%.6g: %d shells, max term %.3g, error %.3g", t, n + 1, biggest, error)
    return GSample(t, value, error, method)


def g_series(t: float, params: ReservoirParams, tol: float = SERIES_TOL, max_shells: int = MAX_SHELLS,
             ml_max_arg: float = ML_MAX_ARG) -> GSample:
    """ Evaluate G by the double Mittag-Leffler series.

    Raises SeriesDivergenceError when the time is outside the usable window:
    Mittag-Leffler argument above ml_max_arg, shells not settling, or cancellation.
    """
    dl = params.dimensionless()
    s = params.a * float(t)
    if abs(dl.z1) * s * s > ml_max_arg:
        raise SeriesDivergenceError(
            f"|z1| (a t)^2 = {abs(dl.z1) * s * s:.3g} exceeds {ml_max_arg:g} (t = {t:.6g})")
    return _sum_shells(t, params, tol, False, Method.SERIES, max_shells)


def g_star_series(t: float, params: ReservoirParams, tol: float = SERIES_TOL,
                  max_shells: int = MAX_SHELLS) -> GSample:
    """ Pure power series of G for A = A*, where z1 = 0 and every E^(n+1)_{2,beta}(0) = 1/Gamma(beta). """
    dl = params.dimensionless()
    if abs(dl.z1) > STAR_Z1_TOL:
        raise ConfigError(f"power series needs z1 = 0 (got z1/a^2 = {dl.z1:.3g}); use A = A_star")
    return _sum_shells(t, params, tol, True, Method.STAR_SERIES, max_shells)


def converged_domain(params: ReservoirParams, tol: float = SERIES_TOL, ml_max_arg: float = ML_MAX_ARG,
                     probes: int = PROBE_POINTS) -> float:
    """ Largest probe time up to which g_series meets tol and agrees with laplace_invert.

    Probes are log-spaced over [1e-3, 50]/a and scanned upwards; the first
    failing probe ends the window. Returns 0 when the first probe fails.
    """
    t_max = 0.0
    for t in np.geomspace(PROBE_RANGE[0], PROBE_RANGE[1], probes) / params.a:
        try:
            series = g_series(t, params, tol=tol, ml_max_arg=ml_max_arg)
            oracle = laplace_invert(params, t)
        except NumericalError as e:
            log.debug("converged_domain stops at t=%.4g: %s", t, e)
            break
        gap = abs(series.value - oracle.value)
        if gap > max(10 * tol, series.error_bound + oracle.error_bound):
            log.debug("converged_domain stops at t=%.4g: series and oracle differ by %.3g", t, gap)
            break
        t_max = float(t)
    log.info("series window for a=%g alpha=%g: t <= %.4g", params.a, params.alpha, t_max)
    return t_max
