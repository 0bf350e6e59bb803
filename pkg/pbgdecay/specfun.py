# SPDX-License-Identifier: GPL-3.0+

""" Reciprocal Gamma and the three-parameter Mittag-Leffler function E^gamma_{alpha,beta}. """

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConfigError, ConvergenceError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MLParams:
    """ Real positive orders of E^gamma_{alpha,beta}. """
    alpha: float
    beta: float
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigError(f"Mittag-Leffler order {name} must be a positive real (got {value!r})")


@dataclass(frozen=True)
class MLValue:
    value: complex
    error: float
    terms: int


def reciprocal_gamma(z: complex) -> complex:
    """ 1/Gamma(z); entire, exactly zero at 0, -1, -2, ... """
    return complex(special.rgamma(complex(z)))


def pochhammer(g: float, n: int) -> float:
    """ Rising factorial (g)_n. Integer steps are multiplied out so small cases stay exact. """
    if n < 0:
        raise ValueError("pochhammer index must be >= 0")
    if n <= 170:
        out = 1.0
        for i in range(n):
            out *= g + i
        return out
    return float(special.poch(g, n))


def ml_term(p: MLParams, z: complex, n: int) -> complex:
    """ n-th series term (gamma)_n z^n / (n! Gamma(alpha n + beta)), from log-Gamma. """
    z = complex(z)
    if n == 0:
        return reciprocal_gamma(p.beta)
    if z == 0:
        return 0j
    logmag = (special.gammaln(p.gamma + n) - special.gammaln(p.gamma)
              - special.gammaln(n + 1) - special.gammaln(p.alpha * n + p.beta))
    return z ** n * math.exp(logmag)


def ml_term_ratio(p: MLParams, z: complex, n: int) -> complex:
    """ Ratio of the n-th term to the (n-1)-th. """
    shift = special.gammaln(p.alpha * (n - 1) + p.beta) - special.gammaln(p.alpha * n + p.beta)
    return complex(z) * (p.gamma + n - 1) / n * math.exp(shift)


def _ratio_bound(p: MLParams, zabs: float, n: int) -> float:
    # bounds |t_{m+1}/t_m| for every m >= n: Gamma(x)/Gamma(x + alpha) decreases in x
    growth = max(1.0, (p.gamma + n) / (n + 1))
    shift = special.gammaln(p.alpha * n + p.beta) - special.gammaln(p.alpha * (n + 1) + p.beta)
    return zabs * growth * math.exp(shift)


def mittag_leffler(p: MLParams, z: complex, tol: float = 1e-15, max_terms: int = 4000,
                   scaled: bool = False) -> MLValue:
    """ Evaluate E^gamma_{alpha,beta}(z) by its power series with a rigorous tail bound.

    With scaled=True the result is Gamma(beta) * E, i.e. the series normalised so
    the leading term is 1; this keeps large-beta uses away from underflow.
    The returned error is the geometric tail bound plus a rounding estimate.
    """
    z = complex(z)
    zabs = abs(z)
    lead = 1.0 + 0j if scaled else reciprocal_gamma(p.beta)
    if zabs == 0.0 or lead == 0:
        return MLValue(lead, 0.0, 1)
    term = lead
    re, im = [term.real], [term.imag]
    weighted = abs(term)
    for n in range(1, max_terms + 1):
        term = term * ml_term_ratio(p, z, n)
        re.append(term.real)
        im.append(term.imag)
        weighted += (n + 1) * abs(term)
        r = _ratio_bound(p, zabs, n)
        if r < 1.0:
            tail = abs(term) * r / (1.0 - r)
            if tail <= tol / 2:
                value = complex(math.fsum(re), math.fsum(im))
                return MLValue(value, tail + 4 * EPS * weighted, n + 1)
    raise ConvergenceError(
        f"E^{p.gamma}_{{{p.alpha},{p.beta}}}({z}) did not meet tail bound {tol:.3g} within {max_terms} terms")


def mittag_leffler_scaled_batch(alpha: float, gamma: float, betas, z: complex, tol: float = 1e-15,
                                max_terms: int = 4096):
    """ Gamma(beta) * E^gamma_{alpha,beta}(z) for an array of beta at one argument z.

    Returns (values, errors) arrays; the truncation point is shared and doubled
    until every column meets the tail bound.
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    z = complex(z)
    if z == 0:
        return np.ones(betas.shape, dtype=complex), np.zeros(betas.shape)
    zabs = abs(z)
    count = 32
    while True:
        m = np.arange(count, dtype=float)[:, None]
        logmag = (special.gammaln(gamma + m) - special.gammaln(gamma) - special.gammaln(m + 1)
                  + m * math.log(zabs) + special.gammaln(betas) - special.gammaln(alpha * m + betas))
        if z.imag == 0.0:
            signs = np.where((m % 2 == 1) & (z.real < 0), -1.0, 1.0)
        else:
            signs = np.exp(1j * cmath.phase(z) * m)
        terms = np.exp(logmag) * signs
        last = count - 1
        growth = max(1.0, (gamma + last) / (last + 1))
        r = zabs * growth * np.exp(special.gammaln(alpha * last + betas)
                                   - special.gammaln(alpha * (last + 1) + betas))
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(r < 1.0, np.abs(terms[-1]) * r / (1.0 - r), np.inf)
        if np.all(tail <= tol / 2):
            break
        if count >= max_terms:
            raise ConvergenceError(
                f"batched E^{gamma}_{{{alpha},beta}}({z}) did not meet tail bound {tol:.3g} within {max_terms} terms")
        count = min(2 * count, max_terms)
    values = terms.sum(axis=0).astype(complex)
    weighted = ((m + 1) * np.abs(terms)).sum(axis=0)
    return values, tail + 4 * EPS * weighted
