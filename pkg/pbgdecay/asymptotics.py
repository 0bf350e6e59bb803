# SPDX-License-Identifier: GPL-3.0+

""" Long-time inverse power laws of G.

Expanding the transform in powers of (u^3 + z1 u + z_alpha u^alpha)/z0 and
inverting term by term gives, for each (n, k, j) with
beta = alpha (n - k) + k + 2j,

    (-1)^n n!/(j! (k-j)! (n-k)!) z0^(-n-1) z_alpha^(n-k) z1^(k-j)
        * [t^(-beta-3)/Gamma(-beta-2) - a^2 t^(-beta-1)/Gamma(-beta)]

Integer beta contributes nothing. The first surviving power is t^(-1-alpha)
with coefficient -D_alpha. These laws describe the continuum part of G; the
bound state adds a non-decaying exponential on top (see long_time_form).
"""

from __future__ import annotations

import functools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Tuple

from .errors import ConfigError
from .reservoir import ReservoirConfig, ReservoirParams, bound_state, timescale
from .sample import GSample, Method
from .specfun import reciprocal_gamma

log = logging.getLogger(__name__)

# powers closer than this are one shell
POWER_KEY_DIGITS = 9
MAX_ORDER = 80


@dataclass(frozen=True)
class AsymptoticExpansion:
    leading_coeff: complex
    leading_power: float
    correction_terms: Tuple[Tuple[complex, float], ...]

    def evaluate(self, t: float, n_shells: int) -> Tuple[complex, float]:
        """ Sum of the leading law and n_shells corrections, and the size of the next shell. """
        if n_shells > len(self.correction_terms):
            raise ValueError(f"only {len(self.correction_terms)} correction shells were expanded")
        value = self.leading_coeff * t ** self.leading_power
        for coeff, power in self.correction_terms[:n_shells]:
            value += coeff * t ** power
        if n_shells < len(self.correction_terms):
            coeff, power = self.correction_terms[n_shells]
            nxt = abs(coeff) * t ** power
        else:
            nxt = 0.0
        return value, nxt


def d_alpha(params: ReservoirParams) -> complex:
    """ D_alpha = alpha a^2 z_alpha / (z0^2 Gamma(1 - alpha)). """
    alpha = params.alpha
    return alpha * params.a ** 2 * params.z_alpha / (params.z0 ** 2 * math.gamma(1 - alpha))


def inverse_power_series(params: ReservoirParams, n_max: int) -> Dict[float, complex]:
    """ Coefficients of t^power from every (n, k, j) with n <= n_max, keyed by power. """
    alpha, a2 = params.alpha, params.a ** 2
    z0, za, z1 = params.z0, params.z_alpha, params.z1
    shells: Dict[float, complex] = defaultdict(complex)
    for n in range(1, n_max + 1):
        sign = -1.0 if n % 2 else 1.0
        for k in range(n + 1):
            for j in range(k + 1):
                if z1 == 0 and k != j:
                    continue
                beta = alpha * (n - k) + k + 2 * j
                mult = math.comb(n, k) * math.comb(k, j)
                base = sign * mult * z0 ** (-n - 1) * za ** (n - k) * z1 ** (k - j)
                first = -a2 * base * reciprocal_gamma(-beta)
                second = base * reciprocal_gamma(-beta - 2)
                if first != 0:
                    shells[round(-beta - 1, POWER_KEY_DIGITS)] += first
                if second != 0:
                    shells[round(-beta - 3, POWER_KEY_DIGITS)] += second
    return shells


@functools.lru_cache(maxsize=256)
def expansion(params: ReservoirParams, n_shells: int = 4) -> AsymptoticExpansion:
    """ Leading law plus the first n_shells correction shells, ordered by decreasing power. """
    alpha = params.alpha
    leading_power = -1.0 - alpha
    n_max = 2
    while True:
        shells = inverse_power_series(params, n_max)
        powers = sorted((p for p, c in shells.items() if c != 0 and p < leading_power - 1e-9), reverse=True)
        # every (n, k, j) beyond n_max has power below -(1 + alpha n_max)
        if len(powers) >= n_shells and (n_shells == 0 or powers[n_shells - 1] > -1 - alpha * n_max) \
                or n_max >= MAX_ORDER:
            break
        n_max += 2
    corrections = tuple((shells[p], p) for p in powers[:n_shells])
    if len(corrections) < n_shells:
        log.warning("expansion stopped at order %d with %d of %d correction shells", n_max, len(corrections), n_shells)
    return AsymptoticExpansion(-d_alpha(params), leading_power, corrections)


def g_asymptotic(t: float, params: ReservoirParams, n_shells: int = 0) -> GSample:
    """ Continuum part of G from the inverse power law and n_shells corrections.

    The error estimate is the size of the first omitted shell; it carries no
    guarantee and says nothing useful for t below tau.
    """
    t = float(t)
    if t <= 0:
        raise ConfigError(f"asymptotic form needs t > 0 (got {t})")
    exp = expansion(params, n_shells + 1)
    value, nxt = exp.evaluate(t, min(n_shells, len(exp.correction_terms)))
    return GSample(t, complex(value), float(nxt), Method.ASYMPTOTIC)


def long_time_form(t: float, params: ReservoirParams, n_shells: int = 0) -> GSample:
    """ Full G at long times: bound-state exponential plus the inverse power law. """
    sample = g_asymptotic(t, params, n_shells)
    return sample.shifted(complex(bound_state(params).amplitude(t)))


def timescale_tau(params: ReservoirParams) -> float:
    return timescale(params.z0, params.z_alpha, params.z1, params.alpha)


def tail_exponent_prediction(cfg: ReservoirConfig) -> Tuple[float, float]:
    """ (population power, coherence power) = (-2 - 2 alpha, -1 - alpha). """
    return -2.0 - 2.0 * cfg.alpha, -1.0 - cfg.alpha


def expansion_to_dict(exp: AsymptoticExpansion) -> Dict[str, object]:
    return {
        "leading_coeff": exp.leading_coeff,
        "leading_power": exp.leading_power,
        "corrections": [[c, p] for c, p in exp.correction_terms],
    }
