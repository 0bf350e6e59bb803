# SPDX-License-Identifier: GPL-3.0+

""" Band-edge spectral densities J_alpha and every constant derived from them.

Frequencies are handled relative to the qubit transition, x = omega - omega0,
so the reservoir only sees omega0 through ReservoirConfig.
"""

from __future__ import annotations

import cmath
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Dict, Mapping, Union

import numpy as np
from scipy import integrate, optimize

from .errors import ConfigError, ConvergenceError, RootFindingError

log = logging.getLogger(__name__)

# Default absolute target of every reservoir quadrature.
QUAD_TOL = 1e-10

Z0_FORMS = ("transform", "printed")

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ReservoirConfig:
    """ Physical parameters of the reservoir and the qubit. """
    A: float
    a: float
    alpha: float
    omega0: float = 1.0

    def __post_init__(self):
        for name in ("A", "a", "alpha", "omega0"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite number (got {value!r})")
        if self.A <= 0:
            raise ConfigError(f"A must be > 0 (got {self.A})")
        if self.a <= 0:
            raise ConfigError(f"a must be > 0 (got {self.a})")
        # sec(pi alpha/2) and csc(pi alpha) diverge at both ends
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie strictly inside (0, 1) (got {self.alpha})")
        if self.omega0 <= 0:
            raise ConfigError(f"omega0 must be > 0 (got {self.omega0})")

    @property
    def A_star(self) -> float:
        """ Coupling amplitude at which z1 vanishes. """
        return self.a ** (3 - self.alpha) * math.cos(math.pi * self.alpha / 2) / math.pi


@dataclass(frozen=True)
class Dimensionless:
    """ Transform constants in units where a = 1 (time measured as a*t). """
    alpha: float
    z0: complex
    z_alpha: complex
    z1: float


@dataclass(frozen=True)
class ReservoirParams:
    """ Constants of the Laplace transform of G and the spectral peak. """
    a: float
    alpha: float
    z0: complex
    z_alpha: complex
    z1: float
    A_star: float
    tau: float
    Omega_alpha: float
    M_alpha: float
    z0_form: str = "transform"

    def dimensionless(self) -> Dimensionless:
        a = self.a
        return Dimensionless(
            alpha=self.alpha,
            z0=self.z0 / a ** 3,
            z_alpha=self.z_alpha / a ** (3 - self.alpha),
            z1=self.z1 / a ** 2,
        )

    def transform(self, u: complex) -> complex:
        """ Laplace transform (u^2 - a^2)/(u^3 + z1 u + z_alpha u^alpha + z0), principal u^alpha. """
        u = complex(u)
        a = self.a
        if self.z0_form == "transform" and abs(u - a) < 1e-9 * a:
            # numerator and denominator share the zero at u = a
            return 2 * a / self.transform_denominator_derivative(a)
        return (u * u - a * a) / self.transform_denominator(u)

    def transform_denominator(self, u: complex) -> complex:
        u = complex(u)
        return u ** 3 + self.z1 * u + self.z_alpha * u ** self.alpha + self.z0

    def transform_denominator_derivative(self, u: complex) -> complex:
        u = complex(u)
        return 3 * u * u + self.z1 + self.alpha * self.z_alpha * u ** (self.alpha - 1)


@dataclass(frozen=True)
class BoundState:
    """ Zero of the transform denominator on the positive imaginary u axis.

    It contributes residue * exp(1j * y * t) to G: a component that never decays.
    """
    y: float
    residue: float

    @property
    def u(self) -> complex:
        return 1j * self.y

    def amplitude(self, t: ArrayLike) -> ArrayLike:
        return self.residue * np.exp(1j * self.y * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class SummabilityReport:
    total_weight: float
    closed_form: float
    quad_error: float
    min_value: float
    grid_points: int

    @property
    def nonnegative(self) -> bool:
        return self.min_value >= 0.0


def config_from_mapping(values: Mapping[str, object]) -> ReservoirConfig:
    """ Build a ReservoirConfig from a plain mapping (keys A, a, alpha, omega0). """
    missing = [k for k in ("A", "a", "alpha") if k not in values]
    if missing:
        raise ConfigError(f"missing reservoir key(s): {', '.join(missing)}")
    parsed = {}
    for key in ("A", "a", "alpha", "omega0"):
        if key not in values:
            continue
        try:
            parsed[key] = float(values[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a number (got {values[key]!r})") from None
    return ReservoirConfig(**parsed)


def timescale(z0: complex, z_alpha: complex, z1: float, alpha: float) -> float:
    candidates = (
        1.0,
        abs(3 / z0) ** (1 / 3),
        abs(3 * z_alpha / z0) ** (1 / alpha),
        3 * abs(z1 / z0),
    )
    return max(candidates)


def derive_params(cfg: ReservoirConfig, z0_form: str = "transform") -> ReservoirParams:
    """ Derive the transform constants, the time scale tau and the spectral peak.

    z0_form="transform" uses z0 = i pi A a^alpha csc(pi alpha/2), the value the
    Laplace transform of the correlation function actually produces.
    z0_form="printed" uses the cos(pi alpha/2) variant for audits.
    """
    if z0_form not in Z0_FORMS:
        raise ConfigError(f"z0_form must be one of {Z0_FORMS} (got {z0_form!r})")
    A, a, alpha = cfg.A, cfg.a, cfg.alpha
    half = math.pi * alpha / 2
    z1 = math.pi * A * a ** (alpha - 1) / math.cos(half) - a * a
    if z0_form == "transform":
        z0 = 1j * math.pi * A * a ** alpha / math.sin(half)
    else:
        z0 = 1j * math.pi * A * a ** alpha * math.cos(half)
    z_alpha = -2j * math.pi * A * cmath.exp(-1j * half) / math.sin(math.pi * alpha)
    params = ReservoirParams(
        a=a,
        alpha=alpha,
        z0=z0,
        z_alpha=z_alpha,
        z1=z1,
        A_star=cfg.A_star,
        tau=timescale(z0, z_alpha, z1, alpha),
        Omega_alpha=cfg.omega0 + a * math.sqrt(alpha / (2 - alpha)),
        M_alpha=A * alpha ** (alpha / 2) * a ** (alpha - 2) * (2 - alpha) ** (1 - alpha / 2),
        z0_form=z0_form,
    )
    log.debug("derived params for %s: %s", cfg, params)
    return params


def _density_rel(x: ArrayLike, cfg: ReservoirConfig) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    xp = np.where(x > 0, x, 0.0)
    out = 2 * cfg.A * xp ** cfg.alpha / (cfg.a ** 2 + xp ** 2)
    return np.where(x > 0, out, 0.0)


def spectral_density(omega: ArrayLike, cfg: ReservoirConfig) -> ArrayLike:
    """ J_alpha(omega); exactly zero at and below the band edge omega0. """
    out = _density_rel(np.asarray(omega, dtype=float) - cfg.omega0, cfg)
    return float(out) if np.ndim(out) == 0 else out


def total_weight(cfg: ReservoirConfig) -> float:
    """ Closed form of the integral of J: pi A a^(alpha-1) sec(pi alpha/2) = z1 + a^2. """
    return math.pi * cfg.A * cfg.a ** (cfg.alpha - 1) / math.cos(math.pi * cfg.alpha / 2)


def _peak_rel(cfg: ReservoirConfig) -> float:
    return cfg.a * math.sqrt(cfg.alpha / (2 - cfg.alpha))


def checked_quad(func, lo, hi, tol, epsrel=0.0, limit=400, **kwargs):
    """ scipy quad with integration warnings promoted to ConvergenceError. """
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(func, lo, hi, epsabs=tol, epsrel=epsrel, limit=limit, **kwargs)[:2]
        except integrate.IntegrationWarning as e:
            raise ConvergenceError(f"quadrature on [{lo}, {hi}] did not converge: {e}") from None
    return value, err


def _fourier_part(cfg: ReservoirConfig, tau_arg: float, weight: str, tol: float):
    g = lambda x: float(_density_rel(x, cfg))
    xp = _peak_rel(cfg)
    if tau_arg == 0.0:
        if weight == "sin":
            return 0.0, 0.0
        v1, e1 = checked_quad(g, 0.0, xp, tol / 2)
        v2, e2 = checked_quad(g, xp, np.inf, tol / 2)
        return v1 + v2, e1 + e2
    v1, e1 = checked_quad(g, 0.0, xp, tol / 2, weight=weight, wvar=tau_arg)
    # QAWF tail: Fourier integral over [xp, inf)
    v2, e2 = checked_quad(g, xp, np.inf, tol / 2, weight=weight, wvar=tau_arg)
    return v1 + v2, e1 + e2


def _rotated(cfg: ReservoirConfig, tau_arg: float, tol: float):
    """ f(tau) with the x integral rotated onto the negative imaginary axis.

    f = -2iA e^{-i pi alpha/2} PV int y^alpha e^{-y tau}/(a^2 - y^2) dy
        + pi A a^(alpha-1) e^{-i pi alpha/2} e^{-a tau}
    """
    A, a, alpha = cfg.A, cfg.a, cfg.alpha
    phase = cmath.exp(-0.5j * math.pi * alpha)
    near = lambda y: -(y ** alpha) * math.exp(-y * tau_arg) / (y + a)
    pv, e1 = checked_quad(near, 0.0, 2 * a, tol / 2, weight="cauchy", wvar=a)
    far = lambda y: y ** alpha * math.exp(-y * tau_arg) / (a * a - y * y)
    tail, e2 = checked_quad(far, 2 * a, np.inf, tol / 2)
    value = -2j * A * phase * (pv + tail) + math.pi * A * a ** (alpha - 1) * phase * math.exp(-a * tau_arg)
    return value, 2 * A * (e1 + e2)


def correlation_function(tau_arg: float, cfg: ReservoirConfig, tol: float = QUAD_TOL,
                         scheme: str = "fourier") -> complex:
    """ Reservoir correlation f(tau) = int J(omega) exp(-i (omega - omega0) tau) d omega.

    scheme="fourier" splits at the spectral peak: QAWO on the finite part and
    QAWF on the semi-infinite tail. scheme="rotated" uses the contour-rotated
    Laplace-type form, which is non-oscillatory and much cheaper per point.
    """
    tau_arg = float(tau_arg)
    if tau_arg < 0:
        raise ConfigError(f"correlation time must be >= 0 (got {tau_arg})")
    if scheme == "fourier":
        re, e_re = _fourier_part(cfg, tau_arg, "cos", tol)
        im, e_im = _fourier_part(cfg, tau_arg, "sin", tol)
        value, err = complex(re, -im), e_re + e_im
    elif scheme == "rotated":
        value, err = _rotated(cfg, tau_arg, tol)
    else:
        raise ConfigError(f"unknown quadrature scheme {scheme!r}")
    if err > 10 * tol:
        raise ConvergenceError(f"f({tau_arg}) error estimate {err:.3g} exceeds target {tol:.3g}")
    return value


def validate_spectral_density(cfg: ReservoirConfig, grid_points: int = 4000,
                              tol: float = QUAD_TOL) -> SummabilityReport:
    """ Check J >= 0 on a dense grid and that its integral is finite. """
    xs = np.concatenate([
        np.geomspace(1e-8 * cfg.a, 1e8 * cfg.a, grid_points // 2),
        np.linspace(0.0, 20 * cfg.a, grid_points - grid_points // 2),
    ])
    values = _density_rel(xs, cfg)
    weight, err = _fourier_part(cfg, 0.0, "cos", tol)
    if not math.isfinite(weight) or err > 1e3 * tol:
        raise ConfigError(f"spectral density is not summable for {cfg} (integral {weight}, error {err:.3g})")
    return SummabilityReport(
        total_weight=weight,
        closed_form=total_weight(cfg),
        quad_error=err,
        min_value=float(values.min()),
        grid_points=len(xs),
    )


def bound_state(params: ReservoirParams) -> BoundState:
    """ Locate u_b = i y_b where the transform denominator vanishes, and its residue.

    On the imaginary axis D(iy)/i is real: -y^3 + z1 y - 2 pi A y^alpha/sin(pi alpha) + Im z0,
    positive at y = 0 and negative for large y.
    """
    dl = params.dimensionless()
    c_alpha = (dl.z_alpha * cmath.exp(0.5j * math.pi * dl.alpha) / 1j).real
    g = lambda y: -y ** 3 + dl.z1 * y + c_alpha * y ** dl.alpha + dl.z0.imag
    hi = 1.0 + abs(dl.z1) + abs(dl.z_alpha) + abs(dl.z0)
    if g(0.0) <= 0 or g(hi) >= 0:
        raise RootFindingError(f"no sign change for the bound-state condition on [0, {hi}]")
    y = optimize.brentq(g, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    u = 1j * y
    num = u * u - 1.0
    dden = 3 * u * u + dl.z1 + dl.alpha * dl.z_alpha * u ** (dl.alpha - 1)
    residue = num / dden
    if abs(residue.imag) > 1e-9 * abs(residue):
        log.warning("bound-state residue has an imaginary part %.3g", residue.imag)
    return BoundState(y=y * params.a, residue=residue.real)


def params_to_dict(params: ReservoirParams) -> Dict[str, object]:
    """ JSON-ready audit form (complex values as [re, im]). """
    cx = lambda z: [complex(z).real, complex(z).imag]
    return {
        "a": params.a,
        "alpha": params.alpha,
        "z0": cx(params.z0),
        "z_alpha": cx(params.z_alpha),
        "z1": params.z1,
        "A_star": params.A_star,
        "tau": params.tau,
        "Omega_alpha": params.Omega_alpha,
        "M_alpha": params.M_alpha,
        "z0_form": params.z0_form,
    }
