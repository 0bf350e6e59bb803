# SPDX-License-Identifier: GPL-3.0+

""" Independent ground truth for G(t).

- laplace_invert: fixed-Talbot inversion of the closed-form transform, after
  the poles of the transform on the principal sheet have been subtracted and
  added back as exponentials.
- volterra_solve: trapezoidal product integration of dG/dt = -(f * G) with
  Richardson extrapolation between h and h/2, checked against 2h and h.
- fit_tail_exponent: log-log least squares.

Nothing here depends on the Mittag-Leffler series or the asymptotic expansion.
"""

from __future__ import annotations

import functools
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import interpolate, optimize

from .errors import ConfigError, InapplicableError, InversionError, StepSizeError
from .outputs import write_csv
from .reservoir import Dimensionless, ReservoirConfig, ReservoirParams, correlation_function, total_weight
from .sample import GSample, Method

log = logging.getLogger(__name__)

EPS = np.finfo(float).eps

LAPLACE_NODES = 32
LAPLACE_TOL = 1e-8
# Relative distance below which a pole is considered to sit on the Talbot contour.
POLE_GUARD = 1e-6

VOLTERRA_STEP = 1 / 1024
VOLTERRA_T_MAX = 50.0
VOLTERRA_TOL = 1e-4

PARTS = ("total", "continuum")


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """ Strictly increasing, nonnegative sample times. """
    points: np.ndarray
    spacing: str = "custom"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise ConfigError("time grid is empty")
        if not np.all(np.isfinite(pts)):
            raise ConfigError("time grid contains non-finite points")
        if pts[0] < 0:
            raise ConfigError(f"time grid starts below 0 (got {pts[0]})")
        if np.any(np.diff(pts) <= 0):
            raise ConfigError("time grid must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, t0: float, t1: float, n: int) -> "TimeGrid":
        return cls(np.linspace(t0, t1, n), "uniform")

    @classmethod
    def log(cls, t0: float, t1: float, n: int) -> "TimeGrid":
        if t0 <= 0:
            raise ConfigError(f"log grid needs t0 > 0 (got {t0})")
        return cls(np.geomspace(t0, t1, n), "log")

    @property
    def step(self) -> Optional[float]:
        if self.spacing != "uniform" or len(self.points) < 2:
            return None
        return float(self.points[1] - self.points[0])

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(float(t) for t in self.points)


@dataclass(frozen=True)
class TailFit:
    exponent: float
    amplitude: float
    fit_window: Tuple[float, float]
    residual: float


@dataclass(frozen=True)
class Pole:
    """ Pole of the transform on the principal sheet; contributes residue * exp(u t). """
    u: complex
    residue: complex
    bound_state: bool


def laplace_transform(params: ReservoirParams, u: complex) -> complex:
    """ Closed-form transform of G, principal branch of u^alpha. """
    return params.transform(u)


# -- pole search ------------------------------------------------------------

def _den(dl: Dimensionless, u):
    return u ** 3 + dl.z1 * u + dl.z_alpha * u ** dl.alpha + dl.z0


def _dden(dl: Dimensionless, u):
    return 3 * u * u + dl.z1 + dl.alpha * dl.z_alpha * u ** (dl.alpha - 1)


def _removable_at_one(dl: Dimensionless) -> bool:
    scale = 1 + abs(dl.z1) + abs(dl.z_alpha) + abs(dl.z0)
    return abs(_den(dl, 1.0 + 0j)) <= 1e-12 * scale


def _seeds(dl: Dimensionless) -> np.ndarray:
    radius = 1 + abs(dl.z1) + abs(dl.z_alpha) + abs(dl.z0)
    radii = np.geomspace(1e-2, radius, 12)
    angles = np.linspace(-math.pi, math.pi, 36, endpoint=False) + math.pi / 36
    seeds = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    # rational alpha: images u = zeta^q of the polynomial roots are exact candidates
    from .rational import rational_order
    order = rational_order(dl.alpha)
    if order is not None:
        q, p = order.q, order.p
        coeffs = np.zeros(3 * q + 1, dtype=complex)
        coeffs[0] = 1.0
        coeffs[3 * q - q] += dl.z1
        coeffs[3 * q - p] += dl.z_alpha
        coeffs[3 * q] += dl.z0
        zetas = np.roots(coeffs)
        inside = np.abs(np.angle(zetas)) < math.pi / q
        seeds = np.concatenate([zetas[inside] ** q, seeds])
    return seeds


@functools.lru_cache(maxsize=128)
def _scaled_poles(dl: Dimensionless) -> Tuple[Tuple[complex, complex, bool], ...]:
    f = lambda u: _den(dl, u)
    df = lambda u: _dden(dl, u)
    removable = _removable_at_one(dl)
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        roots, converged, _ = optimize.newton(f, _seeds(dl), fprime=df, tol=1e-12, maxiter=200,
                                              full_output=True)
    found: List[complex] = []
    for u, ok in zip(np.atleast_1d(roots), np.atleast_1d(converged)):
        u = complex(u)
        if not ok or not np.isfinite(u) or abs(u) < 1e-10:
            continue
        if abs(np.angle(u)) > math.pi - 1e-9:
            continue
        if removable and abs(u - 1) < 1e-6:
            continue
        scale = abs(u) ** 3 + abs(dl.z1) * abs(u) + abs(dl.z_alpha) * abs(u) ** dl.alpha + abs(dl.z0)
        if abs(_den(dl, u)) > 1e-10 * scale:
            continue
        if any(abs(u - v) < 1e-8 * (1 + abs(u)) for v in found):
            continue
        found.append(u)
    out = []
    for u in sorted(found, key=lambda v: (-v.real, v.imag)):
        residue = (u * u - 1) / _dden(dl, u)
        bound = abs(u.real) <= 1e-9 * abs(u) and u.imag > 0
        out.append((u, complex(residue), bound))
    log.debug("principal-sheet poles (scaled): %s", out)
    return tuple(out)


def principal_poles(params: ReservoirParams) -> Tuple[Pole, ...]:
    """ All zeros of the transform denominator in the cut plane |arg u| < pi.

    u = a is skipped when it is a removable common zero with the numerator.
    """
    return tuple(Pole(u=params.a * u, residue=r, bound_state=b)
                 for u, r, b in _scaled_poles(params.dimensionless()))


# -- Laplace inversion ------------------------------------------------------

def _talbot_nodes(s: float, nodes: int, r: float):
    k = np.arange(-(nodes - 1), nodes)
    theta = k * math.pi / nodes
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = np.where(k == 0, 0.0, 1 / np.tan(theta))
        tcot = np.where(k == 0, 1.0, theta * cot)
    p = (r / s) * (tcot + 1j * theta)
    weight = 1 + 1j * (theta + (tcot - 1) * cot)
    return p, weight


def _remainder(dl: Dimensionless, poles, u: np.ndarray) -> np.ndarray:
    """ Transform minus the principal parts of its poles; analytic in the cut plane. """
    with np.errstate(all="ignore"):
        value = (u * u - 1) / _den(dl, u)
    if _removable_at_one(dl):
        near = np.abs(u - 1) < 1e-9
        value = np.where(near, 2 / _dden(dl, 1.0 + 0j), value)
    for up, res, _ in poles:
        value = value - res / (u - up)
    return value


def _talbot(dl: Dimensionless, poles, s: float, nodes: int, r: float):
    p, weight = _talbot_nodes(s, nodes, r)
    for up, _, _ in poles:
        gap = np.min(np.abs(p - up))
        if gap < POLE_GUARD * (1 + abs(up)):
            raise InversionError(f"pole at u = {up:.6g} lies on the inversion contour (t = {s:.6g}/a)")
    terms = np.exp(p * s) * _remainder(dl, poles, p) * weight
    scale = r / (2 * nodes * s)
    return scale * terms.sum(), scale * np.abs(terms).sum() * EPS


def laplace_invert(params: ReservoirParams, t: float, part: str = "total", nodes: int = LAPLACE_NODES,
                   tol: float = LAPLACE_TOL) -> GSample:
    """ Invert the transform of G at time t.

    part="continuum" drops the bound-state exponential and returns G_c = G - Z exp(i y_b t).
    The error estimate compares `nodes` and 2*`nodes` points at a fixed contour
    scale and adds the accumulated rounding.
    """
    if part not in PARTS:
        raise ConfigError(f"part must be one of {PARTS} (got {part!r})")
    t = float(t)
    if t < 0:
        raise ConfigError(f"t must be >= 0 (got {t})")
    dl = params.dimensionless()
    poles = _scaled_poles(dl)
    if t == 0.0:
        value = 1.0 + 0j
        if part == "continuum":
            value -= sum(res for _, res, b in poles if b)
        return GSample(0.0, value, 0.0, Method.LAPLACE)
    s = params.a * t
    # a pole on the contour moves the contour scale once before giving up
    for r in (2 * nodes / 5, 2.2 * nodes / 5):
        try:
            coarse, _ = _talbot(dl, poles, s, nodes, r)
            fine, rounding = _talbot(dl, poles, s, 2 * nodes, r)
            break
        except InversionError as e:
            log.debug("retrying with a wider contour: %s", e)
            last = e
    else:
        raise last
    error = abs(fine - coarse) + rounding
    value = fine
    for up, res, bound in poles:
        if part == "continuum" and bound:
            continue
        value += res * np.exp(up * s)
    if not error <= tol:
        raise InversionError(f"contour doubling moved G({t:.6g}) by {error:.3g}, above tolerance {tol:.3g}")
    return GSample(t, complex(value), float(error), Method.LAPLACE)


# -- Volterra integro-differential equation -------------------------------

def _march(f: np.ndarray, h: float, n: int) -> np.ndarray:
    """ Implicit trapezoidal product integration of dG/dt = -int_0^t f(t-s) G(s) ds. """
    g = np.empty(n + 1, dtype=complex)
    dg = np.empty(n + 1, dtype=complex)
    g[0], dg[0] = 1.0, 0.0
    denom = 1 + h * h * f[0] / 4
    for m in range(n):
        conv = np.dot(f[m:0:-1], g[1:m + 1]) + 0.5 * f[m + 1] * g[0]
        g[m + 1] = (g[m] + 0.5 * h * dg[m] - 0.5 * h * h * conv) / denom
        dg[m + 1] = -h * (conv + 0.5 * f[0] * g[m + 1])
    return g


def reservoir_kernel(cfg: ReservoirConfig, scheme: str = "rotated") -> Callable[[np.ndarray], np.ndarray]:
    """ Vectorised correlation function with the closed-form value at tau = 0. """
    def kernel(taus):
        out = np.empty(len(taus), dtype=complex)
        for i, tau in enumerate(taus):
            out[i] = total_weight(cfg) if tau == 0 else correlation_function(tau, cfg, scheme=scheme)
        return out
    return kernel


def volterra_solve(cfg: ReservoirConfig, grid: TimeGrid, tol: float = VOLTERRA_TOL,
                   step: Optional[float] = None, t_max: float = VOLTERRA_T_MAX,
                   kernel: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                   order: Optional[float] = None) -> List[GSample]:
    """ Solve the convolution equation for G on [0, grid end].

    step and t_max are in units of 1/a. The march runs at 2h, h and h/2;
    neighbouring levels are combined by Richardson extrapolation with leading
    error order `order`: 2 - alpha for the reservoir kernel (its tau^(1-alpha)
    cusp at 0 limits the trapezoidal rule), 2 for a smooth injected kernel.
    The (h, h/2) extrapolation is returned; its difference from the (2h, h)
    one is the error bound and is gated by tol.
    """
    t_end = float(grid.points[-1])
    if t_end > t_max / cfg.a:
        raise ConfigError(f"Volterra window {t_end:.6g} exceeds volterra_t_max = {t_max:.6g}/a")
    h = (step if step is not None else VOLTERRA_STEP) / cfg.a
    if order is None:
        order = 2.0 if kernel is not None else 2.0 - cfg.alpha
    if kernel is None:
        kernel = reservoir_kernel(cfg)
    if h * math.sqrt(total_weight(cfg)) > 0.1:
        log.warning("Volterra step %.3g does not resolve the kernel (h*sqrt(f(0)) = %.3g)",
                    h, h * math.sqrt(total_weight(cfg)))
    if t_end == 0.0:
        return [GSample(0.0, 1.0 + 0j, 0.0, Method.VOLTERRA)]
    n = max(2, math.ceil(t_end / h))
    n += n % 2
    h = t_end / n
    f_fine = np.asarray(kernel(np.arange(2 * n + 1) * (h / 2)), dtype=complex)
    log.info("Volterra march: %d steps of %.3g up to t = %.6g", 2 * n, h / 2, t_end)
    g_2h = _march(f_fine[::4], 2 * h, n // 2)
    g_h = _march(f_fine[::2], h, n)
    g_half = _march(f_fine, h / 2, 2 * n)[::2]
    gain = 2 ** order
    extrapolated = (gain * g_half - g_h) / (gain - 1)
    coarse = (gain * g_h[::2] - g_2h) / (gain - 1)
    # error of the extrapolated values, from the extrapolations one level apart
    errors = np.abs(extrapolated[::2] - coarse)
    worst = float(errors.max())
    if worst > tol:
        raise StepSizeError(f"Richardson estimate {worst:.3g} exceeds tolerance {tol:.3g} (h = {h:.3g})")
    lattice = np.arange(n + 1) * h
    re = interpolate.CubicSpline(lattice, extrapolated.real)
    im = interpolate.CubicSpline(lattice, extrapolated.imag)
    out = []
    for t in grid:
        if t == 0.0:
            out.append(GSample(0.0, 1.0 + 0j, 0.0, Method.VOLTERRA))
            continue
        value = complex(float(re(t)), float(im(t)))
        out.append(GSample(t, value, float(np.interp(t, lattice[::2], errors)), Method.VOLTERRA))
    return out


# -- tail fitting -----------------------------------------------------------

def fit_tail_exponent(samples: Sequence[Tuple[float, float]], max_residual: float = 0.05) -> TailFit:
    """ Least-squares line through (log t, log |x|); the slope is the exponent. """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or len(data) < 8:
        raise ConfigError("tail fit needs at least 8 (t, magnitude) samples")
    t, mag = data[:, 0], data[:, 1]
    if np.any(mag <= 0) or np.any(t <= 0):
        raise ConfigError("tail fit needs positive times and magnitudes")
    if np.any(np.diff(t) <= 0):
        raise ConfigError("tail fit times must be strictly increasing")
    x, y = np.log(t), np.log(mag)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    if residual > max_residual:
        raise InapplicableError(
            f"window [{t[0]:.4g}, {t[-1]:.4g}] is not a power law (max log residual {residual:.3g})")
    return TailFit(float(slope), float(math.exp(intercept)), (float(t[0]), float(t[-1])), residual)


def write_samples_csv(path: str, samples: Sequence[GSample]):
    rows = ((s.t, s.value.real, s.value.imag, abs(s.value), s.error_bound, s.method.value) for s in samples)
    write_csv(path, ("t", "re_G", "im_G", "abs_G", "error", "method"), rows)
