# SPDX-License-Identifier: GPL-3.0+

""" Rational band-edge exponents alpha = p/q.

With u = z^q the transform of G becomes the rational function
R(z) = (z^(2q) - a^2) / Q(z),  Q(z) = z^(3q) + z1 z^q + z_alpha z^p + z0.
G is then a sum of exponentials over the roots of Q lying in the sector
|arg z| < pi/q plus a real integral along the branch cut of u^(1/q).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import ConfigError, ConvergenceError, InapplicableError, RootFindingError
from .reservoir import ReservoirParams, checked_quad
from .sample import GSample, Method

log = logging.getLogger(__name__)

MAX_DENOMINATOR = 12
CLUSTER_TOL = 1e-7
# Wider radius inside which neighbouring roots are merged if derivative residuals confirm it.
MERGE_PROBE = 1e-4
RESIDUAL_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
RATIONAL_TOL = 1e-10


@dataclass(frozen=True)
class RationalOrder:
    p: int
    q: int

    def __post_init__(self):
        if not (isinstance(self.p, int) and isinstance(self.q, int)):
            raise ConfigError(f"p and q must be integers (got {self.p!r}, {self.q!r})")
        if not 0 < self.p < self.q:
            raise ConfigError(f"need 0 < p < q (got p={self.p}, q={self.q})")
        if math.gcd(self.p, self.q) != 1:
            raise ConfigError(f"p and q must be coprime (got p={self.p}, q={self.q})")

    @property
    def alpha(self) -> float:
        return self.p / self.q


@dataclass(frozen=True)
class RootSet:
    """ Distinct roots of Q with multiplicities and scaled residuals. """
    roots: Tuple[complex, ...]
    multiplicities: Tuple[int, ...]
    residuals: Tuple[float, ...]
    degree: int

    def __post_init__(self):
        if sum(self.multiplicities) != self.degree:
            raise RootFindingError(
                f"multiplicities add up to {sum(self.multiplicities)}, polynomial degree is {self.degree}")

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def expanded(self) -> np.ndarray:
        return np.array([z for z, m in zip(self.roots, self.multiplicities) for _ in range(m)])


@dataclass(frozen=True)
class ResidueTable:
    """ Partial fractions R(z) = sum_l sum_j coefficients[l][j-1] / (z - roots[l])^j. """
    roots: Tuple[complex, ...]
    multiplicities: Tuple[int, ...]
    coefficients: Tuple[Tuple[complex, ...], ...]
    ill_conditioned: Tuple[bool, ...]

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for zeta, coeffs in zip(self.roots, self.coefficients):
            for j, c in enumerate(coeffs, start=1):
                out = out + c / (z - zeta) ** j
        return out

    def b(self, l: int, k: int) -> complex:
        """ Coefficient in the (m-k)! (k-1)! normalised convention, k = 1..m_l. """
        m = self.multiplicities[l]
        if not 1 <= k <= m:
            raise IndexError(f"k must lie in 1..{m}")
        return self.coefficients[l][m - k] / math.factorial(m - k)


def rational_order(alpha: float, max_q: int = MAX_DENOMINATOR, tol: float = 1e-12) -> Optional[RationalOrder]:
    """ p/q with q <= max_q equal to alpha within tol, else None. """
    if not 0 < alpha < 1:
        return None
    frac = Fraction(alpha).limit_denominator(max_q)
    if abs(float(frac) - alpha) > tol or not 0 < frac < 1:
        return None
    return RationalOrder(frac.numerator, frac.denominator)


def build_q_polynomial(order: RationalOrder, params: ReservoirParams) -> np.ndarray:
    """ Coefficients of Q, highest degree first (numpy.roots order). """
    if abs(params.alpha - order.alpha) > 1e-12:
        raise ConfigError(f"params were derived for alpha = {params.alpha}, not {order.p}/{order.q}")
    q, p = order.q, order.p
    coeffs = np.zeros(3 * q + 1, dtype=complex)
    coeffs[0] = 1.0
    coeffs[3 * q - q] += params.z1
    coeffs[3 * q - p] += params.z_alpha
    coeffs[3 * q] += params.z0
    return coeffs


def _scaled_residual(coeffs: np.ndarray, z: complex, j: int = 0) -> float:
    d = np.polyder(coeffs, j) if j else coeffs
    num = abs(np.polyval(d, z))
    den = float(np.polyval(np.abs(d), abs(z)))
    return num / den if den > 0 else num


def _newton(coeffs: np.ndarray, z: complex, j: int = 0, steps: int = 20) -> complex:
    """ Newton on the j-th derivative of the polynomial. """
    f = np.polyder(coeffs, j) if j else coeffs
    df = np.polyder(f)
    for _ in range(steps):
        slope = np.polyval(df, z)
        if slope == 0:
            break
        delta = np.polyval(f, z) / slope
        z = z - delta
        if abs(delta) <= 1e-16 * max(1.0, abs(z)):
            break
    return complex(z)


def _link(points: Sequence[complex], radius: float) -> List[List[int]]:
    # single linkage
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if abs(points[i] - points[j]) < radius:
                parent[find(i)] = find(j)
    groups: Dict[int, List[int]] = {}
    for i in range(len(points)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _cluster_root(coeffs: np.ndarray, members: Sequence[complex]) -> Tuple[complex, float]:
    """ Polish a cluster of m raw roots on the (m-1)-th derivative, where the root is simple. """
    m = len(members)
    centroid = complex(np.mean(members))
    centroid = _newton(coeffs, centroid, j=m - 1)
    residual = max(_scaled_residual(coeffs, centroid, j) for j in range(m))
    return centroid, residual


def find_roots(coeffs, cluster_tol: float = CLUSTER_TOL, residual_tol: float = RESIDUAL_TOL) -> RootSet:
    """ All roots of a monic polynomial, polished, with multiplicities.

    Raw eigenvalue roots closer than cluster_tol (relative to the largest root)
    are linked first. Groups up to MERGE_PROBE apart are merged as well when
    the derivative residuals at the cluster centre confirm the multiplicity.
    Clusters are polished only after linking, on the derivative where the
    root is simple.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or len(coeffs) < 2:
        raise RootFindingError("need a polynomial of degree >= 1")
    if coeffs[0] != 1:
        raise RootFindingError(f"polynomial must be monic (leading coefficient {coeffs[0]})")
    degree = len(coeffs) - 1
    raw = [complex(z) for z in np.roots(coeffs)]
    scale = max(1.0, max(abs(z) for z in raw))
    groups = [[raw[i] for i in g] for g in _link(raw, cluster_tol * scale)]
    centroids = [complex(np.mean(g)) for g in groups]
    merged: List[List[complex]] = []
    for bundle in _link(centroids, MERGE_PROBE * scale):
        if len(bundle) > 1:
            members = [z for i in bundle for z in groups[i]]
            _, residual = _cluster_root(coeffs, members)
            if residual <= residual_tol:
                merged.append(members)
                continue
        merged.extend(groups[i] for i in bundle)
    roots, mults, residuals = [], [], []
    for members in merged:
        zeta, residual = _cluster_root(coeffs, members)
        if residual > residual_tol:
            raise RootFindingError(
                f"root {zeta:.6g} (multiplicity {len(members)}) has scaled residual {residual:.3g}")
        roots.append(zeta)
        mults.append(len(members))
        residuals.append(residual)
    order = sorted(range(len(roots)), key=lambda i: (roots[i].real, roots[i].imag))
    rs = RootSet(tuple(roots[i] for i in order), tuple(mults[i] for i in order),
                 tuple(residuals[i] for i in order), degree)
    log.debug("found %d distinct roots of a degree-%d polynomial", len(rs.roots), degree)
    return rs


def _taylor(coeffs: np.ndarray, z: complex, count: int) -> List[complex]:
    out, d = [], coeffs
    for k in range(count):
        out.append(complex(np.polyval(d, z)) / math.factorial(k))
        d = np.polyder(d) if len(d) > 1 else np.zeros(1)
    return out


def _reconstruction_error(numerator: np.ndarray, denominator: np.ndarray, table: ResidueTable, scale: float) -> float:
    """ Largest relative mismatch of the partial fractions on a circle enclosing every root. """
    z = 2 * scale * np.exp(1j * (0.3 + 2 * math.pi * np.arange(7) / 7))
    want = np.polyval(numerator, z) / np.polyval(denominator, z)
    got = table.evaluate(z)
    return float(np.max(np.abs(got - want)) / max(float(np.max(np.abs(want))), 1e-300))


def partial_fractions(numerator, rs: RootSet, denominator=None,
                      reconstruction_tol: float = RECONSTRUCTION_TOL) -> ResidueTable:
    """ Partial-fraction coefficients of numerator / prod (z - zeta_l)^m_l.

    c_{l,j} is the (m-j)-th Taylor coefficient at zeta_l of numerator / cofactor_l,
    with cofactor_l the product over the other roots. Roots closer than 1e-6
    (relative) are flagged, and every root is flagged when the expansion does
    not reproduce numerator / denominator to reconstruction_tol. The denominator
    defaults to the monic polynomial rebuilt from rs.
    """
    numerator = np.asarray(numerator, dtype=complex)
    if len(numerator) - 1 >= rs.degree:
        raise ConfigError("numerator degree must be below the denominator degree")
    scale = max(1.0, max(abs(z) for z in rs.roots))
    table, flags = [], []
    for l, (zeta, m) in enumerate(zip(rs.roots, rs.multiplicities)):
        others = [z for i, (z, mi) in enumerate(zip(rs.roots, rs.multiplicities)) if i != l for _ in range(mi)]
        cofactor = np.poly(others) if others else np.ones(1, dtype=complex)
        n = _taylor(numerator, zeta, m)
        c = _taylor(cofactor, zeta, m)
        series = []
        for k in range(m):
            acc = n[k] - sum(c[i] * series[k - i] for i in range(1, k + 1))
            series.append(acc / c[0])
        gap = min((abs(zeta - z) for i, z in enumerate(rs.roots) if i != l), default=scale)
        flagged = gap < 1e-6 * scale
        if flagged:
            log.warning("root %s is within %.3g of another root; residues are ill-conditioned", f"{zeta:.6g}", gap)
        table.append(tuple(series[m - j] for j in range(1, m + 1)))
        flags.append(flagged)
    out = ResidueTable(rs.roots, rs.multiplicities, tuple(table), tuple(flags))
    if denominator is None:
        denominator = np.poly(rs.expanded())
    mismatch = _reconstruction_error(numerator, np.asarray(denominator, dtype=complex), out, scale)
    if mismatch > reconstruction_tol:
        log.warning("partial fractions miss the rational function by %.3g (relative)", mismatch)
        out = ResidueTable(rs.roots, rs.multiplicities, tuple(table), (True,) * len(rs.roots))
    return out


def residue_coefficients(rs: RootSet, order: RationalOrder, params: ReservoirParams) -> ResidueTable:
    """ Partial fractions of (z^(2q) - a^2) / Q(z). """
    numerator = np.zeros(2 * order.q + 1, dtype=complex)
    numerator[0] = 1.0
    numerator[-1] = -params.a ** 2
    return partial_fractions(numerator, rs, build_q_polynomial(order, params))


def _in_sector(zeta: complex, q: int) -> bool:
    return abs(cmath.phase(zeta)) < math.pi / q - 1e-12


def _residue_simple(coeff: complex, zeta: complex, q: int, t: float) -> complex:
    return coeff * q * zeta ** (q - 1) * cmath.exp(zeta ** q * t)


def _residue_circle(table: ResidueTable, l: int, q: int, t: float) -> complex:
    """ Residue of exp(u t) R(u^(1/q)) at u = zeta_l^q by the trapezoidal rule on a small circle. """
    zeta = table.roots[l]
    centre = zeta ** q
    images = [z ** q for i, z in enumerate(table.roots) if i != l and _in_sector(z, q)]
    room = min([abs(centre - w) for w in images] + [abs(centre)])
    if centre.real < 0:
        room = min(room, abs(centre.imag))
    rho = 0.3 * room
    n = max(64, 4 * math.ceil(rho * t) + 64)
    theta = 2 * math.pi * np.arange(n) / n
    u = centre + rho * np.exp(1j * theta)
    values = np.exp(u * t) * table.evaluate(u ** (1 / q)) * rho * np.exp(1j * theta)
    return complex(values.mean())


def _cut_integrand(table: ResidueTable, q: int, t: float):
    lower = cmath.exp(-1j * math.pi / q)
    upper = cmath.exp(1j * math.pi / q)

    def integrand(s):
        jump = table.evaluate(s * lower) - table.evaluate(s * upper)
        return complex(jump / (2j * math.pi) * q * s ** (q - 1) * math.exp(-(s ** q) * t))
    return integrand


def modulation_density(eta, xi, order: RationalOrder, table: ResidueTable):
    """ Density Phi(eta, xi) whose double integral against exp(-xi t) gives G.

    Phi = (1/pi) sum_l sum_j c_lj eta^(j-1)/(j-1)! exp(eta (zeta_l - cos(pi/q) xi^(1/q)))
          * sin(eta xi^(1/q) sin(pi/q)),
    meaningful only when every root carrying a coefficient has Re(zeta) < 0.
    """
    q = order.q
    eta = np.asarray(eta, dtype=float)
    root = np.asarray(xi, dtype=float) ** (1 / q)
    cos_q, sin_q = math.cos(math.pi / q), math.sin(math.pi / q)
    out = np.zeros(np.broadcast(eta, root).shape, dtype=complex)
    for zeta, coeffs in zip(table.roots, table.coefficients):
        poly = sum(c * eta ** (j - 1) / math.factorial(j - 1) for j, c in enumerate(coeffs, start=1))
        out = out + poly * np.exp(eta * (zeta - cos_q * root))
    return out * np.sin(eta * root * sin_q) / math.pi


def _carrying(table: ResidueTable) -> List[int]:
    biggest = max(abs(c) for coeffs in table.coefficients for c in coeffs)
    return [l for l, coeffs in enumerate(table.coefficients)
            if max(abs(c) for c in coeffs) > 1e-12 * biggest]


def _cut_limit(t: float, q: int) -> float:
    # exp(-s^q t) < exp(-50) beyond this
    return (50.0 / t) ** (1 / q)


def _g_cut(t: float, order: RationalOrder, table: ResidueTable, tol: float) -> Tuple[complex, float]:
    q = order.q
    value, error = 0j, 0.0
    carrying = _carrying(table)
    for l, (zeta, m) in enumerate(zip(table.roots, table.multiplicities)):
        # the common zero with the numerator (zeta^q = a) carries no residue
        if l not in carrying or not _in_sector(zeta, q):
            continue
        if m == 1:
            value += _residue_simple(table.coefficients[l][0], zeta, q, t)
        else:
            value += _residue_circle(table, l, q, t)
    integrand = _cut_integrand(table, q, t)
    hi = _cut_limit(t, q)
    # break the cut integral where roots sit close to the rays arg z = +-pi/q
    points = sorted(abs(z) for z in table.roots
                    if abs(abs(cmath.phase(z)) - math.pi / q) < 0.3 and 0 < abs(z) < hi)
    re, e_re = checked_quad(lambda s: integrand(s).real, 0.0, hi, tol / 4, epsrel=1e-12, limit=500,
                            points=points or None)
    im, e_im = checked_quad(lambda s: integrand(s).imag, 0.0, hi, tol / 4, epsrel=1e-12, limit=500,
                            points=points or None)
    return value + complex(re, im), e_re + e_im


def _g_double(t: float, order: RationalOrder, table: ResidueTable, tol: float) -> Tuple[complex, float]:
    q = order.q
    carrying = _carrying(table)
    blocking = [table.roots[l] for l in carrying if table.roots[l].real >= 0]
    if blocking:
        raise InapplicableError(
            f"double-integral form diverges: roots {', '.join(f'{z:.4g}' for z in blocking)} have Re >= 0")
    cos_q = math.cos(math.pi / q)
    slowest = min(-table.roots[l].real for l in carrying)
    mmax = max(table.multiplicities[l] for l in carrying)

    def eta_limit(s):
        return (30.0 + 5.0 * (mmax - 1)) / (slowest + cos_q * s)

    def part(extract):
        def f(eta, s):
            phi = modulation_density(eta, s ** q, order, table)
            return extract(complex(phi)) * q * s ** (q - 1) * math.exp(-(s ** q) * t)
        return f

    hi = _cut_limit(t, q)
    re, e_re = integrate.dblquad(part(lambda z: z.real), 0.0, hi, 0.0, eta_limit, epsabs=tol / 4, epsrel=1e-10)
    im, e_im = integrate.dblquad(part(lambda z: z.imag), 0.0, hi, 0.0, eta_limit, epsabs=tol / 4, epsrel=1e-10)
    return complex(re, im), e_re + e_im


def g_rational(t: float, order: RationalOrder, rs: RootSet, table: ResidueTable, form: str = "cut",
               tol: float = RATIONAL_TOL) -> GSample:
    """ G(t) for alpha = p/q from the roots of Q.

    form="cut": sector residues plus the branch-cut integral.
    form="double": the double integral of modulation_density against exp(-xi t);
    raises InapplicableError when a root with nonzero coefficient has Re(zeta) >= 0.
    """
    if table.roots != rs.roots:
        raise ConfigError("residue table was built for a different root set")
    t = float(t)
    if t < 0:
        raise ConfigError(f"t must be >= 0 (got {t})")
    if t == 0.0:
        return GSample(0.0, 1.0 + 0j, 0.0, Method.RATIONAL)
    if form == "cut":
        value, error = _g_cut(t, order, table, tol)
    elif form == "double":
        value, error = _g_double(t, order, table, tol)
    else:
        raise ConfigError(f"unknown rational form {form!r}")
    if not math.isfinite(error) or error > 10 * tol:
        raise ConvergenceError(f"rational-path quadrature error {error:.3g} at t = {t:.6g}")
    return GSample(t, value, float(error + 1e3 * rs.max_residual * abs(value)), Method.RATIONAL)


def rootset_to_dict(rs: RootSet) -> Dict[str, object]:
    return {
        "degree": rs.degree,
        "roots": [[z.real, z.imag] for z in rs.roots],
        "multiplicities": list(rs.multiplicities),
        "residuals": list(rs.residuals),
    }
