"""Conic curves in the (x, tau) plane attached to the weighted gap.

Setting the quadratic-in-t form of delta_n (respectively delta_{n+1}) to
zero defines two curves whose branches enclose the forbidden region for the
ratio t = p_{n+1}/p_n.  The positivity argument needs three facts, all
computable here: the curves are simultaneously real to the right of a
closed-form vertex, their resultant in tau never vanishes strictly inside
(0, 1), and the branches are nested with the deeper curve inside.

Three schemes are supported: ultraspherical (power weight |x|^theta),
unit-normalised symmetric families (power weight), and monic Hermite-like
families (rational weight, no theta).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import gmpy2
from gmpy2 import mpfr, mpq

from . import precision
from .errors import DegenerateCoefficientError, HypothesisViolationError, InvalidFamilyError
from .exact_algebra import RationalPoly, resultant_quadratics
from .turan_core import power_weight, theta_ultraspherical

PROBE_PRECISION = 256  # large-n gap signals are O(n^-2)..O(n^-4)


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UltrasphericalScheme:
    lam: object
    n: int
    theta: object


@dataclass(frozen=True)
class SymmetricUnitScheme:
    """Unit-normalised symmetric scheme; needs a_n and a_{n+1}."""

    a_n: object
    a_n1: object
    n: int
    theta: object


@dataclass(frozen=True)
class HermiteScheme:
    """Monic increasing-coefficient scheme; needs a_{n-1}, a_n, a_{n+1}."""

    a_prev: object
    a_cur: object
    a_next: object
    n: int


def tau_quadratic(scheme, which: str, x, bits: int):
    """Coefficients (A, B, C) of the curve's quadratic A tau^2 + B tau + C at x."""
    if which not in ("n", "n+1"):
        raise ValueError("which must be 'n' or 'n+1'")
    with precision.context(bits):
        xr = precision.to_real(x, bits)
        if isinstance(scheme, UltrasphericalScheme):
            lam = mpfr(scheme.lam)
            n = scheme.n
            w = power_weight(scheme.theta, xr, bits)
            if which == "n":
                return (n + 2 * lam, -2 * (n + lam) * xr, n * w), xr
            return ((n + 2 * lam + 1) * w, -2 * (n + lam + 1) * xr, mpfr(n + 1)), xr
        if isinstance(scheme, SymmetricUnitScheme):
            w = power_weight(scheme.theta, xr, bits)
            if which == "n":
                an = mpfr(scheme.a_n)
                return (1 - an, -xr, an * w), xr
            an1 = mpfr(scheme.a_n1)
            return ((1 - an1) * w, -xr, mpfr(an1)), xr
        if isinstance(scheme, HermiteScheme):
            x2 = xr * xr
            if which == "n":
                d = mpfr(scheme.a_cur) - mpfr(scheme.a_prev)
                return (x2 + d, -(x2 + d) * xr, mpfr(scheme.a_cur) * x2), xr
            d = mpfr(scheme.a_next) - mpfr(scheme.a_cur)
            return (x2, -(x2 + d) * xr, mpfr(scheme.a_next) * (x2 + d)), xr
    raise InvalidFamilyError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class CurveBranches:
    """The two real branches tau_minus <= tau_plus at one x, if any."""

    x: object
    tau_minus: object
    tau_plus: object
    discriminant: object
    real_flag: bool
    precision_bits: int = precision.DEFAULT_PRECISION


def branches(scheme, which: str, x, bits: int = precision.DEFAULT_PRECISION) -> CurveBranches:
    """Solve the curve's quadratic in tau at x; complex case flagged, not raised."""
    (A, B, C), xr = tau_quadratic(scheme, which, x, bits)
    with precision.context(bits):
        if A == 0:
            raise DegenerateCoefficientError(
                f"curve {which} degenerates at x = {xr} (leading coefficient zero)"
            )
        disc = B * B - 4 * A * C
        if disc < 0:
            return CurveBranches(xr, None, None, disc, False, bits)
        root = gmpy2.sqrt(disc)
        t1 = (-B - root) / (2 * A)
        t2 = (-B + root) / (2 * A)
        lo, hi = (t1, t2) if t1 <= t2 else (t2, t1)
        return CurveBranches(xr, lo, hi, disc, True, bits)


# ---------------------------------------------------------------------------
# vertices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexInfo:
    x_vertex: object
    tau_vertex: object
    kind: str


def _power_vertex_exponent(lam, theta):
    """1/(2-theta), using the exact piecewise form at the sharp exponent.

    For theta = 4/(2-lam) this is 1/2 - 1/lam; for theta = 2/(1+2*lam) it is
    1/2 + 1/(4*lam); both stay exact rationals for rational lam.
    """
    if precision.is_rational(lam) and precision.is_rational(theta):
        lamq = precision.to_mpq(lam)
        thq = precision.to_mpq(theta)
        if lamq != 0 and thq == theta_ultraspherical(lamq):
            if lamq < 0:
                return mpq(1, 2) - 1 / lamq
            return mpq(1, 2) + 1 / (4 * lamq)
        if thq != 2:
            return 1 / (2 - thq)
        return None
    return None


def _power_vertex(base, lam, theta, bits):
    """base^(1/(2-theta)) with the theta -> 2 limit taken by continuity."""
    with precision.context(bits):
        base_r = mpfr(base)
        if precision.is_rational(theta):
            thq = precision.to_mpq(theta)
            if thq >= 2:
                if base == 1:
                    return mpfr(1)  # lam = 0 limit: vertex pinned at 1
                raise InvalidFamilyError("vertex undefined for theta >= 2")
        elif not theta < 2:
            if base == 1:
                return mpfr(1)
            raise InvalidFamilyError("vertex undefined for theta >= 2")
        expo = _power_vertex_exponent(lam, theta)
        if expo is None:
            expo = 1 / (2 - mpfr(theta))
        return gmpy2.exp(mpfr(expo) * gmpy2.log(base_r))


def vertex(scheme, which: str, bits: int = precision.DEFAULT_PRECISION) -> VertexInfo:
    """Closed-form leftmost real point of the named curve."""
    if which not in ("n", "n+1"):
        raise ValueError("which must be 'n' or 'n+1'")
    if isinstance(scheme, UltrasphericalScheme):
        lam = precision.to_mpq(scheme.lam) if precision.is_rational(scheme.lam) else scheme.lam
        n = scheme.n
        if which == "n":
            base = mpq(n) * (n + 2 * lam) / ((n + lam) ** 2) if precision.is_rational(
                scheme.lam
            ) else None
            kind = "x_tilde"
        else:
            base = (
                mpq(n + 1) * (n + 2 * lam + 1) / ((n + lam + 1) ** 2)
                if precision.is_rational(scheme.lam)
                else None
            )
            kind = "x0"
        if base is None:
            with precision.context(bits):
                lamr = mpfr(scheme.lam)
                if which == "n":
                    base = n * (n + 2 * lamr) / (n + lamr) ** 2
                else:
                    base = (n + 1) * (n + 2 * lamr + 1) / (n + lamr + 1) ** 2
        xv = _power_vertex(base, scheme.lam, scheme.theta, bits)
        with precision.context(bits):
            lamr = mpfr(scheme.lam)
            if which == "n":
                tau = (n + lamr) * xv / (n + 2 * lamr)
            else:
                w = power_weight(scheme.theta, xv, bits)
                tau = (n + lamr + 1) * xv / ((n + 2 * lamr + 1) * w)
        return VertexInfo(xv, tau, kind)
    if isinstance(scheme, SymmetricUnitScheme):
        a = scheme.a_n if which == "n" else scheme.a_n1
        if precision.is_rational(a):
            aq = precision.to_mpq(a)
            base = 4 * aq * (1 - aq)
        else:
            with precision.context(bits):
                ar = mpfr(a)
                base = 4 * ar * (1 - ar)
        xv = _power_vertex(base, None, scheme.theta, bits)
        with precision.context(bits):
            ar = mpfr(a)
            if which == "n":
                tau = xv / (2 * (1 - ar))
            else:
                w = power_weight(scheme.theta, xv, bits)
                tau = xv / (2 * (1 - ar) * w)
        return VertexInfo(xv, tau, "x0" if which == "n+1" else "x_tilde")
    if isinstance(scheme, HermiteScheme):
        with precision.context(bits):
            if which == "n":
                xv = gmpy2.sqrt(3 * mpfr(scheme.a_cur) + mpfr(scheme.a_prev))
                tau = xv / 2
            else:
                xv = gmpy2.sqrt(3 * mpfr(scheme.a_next) + mpfr(scheme.a_cur))
                tau = 2 * mpfr(scheme.a_next) / xv
        return VertexInfo(xv, tau, "hermite-vertex")
    raise InvalidFamilyError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------


def resultant_value(scheme, x, bits: int = precision.DEFAULT_PRECISION):
    """Numeric value of the resultant in tau of the two curves at x."""
    qa, xr = tau_quadratic(scheme, "n", x, bits)
    qb, _ = tau_quadratic(scheme, "n+1", x, bits)
    with precision.context(bits):
        return resultant_quadratics(qa, qb)


def resultant_exact(scheme, x) -> mpq:
    """Exact rational resultant; needs the weight to be rational at x.

    For the power-weight schemes that means |x| in {0, 1} or integer theta;
    the Hermite scheme is rational at every rational x.
    """
    xq = precision.to_mpq(x)
    if isinstance(scheme, HermiteScheme):
        a_p = precision.to_mpq(scheme.a_prev)
        a_c = precision.to_mpq(scheme.a_cur)
        a_n = precision.to_mpq(scheme.a_next)
        x2 = xq * xq
        dn = a_c - a_p
        dn1 = a_n - a_c
        qa = (x2 + dn, -(x2 + dn) * xq, a_c * x2)
        qb = (x2, -(x2 + dn1) * xq, a_n * (x2 + dn1))
        return resultant_quadratics(qa, qb)
    theta = precision.to_mpq(scheme.theta)
    if abs(xq) == 1 or xq == 0:
        w = abs(xq)
    elif theta.denominator == 1:
        w = abs(xq) ** int(theta)
    else:
        raise InvalidFamilyError(f"|{xq}|^{theta} is irrational; exact resultant unavailable")
    if isinstance(scheme, UltrasphericalScheme):
        lam = precision.to_mpq(scheme.lam)
        n = scheme.n
        qa = (n + 2 * lam, -2 * (n + lam) * xq, n * w)
        qb = ((n + 2 * lam + 1) * w, -2 * (n + lam + 1) * xq, mpq(n + 1))
        return resultant_quadratics(qa, qb)
    an = precision.to_mpq(scheme.a_n)
    an1 = precision.to_mpq(scheme.a_n1)
    qa = (1 - an, -xq, an * w)
    qb = ((1 - an1) * w, -xq, an1)
    return resultant_quadratics(qa, qb)


def resultant_symbolic(scheme):
    """Resultant as an exact RationalPoly in r with x = r^v (theta = u/v).

    Offered only for rational theta: the resultant mixes x^2 with x^theta
    and is polynomial in a single variable exactly when the powers are
    commensurable.  Returns (poly, v).
    """
    theta = precision.to_mpq(scheme.theta)
    u, v = int(theta.numerator), int(theta.denominator)
    xv = RationalPoly.monomial(v)  # r^v  (the x variable)
    w = RationalPoly.monomial(u)  # r^u = x^theta
    if isinstance(scheme, UltrasphericalScheme):
        lam = precision.to_mpq(scheme.lam)
        n = scheme.n
        qa = ((n + 2 * lam) * RationalPoly([1]), -2 * (n + lam) * xv, n * w)
        qb = ((n + 2 * lam + 1) * w, -2 * (n + lam + 1) * xv, (n + 1) * RationalPoly([1]))
        return resultant_quadratics(qa, qb), v
    if isinstance(scheme, SymmetricUnitScheme):
        an = precision.to_mpq(scheme.a_n)
        an1 = precision.to_mpq(scheme.a_n1)
        qa = ((1 - an) * RationalPoly([1]), -xv, an * w)
        qb = ((1 - an1) * w, -xv, an1 * RationalPoly([1]))
        return resultant_quadratics(qa, qb), v
    raise InvalidFamilyError("symbolic resultant in r applies to the power-weight schemes")


def hermite_resultant_in_x2(a_prev, a_cur, a_next) -> RationalPoly:
    """Hermite-scheme resultant as an exact polynomial in u = x^2.

    The x^8 terms cancel, leaving a cubic whose four coefficients are sums
    of positive monomials in (a_{n-1}, a_n, a_{n+1}) under the increasing
    hypothesis; per-instance positivity is checked by the caller.
    """
    a_p = precision.to_mpq(a_prev)
    a_c = precision.to_mpq(a_cur)
    a_n = precision.to_mpq(a_next)
    dn = a_c - a_p
    dn1 = a_n - a_c
    u = RationalPoly.x()
    # S = a1 c2 - a2 c1 ; the odd-x factors of (a1 b2 - a2 b1)(b1 c2 - b2 c1)
    # contribute a single power of u after pairing.
    S = (u + dn) * a_n * (u + dn1) - a_c * u * u
    beta1 = -(u + dn)  # b1 = beta1 * x
    beta2 = -(u + dn1)  # b2 = beta2 * x
    P = ((u + dn) * beta2 - u * beta1) * (beta1 * a_n * (u + dn1) - beta2 * a_c * u) * u
    return S * S - P


# ---------------------------------------------------------------------------
# nesting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NestingReport:
    scheme: object
    points_checked: int
    points_real: int
    violations: int
    first_violation: Optional[tuple]
    max_gap_breach: object
    x_start: object
    precision_bits: int

    @property
    def nested(self) -> bool:
        return self.violations == 0


def both_real_from(scheme, bits: int = precision.DEFAULT_PRECISION):
    """Leftmost x with both curves real (the deeper curve's vertex)."""
    return vertex(scheme, "n+1", bits).x_vertex


def nesting_check(
    scheme,
    x_grid=None,
    grid_size: int = 256,
    hi=None,
    bits: int = precision.DEFAULT_PRECISION,
) -> NestingReport:
    """Check tau_n^- <= tau_{n+1}^- <= tau_{n+1}^+ <= tau_n^+ where both are real.

    The sorted-branch ordering is orientation-free: the x = 1 values put the
    deeper curve inside for every admissible parameter sign.  Violations
    beyond the roundoff slack are reported, never raised.
    """
    x_start = both_real_from(scheme, bits)
    if x_grid is None:
        if hi is None:
            hi = 1
        with precision.context(bits):
            lo = mpfr(x_start) + (mpfr(hi) - mpfr(x_start)) * mpfr(2) ** -20
        x_grid = precision.make_grid(lo, hi, grid_size, bits, cluster_hi=False)
    x_grid = list(x_grid)
    with precision.context(bits):
        slack = mpfr(2) ** (-(bits // 2))
    checked = 0
    real_pts = 0
    violations = 0
    first = None
    worst = None
    for x in x_grid:
        checked += 1
        bn = branches(scheme, "n", x, bits)
        bn1 = branches(scheme, "n+1", x, bits)
        if not (bn.real_flag and bn1.real_flag):
            continue
        real_pts += 1
        with precision.context(bits):
            scale = 1 + max(abs(bn.tau_plus), abs(bn.tau_minus))
            gaps = (
                bn1.tau_minus - bn.tau_minus,
                bn1.tau_plus - bn1.tau_minus,
                bn.tau_plus - bn1.tau_plus,
            )
            breach = min(gaps)
            if worst is None or breach < worst:
                worst = breach
            if breach < -slack * scale:
                violations += 1
                if first is None:
                    first = (bn.x, tuple(gaps))
    return NestingReport(scheme, checked, real_pts, violations, first, worst, x_start, bits)


# ---------------------------------------------------------------------------
# Hermite vertex value and the large-n probe
# ---------------------------------------------------------------------------


def hermite_vertex_value(a_prev, a_cur, a_next) -> mpq:
    """Value of the n-th curve's quadratic at the deeper curve's vertex.

    Evaluates both the closed form
      -(6 d2^3 + (17 a1 + 2 d1) d2^2 + 6 a1 (2 a1 + d1) d2 + 4 a1^2 d1) / (3 a2 + a1)
    and the direct substitution; they must agree exactly, and be negative
    (the vertex sits strictly inside the outer curve).
    """
    a_p = precision.to_mpq(a_prev)
    a_c = precision.to_mpq(a_cur)
    a_n = precision.to_mpq(a_next)
    if not (a_p < a_c < a_n):
        raise HypothesisViolationError(
            f"need increasing coefficients, got {a_p}, {a_c}, {a_n}"
        )
    d1 = a_c - a_p
    d2 = a_n - a_c
    closed = -(
        6 * d2**3 + (17 * a_c + 2 * d1) * d2**2 + 6 * a_c * (2 * a_c + d1) * d2 + 4 * a_c**2 * d1
    ) / (3 * a_n + a_c)
    x2 = 3 * a_n + a_c  # vertex abscissa squared; tau_v = 2 a_{n+1} / x_v
    tau2 = 4 * a_n * a_n / x2
    xtau = 2 * a_n  # x_v * tau_v
    direct = (x2 + d1) * tau2 - (x2 + d1) * xtau + a_c * x2
    if closed != direct:
        raise ArithmeticError(
            f"closed form {closed} disagrees with direct evaluation {direct}"
        )
    return closed


@dataclass(frozen=True)
class GapProbe:
    """Branch gaps and resultant at x_hat = (3 x0 + 1)/4 for one (lam, theta, n)."""

    lam: object
    theta: object
    n: int
    x_hat: object
    gap_plus: object
    gap_minus: object
    resultant_at_xhat: object
    gap_plus_leading: object
    gap_minus_leading: object
    resultant_leading: object
    branches_real: bool
    precision_bits: int


def asymptotic_gap_probe(lam, theta, n: int, bits: int = PROBE_PRECISION) -> GapProbe:
    """Probe the near-vertex branch gaps at large n for lam in (-1/2, 0).

    Their leading terms flip sign once theta crosses 8/(4-lam); at equality
    the resultant stays positive at order n^-4.  The probe reports numeric
    evidence only; it proves nothing about intersection for all n.
    """
    lamf = float(mpfr(precision.to_mpq(lam)) if precision.is_rational(lam) else lam)
    if not -0.5 < lamf < 0:
        raise InvalidFamilyError("the probe applies to lam in (-1/2, 0)")
    scheme = UltrasphericalScheme(lam, n, theta)
    x0 = vertex(scheme, "n+1", bits).x_vertex
    with precision.context(bits):
        x_hat = (3 * x0 + 1) / 4
    bn = branches(scheme, "n", x_hat, bits)
    bn1 = branches(scheme, "n+1", x_hat, bits)
    real = bn.real_flag and bn1.real_flag
    gap_plus = gap_minus = None
    if real:
        with precision.context(bits):
            gap_plus = bn.tau_plus - bn1.tau_plus
            gap_minus = bn1.tau_minus - bn.tau_minus
    res = resultant_value(scheme, x_hat, bits)
    with precision.context(bits):
        lamr = mpfr(lam)
        thr = mpfr(theta)
        gp_lead = 3 * lamr * ((4 - lamr) * thr - 8) / (4 * (2 - thr) * mpfr(n) ** 2)
        gm_lead = lamr * ((4 + 3 * lamr) * thr - 8) / (4 * (2 - thr) * mpfr(n) ** 2)
        r_lead = mpq(9, 2) * (8 + lamr * lamr) * lamr**4 / mpfr(n) ** 4
    return GapProbe(
        lam, theta, n, x_hat, gap_plus, gap_minus, res, gp_lead, gm_lead, r_lead, real, bits
    )
