"""Weighted Turan gaps, exponent rules, and the exact audit quantities.

The central object is the gap

    delta_n(x) = weight(x) * p_n(x)^2 - p_{n-1}(x) * p_{n+1}(x)

where the weight is |x|^theta for the power rules or x^2 / (x^2 + a_n -
a_{n-1}) for monic Hermite-like families.  The exponent rules:

* ultraspherical sharp rule: theta = 4/(2-lam) on -1/2 < lam <= 0 and
  theta = 2/(1+2*lam) on lam >= 0 (continuous, equal to 2 at lam = 0);
* infimum rule for decreasing a_n in (1/2, 1):
  theta = inf_n 2*log((1-a_n)a_{n+1} / ((1-a_{n+1})a_n))
               / log(4*(1-a_n)*a_{n+1}^2 / a_n).

The audit helpers re-derive, exactly where possible, the algebraic facts
the positivity argument rests on: the resultant factorisations in the
power-weight symbol w, the R_n - R_0 decomposition, and the sign quantities
rho, eta, D_n and g.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import gmpy2
from gmpy2 import mpfr, mpq

from . import precision
from .errors import (
    HypothesisViolationError,
    InvalidFamilyError,
    IrrationalParameterError,
)
from .exact_algebra import RationalPoly
from .families import (
    FamilySpec,
    MonicSymmetric,
    Ultraspherical,
    eval_triple,
    eval_triple_exact,
    hermite_convert,
    is_symmetric,
)


# ---------------------------------------------------------------------------
# exponent rules
# ---------------------------------------------------------------------------


def theta_ultraspherical(lam):
    """Piecewise sharp exponent: 4/(2-lam) for lam <= 0, 2/(1+2*lam) for lam >= 0.

    Exact rational output for rational lam; always in (0, 2], continuous at 0.
    """
    if precision.is_rational(lam):
        lam = precision.to_mpq(lam)
        if not lam > mpq(-1, 2):
            raise InvalidFamilyError(f"lambda = {lam} violates lambda > -1/2")
        if lam <= 0:
            return 4 / (2 - lam)
        return 2 / (1 + 2 * lam)
    if not lam > -0.5:
        raise InvalidFamilyError(f"lambda = {lam} violates lambda > -1/2")
    lam = mpfr(lam)
    if lam <= 0:
        return 4 / (2 - lam)
    return 2 / (1 + 2 * lam)


def infimum_term(a, n: int, bits: int = precision.DEFAULT_PRECISION):
    """F(n), the n-th term of the infimum exponent formula."""
    an = _a_value(a, n, bits)
    an1 = _a_value(a, n + 1, bits)
    _check_decreasing_pair(n, an, an1)
    with precision.context(bits):
        an = mpfr(an)
        an1 = mpfr(an1)
        num = 2 * gmpy2.log(((1 - an) * an1) / ((1 - an1) * an))
        den = gmpy2.log(4 * (1 - an) * an1 * an1 / an)
        return num / den


def _check_decreasing_pair(n, an, an1):
    if not (mpq(1, 2) < an < 1 and mpq(1, 2) < an1 < 1):
        raise HypothesisViolationError(
            f"a_{n} = {an}, a_{n + 1} = {an1} must lie strictly in (1/2, 1)"
        )
    if not an1 < an:
        raise HypothesisViolationError(f"a_{n + 1} = {an1} must decrease below a_{n} = {an}")


@dataclass(frozen=True)
class ThetaInfimumResult:
    theta: object
    argmin_n: object  # index of the finite minimum, or "limit"
    f_values: tuple
    analytic_limit: object = None
    finite_min_exceeds_limit: Optional[bool] = None


def theta_infimum(a, horizon: int, bits: int = precision.DEFAULT_PRECISION) -> ThetaInfimumResult:
    """Minimum of F(n) over n = 1..horizon, plus the analytic limit when known.

    For the ultraspherical ratio sequence a_n = n/(2(n+lam)) the infimum over
    all n equals the limit 4/(2-lam); the finite-horizon minimum always sits
    above it (F decreases), and the result says so explicitly.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    values = []
    best = None
    best_n = None
    for n in range(1, horizon + 1):
        f = infimum_term(a, n, bits)
        values.append(f)
        if best is None or f < best:
            best, best_n = f, n
    limit = None
    exceeds = None
    from .families import UltrasphericalRatio

    if isinstance(a, UltrasphericalRatio):
        lam = a.lam
        if precision.is_rational(lam):
            limit = 4 / (2 - precision.to_mpq(lam))
        else:
            with precision.context(bits):
                limit = 4 / (2 - mpfr(lam))
        exceeds = bool(best > limit)
    theta = best if limit is None else min(best, limit)
    argmin = best_n if limit is None or best <= limit else "limit"
    return ThetaInfimumResult(theta, argmin, tuple(values), limit, exceeds)


# ---------------------------------------------------------------------------
# weight rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UltrasphericalSharp:
    """|x|^theta with the piecewise sharp ultraspherical exponent."""

    lam: object

    def theta(self, bits: int = precision.DEFAULT_PRECISION):
        return theta_ultraspherical(self.lam)


@dataclass(frozen=True)
class InfimumRule:
    """|x|^theta with theta from the decreasing-sequence infimum formula."""

    a: object
    horizon: int = 64

    def theta(self, bits: int = precision.DEFAULT_PRECISION):
        return theta_infimum(self.a, self.horizon, bits).theta


@dataclass(frozen=True)
class HermiteFactor:
    """Weight x^2 / (x^2 + a_n - a_{n-1}); not a pure power of |x|.

    ``standard`` evaluates the gap in the standard Hermite normalisation
    (values scaled by 2^k) instead of the monic one.
    """

    standard: bool = False

    def theta(self, bits: int = precision.DEFAULT_PRECISION):
        return None


@dataclass(frozen=True)
class FixedTheta:
    """|x|^theta with a caller-chosen exponent in (0, 2]."""

    value: object

    def theta(self, bits: int = precision.DEFAULT_PRECISION):
        return self.value


ThetaRule = object  # union of the four rule dataclasses above


def _a_value(a, k: int, bits: Optional[int] = None):
    """Sequence value with the a_0 = 0 convention."""
    if k == 0:
        return mpq(0)
    return a.value(k, bits)


def power_weight(theta, x, bits: int):
    """|x|^theta at working precision; 0 at x = 0 (theta > 0), exact 1 at |x| = 1."""
    with precision.context(bits):
        ax = abs(mpfr(x))
        if ax == 0:
            return mpfr(0)
        if ax == 1:
            return mpfr(1)
        return gmpy2.exp(mpfr(theta) * gmpy2.log(ax))


def weight_value(rule, family: FamilySpec, n: int, x, bits: int):
    if isinstance(rule, HermiteFactor):
        if not isinstance(family, MonicSymmetric):
            raise InvalidFamilyError("the Hermite factor weight needs a MonicSymmetric family")
        d = _a_value(family.a, n) - _a_value(family.a, n - 1)
        with precision.context(bits):
            xr = mpfr(x)
            return xr * xr / (xr * xr + mpfr(d))
    return power_weight(rule.theta(bits), x, bits)


@dataclass(frozen=True)
class TuranSample:
    """One evaluation record of the weighted gap."""

    family: FamilySpec
    n: int
    theta_rule: object
    x: object
    delta: object
    backend: str
    precision_bits: int
    weight: object = None


def turan_delta(
    family: FamilySpec,
    n: int,
    rule,
    x,
    precision_bits: Optional[int] = None,
    exact: bool = False,
) -> TuranSample:
    """weight(x) * p_n^2 - p_{n-1} p_{n+1} at working precision.

    With ``exact`` the gap is computed in rational arithmetic instead
    (possible whenever the weight is rational at x, see turan_delta_exact).
    """
    if n < 1:
        raise InvalidFamilyError(f"need n >= 1, got {n}")
    if exact:
        xq = precision.to_mpq(x)
        delta = turan_delta_exact(family, n, rule, xq)
        return TuranSample(family, n, rule, xq, delta, "exact", 0)
    triple = eval_triple(family, n, x, precision_bits)
    bits = triple.precision_bits
    if isinstance(rule, HermiteFactor) and rule.standard:
        triple = hermite_convert(triple, "standard")
    w = weight_value(rule, family, n, x, bits)
    with precision.context(bits):
        delta = w * triple.p_cur * triple.p_cur - triple.p_prev * triple.p_next
    return TuranSample(family, n, rule, triple.x, delta, "numeric", bits, w)


def turan_delta_exact(family: FamilySpec, n: int, rule, x) -> mpq:
    """Exact rational gap; needs a weight that is rational at rational x.

    Works for the Hermite factor (a rational function of x) and for power
    rules with integer exponent or |x| in {0, 1}.
    """
    xq = precision.to_mpq(x)
    p_prev, p_cur, p_next = eval_triple_exact(family, n, xq)
    if isinstance(rule, HermiteFactor):
        if rule.standard:
            s = mpq(2) ** (n - 1), mpq(2) ** n, mpq(2) ** (n + 1)
            p_prev, p_cur, p_next = p_prev * s[0], p_cur * s[1], p_next * s[2]
        d = _a_value(family.a, n) - _a_value(family.a, n - 1)
        w = xq * xq / (xq * xq + precision.to_mpq(d))
    else:
        theta = precision.to_mpq(rule.theta())
        if abs(xq) == 1 or xq == 0:
            w = abs(xq)
        elif theta.denominator == 1:
            w = abs(xq) ** int(theta)
        else:
            raise IrrationalParameterError(
                f"|{xq}|^{theta} is not rational; use the numeric backend"
            )
    return w * p_cur * p_cur - p_prev * p_next


# ---------------------------------------------------------------------------
# exact product identity and the universal quadratic bound
# ---------------------------------------------------------------------------


def identity_residual(family: FamilySpec, n: int, x) -> mpq:
    """Residual of the exact square identity for any three-term recurrence.

    ((x b_n + c_n)^2 / (4 a_n)) p_n^2 - p_{n-1} p_{n+1}
        - (p_{n+1} - a_n p_{n-1})^2 / (4 a_n)
    is identically zero; this evaluates it in exact rational arithmetic.
    """
    if n < 1:
        raise InvalidFamilyError(f"need n >= 1, got {n}")
    if not family.is_rational():
        raise IrrationalParameterError("identity residual needs rational coefficients")
    xq = precision.to_mpq(x)
    p_prev, p_cur, p_next = eval_triple_exact(family, n, xq)
    a, b, c = family.step(n)
    a = precision.to_mpq(a)
    if a == 0:
        raise InvalidFamilyError(f"a_{n} = 0 makes the identity degenerate")
    lin = precision.to_mpq(b) * xq + precision.to_mpq(c)
    lhs = lin * lin / (4 * a) * p_cur * p_cur - p_prev * p_next
    rhs = (p_next - a * p_prev) ** 2 / (4 * a)
    return lhs - rhs


def universal_bound_check(lam, n: int, x, bits: int = precision.DEFAULT_PRECISION):
    """Weight 1 + lam^2/(n(n+2lam)) and the value of the x^2-weighted gap.

    The returned gap is nonnegative for every real x; with plain weight x^2
    that is possible only at lam = 0 (Chebyshev).
    """
    fam = Ultraspherical(lam)
    if precision.is_rational(lam):
        lamq = precision.to_mpq(lam)
        weight = 1 + lamq * lamq / (n * (n + 2 * lamq))
    else:
        with precision.context(bits):
            lamr = mpfr(lam)
            weight = 1 + lamr * lamr / (n * (n + 2 * lamr))
    triple = eval_triple(fam, n, x, bits)
    with precision.context(bits):
        xr = mpfr(triple.x)
        delta = mpfr(weight) * xr * xr * triple.p_cur * triple.p_cur - triple.p_prev * triple.p_next
    return weight, delta


@dataclass(frozen=True)
class AskeyReport:
    n_max: int
    grid_size: int
    min_delta: object
    argmin_x: object
    argmin_n: int
    violations: int
    hypothesis_edge: bool
    precision_bits: int


def askey_turan_check(a, n_max: int, x_grid, bits: int = precision.DEFAULT_PRECISION) -> AskeyReport:
    """Plain (unweighted) Turan check for monic families with increasing a_n."""
    x_grid = list(x_grid)
    edge = False
    prev = mpq(0)
    for k in range(1, n_max + 2):
        ak = _a_value(a, k, bits)
        if ak < prev:
            raise HypothesisViolationError(f"a_{k} = {ak} decreases; increasing a_n required")
        if ak == prev:
            edge = True
        prev = ak
    fam = MonicSymmetric(a)
    min_delta = None
    argmin_x = None
    argmin_n = None
    violations = 0
    with precision.context(bits):
        threshold = -(mpfr(2) ** (-bits // 3))
    for n in range(1, n_max + 1):
        for x in x_grid:
            triple = eval_triple(fam, n, x, bits)
            with precision.context(bits):
                delta = triple.p_cur * triple.p_cur - triple.p_prev * triple.p_next
            if min_delta is None or delta < min_delta:
                min_delta, argmin_x, argmin_n = delta, triple.x, n
            if delta < threshold:
                violations += 1
    return AskeyReport(n_max, len(x_grid), min_delta, argmin_x, argmin_n, violations, edge, bits)


# ---------------------------------------------------------------------------
# audit quantities: the algebra the positivity proof leans on
# ---------------------------------------------------------------------------


def rho_value(lam, x, bits: int = precision.DEFAULT_PRECISION):
    """rho(x) = 1 - 2(1+lam) x^2 + (1+2 lam) x^(2+theta) at the sharp exponent.

    Equals R_0(x, theta)/(4 lam^2); positive on (0,1) with rho(1) = 0.
    """
    theta = theta_ultraspherical(lam)
    xr = precision.to_real(x, bits)
    with precision.context(bits):
        lamr = mpfr(lam)
        return 1 - 2 * (1 + lamr) * xr * xr + (1 + 2 * lamr) * xr * xr * power_weight(
            theta, xr, bits
        )


def eta_value(lam, theta, x, bits: int = precision.DEFAULT_PRECISION):
    """eta(x) = 1 - (3+lam) x^2 + (1 + x^2 + lam x^2) x^theta."""
    xr = precision.to_real(x, bits)
    with precision.context(bits):
        lamr = mpfr(lam)
        w = power_weight(theta, xr, bits)
        return 1 - (3 + lamr) * xr * xr + (1 + xr * xr + lamr * xr * xr) * w


def dn_value(lam, n: int, theta, x, bits: int = precision.DEFAULT_PRECISION):
    """D_n(x, theta) = n(n+2lam+1)(1-w)(1-2x+w)(1+2x+w) + 4 lam eta(x), w = x^theta."""
    xr = precision.to_real(x, bits)
    with precision.context(bits):
        lamr = mpfr(lam)
        w = power_weight(theta, xr, bits)
        lead = n * (n + 2 * lamr + 1) * (1 - w) * (1 - 2 * xr + w) * (1 + 2 * xr + w)
        return lead + 4 * lamr * eta_value(lam, theta, x, bits)


def g_value(n: int, lam, bits: int = precision.DEFAULT_PRECISION):
    """g(n, lam) = 2 ln((n+1)(n+2lam+1)/(n+lam+1)^2) - lam ln(n(n+2lam+1)/((n+1)(n+2lam))).

    Positive for lam in (-1/2, 0): it decreases in n toward the limit 0.
    """
    with precision.context(bits):
        lamr = mpfr(lam)
        t1 = gmpy2.log((n + 1) * (n + 2 * lamr + 1) / (n + lamr + 1) ** 2)
        t2 = gmpy2.log(n * (n + 2 * lamr + 1) / ((n + 1) * (n + 2 * lamr)))
        return 2 * t1 - lamr * t2


def g_partial_n(n: int, lam, bits: int = precision.DEFAULT_PRECISION):
    """Closed form of d g / d n; strictly negative on the admissible range."""
    with precision.context(bits):
        lamr = mpfr(lam)
        num = -2 * lamr * lamr * (3 * n + 2 * lamr * lamr + 3 * lamr + 1)
        den = n * (n + 1) * (n + lamr + 1) * (n + 2 * lamr) * (n + 2 * lamr + 1)
        return num / den


def ultraspherical_resultant_coeffs(lam, n: int):
    """A, B, C of the branch-curve resultant as polynomials in w = x^theta.

    R_n(x, theta) = A^2 - 4 x^2 B C with
      A = n(n+2lam+1) w^2 - (n+1)(n+2lam)
      B = n(n+lam+1) w   - (n+1)(n+lam)
      C = (n+lam)(n+2lam+1) w - (n+lam+1)(n+2lam)
    """
    lam = precision.to_mpq(lam)
    A = RationalPoly([-(n + 1) * (n + 2 * lam), 0, n * (n + 2 * lam + 1)])
    B = RationalPoly([-(n + 1) * (n + lam), n * (n + lam + 1)])
    C = RationalPoly([-(n + lam + 1) * (n + 2 * lam), (n + lam) * (n + 2 * lam + 1)])
    return A, B, C


def case2_factorization_residual(lam, n: int) -> RationalPoly:
    """Exact residual of the negative-lambda resultant bound factorisation.

    A^2 - 4 w B C  =  z (n z + 2 lam) ((n+2lam+1) z - 2 lam) (n (n+2lam+1) z + 2 lam)
    with z = 1 - w.  The last factor carries + 2 lam: with - 2 lam the two
    sides differ (checked symbolically), so the corrected sign is used here.
    Returns the zero polynomial when the identity holds.
    """
    lam = precision.to_mpq(lam)
    A, B, C = ultraspherical_resultant_coeffs(lam, n)
    w = RationalPoly.x()
    lhs = A * A - 4 * w * B * C
    z = RationalPoly([1, -1])
    rhs = z * (n * z + 2 * lam) * ((n + 2 * lam + 1) * z - 2 * lam) * (
        n * (n + 2 * lam + 1) * z + 2 * lam
    )
    return lhs - rhs


def symmetric_unit_resultant_coeffs(a_n, a_n1):
    """A, B, C in w = x^theta for the unit-normalised scheme's resultant.

    R_n(x, theta) = A^2 - x^2 B C with
      A = a_n (1-a_{n+1}) w^2 - (1-a_n) a_{n+1}
      B = a_{n+1} - a_n w
      C = 1 - a_n - (1-a_{n+1}) w
    """
    a_n = precision.to_mpq(a_n)
    a_n1 = precision.to_mpq(a_n1)
    A = RationalPoly([-(1 - a_n) * a_n1, 0, a_n * (1 - a_n1)])
    B = RationalPoly([a_n1, -a_n])
    C = RationalPoly([1 - a_n, -(1 - a_n1)])
    return A, B, C


def symmetric_unit_factorization_residual(a_n, a_n1) -> RationalPoly:
    """Exact residual of the decreasing-sequence resultant bound factorisation.

    A^2 - w B C = (1-w)(1 - a_n - a_n w)(a_{n+1} - (1-a_{n+1}) w)
                  (a_{n+1}(1-a_n) - a_n (1-a_{n+1}) w)
    Returns the zero polynomial when the identity holds.
    """
    a_n = precision.to_mpq(a_n)
    a_n1 = precision.to_mpq(a_n1)
    A, B, C = symmetric_unit_resultant_coeffs(a_n, a_n1)
    w = RationalPoly.x()
    lhs = A * A - w * B * C
    rhs = (
        RationalPoly([1, -1])
        * RationalPoly([1 - a_n, -a_n])
        * RationalPoly([a_n1, -(1 - a_n1)])
        * RationalPoly([a_n1 * (1 - a_n), -a_n * (1 - a_n1)])
    )
    return lhs - rhs


def dn_decomposition_residual(lam, n: int, x) -> RationalPoly:
    """Exact residual (in w) of R_n - R_0 = n (n+2lam+1) (1-w) D_n at rational x."""
    lam = precision.to_mpq(lam)
    xq = precision.to_mpq(x)

    def resultant_poly(k):
        A, B, C = ultraspherical_resultant_coeffs(lam, k)
        return A * A - (4 * xq * xq) * B * C

    lhs = resultant_poly(n) - resultant_poly(0)
    eta = RationalPoly([1 - (3 + lam) * xq * xq, 1 + xq * xq + lam * xq * xq])
    one_minus_w = RationalPoly([1, -1])
    dn = (
        n * (n + 2 * lam + 1) * one_minus_w
        * RationalPoly([1 - 2 * xq, 1])
        * RationalPoly([1 + 2 * xq, 1])
        + 4 * lam * eta
    )
    return lhs - n * (n + 2 * lam + 1) * one_minus_w * dn


@dataclass(frozen=True)
class AuditReport:
    """Numeric sign checks plus exact factorisation residuals for one (lam, n)."""

    lam: object
    n: int
    theta: object
    x: object
    quantities: dict = field(default_factory=dict)
    signs_ok: bool = True
    residuals_zero: Optional[bool] = None


def audit_quantities(
    lam,
    n: int,
    theta=None,
    x="1/2",
    bits: int = precision.DEFAULT_PRECISION,
    symbolic: bool = True,
) -> AuditReport:
    """Evaluate the proof quantities and verify the claimed signs.

    For lam > 0: rho(x) > 0, eta(x) > 0 and D_n(x, theta) > 0 on (0, 1).
    For lam < 0: g(n, lam) > 0 with dg/dn < 0.  With ``symbolic`` set and
    rational lam the two resultant factorisations and the R_n - R_0
    decomposition are also checked as exact zero polynomials in w.
    """
    if theta is None:
        theta = theta_ultraspherical(lam)
    quantities = {}
    ok = True
    numeric_lam = float(mpfr(precision.to_mpq(lam)) if precision.is_rational(lam) else lam)
    if numeric_lam > 0:
        rho = rho_value(lam, x, bits)
        eta = eta_value(lam, theta, x, bits)
        dn = dn_value(lam, n, theta, x, bits)
        quantities.update(rho=rho, eta=eta, dn=dn)
        ok = ok and rho > 0 and eta > 0 and dn > 0
    elif numeric_lam < 0:
        g = g_value(n, lam, bits)
        gp = g_partial_n(n, lam, bits)
        quantities.update(g=g, g_partial_n=gp)
        ok = ok and g > 0 and gp < 0
    residuals_zero = None
    if symbolic and precision.is_rational(lam):
        lamq = precision.to_mpq(lam)
        res_case2 = case2_factorization_residual(lamq, n)
        a_n = mpq(n) / (2 * (n + lamq))
        a_n1 = mpq(n + 1) / (2 * (n + 1 + lamq))
        res_sym = symmetric_unit_factorization_residual(a_n, a_n1) if n >= 1 else RationalPoly()
        res_dn = dn_decomposition_residual(lamq, n, precision.to_mpq(x))
        residuals_zero = res_case2.is_zero() and res_sym.is_zero() and res_dn.is_zero()
        quantities.update(
            case2_residual_degree=res_case2.degree,
            symmetric_residual_degree=res_sym.degree,
            dn_residual_degree=res_dn.degree,
        )
    return AuditReport(lam, n, theta, x, quantities, ok, residuals_zero)
