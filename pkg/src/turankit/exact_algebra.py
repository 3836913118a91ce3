"""Exact univariate polynomial arithmetic over the rationals.

Dense polynomials with ``gmpy2.mpq`` coefficients back every exact
certificate in the package: Sturm chains for root counting, quadratic
resultants, the x -> s^v power substitution that turns fractional-power
weights into honest monomials, and synthetic deflation at s = 1.

Sturm chains are built through an integer pseudo-remainder sequence with
primitive (content-free) normalisation: every stored element is a strictly
positive rational multiple of the canonical negated remainder, which keeps
coefficient growth polynomial while leaving all sign variations intact.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from . import precision
from .errors import DegenerateCoefficientError, ZeroPolynomialError


class RationalPoly:
    """Dense polynomial with exact rational coefficients (index = power)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [precision.to_mpq(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def x(cls):
        return cls([0, 1])

    @classmethod
    def monomial(cls, power, c=1):
        return cls([0] * power + [c])

    # -- basic queries -------------------------------------------------

    @property
    def degree(self):
        """Degree, or -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def leading(self):
        if not self.coeffs:
            raise ZeroPolynomialError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if precision.is_rational(other):
            return self == RationalPoly([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "RationalPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{i}")
        return "RationalPoly(" + " + ".join(terms) + ")"

    # -- ring operations ------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RationalPoly):
            return other
        if precision.is_rational(other):
            return RationalPoly([other])
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [mpq(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [mpq(0)] * (n - len(other.coeffs))
        return RationalPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        out = [mpq(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative polynomial power")
        out = RationalPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c):
        c = precision.to_mpq(c)
        return RationalPoly([a * c for a in self.coeffs])

    def derivative(self):
        return RationalPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other):
        """Exact euclidean division over the rationals."""
        if other.is_zero():
            raise ZeroPolynomialError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return RationalPoly(), RationalPoly(rem)
        quot = [mpq(0)] * (dq + 1)
        lead = other.coeffs[-1]
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] / lead
            quot[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return RationalPoly(quot), RationalPoly(rem)

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("exact_div with nonzero remainder")
        return q

    # -- evaluation ------------------------------------------------------

    def eval_exact(self, x) -> mpq:
        x = precision.to_mpq(x)
        acc = mpq(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_real(self, x, bits: int) -> mpfr:
        with precision.context(bits):
            acc = mpfr(0)
            x = mpfr(x)
            for c in reversed(self.coeffs):
                acc = acc * x + mpfr(c)
        return acc

    # -- structural transforms -------------------------------------------

    def compose_linear(self, alpha, beta):
        """p(alpha*x + beta), exactly."""
        alpha = precision.to_mpq(alpha)
        beta = precision.to_mpq(beta)
        lin = RationalPoly([beta, alpha])
        acc = RationalPoly()
        for c in reversed(self.coeffs):
            acc = acc * lin + c
        return acc

    def substitute_power(self, v: int):
        """p(s^v): spaces the coefficient vector v apart."""
        if v < 1:
            raise ValueError("substitution power must be >= 1")
        if not self.coeffs:
            return RationalPoly()
        out = [mpq(0)] * (v * self.degree + 1)
        for i, c in enumerate(self.coeffs):
            out[v * i] = c
        return RationalPoly(out)

    def cauchy_bound(self) -> mpq:
        """B with all real roots in (-B, B]."""
        lead = abs(self.leading())
        m = max((abs(c) for c in self.coeffs[:-1]), default=mpq(0))
        return 1 + m / lead


# -- integer primitive layer (speed backbone of the Sturm machinery) -----


def _to_int_primitive(coeffs):
    """Positive-rational rescale of mpq coefficients to primitive mpz."""
    if not coeffs:
        return []
    den = mpz(1)
    for c in coeffs:
        den = den * c.denominator // gmpy2.gcd(den, c.denominator)
    ints = [mpz(c.numerator * (den // c.denominator)) for c in coeffs]
    return _int_primitive_part(ints)


def _int_primitive_part(ints):
    g = mpz(0)
    for c in ints:
        g = gmpy2.gcd(g, c)
    if g > 1:
        return [c // g for c in ints]
    return list(ints)


def _int_prem_signed(a, b):
    """Pseudo-remainder of a by b as a *positive* integer multiple of rem(a, b)."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    steps = 0
    while len(r) - 1 >= db and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for j in range(db + 1):
            r[shift + j] -= lr * b[j]
        r.pop()
        steps += 1
        while r and r[-1] == 0:
            r.pop()
    if lb < 0 and steps % 2 == 1:
        r = [-c for c in r]
    return r


def _int_sturm_chain(p_ints, dp_ints):
    chain = [_int_primitive_part(p_ints), _int_primitive_part(dp_ints)]
    while chain[-1]:
        rem = _int_prem_signed(chain[-2], chain[-1])
        if not rem:
            break
        chain.append(_int_primitive_part([-c for c in rem]))
    return chain


def _int_eval_sign(ints, point: mpq) -> int:
    """Sign of the polynomial at a rational point, exact integer arithmetic."""
    a, b = mpz(point.numerator), mpz(point.denominator)
    acc = mpz(ints[-1])
    bp = mpz(1)
    for c in reversed(ints[:-1]):
        bp *= b
        acc = acc * a + c * bp
    return (acc > 0) - (acc < 0)


def _sign_variations(chain, point: mpq) -> int:
    signs = [s for s in (_int_eval_sign(p, point) for p in chain if p) if s != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u * v < 0)


@dataclass(frozen=True)
class SturmChain:
    """Sturm chain: p, p', then primitive-normalised negated remainders.

    Each element is a positive rational multiple of the canonical negated
    remainder of its two predecessors (content normalisation keeps the
    integers small); sign variations are unchanged by positive scaling.
    ``degenerate_flag`` marks that a square-free reduction was applied to
    the input before the chain was built.
    """

    polys: tuple
    degenerate_flag: bool

    def variations(self, point) -> int:
        q = precision.to_mpq(point)
        ints = [_to_int_primitive(p.coeffs) for p in self.polys]
        return _sign_variations(ints, q)


def sturm_chain(p: RationalPoly, squarefree: bool = True) -> SturmChain:
    """Build the Sturm chain of p, square-free-reducing first by default."""
    if p.is_zero():
        raise ZeroPolynomialError("Sturm chain of the zero polynomial")
    degenerate = False
    if p.degree == 0:
        return SturmChain((p,), False)
    ints = _to_int_primitive(p.coeffs)
    dints = _to_int_primitive(p.derivative().coeffs)
    chain = _int_sturm_chain(ints, dints)
    if squarefree and len(chain[-1]) - 1 > 0:
        # last PRS element is (a positive multiple of) gcd(p, p'); strip it
        degenerate = True
        g = RationalPoly(chain[-1])
        p = p.exact_div(g)
        if p.degree == 0:
            return SturmChain((p,), True)
        ints = _to_int_primitive(p.coeffs)
        dints = _to_int_primitive(p.derivative().coeffs)
        chain = _int_sturm_chain(ints, dints)
    polys = tuple(RationalPoly(c) for c in chain)
    return SturmChain(polys, degenerate)


def sturm_count_roots(p: RationalPoly, lo, hi) -> int:
    """Distinct real roots of p in the half-open interval (lo, hi]."""
    lo = precision.to_mpq(lo)
    hi = precision.to_mpq(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    if p.is_zero():
        raise ZeroPolynomialError("root counting needs a nonzero polynomial")
    if p.degree == 0:
        return 0
    chain = sturm_chain(p)
    if chain.polys[0].degree == 0:
        return 0
    ints = [_to_int_primitive(q.coeffs) for q in chain.polys]
    return _sign_variations(ints, lo) - _sign_variations(ints, hi)


def poly_gcd(p: RationalPoly, q: RationalPoly) -> RationalPoly:
    """gcd over the rationals, returned primitive with positive leading coefficient."""
    if p.is_zero():
        return _positive_primitive(q)
    if q.is_zero():
        return _positive_primitive(p)
    a = _to_int_primitive(p.coeffs)
    b = _to_int_primitive(q.coeffs)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _int_prem_signed(a, b)
        a, b = b, _int_primitive_part(r)
    return _positive_primitive(RationalPoly(a))


def _positive_primitive(p: RationalPoly) -> RationalPoly:
    if p.is_zero():
        return p
    ints = _to_int_primitive(p.coeffs)
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return RationalPoly(ints)


def squarefree_decomposition(p: RationalPoly):
    """Yun decomposition: list [f1, f2, ...] with p = c * f1 * f2^2 * f3^3 ..."""
    if p.is_zero():
        raise ZeroPolynomialError("square-free decomposition of zero")
    if p.degree == 0:
        return []
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return [_positive_primitive(p)]
    c = p.exact_div(g)
    d = p.derivative().exact_div(g) - c.derivative()
    factors = []
    while c.degree > 0:
        h = poly_gcd(c, d)
        factors.append(h)
        c = c.exact_div(h)
        d = d.exact_div(h) - c.derivative()
    return factors


def odd_multiplicity_part(p: RationalPoly) -> RationalPoly:
    """Product of the square-free factors of odd multiplicity.

    p changes sign exactly at the real roots of this part, so counting its
    roots certifies the absence of sign changes even when p touches zero.
    """
    out = RationalPoly([1])
    for i, f in enumerate(squarefree_decomposition(p), start=1):
        if i % 2 == 1:
            out = out * f
    return out


def deflate_at_one(p: RationalPoly):
    """Write p(s) = (1-s)^m * q(s) with q(1) != 0; returns (m, q)."""
    if p.is_zero():
        raise ZeroPolynomialError("cannot deflate the zero polynomial")
    m = 0
    q = p
    while q.eval_exact(1) == 0:
        # synthetic division by (s - 1), then negate for the (1 - s) factor
        cs = q.coeffs
        h = [mpq(0)] * q.degree
        acc = mpq(0)
        for i in range(q.degree, 0, -1):
            acc = cs[i] + acc
            h[i - 1] = acc
        q = RationalPoly([-c for c in h])
        m += 1
    return m, q


def resultant_quadratics(q1, q2):
    """Resultant of two quadratics a*t^2 + b*t + c from coefficient triples.

    Closed form (a1 c2 - a2 c1)^2 - (a1 b2 - a2 b1)(b1 c2 - b2 c1); the
    coefficients may be rationals, reals, or RationalPoly values, and the
    result lives in the same ring.
    """
    a1, b1, c1 = q1
    a2, b2, c2 = q2
    for lead in (a1, a2):
        if isinstance(lead, RationalPoly):
            if lead.is_zero():
                raise DegenerateCoefficientError("quadratic with zero leading coefficient")
        elif lead == 0:
            raise DegenerateCoefficientError("quadratic with zero leading coefficient")
    ac = a1 * c2 - a2 * c1
    ab = a1 * b2 - a2 * b1
    bc = b1 * c2 - b2 * c1
    return ac * ac - ab * bc
