"""Recurrence-defined orthogonal polynomial families.

Four variants share the step form  p_{k+1} = (b_k x + c_k) p_k - a_k p_{k-1}
with p_{-1} = 0, p_0 = 1:

* ``Ultraspherical(lam)`` -- the normalised family with p_n(1) = 1, driven by
  (k + 2*lam) p_{k+1} = 2 (k + lam) x p_k - k p_{k-1}.  lam = 0 is admitted as
  the normalised limit (Chebyshev T recurrence, p_1 = x); the raw degenerate
  family never appears.
* ``SymmetricUnit(a)`` -- (1 - a_k) p_{k+1} = x p_k - a_k p_{k-1} with
  0 < a_k < 1 and a_0 = 0, so p_n(1) = 1.
* ``MonicSymmetric(a)`` -- p_{k+1} = x p_k - a_k p_{k-1} with a_k > 0 and
  a_0 = 0 (Hermite-like, possibly unbounded support).
* ``GeneralThreeTerm(a, b, c)`` -- arbitrary rational step coefficients;
  used by the exact product-identity check.

Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from gmpy2 import mpfr, mpq

from . import precision
from .errors import (
    InvalidFamilyError,
    IrrationalParameterError,
    NearZeroError,
    PrecisionError,
    SequenceRangeError,
)
from .exact_algebra import RationalPoly


# ---------------------------------------------------------------------------
# coefficient sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UltrasphericalRatio:
    """a_k = k / (2 (k + lam)); the unit-normalised recurrence ratio."""

    lam: object

    name = "ultraspherical-a"

    def is_rational(self) -> bool:
        return precision.is_rational(self.lam)

    def value(self, k: int, bits: Optional[int] = None):
        if k < 0:
            raise SequenceRangeError(f"sequence index {k} out of range")
        if k == 0:
            return mpq(0)
        if self.is_rational():
            return mpq(k) / (2 * (k + precision.to_mpq(self.lam)))
        bits = bits or precision.DEFAULT_PRECISION
        with precision.context(bits):
            return mpfr(k) / (2 * (k + mpfr(self.lam)))


@dataclass(frozen=True)
class HermiteMonicHalf:
    """a_k = k / 2, the monic Hermite recurrence coefficients."""

    name = "hermite-monic"

    def is_rational(self) -> bool:
        return True

    def value(self, k: int, bits: Optional[int] = None):
        if k < 0:
            raise SequenceRangeError(f"sequence index {k} out of range")
        return mpq(k, 2)


@dataclass(frozen=True)
class ExplicitList:
    """Finite coefficient list; indexing starts at ``start`` (default 1).

    Out-of-range queries raise instead of extrapolating.
    """

    values: tuple
    start: int = 1

    name = "list"

    def __init__(self, values, start: int = 1):
        object.__setattr__(self, "values", tuple(precision.to_mpq(v) for v in values))
        object.__setattr__(self, "start", start)

    def is_rational(self) -> bool:
        return True

    def value(self, k: int, bits: Optional[int] = None):
        i = k - self.start
        if i < 0 or i >= len(self.values):
            raise SequenceRangeError(
                f"sequence index {k} outside [{self.start}, {self.start + len(self.values) - 1}]"
            )
        return self.values[i]


SequenceSpec = Union[UltrasphericalRatio, HermiteMonicHalf, ExplicitList]


# ---------------------------------------------------------------------------
# family variants
# ---------------------------------------------------------------------------


def _check_lambda(lam):
    if precision.is_rational(lam):
        lam = precision.to_mpq(lam)
    if not lam > mpq(-1, 2):
        raise InvalidFamilyError(f"lambda = {lam} violates lambda > -1/2")
    return lam


@dataclass(frozen=True)
class Ultraspherical:
    lam: object

    def __init__(self, lam):
        object.__setattr__(self, "lam", _check_lambda(lam))

    def is_rational(self) -> bool:
        return precision.is_rational(self.lam)

    def step(self, k: int, bits: Optional[int] = None):
        if k == 0:
            return mpq(0), mpq(1), mpq(0)
        if self.is_rational():
            lam = precision.to_mpq(self.lam)
            den = k + 2 * lam
            return mpq(k) / den, 2 * (k + lam) / den, mpq(0)
        bits = bits or precision.DEFAULT_PRECISION
        with precision.context(bits):
            lam = mpfr(self.lam)
            den = k + 2 * lam
            return mpfr(k) / den, 2 * (k + lam) / den, mpfr(0)


@dataclass(frozen=True)
class SymmetricUnit:
    a: SequenceSpec

    def is_rational(self) -> bool:
        return self.a.is_rational()

    def step(self, k: int, bits: Optional[int] = None):
        if k == 0:
            return mpq(0), mpq(1), mpq(0)
        ak = self.a.value(k, bits)
        if not 0 < ak < 1:
            raise InvalidFamilyError(f"a_{k} = {ak} outside (0, 1)")
        one = mpq(1) if isinstance(ak, mpq) else mpfr(1)
        return ak / (one - ak), one / (one - ak), ak * 0


@dataclass(frozen=True)
class MonicSymmetric:
    a: SequenceSpec

    def is_rational(self) -> bool:
        return self.a.is_rational()

    def step(self, k: int, bits: Optional[int] = None):
        if k == 0:
            return mpq(0), mpq(1), mpq(0)
        ak = self.a.value(k, bits)
        if not ak > 0:
            raise InvalidFamilyError(f"a_{k} = {ak} must be positive")
        one = mpq(1) if isinstance(ak, mpq) else mpfr(1)
        return ak, one, ak * 0


@dataclass(frozen=True)
class GeneralThreeTerm:
    a: SequenceSpec
    b: SequenceSpec
    c: SequenceSpec

    def is_rational(self) -> bool:
        return self.a.is_rational() and self.b.is_rational() and self.c.is_rational()

    def step(self, k: int, bits: Optional[int] = None):
        ak = self.a.value(k, bits) if k > 0 else mpq(0)
        return ak, self.b.value(k, bits), self.c.value(k, bits)


FamilySpec = Union[Ultraspherical, SymmetricUnit, MonicSymmetric, GeneralThreeTerm]


def is_symmetric(family: FamilySpec) -> bool:
    """True when the recurrence provably has c_k = 0 (odd/even parity)."""
    return isinstance(family, (Ultraspherical, SymmetricUnit, MonicSymmetric))


def is_unit_normalized(family: FamilySpec) -> bool:
    """True when p_n(1) = 1 for every n by construction."""
    return isinstance(family, (Ultraspherical, SymmetricUnit))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalTriple:
    """Values of p_{n-1}, p_n, p_{n+1} (and optional derivatives) at x.

    Recomputing at doubled precision moves each value by a relative amount
    below 2^(-precision_bits/2); the forward recurrence at |x| <= 1 and desk
    scale n loses far fewer than half the carried bits.
    """

    n: int
    x: object
    p_prev: object
    p_cur: object
    p_next: object
    dp_cur: object = None
    dp_next: object = None
    precision_bits: int = precision.DEFAULT_PRECISION

    def ratio(self):
        """t_n = p_{n+1} / p_n."""
        return self.p_next / self.p_cur


def resolve_precision(family: FamilySpec, n: int, x, precision_bits: Optional[int]) -> int:
    if precision_bits is not None:
        if precision_bits < precision.MIN_PRECISION:
            raise PrecisionError(
                f"precision {precision_bits} below the {precision.MIN_PRECISION}-bit floor"
            )
        return precision_bits
    return precision.escalate_for_family(x, n, precision.DEFAULT_PRECISION)


def eval_triple(
    family: FamilySpec,
    n: int,
    x,
    precision_bits: Optional[int] = None,
    with_derivatives: bool = False,
) -> EvalTriple:
    """Forward-recurrence evaluation of (p_{n-1}, p_n, p_{n+1}) at x.

    Valid on all of R; derivatives are propagated through the differentiated
    recurrence alongside the values when requested.
    """
    if n < 1:
        raise InvalidFamilyError(f"need n >= 1, got {n}")
    bits = resolve_precision(family, n, x, precision_bits)
    if isinstance(x, str):
        x = precision.to_mpq(x)
    if is_unit_normalized(family) and not with_derivatives and (x == 1 or x == -1):
        # normalisation gives p_k(1) = 1 and parity gives p_k(-1) = (-1)^k exactly
        with precision.context(bits):
            if x == 1:
                vals = (mpfr(1), mpfr(1), mpfr(1))
            else:
                sgn = -1 if n % 2 else 1
                vals = (mpfr(-sgn), mpfr(sgn), mpfr(-sgn))
            return EvalTriple(n, mpfr(x), *vals, precision_bits=bits)
    with precision.context(bits):
        xr = mpfr(x)
        p_pp, p_p = mpfr(0), mpfr(1)  # p_{-1}, p_0
        d_pp, d_p = mpfr(0), mpfr(0)
        keep_prev = None
        keep_dprev = None
        for k in range(n + 1):
            a, b, c = family.step(k, bits)
            a, b, c = mpfr(a), mpfr(b), mpfr(c)
            lin = b * xr + c
            p_next = lin * p_p - a * p_pp
            if with_derivatives:
                d_next = b * p_p + lin * d_p - a * d_pp
                d_pp, d_p = d_p, d_next
            if k == n - 1:
                keep_prev = p_p  # this is p_{n-1}
            if k == n:
                keep_dprev = d_pp  # dp_n after the final shift
            p_pp, p_p = p_p, p_next
        return EvalTriple(
            n=n,
            x=xr,
            p_prev=keep_prev,
            p_cur=p_pp,
            p_next=p_p,
            dp_cur=keep_dprev if with_derivatives else None,
            dp_next=d_p if with_derivatives else None,
            precision_bits=bits,
        )


def ratio_t(family: FamilySpec, n: int, x, precision_bits: Optional[int] = None):
    """t_n(x) = p_{n+1}(x) / p_n(x), guarded against near-zero denominators."""
    if isinstance(x, str):
        x = precision.to_mpq(x)
    if is_unit_normalized(family):
        if x == 1:
            return mpfr(1)
        if x == -1:
            return mpfr(-1)  # parity: p_k(-1) = (-1)^k
    triple = eval_triple(family, n, x, precision_bits)
    bits = triple.precision_bits
    with precision.context(bits):
        guard = (abs(triple.p_prev) + abs(triple.p_next) + 1) * mpfr(2) ** (-bits + 16)
        if abs(triple.p_cur) <= guard:
            raise NearZeroError(
                f"p_{n}({x}) is numerically indistinguishable from zero", x=x
            )
        return triple.p_next / triple.p_cur


def exact_coefficients(family: FamilySpec, n: int) -> RationalPoly:
    """Exact rational coefficient vector of p_n (requires rational parameters)."""
    if n < 0:
        raise InvalidFamilyError(f"need n >= 0, got {n}")
    if not family.is_rational():
        raise IrrationalParameterError("exact coefficients need rational family parameters")
    p_pp, p_p = RationalPoly(), RationalPoly([1])
    for k in range(n):
        a, b, c = family.step(k)
        p_next = RationalPoly([c, b]) * p_p - a * p_pp
        p_pp, p_p = p_p, p_next
    return p_p


def exact_coefficients_triple(family: FamilySpec, n: int):
    """(p_{n-1}, p_n, p_{n+1}) as exact coefficient vectors, one recurrence pass."""
    if n < 1:
        raise InvalidFamilyError(f"need n >= 1, got {n}")
    if not family.is_rational():
        raise IrrationalParameterError("exact coefficients need rational family parameters")
    p_pp, p_p = RationalPoly(), RationalPoly([1])
    keep = None
    for k in range(n + 1):
        a, b, c = family.step(k)
        p_next = RationalPoly([c, b]) * p_p - a * p_pp
        if k == n - 1:
            keep = p_p
        p_pp, p_p = p_p, p_next
    return keep, p_pp, p_p


def step_table(family: FamilySpec, n_max: int, bits: int):
    """Recurrence coefficients for k = 0..n_max, rounded once to mpfr."""
    with precision.context(bits):
        return [tuple(mpfr(v) for v in family.step(k, bits)) for k in range(n_max + 1)]


def hermite_convert(triple: EvalTriple, to: str) -> EvalTriple:
    """Rescale a Hermite triple between monic and standard normalisations.

    Standard values are 2^k times the monic ones at degree k.
    """
    if to not in ("standard", "monic"):
        raise ValueError("conversion target must be 'standard' or 'monic'")
    n = triple.n
    with precision.context(triple.precision_bits):
        if to == "standard":
            factors = [mpfr(2) ** (n - 1), mpfr(2) ** n, mpfr(2) ** (n + 1)]
        else:
            factors = [mpfr(2) ** -(n - 1), mpfr(2) ** -n, mpfr(2) ** -(n + 1)]
        return EvalTriple(
            n=n,
            x=triple.x,
            p_prev=triple.p_prev * factors[0],
            p_cur=triple.p_cur * factors[1],
            p_next=triple.p_next * factors[2],
            dp_cur=None if triple.dp_cur is None else triple.dp_cur * factors[1],
            dp_next=None if triple.dp_next is None else triple.dp_next * factors[2],
            precision_bits=triple.precision_bits,
        )


def eval_triple_exact(family: FamilySpec, n: int, x) -> tuple:
    """(p_{n-1}, p_n, p_{n+1}) as exact rationals at rational x."""
    if n < 1:
        raise InvalidFamilyError(f"need n >= 1, got {n}")
    if not family.is_rational():
        raise IrrationalParameterError("exact evaluation needs rational parameters")
    xq = precision.to_mpq(x)
    p_pp, p_p = mpq(0), mpq(1)
    keep = None
    for k in range(n + 1):
        a, b, c = family.step(k)
        p_next = (b * xq + c) * p_p - a * p_pp
        if k == n - 1:
            keep = p_p
        p_pp, p_p = p_p, p_next
    return keep, p_pp, p_p
