"""Working-precision arithmetic helpers on top of gmpy2.

All numeric kernels in the package run inside an explicit MPFR context so
that results are pure functions of (inputs, precision_bits).  Rational
inputs are normalised to ``gmpy2.mpq``; decimal text is converted by its
literal digits, never through binary floats.
"""

from __future__ import annotations

import re
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import IrrationalParameterError, PrecisionError

MIN_PRECISION = 53
DEFAULT_PRECISION = 128

_RATIONAL_RE = re.compile(r"^[+-]?\d+\s*/\s*\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def context(bits: int):
    """MPFR context manager at ``bits`` of precision."""
    if bits < MIN_PRECISION:
        raise PrecisionError(f"precision {bits} below the {MIN_PRECISION}-bit floor")
    return gmpy2.context(precision=int(bits))


def is_rational(value) -> bool:
    return isinstance(value, (int, mpz, mpq, Fraction)) or (
        isinstance(value, str) and (_RATIONAL_RE.match(value) or _DECIMAL_RE.match(value))
    )


def to_mpq(value) -> mpq:
    """Exact rational from int / Fraction / mpq / 'p/q' / decimal literal.

    Floats and mpfr values are rejected: exact code paths must never absorb
    a binary rounding silently.
    """
    if isinstance(value, mpq):
        return value
    if isinstance(value, (int, mpz)):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if _RATIONAL_RE.match(text):
            num, den = text.split("/")
            return mpq(int(num), int(den))
        if _DECIMAL_RE.match(text):
            return _decimal_to_mpq(text)
        raise IrrationalParameterError(f"cannot parse {value!r} as a rational")
    raise IrrationalParameterError(
        f"{type(value).__name__} value {value!r} is not an exact rational"
    )


def _decimal_to_mpq(text: str) -> mpq:
    mantissa, _, exponent = text.lower().partition("e")
    exp = int(exponent) if exponent else 0
    if "." in mantissa:
        whole, frac = mantissa.split(".")
        exp -= len(frac)
        mantissa = (whole or "0") + frac
    value = mpq(int(mantissa))
    if exp >= 0:
        return value * mpz(10) ** exp
    return value / mpz(10) ** (-exp)


def to_real(value, bits: int) -> mpfr:
    """Convert to mpfr at ``bits``; rationals are rounded once, here."""
    with context(bits):
        if isinstance(value, str):
            return mpfr(to_mpq(value))
        return mpfr(value)


def decimal_str(value, bits: int | None = None) -> str:
    """Deterministic scientific-notation decimal string.

    The digit count is derived from the precision actually carried by the
    value (or ``bits`` when given), so identical runs produce identical text.
    """
    if isinstance(value, (mpq, Fraction, int, mpz)):
        q = to_mpq(value)
        bits = bits or DEFAULT_PRECISION
        with context(bits):
            value = mpfr(q)
    if not gmpy2.is_finite(value):
        return str(value)
    prec = bits or value.precision
    digits = max(17, int(prec * 0.30103) + 1)
    mant, exp10, _ = value.digits(10, digits)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    if set(mant) == {"0"}:
        return "0"
    return f"{sign}{mant[0]}.{mant[1:]}e{exp10 - 1}"


def rational_str(value) -> str:
    q = to_mpq(value)
    return f"{q.numerator}/{q.denominator}"


def make_grid(lo, hi, size: int, bits: int, cluster_hi: bool = True,
              geo_max_exp: int = 48):
    """Ascending evaluation grid on [lo, hi] with ``size`` points.

    When ``cluster_hi`` is set the tail points hi - span*2^-k (k = 1..geo_max_exp)
    are mixed in; uniform grids provably straddle the narrow failure window
    that opens just below the right endpoint when an exponent is barely
    above sharp, so scans of that region must cluster.
    """
    if size < 2:
        raise ValueError("grid size must be at least 2")
    with context(bits):
        lo = mpfr(lo)
        hi = mpfr(hi)
        span = hi - lo
        geo = min(geo_max_exp, size // 4) if cluster_hi else 0
        uniform = size - geo
        points = [lo + span * k / (uniform - 1) for k in range(uniform)]
        points[-1] = hi
        for k in range(1, geo + 1):
            points.append(hi - span * mpfr(2) ** (-k))
        points = sorted(set(points))
    return points


def escalate_for_family(x, n: int, base_bits: int) -> int:
    """Default-precision escalation: double near the endpoint or at deep n.

    Cancellation in the weighted gap concentrates near |x| = 1, and forward
    recurrences accumulate roundoff with n, so 128 -> 256 there.
    """
    try:
        near_edge = abs(float(x)) > 0.9
    except (TypeError, OverflowError):
        near_edge = False
    if base_bits <= DEFAULT_PRECISION and (near_edge or n > 50):
        return max(base_bits, 2 * DEFAULT_PRECISION)
    return base_bits
