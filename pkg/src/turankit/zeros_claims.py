"""Zero isolation for the normalised ultraspherical family and the vertex
location claims tied to them.

Zeros are isolated by sign-change bisection seeded through interlacing:
the zeros of G_{k-1} together with the endpoints +-1 bracket exactly one
zero of G_k each, so every bracket is unconditionally correct.  An exact
Sturm-based backend over the rational coefficient vector cross-checks the
bisection for rational lam.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpfr, mpq

from . import precision
from .curves import UltrasphericalScheme, vertex
from .errors import InvalidFamilyError, TurankitError
from .exact_algebra import _sign_variations, _to_int_primitive, sturm_chain
from .families import Ultraspherical, eval_triple, exact_coefficients
from .turan_core import theta_ultraspherical

DEFAULT_TOL = mpq(1, 10**20)
_MAX_BISECTIONS = 400


@dataclass(frozen=True)
class ZeroSet:
    """All real zeros of G_degree, sorted descending, to absolute tolerance."""

    lam: object
    degree: int
    zeros: tuple
    method: str
    tolerance: object
    precision_bits: int


def _value(family, k: int, x, bits: int):
    """G_k(x) by forward recurrence."""
    if k == 0:
        return mpfr(1)
    return eval_triple(family, k, x, bits).p_cur if k >= 1 else mpfr(1)


def _bisect_zero(family, k: int, lo, hi, tol, bits: int):
    with precision.context(bits):
        lo = mpfr(lo)
        hi = mpfr(hi)
        flo = _value(family, k, lo, bits)
        fhi = _value(family, k, hi, bits)
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        if (flo > 0) == (fhi > 0):
            raise TurankitError(
                f"bracket ({lo}, {hi}) lost the sign change for degree {k}"
            )
        for _ in range(_MAX_BISECTIONS):
            mid = (lo + hi) / 2
            if hi - lo < tol:
                return mid
            fm = _value(family, k, mid, bits)
            if fm == 0:
                return mid
            if (fm > 0) == (fhi > 0):
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
    raise TurankitError(
        f"zero refinement for degree {k} did not reach tol {tol} in {_MAX_BISECTIONS} steps"
    )


@lru_cache(maxsize=512)
def _zeros_cached(lam_key, degree: int, tol_key, bits: int):
    lam = lam_key
    tol = precision.to_mpq(tol_key) if isinstance(tol_key, str) else tol_key
    family = Ultraspherical(lam)
    if degree == 1:
        with precision.context(bits):
            return (mpfr(0),)
    inner = _zeros_cached(lam_key, degree - 1, tol_key, bits)
    with precision.context(bits):
        tol_r = mpfr(tol)
        brackets = [mpfr(1)] + list(inner) + [mpfr(-1)]
    zeros = []
    for i in range(degree):
        hi, lo = brackets[i], brackets[i + 1]
        zeros.append(_bisect_zero(family, degree, lo, hi, tol_r, bits))
    return tuple(zeros)


def isolate_zeros(
    lam,
    degree: int,
    tol=DEFAULT_TOL,
    bits: int = precision.DEFAULT_PRECISION,
    method: str = "bisection",
) -> ZeroSet:
    """Zeros of G_degree to absolute tolerance ``tol``.

    ``bisection`` refines interlacing brackets (no derivative steps, so the
    enclosure never escapes); ``exact-sturm`` isolates on the exact rational
    coefficient vector first and needs rational lam.
    """
    if degree < 1:
        raise InvalidFamilyError(f"need degree >= 1, got {degree}")
    Ultraspherical(lam)  # validates lam > -1/2
    tol = precision.to_mpq(tol) if not isinstance(tol, mpq) else tol
    if method == "bisection":
        lam_key = precision.to_mpq(lam) if precision.is_rational(lam) else lam
        try:
            zeros = _zeros_cached(lam_key, degree, str(tol), bits)
        except TurankitError:
            zeros = _zeros_cached(lam_key, degree, str(tol), 2 * bits)
            bits = 2 * bits
        return ZeroSet(lam, degree, zeros, "bisection", tol, bits)
    if method == "exact-sturm":
        return _isolate_sturm(lam, degree, tol, bits)
    raise ValueError(f"unknown method {method!r}")


def _isolate_sturm(lam, degree: int, tol, bits: int) -> ZeroSet:
    poly = exact_coefficients(Ultraspherical(lam), degree)
    chain = sturm_chain(poly)
    ints = [_to_int_primitive(q.coeffs) for q in chain.polys]

    def count(lo, hi):
        return _sign_variations(ints, lo) - _sign_variations(ints, hi)

    total = count(mpq(-1), mpq(1))
    if total != degree:
        raise TurankitError(f"expected {degree} zeros in (-1, 1], counted {total}")
    intervals = [(mpq(-1), mpq(1), total)]
    isolated = []
    while intervals:
        lo, hi, c = intervals.pop()
        if c == 0:
            continue
        if c == 1 and hi - lo < tol:
            isolated.append((lo + hi) / 2)
            continue
        mid = (lo + hi) / 2
        if poly.eval_exact(mid) == 0:
            # nudge the split point off the root
            mid = lo + (hi - lo) * mpq(13, 27)
        left = count(lo, mid)
        intervals.append((lo, mid, left))
        intervals.append((mid, hi, c - left))
    isolated.sort(reverse=True)
    with precision.context(bits):
        zeros = tuple(mpfr(z) for z in isolated)
    return ZeroSet(lam, degree, zeros, "exact-sturm", tol, bits)


# ---------------------------------------------------------------------------
# vertex-vs-zeros claim
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexZerosReport:
    lam: object
    n: int
    theta: object
    x_tilde: object
    x1: object
    x2: object
    verdict: bool
    situation: str
    precision_bits: int


def vertex_vs_zeros(
    lam, n: int, bits: int = precision.DEFAULT_PRECISION, tol=DEFAULT_TOL
) -> VertexZerosReport:
    """Locate the outer curve's vertex against the two largest zeros of G_{n+1}.

    Checks x_tilde > x2 for lam in (-1/2, 0) and x_tilde > x1 for lam >= 0
    (with x_tilde = 1 at lam = 0).  For negative lam both orderings of
    x_tilde against x1 occur depending on (lam, n); the report records which
    one happened and predicts nothing.
    """
    theta = theta_ultraspherical(lam)
    scheme = UltrasphericalScheme(lam, n, theta)
    x_tilde = vertex(scheme, "n", bits).x_vertex
    zs = isolate_zeros(lam, n + 1, tol, bits).zeros
    x1 = zs[0]
    x2 = zs[1] if len(zs) > 1 else None
    lam_neg = (precision.to_mpq(lam) if precision.is_rational(lam) else lam) < 0
    if lam_neg:
        verdict = x2 is not None and x_tilde > x2
        situation = "x2 < x_tilde < x1" if x_tilde < x1 else "x1 < x_tilde"
    else:
        verdict = x_tilde > x1
        situation = "x1 < x_tilde"
    return VertexZerosReport(lam, n, theta, x_tilde, x1, x2, verdict, situation, bits)


# ---------------------------------------------------------------------------
# ratio monotonicity via the second-kind kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelReport:
    lam: object
    n: int
    points_checked: int
    points_near_pole: int
    min_kernel: object
    argmin_x: object
    all_positive: bool
    precision_bits: int


def cd_kernel_positivity(
    lam, n: int, x_grid, bits: int = precision.DEFAULT_PRECISION
) -> KernelReport:
    """Check y'_{n+1} y_n - y'_n y_{n+1} > 0 on the grid (t_n is increasing).

    The kernel is defined and positive even at zeros of y_n; points close to
    such a zero are only counted separately, because the ratio t_n whose
    monotonicity this certifies is undefined there.
    """
    family = Ultraspherical(lam)
    if n == 0:
        # y_1' y_0 - y_0' y_1 = 1 identically
        with precision.context(bits):
            one = mpfr(1)
        return KernelReport(lam, 0, 0, 0, one, None, True, bits)
    checked = 0
    near_pole = 0
    min_k = None
    argmin = None
    ok = True
    with precision.context(bits):
        guard = mpfr(2) ** (-bits // 2)
    for x in x_grid:
        triple = eval_triple(family, n, x, bits, with_derivatives=True)
        with precision.context(bits):
            if abs(triple.p_cur) < guard * (1 + abs(triple.p_next)):
                near_pole += 1
            kernel = triple.dp_next * triple.p_cur - triple.dp_cur * triple.p_next
        checked += 1
        if min_k is None or kernel < min_k:
            min_k, argmin = kernel, triple.x
        if not kernel > 0:
            ok = False
    return KernelReport(lam, n, checked, near_pole, min_k, argmin, ok, bits)
