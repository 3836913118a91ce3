"""Nonnegativity certificates for the weighted gap, and the sharp-exponent search.

Two certification routes:

* ``certify_exact`` -- for rational lam and rational theta = u/v the
  substitution x = s^v turns |x|^theta into the monomial s^u, so the gap
  becomes an exact rational polynomial in s.  After stripping the forced
  (1-s)^m factor at s = 1, nonnegativity on (0, 1) is decided by counting
  sign-changing (odd-multiplicity) roots with Sturm chains and checking one
  interior sample.  No rounding anywhere.

* ``scan_min`` -- a precision-tagged grid scan with golden-section
  refinement.  Minima below -2^(-bits/3) are counterexamples (re-verified
  at doubled precision); minima in the roundoff gray zone trigger one
  precision escalation before a verdict.

``sharp_theta`` bisects between a certified exponent and a failing one,
clustering scan points against x = 1 where barely-too-large exponents fail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import gmpy2
from gmpy2 import mpfr, mpq

from . import precision
from .curves import UltrasphericalScheme, vertex
from .errors import (
    InconclusiveError,
    InvalidFamilyError,
    IrrationalParameterError,
)
from .exact_algebra import (
    RationalPoly,
    deflate_at_one,
    odd_multiplicity_part,
    sturm_chain,
    sturm_count_roots,
)
from .families import (
    FamilySpec,
    MonicSymmetric,
    Ultraspherical,
    eval_triple,
    exact_coefficients_triple,
    step_table,
)
from .turan_core import (
    FixedTheta,
    HermiteFactor,
    UltrasphericalSharp,
    theta_ultraspherical,
    turan_delta,
    weight_value,
)


@dataclass(frozen=True)
class Certificate:
    """Outcome of one nonnegativity check (exact or scan-level)."""

    mode: str  # 'exact-sturm' | 'numeric-scan'
    family: FamilySpec
    n: int
    theta: object  # exact mpq in exact mode; resolved value or None otherwise
    interval: tuple
    outcome: str  # 'certified-nonnegative' | 'counterexample' | 'inconclusive'
    details: dict = field(default_factory=dict)
    witness_x: object = None
    witness_delta: object = None

    @property
    def certified(self) -> bool:
        return self.outcome == "certified-nonnegative"


# ---------------------------------------------------------------------------
# exact route
# ---------------------------------------------------------------------------

_SAMPLE_POINTS = (
    mpq(1, 2), mpq(1, 3), mpq(2, 3), mpq(2, 5), mpq(3, 5), mpq(3, 7), mpq(5, 7),
    mpq(7, 11), mpq(4, 9), mpq(5, 11),
)


def gap_polynomial(lam, n: int, theta) -> tuple:
    """(poly, v): the gap as an exact polynomial in s with x = s^v.

    Delta(s^v) = s^u G_n(s^v)^2 - G_{n-1}(s^v) G_{n+1}(s^v) for theta = u/v
    in lowest terms, a polynomial identity on s in [0, 1].
    """
    lam = precision.to_mpq(lam)
    theta = precision.to_mpq(theta)
    u, v = int(theta.numerator), int(theta.denominator)
    fam = Ultraspherical(lam)
    g_prev, g_cur, g_next = exact_coefficients_triple(fam, n)
    sv_prev = g_prev.substitute_power(v)
    sv_cur = g_cur.substitute_power(v)
    sv_next = g_next.substitute_power(v)
    poly = RationalPoly.monomial(u) * sv_cur * sv_cur - sv_prev * sv_next
    return poly, v


def certify_exact(lam, n: int, theta) -> Certificate:
    """Exact nonnegativity certificate for the ultraspherical gap on [0, 1].

    Certified-nonnegative requires: zero sign-changing interior roots of the
    deflated quotient, a strictly positive rational interior sample, and
    nonnegative endpoint values.  Interior roots of even multiplicity (the
    gap touching zero, as happens at theta = 2, lam = 0) are recorded but do
    not block certification.
    """
    lam = precision.to_mpq(lam)
    theta = precision.to_mpq(theta)
    if not 0 < theta <= 2:
        raise InvalidFamilyError(f"theta = {theta} outside (0, 2]")
    if n < 1:
        raise InvalidFamilyError(f"need n >= 1, got {n}")
    fam = Ultraspherical(lam)
    poly, v = gap_polynomial(lam, n, theta)
    m, quotient = deflate_at_one(poly)
    at_zero = poly.eval_exact(0)
    chain = sturm_chain(quotient)
    distinct = chain.variations(0) - chain.variations(1)
    if chain.degenerate_flag and distinct > 0:
        # repeated factors present: only odd-multiplicity roots change sign
        odd = odd_multiplicity_part(quotient)
        sign_changes = (
            sturm_count_roots(odd, 0, 1) if odd.degree > 0 else 0
        )
    else:
        sign_changes = distinct
    sample_s = None
    sample_value = None
    for s in _SAMPLE_POINTS:
        val = quotient.eval_exact(s)
        if val != 0:
            sample_s, sample_value = s, val
            break
    details = {
        "substitution_v": v,
        "deflation_multiplicity": m,
        "sign_change_roots": sign_changes,
        "distinct_interior_roots": distinct,
        "interior_sample_s": sample_s,
        "interior_sample_value": sample_value,
        "gap_at_zero": at_zero,
        "gap_degree": poly.degree,
    }
    ok = sign_changes == 0 and sample_value is not None and sample_value > 0 and at_zero >= 0
    if ok:
        return Certificate("exact-sturm", fam, n, theta, (0, 1), "certified-nonnegative", details)
    witness_s = _negative_sample(quotient, poly)
    if witness_s is None:
        return Certificate("exact-sturm", fam, n, theta, (0, 1), "inconclusive", details)
    witness_x = witness_s ** v
    witness_delta = poly.eval_exact(witness_s)
    details["witness_s"] = witness_s
    return Certificate(
        "exact-sturm", fam, n, theta, (0, 1), "counterexample", details,
        witness_x=witness_x, witness_delta=witness_delta,
    )


def _negative_sample(quotient: RationalPoly, poly: RationalPoly):
    """A rational s in (0, 1) with poly(s) < 0, by dyadic refinement."""
    depth = 1
    while depth <= 24:
        steps = 2 ** depth
        for k in range(1, steps, 2):
            s = mpq(k, steps)
            if poly.eval_exact(s) < 0:
                return s
        depth += 1
    return None


# ---------------------------------------------------------------------------
# numeric scan route
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _cached_power_weights(theta_key: str, lo_key: str, hi_key: str, size: int,
                          cluster: bool, bits: int):
    xs = precision.make_grid(precision.to_mpq(lo_key), precision.to_mpq(hi_key),
                             size, bits, cluster_hi=cluster)
    theta = precision.to_mpq(theta_key)
    with precision.context(bits):
        out = []
        for x in xs:
            ax = abs(x)
            if ax == 0:
                out.append(mpfr(0))
            elif ax == 1:
                out.append(mpfr(1))
            else:
                out.append(gmpy2.exp(mpfr(theta) * gmpy2.log(ax)))
    return tuple(out)


def _rule_theta(rule, bits):
    if isinstance(rule, HermiteFactor):
        return None
    return rule.theta(bits)


def _delta_on_grid(family, n, rule, xs, bits, weights=None):
    """Gap values on a grid, sharing one recurrence-coefficient table."""
    steps = step_table(family, n, bits)
    standard_scale = None
    if isinstance(rule, HermiteFactor):
        if not isinstance(family, MonicSymmetric):
            raise InvalidFamilyError("the Hermite factor weight needs a MonicSymmetric family")
        if rule.standard:
            with precision.context(bits):
                standard_scale = mpfr(4) ** n
    deltas = []
    with precision.context(bits):
        for i, x in enumerate(xs):
            xr = mpfr(x)
            p_pp, p_p = mpfr(0), mpfr(1)
            keep = None
            for k in range(n + 1):
                a, b, c = steps[k]
                lin = b * xr + c if c else b * xr
                p_next = lin * p_p - a * p_pp
                if k == n - 1:
                    keep = p_p
                p_pp, p_p = p_p, p_next
            w = weights[i] if weights is not None else weight_value(rule, family, n, xr, bits)
            delta = w * p_pp * p_pp - keep * p_p
            if standard_scale is not None:
                delta *= standard_scale
            deltas.append(delta)
    return deltas


def _delta_at(family, n, rule, x, bits):
    sample = turan_delta(family, n, rule, x, bits)
    return sample.delta


def _unit_edge_exact(family, x):
    from .families import is_unit_normalized

    return is_unit_normalized(family) and (x == 1 or x == -1)


def scan_min(
    family: FamilySpec,
    n: int,
    rule,
    interval=(0, 1),
    grid_size: int = 4096,
    precision_bits: int = precision.DEFAULT_PRECISION,
    cluster: bool = True,
    refine_iters: int = 60,
    _escalated: bool = False,
) -> Certificate:
    """Grid scan of the gap with golden-section descent from the grid argmin.

    Outcome rules: min < -2^(-bits/3) is a counterexample (the witness must
    stay negative at doubled precision); a min inside the roundoff gray zone
    (-2^(-bits/3), 0) rescans once at doubled precision before settling.
    """
    if grid_size < 64:
        raise InvalidFamilyError(f"grid_size {grid_size} < 64")
    if n < 1:
        raise InvalidFamilyError(f"need n >= 1, got {n}")
    bits = precision_bits
    lo, hi = interval
    theta = _rule_theta(rule, bits)
    weights = None
    if theta is not None and precision.is_rational(theta) and precision.is_rational(lo) \
            and precision.is_rational(hi):
        weights = _cached_power_weights(
            precision.rational_str(precision.to_mpq(theta)),
            precision.rational_str(precision.to_mpq(lo)),
            precision.rational_str(precision.to_mpq(hi)),
            grid_size, cluster, bits,
        )
    xs = precision.make_grid(lo, hi, grid_size, bits, cluster_hi=cluster)
    deltas = _delta_on_grid(family, n, rule, xs, bits, weights)
    min_i = min(range(len(xs)), key=lambda i: deltas[i])
    min_x, min_d = xs[min_i], deltas[min_i]
    # golden-section descent inside the bracket around the grid argmin
    with precision.context(bits):
        blo = xs[min_i - 1] if min_i > 0 else xs[0]
        bhi = xs[min_i + 1] if min_i + 1 < len(xs) else xs[-1]
        inv_phi = (gmpy2.sqrt(mpfr(5)) - 1) / 2
        x1 = bhi - inv_phi * (bhi - blo)
        x2 = blo + inv_phi * (bhi - blo)
        f1 = _delta_at(family, n, rule, x1, bits)
        f2 = _delta_at(family, n, rule, x2, bits)
        for _ in range(refine_iters):
            if f1 <= f2:
                bhi, x2, f2 = x2, x1, f1
                x1 = bhi - inv_phi * (bhi - blo)
                f1 = _delta_at(family, n, rule, x1, bits)
            else:
                blo, x1, f1 = x1, x2, f2
                x2 = blo + inv_phi * (bhi - blo)
                f2 = _delta_at(family, n, rule, x2, bits)
        for xx, ff in ((x1, f1), (x2, f2)):
            if ff < min_d:
                min_x, min_d = xx, ff
        threshold = -(mpfr(2) ** (-(bits // 3)))
    details = {
        "grid_size": grid_size,
        "precision_bits": bits,
        "min_delta": min_d,
        "argmin_x": min_x,
        "counterexample_threshold": threshold,
        "escalated": _escalated,
    }
    theta_out = theta
    if min_d < threshold:
        verify = _delta_at(family, n, rule, min_x, 2 * bits)
        details["witness_recheck"] = verify
        if verify < 0:
            return Certificate(
                "numeric-scan", family, n, theta_out, (lo, hi), "counterexample",
                details, witness_x=min_x, witness_delta=min_d,
            )
        return Certificate("numeric-scan", family, n, theta_out, (lo, hi), "inconclusive", details)
    if min_d < 0 and not _escalated:
        return scan_min(
            family, n, rule, interval, grid_size, 2 * bits, cluster, refine_iters,
            _escalated=True,
        )
    return Certificate(
        "numeric-scan", family, n, theta_out, (lo, hi), "certified-nonnegative", details
    )


# ---------------------------------------------------------------------------
# sharp exponent search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaEstimate:
    """Bracket around sup{theta : the gap stays nonnegative near x = 1}."""

    lam: object
    n: int
    theta_lo: object
    theta_hi: object
    iterations: int
    backend: str
    tol: object
    empirical: bool
    lo_certificate: Certificate
    hi_certificate: Optional[Certificate]


SHARP_PRECISION = 192  # dips scale like tol^2/n^2; 128 bits leaves thin margin


def _sharp_scan_interval(lam, n, theta, bits):
    th = min(precision.to_mpq(theta) if precision.is_rational(theta) else theta,
             mpq(2) - mpq(1, 64))
    xt = vertex(UltrasphericalScheme(lam, n, th), "n", bits).x_vertex
    lo = max(mpq(0), precision.to_mpq(_floor_rational(xt)) - mpq(1, 10))
    return (lo, 1)


def _floor_rational(x, digits: int = 6):
    """Round an mpfr down to a rational with few digits (cache-friendly key)."""
    scale = 10 ** digits
    return mpq(int(gmpy2.floor(x * scale)), scale)


def sharp_theta(
    lam,
    n: int,
    tol=mpq(1, 10**4),
    bits: int = SHARP_PRECISION,
    grid_size: int = 1024,
) -> ThetaEstimate:
    """Bisect for the sharp exponent on theta in (0, 2].

    The lower endpoint starts at the guaranteed exponent (certified by a
    clustered scan); failures for theta above sharp live in a window of
    width O(theta - sharp) below x = 1, which the geometric grid points
    1 - 2^-k always straddle.  For lam < 0 the guaranteed exponent is a
    lower bound only, and the whole estimate is labelled empirical.
    """
    tol = precision.to_mpq(tol)
    if tol < mpq(1, 10**6):
        raise InvalidFamilyError("tol below 1e-6 is not supported")
    lam_is_neg = (precision.to_mpq(lam) if precision.is_rational(lam) else lam) < 0
    fam = Ultraspherical(lam)

    def predicate(theta):
        interval = _sharp_scan_interval(lam, n, theta, bits)
        cert = scan_min(fam, n, FixedTheta(theta), interval, grid_size, bits)
        if cert.outcome == "inconclusive":
            raise InconclusiveError(
                f"scan at theta = {theta} stayed inconclusive after escalation"
            )
        return cert

    theta_lo = theta_ultraspherical(lam)
    lo_cert = predicate(theta_lo)
    if not lo_cert.certified:
        raise InconclusiveError(
            f"the guaranteed exponent {theta_lo} failed its own scan at {bits} bits"
        )
    theta_hi = mpq(2)
    hi_cert = predicate(theta_hi)
    iterations = 0
    if hi_cert.certified:
        # exponent 2 itself holds (lam = 0): degenerate bracket at the cap
        return ThetaEstimate(lam, n, theta_hi, theta_hi, 0, "numeric-scan", tol,
                             lam_is_neg, hi_cert, None)
    while theta_hi - theta_lo > tol:
        mid = (theta_lo + theta_hi) / 2
        cert = predicate(mid)
        iterations += 1
        if cert.certified:
            theta_lo, lo_cert = mid, cert
        else:
            theta_hi, hi_cert = mid, cert
    return ThetaEstimate(
        lam, n, theta_lo, theta_hi, iterations, "numeric-scan", tol, lam_is_neg,
        lo_cert, hi_cert,
    )


# ---------------------------------------------------------------------------
# expansion coefficients at the right endpoint
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorCheck:
    lam: object
    n: int
    theta: object
    slope_fd: object
    slope_formula: object
    quad_fd: object
    quad_formula: object
    precision_bits: int


def taylor_slope_check(lam, n: int, theta, bits: int = 256) -> TaylorCheck:
    """First and second expansion coefficients of the gap in u = 1 - x.

    Finite differences at steps 2^-30, 2^-31 (Richardson-extrapolated)
    against the closed forms: slope (2 - theta (1+2 lam)) / (1 + 2 lam), and
    at the sharp exponent the curvature 4 (3n^2 + 6 lam n + 2 lam^2 - lam)
    / ((3 + 2 lam)(2 lam + 1)^2) -- the gamma-factor display normalised by
    the squared binomial prefactor, which the finite difference validates.
    """
    fam = Ultraspherical(lam)
    rule = FixedTheta(theta)

    def delta_at(u_exp):
        with precision.context(bits):
            x = 1 - mpfr(2) ** u_exp
        return turan_delta(fam, n, rule, x, bits).delta

    with precision.context(bits):
        d30 = delta_at(-30)
        d31 = delta_at(-31)
        d32 = delta_at(-32)
        h30 = mpfr(2) ** -30
        h31 = mpfr(2) ** -31
        D30 = d30 / h30
        D31 = d31 / h31
        D32 = d32 / (h31 / 2)
        slope_fd = 2 * D31 - D30
        E30 = 2 * (D30 - D31) / h30
        E31 = 2 * (D31 - D32) / h31
        quad_fd = 2 * E31 - E30
        lamr = mpfr(precision.to_mpq(lam)) if precision.is_rational(lam) else mpfr(lam)
        thr = mpfr(precision.to_mpq(theta)) if precision.is_rational(theta) else mpfr(theta)
        slope_formula = (2 - thr * (1 + 2 * lamr)) / (1 + 2 * lamr)
        quad_formula = (
            4 * (3 * mpfr(n) ** 2 + 6 * lamr * n + 2 * lamr * lamr - lamr)
            / ((3 + 2 * lamr) * (2 * lamr + 1) ** 2)
        )
    if precision.is_rational(lam) and precision.is_rational(theta):
        lamq = precision.to_mpq(lam)
        thq = precision.to_mpq(theta)
        slope_formula = (2 - thq * (1 + 2 * lamq)) / (1 + 2 * lamq)
        quad_formula = (
            4 * (3 * n * n + 6 * lamq * n + 2 * lamq * lamq - lamq)
            / ((3 + 2 * lamq) * (2 * lamq + 1) ** 2)
        )
    return TaylorCheck(lam, n, theta, slope_fd, slope_formula, quad_fd, quad_formula, bits)


# ---------------------------------------------------------------------------
# batch driver
# ---------------------------------------------------------------------------


def batch_table(lambda_grid, n_grid, mode: str, workers: int = 1, **options):
    """Run one operation per (lam, n) cell; lambda-major deterministic order.

    Cells are pure, so they may be distributed across threads; the merged
    output order never depends on scheduling.  Per-cell failures land in the
    row's ``notes`` field, never abort the batch.  Row dicts follow the
    check-report schema:
    lambda, n, theta, mode, outcome, min_delta, argmin_x, precision_bits, notes.
    """
    lambda_grid = list(lambda_grid)
    n_grid = list(n_grid)
    if not lambda_grid or not n_grid:
        raise ValueError("empty grid")
    cells = [(lam, n) for lam in lambda_grid for n in n_grid]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda c: _batch_cell(c[0], c[1], mode, options), cells))
    return [_batch_cell(lam, n, mode, options) for lam, n in cells]


def _batch_cell(lam, n, mode, options):
    row = {
        "lambda": lam,
        "n": n,
        "theta": None,
        "mode": mode,
        "outcome": "error",
        "min_delta": None,
        "argmin_x": None,
        "precision_bits": options.get("precision_bits", precision.DEFAULT_PRECISION),
        "notes": "",
    }
    try:
        if mode == "check":
            theta = options.get("theta")
            rule = FixedTheta(theta) if theta is not None else UltrasphericalSharp(lam)
            bits = options.get("precision_bits", precision.DEFAULT_PRECISION)
            cert = scan_min(
                Ultraspherical(lam), n, rule,
                interval=options.get("interval", (0, 1)),
                grid_size=options.get("grid_size", 4096),
                precision_bits=bits,
            )
            row.update(
                theta=rule.theta(bits), outcome=cert.outcome,
                min_delta=cert.details["min_delta"], argmin_x=cert.details["argmin_x"],
                precision_bits=cert.details["precision_bits"],
            )
        elif mode == "certify":
            theta = options.get("theta")
            if theta is None:
                theta = theta_ultraspherical(lam)
            if precision.is_rational(lam) and precision.is_rational(theta):
                cert = certify_exact(lam, n, theta)
                row.update(
                    theta=cert.theta, outcome=cert.outcome,
                    min_delta=cert.witness_delta, argmin_x=cert.witness_x,
                    notes=f"m={cert.details['deflation_multiplicity']};"
                          f"sign_changes={cert.details['sign_change_roots']}",
                )
            else:
                # irrational parameters have no exact route; scan instead
                bits = options.get("precision_bits", precision.DEFAULT_PRECISION)
                cert = scan_min(
                    Ultraspherical(lam), n, FixedTheta(theta),
                    interval=options.get("interval", (0, 1)),
                    grid_size=options.get("grid_size", 4096),
                    precision_bits=bits,
                )
                row.update(
                    theta=theta, outcome=cert.outcome,
                    min_delta=cert.details["min_delta"],
                    argmin_x=cert.details["argmin_x"],
                    precision_bits=cert.details["precision_bits"],
                    notes="irrational parameters: routed to numeric scan",
                )
        elif mode == "sharp-theta":
            est = sharp_theta(
                lam, n,
                tol=options.get("tol", mpq(1, 10**4)),
                bits=options.get("precision_bits", SHARP_PRECISION),
                grid_size=options.get("grid_size", 1024),
            )
            row.update(
                theta=est.theta_lo, outcome="bracket",
                min_delta=est.theta_hi - est.theta_lo, argmin_x=None,
                precision_bits=SHARP_PRECISION,
                notes=("empirical;" if est.empirical else "")
                + f"lo={precision.decimal_str(est.theta_lo, 64)};"
                  f"hi={precision.decimal_str(est.theta_hi, 64)}",
            )
        else:
            row["notes"] = f"unknown mode {mode!r}"
    except Exception as exc:  # per-cell errors are report content
        row["notes"] = f"{type(exc).__name__}: {exc}"
    return row
