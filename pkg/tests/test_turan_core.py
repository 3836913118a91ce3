"""Exponent rules, weighted gaps, exact identities, audit quantities."""

import math
import random

import pytest
from gmpy2 import mpfr, mpq

from turankit.errors import HypothesisViolationError, InvalidFamilyError
from turankit.families import (
    ExplicitList,
    GeneralThreeTerm,
    HermiteMonicHalf,
    MonicSymmetric,
    SymmetricUnit,
    Ultraspherical,
    UltrasphericalRatio,
)
from turankit.turan_core import (
    FixedTheta,
    HermiteFactor,
    UltrasphericalSharp,
    askey_turan_check,
    audit_quantities,
    case2_factorization_residual,
    dn_decomposition_residual,
    dn_value,
    eta_value,
    g_partial_n,
    g_value,
    identity_residual,
    infimum_term,
    rho_value,
    symmetric_unit_factorization_residual,
    theta_infimum,
    theta_ultraspherical,
    turan_delta,
    turan_delta_exact,
    universal_bound_check,
)

HERMITE = MonicSymmetric(HermiteMonicHalf())


class TestThetaRule:
    def test_legendre_value(self):
        assert theta_ultraspherical(mpq(1, 2)) == 1

    def test_chebyshev_value(self):
        assert theta_ultraspherical(0) == 2

    def test_negative_branch(self):
        assert theta_ultraspherical(mpq(-1, 4)) == mpq(16, 9)

    def test_continuity_at_zero(self):
        eps = mpq(1, 10**9)
        assert abs(theta_ultraspherical(eps) - 2) < mpq(1, 10**8)
        assert abs(theta_ultraspherical(-eps) - 2) < mpq(1, 10**8)

    def test_range(self):
        rng = random.Random(3)
        for _ in range(40):
            lam = mpq(rng.randint(-49, 400), 100)
            if lam <= mpq(-1, 2):
                lam = mpq(-49, 100)
            th = theta_ultraspherical(lam)
            assert 0 < th <= 2
            assert (th < 2) == (lam != 0)

    def test_domain_error(self):
        with pytest.raises(InvalidFamilyError):
            theta_ultraspherical(mpq(-3, 4))


FROZEN_F1 = mpfr("1.903215008905968259052480563116")  # 2 ln(2/3) / ln(32/49)


class TestThetaInfimum:
    def test_first_term_matches_log_ratio(self):
        a = UltrasphericalRatio(mpq(-1, 4))
        f1 = infimum_term(a, 1, 192)
        assert abs(f1 - FROZEN_F1) < 1e-28
        # against the raw definition at a1 = 2/3, a2 = 4/7
        direct = 2 * math.log((mpq(1, 3) * mpq(4, 7)) / (mpq(3, 7) * mpq(2, 3))) / math.log(
            float(4 * mpq(1, 3) * mpq(16, 49) / mpq(2, 3))
        )
        assert abs(float(f1) - direct) < 1e-12

    def test_analytic_limit(self):
        res = theta_infimum(UltrasphericalRatio(mpq(-1, 4)), 50)
        assert res.analytic_limit == mpq(16, 9)
        assert res.theta == mpq(16, 9)
        assert res.argmin_n == "limit"
        assert res.finite_min_exceeds_limit is True

    def test_monotone_decrease(self):
        a = UltrasphericalRatio(mpq(-1, 4))
        values = [infimum_term(a, n) for n in range(1, 1001)]
        assert all(u > v for u, v in zip(values, values[1:]))

    def test_hypothesis_gate_increasing(self):
        with pytest.raises(HypothesisViolationError):
            theta_infimum(ExplicitList(["3/5", "7/10"]), 1)

    def test_hypothesis_gate_below_half(self):
        with pytest.raises(HypothesisViolationError):
            theta_infimum(ExplicitList(["2/5", "1/3"]), 1)

    def test_explicit_list_reports_finite_min(self):
        res = theta_infimum(ExplicitList(["7/10", "3/5", "11/20"]), 2)
        assert res.analytic_limit is None
        assert res.argmin_n in (1, 2)


class TestTuranDelta:
    def test_legendre_quarter(self):
        s = turan_delta(Ultraspherical(mpq(1, 2)), 1, FixedTheta(1), mpq(1, 2))
        assert abs(s.delta - mpq(1, 4)) < mpfr(2) ** -100

    def test_zero_at_one(self):
        for lam in (mpq(1, 2), mpq(-1, 4), mpq(2)):
            s = turan_delta(Ultraspherical(lam), 5, UltrasphericalSharp(lam), 1)
            assert s.delta == 0

    def test_hermite_factor_n1(self):
        s = turan_delta(HERMITE, 1, HermiteFactor(), 1)
        assert abs(s.delta - mpq(1, 6)) < mpfr(2) ** -100
        assert turan_delta_exact(HERMITE, 1, HermiteFactor(), 1) == mpq(1, 6)

    def test_chebyshev_closed_form_spot(self):
        x = math.cos(math.pi / 4)
        s = turan_delta(Ultraspherical(0), 2, UltrasphericalSharp(0), x)
        assert abs(s.delta - mpq(1, 2)) < 1e-14

    def test_chebyshev_closed_form_sweep(self):
        # delta_n(cos phi) = sin(phi)^2 sin(n phi)^2 at theta = 2
        fam = Ultraspherical(0)
        rule = UltrasphericalSharp(0)
        bits = 128
        for n in range(1, 31):
            for k in range(1, 1001, 37):
                phi = k * math.pi / 1001
                s = turan_delta(fam, n, rule, math.cos(phi), bits)
                want = math.sin(phi) ** 2 * math.sin(n * phi) ** 2
                assert abs(float(s.delta) - want) < 1e-12

    def test_doubled_precision_agreement(self):
        rng = random.Random(9)
        for _ in range(10):
            lam = mpq(rng.randint(-2, 10), 5)
            if lam <= mpq(-1, 2):
                lam = mpq(-2, 5)
            n = rng.randint(1, 30)
            x = mpq(rng.randint(1, 999), 1000)
            a = turan_delta(Ultraspherical(lam), n, UltrasphericalSharp(lam), x, 128)
            b = turan_delta(Ultraspherical(lam), n, UltrasphericalSharp(lam), x, 256)
            scale = max(mpfr(2) ** -80, abs(b.delta))
            assert abs(a.delta - b.delta) <= scale * mpfr(2) ** -64

    def test_hermite_exact_closed_form(self):
        # the n = 1 monic gap times (x^2 + a_1) is exactly a_1^2
        for x in (mpq(1, 3), mpq(-7, 5), mpq(12, 7)):
            d = turan_delta_exact(HERMITE, 1, HermiteFactor(), x)
            assert d * (x * x + mpq(1, 2)) == mpq(1, 4)

    def test_exact_backend_sample(self):
        s = turan_delta(HERMITE, 1, HermiteFactor(), mpq(1, 3), exact=True)
        assert s.backend == "exact"
        assert s.delta * (mpq(1, 9) + mpq(1, 2)) == mpq(1, 4)

    def test_rule_family_pairing(self):
        with pytest.raises(InvalidFamilyError):
            turan_delta(Ultraspherical(1), 2, HermiteFactor(), mpq(1, 2))


class TestIdentityResidual:
    def test_ultraspherical(self):
        assert identity_residual(Ultraspherical(mpq(1, 3)), 3, mpq(7, 10)) == 0

    def test_hermite(self):
        assert identity_residual(HERMITE, 5, mpq(-3, 2)) == 0

    def test_legendre_at_zero(self):
        assert identity_residual(Ultraspherical(mpq(1, 2)), 1, 0) == 0

    def test_seeded_instances_all_variants(self):
        for fam, n, x in _identity_instances(25, seed=101):
            assert identity_residual(fam, n, x) == 0


def _identity_instances(count, seed):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        kind = i % 4
        n = rng.randint(1, 8)
        x = mpq(rng.randint(-30, 30), rng.randint(1, 17))
        if kind == 0:
            lam = mpq(rng.randint(-4, 30), rng.randint(7, 13))
            if lam <= mpq(-1, 2):
                lam = mpq(-2, 5)
            fam = Ultraspherical(lam)
        elif kind == 1:
            vals = [mpq(rng.randint(1, 9), 10 + rng.randint(0, 5)) for _ in range(n + 1)]
            fam = SymmetricUnit(ExplicitList(vals))
        elif kind == 2:
            vals = [mpq(rng.randint(1, 40), rng.randint(1, 7)) for _ in range(n + 1)]
            fam = MonicSymmetric(ExplicitList(vals))
        else:
            a = [mpq(rng.randint(1, 20), rng.randint(1, 9)) for _ in range(n + 1)]
            b = [mpq(rng.randint(1, 12), rng.randint(1, 5)) for _ in range(n + 2)]
            c = [mpq(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(n + 2)]
            fam = GeneralThreeTerm(
                ExplicitList(a, start=1), ExplicitList(b, start=0), ExplicitList(c, start=0)
            )
        out.append((fam, n, x))
    return out


class TestUniversalBound:
    def test_weight_values(self):
        w, _ = universal_bound_check(1, 1, mpq(3, 10))
        assert w == mpq(4, 3)
        w0, _ = universal_bound_check(0, 7, mpq(3, 10))
        assert w0 == 1

    def test_legendre_value_at_one(self):
        w, d = universal_bound_check(mpq(1, 2), 2, 1)
        assert w == 1 + mpq(1, 24)
        assert abs(d - mpq(1, 24)) < mpfr(2) ** -100

    def test_nonnegative_everywhere(self):
        rng = random.Random(17)
        for _ in range(8):
            lam = mpq(rng.randint(-2, 12), 5)
            if lam <= mpq(-1, 2):
                lam = mpq(-2, 5)
            n = rng.randint(1, 12)
            for k in range(-12, 13):
                x = mpq(k, 4)  # covers |x| > 1 as well
                _, d = universal_bound_check(lam, n, x)
                assert d >= -(mpfr(2) ** -80)


class TestAskeyCheck:
    def test_hermite_grid(self):
        grid = [mpq(k, 8) for k in range(-48, 49)]
        rep = askey_turan_check(HermiteMonicHalf(), 10, grid)
        assert rep.violations == 0
        assert rep.min_delta >= 0

    def test_single_step_value(self):
        # n = 1: p_1^2 - p_0 p_2 = a_1 for every x
        rep = askey_turan_check(ExplicitList([mpq(3, 7), mpq(1, 2)]), 1, [mpq(5, 3)])
        assert abs(rep.min_delta - mpq(3, 7)) < mpfr(2) ** -100

    def test_constant_sequence_flagged_but_checked(self):
        rep = askey_turan_check(ExplicitList(["1/2", "1/2", "1/2"]), 2, [0, mpq(1, 2), 1])
        assert rep.hypothesis_edge
        assert rep.violations == 0

    def test_decreasing_rejected(self):
        with pytest.raises(HypothesisViolationError):
            askey_turan_check(ExplicitList(["1/2", "1/3"]), 1, [0])


class TestAuditQuantities:
    def test_g_value_example(self):
        g = g_value(1, mpq(-1, 4))
        assert abs(g - mpfr("0.060127702621569733")) < 1e-15

    def test_g_positive_and_decreasing(self):
        for lam in (mpq(-2, 5), mpq(-1, 4), mpq(-1, 10)):
            values = [g_value(n, lam, 192) for n in (1, 2, 5, 10, 100, 1000)]
            assert all(v > 0 for v in values)
            assert all(u > v for u, v in zip(values, values[1:]))
            assert all(g_partial_n(n, lam) < 0 for n in (1, 5, 50))

    def test_g_partial_matches_difference_trend(self):
        lam = mpq(-1, 4)
        fd = g_value(6, lam, 256) - g_value(5, lam, 256)
        mid = g_partial_n(5, lam, 256)
        assert fd < 0
        assert abs(fd - mid) < abs(mid) * mpfr("0.5")

    def test_rho_boundary_and_interior(self):
        assert abs(rho_value(mpq(1, 2), 1)) < mpfr(2) ** -100
        assert rho_value(mpq(1, 2), mpq(7, 10)) > 0

    def test_eta_positive_inside(self):
        theta = theta_ultraspherical(mpq(3, 2))
        for x in (mpq(1, 10), mpq(1, 2), mpq(9, 10)):
            assert eta_value(mpq(3, 2), theta, x) > 0
        assert abs(eta_value(mpq(3, 2), theta, 1)) < mpfr(2) ** -100

    def test_dn_positive(self):
        theta = theta_ultraspherical(mpq(3, 4))
        assert dn_value(mpq(3, 4), 5, theta, mpq(4, 5)) > 0

    def test_case2_factorization_exact(self):
        rng = random.Random(29)
        for _ in range(10):
            lam = -mpq(rng.randint(1, 49), 100)
            n = rng.randint(1, 40)
            assert case2_factorization_residual(lam, n).is_zero()

    def test_symmetric_factorization_exact(self):
        rng = random.Random(31)
        for _ in range(10):
            a_n1 = mpq(rng.randint(51, 98), 100)
            a_n = a_n1 + mpq(1, 100)
            assert symmetric_unit_factorization_residual(a_n, a_n1).is_zero()

    def test_dn_decomposition_exact(self):
        rng = random.Random(37)
        for _ in range(10):
            lam = mpq(rng.randint(1, 300), 100)
            n = rng.randint(1, 25)
            x = mpq(rng.randint(1, 99), 100)
            assert dn_decomposition_residual(lam, n, x).is_zero()

    def test_report_positive_lambda(self):
        rep = audit_quantities(mpq(1, 2), 3)
        assert rep.signs_ok
        assert rep.residuals_zero

    def test_report_negative_lambda(self):
        rep = audit_quantities(mpq(-1, 4), 2)
        assert rep.signs_ok
        assert rep.residuals_zero
        assert rep.quantities["g"] > 0
