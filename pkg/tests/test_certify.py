"""Certificates: exact route, numeric scans, sharp-exponent brackets, Taylor."""

import random

import pytest
from gmpy2 import mpfr, mpq

from turankit.certify import (
    batch_table,
    certify_exact,
    gap_polynomial,
    scan_min,
    sharp_theta,
    taylor_slope_check,
)
from turankit.errors import InvalidFamilyError
from turankit.exact_algebra import RationalPoly
from turankit.families import HermiteMonicHalf, MonicSymmetric, Ultraspherical
from turankit.turan_core import (
    FixedTheta,
    HermiteFactor,
    UltrasphericalSharp,
    theta_ultraspherical,
    turan_delta,
)

LEGENDRE = Ultraspherical(mpq(1, 2))
HERMITE = MonicSymmetric(HermiteMonicHalf())


class TestGapPolynomial:
    def test_legendre_n2_factorisation(self):
        # x P_2^2 - P_1 P_3 expands to s (1-s)^2 (9 s^2 + 8 s + 1) / 4
        poly, v = gap_polynomial(mpq(1, 2), 2, 1)
        assert v == 1
        want = (
            RationalPoly([0, mpq(1, 4)])
            * RationalPoly([1, -1])
            * RationalPoly([1, -1])
            * RationalPoly([1, 8, 9])
        )
        assert poly == want

    def test_substitution_degree(self):
        poly, v = gap_polynomial(mpq(-1, 4), 3, mpq(16, 9))
        assert v == 9
        assert poly.degree == 16 + 2 * 3 * 9

    def test_matches_numeric_gap(self):
        poly, v = gap_polynomial(mpq(1, 2), 4, 1)
        s = mpq(4, 5)
        direct = turan_delta(LEGENDRE, 4, FixedTheta(1), s**v, 256).delta
        assert abs(poly.eval_exact(s) - direct) < mpfr(2) ** -120


class TestCertifyExact:
    def test_legendre_n2(self):
        cert = certify_exact(mpq(1, 2), 2, 1)
        assert cert.certified
        assert cert.details["deflation_multiplicity"] == 2
        assert cert.details["sign_change_roots"] == 0
        assert cert.details["interior_sample_value"] > 0
        assert cert.details["gap_at_zero"] == 0

    def test_legendre_n1(self):
        assert certify_exact(mpq(1, 2), 1, 1).certified

    def test_negative_lambda_fractional_exponent(self):
        cert = certify_exact(mpq(-1, 4), 3, mpq(16, 9))
        assert cert.certified
        assert cert.details["substitution_v"] == 9

    def test_chebyshev_touching_interior(self):
        # theta = 2 gap touches zero inside (0,1): even multiplicities only
        cert = certify_exact(0, 5, 2)
        assert cert.certified
        assert cert.details["distinct_interior_roots"] > 0
        assert cert.details["sign_change_roots"] == 0

    def test_above_sharp_is_counterexample(self):
        cert = certify_exact(mpq(1, 2), 1, mpq(11, 10))
        assert cert.outcome == "counterexample"
        assert cert.witness_delta < 0
        # witness re-verifies numerically at doubled precision
        check = turan_delta(LEGENDRE, 1, FixedTheta(mpq(11, 10)), cert.witness_x, 256)
        assert check.delta < 0

    def test_deflation_multiplicity_at_sharp(self):
        # sharp exponent kills the linear term: multiplicity >= 2
        for lam, theta in ((mpq(1, 2), mpq(1)), (mpq(1), mpq(2, 3))):
            for n in (1, 2, 5):
                cert = certify_exact(lam, n, theta)
                assert cert.certified
                assert cert.details["deflation_multiplicity"] >= 2

    def test_deflation_multiplicity_below_sharp(self):
        for lam in (mpq(1, 2), mpq(1)):
            theta = theta_ultraspherical(lam) * mpq(9, 10)
            for n in (1, 3):
                cert = certify_exact(lam, n, theta)
                assert cert.certified
                assert cert.details["deflation_multiplicity"] == 1

    def test_theta_cap(self):
        with pytest.raises(InvalidFamilyError):
            certify_exact(mpq(1, 2), 2, mpq(5, 2))

    def test_irrational_lambda_rejected(self):
        from turankit.errors import IrrationalParameterError

        with pytest.raises(IrrationalParameterError):
            certify_exact(0.1234567, 2, 1)


class TestScanMin:
    def test_legendre_certified(self):
        cert = scan_min(LEGENDRE, 10, FixedTheta(1), (0, 1), 512, 128)
        assert cert.certified
        assert cert.details["min_delta"] >= 0

    def test_sharpness_counterexample(self):
        cert = scan_min(LEGENDRE, 1, FixedTheta(mpq(101, 100)), (mpq(9, 10), 1), 512, 256)
        assert cert.outcome == "counterexample"
        assert mpq(9, 10) < cert.witness_x < 1
        assert cert.witness_delta < 0
        assert cert.details["witness_recheck"] < 0

    def test_oracle_value_near_one(self):
        # direct high-precision evaluation of the gap just below 1
        d = turan_delta(LEGENDRE, 1, FixedTheta(mpq(101, 100)), mpq(999, 1000), 512)
        assert d.delta < 0
        assert abs(d.delta - mpfr("-8.4759684309534e-6")) < 1e-18

    def test_hermite_factor_scan(self):
        cert = scan_min(HERMITE, 25, HermiteFactor(), (-8, 8), 512, 128, cluster=False)
        assert cert.certified

    def test_grid_floor(self):
        with pytest.raises(InvalidFamilyError):
            scan_min(LEGENDRE, 2, FixedTheta(1), (0, 1), 32, 128)

    def test_agrees_with_exact_route(self):
        rng = random.Random(47)
        for lam, theta in ((mpq(1, 2), mpq(1)), (mpq(-1, 4), mpq(16, 9)), (mpq(0), mpq(2))):
            for _ in range(3):
                n = rng.randint(1, 8)
                exact = certify_exact(lam, n, theta)
                scan = scan_min(Ultraspherical(lam), n, FixedTheta(theta), (0, 1), 256, 192)
                assert exact.outcome == scan.outcome == "certified-nonnegative"


class TestSharpTheta:
    def test_legendre_brackets_one(self):
        est = sharp_theta(mpq(1, 2), 5)
        assert est.theta_lo <= 1 <= est.theta_hi
        assert est.theta_hi - est.theta_lo <= mpq(1, 10**4)
        assert est.lo_certificate.certified
        assert est.hi_certificate.outcome == "counterexample"

    def test_second_kind_n1(self):
        est = sharp_theta(1, 1)
        assert est.theta_lo <= mpq(2, 3) <= est.theta_hi
        assert not est.empirical

    def test_negative_lambda_empirical(self):
        est = sharp_theta(mpq(-1, 4), 4)
        assert est.empirical
        assert est.theta_lo >= mpq(16, 9) - mpq(1, 10**4)
        assert est.theta_hi <= 2

    def test_chebyshev_degenerate_cap(self):
        est = sharp_theta(0, 3)
        assert est.theta_lo == est.theta_hi == 2

    def test_tol_floor(self):
        with pytest.raises(InvalidFamilyError):
            sharp_theta(mpq(1, 2), 2, tol=mpq(1, 10**8))


class TestTaylor:
    def test_legendre_n1_sharp(self):
        t = taylor_slope_check(mpq(1, 2), 1, 1)
        assert abs(t.slope_fd) < 1e-12
        assert t.slope_formula == 0
        assert abs(t.quad_fd - mpq(3, 2)) < 1e-8
        assert t.quad_formula == mpq(3, 2)

    def test_negative_slope_above_sharp(self):
        t = taylor_slope_check(1, 2, mpq(7, 10))
        assert t.slope_formula == (2 - mpq(7, 10) * 3) / 3
        assert t.slope_formula < 0
        assert abs(t.slope_fd - t.slope_formula) < 1e-12

    def test_generic_slope_relative_error(self):
        for lam, n, theta in (
            (mpq(1, 4), 7, mpq(1, 2)),
            (mpq(-1, 3), 3, mpq(3, 2)),
            (mpq(2), 10, mpq(1, 5)),
        ):
            t = taylor_slope_check(lam, n, theta)
            assert t.slope_formula != 0
            assert abs(t.slope_fd / t.slope_formula - 1) < 1e-10

    def test_chebyshev_curvature(self):
        t = taylor_slope_check(0, 4, 2)
        assert t.quad_formula == 64  # 4 n^2 at lam = 0
        assert abs(t.quad_fd - 64) < 1e-6


class TestBatchTable:
    def test_deterministic_rows(self):
        kw = dict(theta=None, grid_size=128, precision_bits=128)
        a = batch_table([mpq(1, 2)], [1, 2], "check", **kw)
        b = batch_table([mpq(1, 2)], [1, 2], "check", **kw)
        assert a == b
        assert [r["n"] for r in a] == [1, 2]

    def test_lambda_major_order(self):
        rows = batch_table([mpq(1, 2), mpq(1)], [1, 2], "certify")
        assert [(r["lambda"], r["n"]) for r in rows] == [
            (mpq(1, 2), 1), (mpq(1, 2), 2), (mpq(1), 1), (mpq(1), 2),
        ]

    def test_cell_error_captured(self):
        rows = batch_table([mpq(-3, 4)], [1], "check", grid_size=64, precision_bits=128)
        assert rows[0]["outcome"] == "error"
        assert "InvalidFamilyError" in rows[0]["notes"]

    def test_workers_match_sequential(self):
        kw = dict(grid_size=128, precision_bits=128)
        seq = batch_table([mpq(1, 2), mpq(1)], [1, 2], "check", **kw)
        par = batch_table([mpq(1, 2), mpq(1)], [1, 2], "check", workers=3, **kw)
        assert seq == par

    def test_certify_routes_irrational_to_scan(self):
        rows = batch_table([0.337], [2], "certify", grid_size=128, precision_bits=128)
        assert rows[0]["outcome"] == "certified-nonnegative"
        assert "numeric scan" in rows[0]["notes"]

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            batch_table([], [1], "check")
        with pytest.raises(ValueError):
            batch_table([mpq(1, 2)], [], "check")
