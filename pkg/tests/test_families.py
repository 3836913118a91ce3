"""Recurrence families: evaluation, ratios, exact coefficients, conversions."""

import math
import random

import pytest
from gmpy2 import mpfr, mpq

from turankit.errors import (
    InvalidFamilyError,
    NearZeroError,
    PrecisionError,
    SequenceRangeError,
)
from turankit.exact_algebra import RationalPoly
from turankit.families import (
    ExplicitList,
    GeneralThreeTerm,
    HermiteMonicHalf,
    MonicSymmetric,
    SymmetricUnit,
    Ultraspherical,
    UltrasphericalRatio,
    eval_triple,
    eval_triple_exact,
    exact_coefficients,
    exact_coefficients_triple,
    hermite_convert,
    ratio_t,
)

LEGENDRE = Ultraspherical(mpq(1, 2))
HERMITE = MonicSymmetric(HermiteMonicHalf())


class TestEvalTriple:
    def test_degree_one_is_x(self):
        t = eval_triple(Ultraspherical(mpq(7, 3)), 1, mpq(7, 10))
        assert abs(t.p_cur - mpq(7, 10)) < mpfr(2) ** -120

    def test_legendre_p3(self):
        t = eval_triple(LEGENDRE, 2, mpq(1, 2))
        assert t.p_next == mpfr("-0.4375")  # (5x^3-3x)/2 at 1/2

    def test_hermite_monic_triple(self):
        t = eval_triple(HERMITE, 1, 1)
        assert (t.p_prev, t.p_cur, t.p_next) == (1, 1, mpfr("0.5"))

    def test_n_must_be_positive(self):
        with pytest.raises(InvalidFamilyError):
            eval_triple(LEGENDRE, 0, mpq(1, 2))

    def test_precision_floor(self):
        with pytest.raises(PrecisionError):
            eval_triple(LEGENDRE, 2, mpq(1, 2), precision_bits=40)

    def test_lambda_floor(self):
        with pytest.raises(InvalidFamilyError):
            Ultraspherical(mpq(-1, 2))

    def test_explicit_list_range_error(self):
        fam = SymmetricUnit(ExplicitList(["2/3", "3/5"]))
        eval_triple(fam, 1, mpq(1, 3))
        with pytest.raises(SequenceRangeError):
            eval_triple(fam, 3, mpq(1, 3))

    def test_symmetric_unit_range_check(self):
        fam = SymmetricUnit(ExplicitList(["2/3", "7/5"]))
        with pytest.raises(InvalidFamilyError):
            eval_triple(fam, 2, mpq(1, 3))

    def test_precision_escalates_near_edge(self):
        t = eval_triple(LEGENDRE, 3, mpq(99, 100))
        assert t.precision_bits == 256
        t2 = eval_triple(LEGENDRE, 3, mpq(1, 2))
        assert t2.precision_bits == 128
        t3 = eval_triple(LEGENDRE, 60, mpq(1, 2))
        assert t3.precision_bits == 256

    def test_convergence_under_doubled_precision(self):
        rng = random.Random(23)
        for _ in range(10):
            lam = mpq(rng.randint(-2, 12), 5)
            if lam <= mpq(-1, 2):
                lam = mpq(-2, 5)
            n = rng.randint(1, 50)
            x = mpq(rng.randint(-999, 999), 1000)
            bits = 128
            a = eval_triple(Ultraspherical(lam), n, x, bits)
            b = eval_triple(Ultraspherical(lam), n, x, 2 * bits)
            for u, v in ((a.p_prev, b.p_prev), (a.p_cur, b.p_cur), (a.p_next, b.p_next)):
                if v == 0:
                    assert u == 0
                else:
                    assert abs(u - v) <= abs(v) * mpfr(2) ** (-bits // 2)


class TestRatio:
    def test_unit_value_at_one(self):
        assert ratio_t(Ultraspherical(1), 3, 1) == 1

    def test_legendre_ratio(self):
        assert ratio_t(LEGENDRE, 1, mpq(1, 2)) == mpfr("-0.25")

    def test_chebyshev_cosine(self):
        x = math.cos(math.pi / 5)
        got = ratio_t(Ultraspherical(0), 2, x)
        want = math.cos(3 * math.pi / 5) / math.cos(2 * math.pi / 5)
        assert abs(got - want) < 1e-13

    def test_near_zero_denominator(self):
        # p_1(x) = x vanishes at 0
        with pytest.raises(NearZeroError):
            ratio_t(LEGENDRE, 1, 0)


class TestExactCoefficients:
    def test_legendre_p2(self):
        assert exact_coefficients(LEGENDRE, 2) == RationalPoly([mpq(-1, 2), 0, mpq(3, 2)])

    def test_degree_zero(self):
        assert exact_coefficients(HERMITE, 0) == RationalPoly([1])

    def test_general_lambda_quadratic(self):
        rng = random.Random(31)
        for _ in range(8):
            lam = mpq(rng.randint(-2, 20), rng.randint(5, 9))
            if lam <= mpq(-1, 2):
                lam = mpq(-1, 3)
            got = exact_coefficients(Ultraspherical(lam), 2)
            want = RationalPoly([-1 / (1 + 2 * lam), 0, 2 * (1 + lam) / (1 + 2 * lam)])
            assert got == want

    def test_degree_and_parity(self):
        rng = random.Random(37)
        for fam in (LEGENDRE, Ultraspherical(mpq(-1, 4)), HERMITE):
            for n in (3, 6, 9):
                p = exact_coefficients(fam, n)
                assert p.degree == n
                assert all(c == 0 for c in p.coeffs[(n % 2) ^ 1 :: 2][: n // 2])
                x = mpq(rng.randint(-9, 9), 10)
                assert p.eval_exact(-x) == (-1) ** n * p.eval_exact(x)

    def test_matches_recurrence_value(self):
        p = exact_coefficients(Ultraspherical(mpq(1, 3)), 5)
        _, val, _ = eval_triple_exact(Ultraspherical(mpq(1, 3)), 5, mpq(2, 7))
        assert p.eval_exact(mpq(2, 7)) == val

    def test_triple_consistency(self):
        a, b, c = exact_coefficients_triple(LEGENDRE, 4)
        assert a == exact_coefficients(LEGENDRE, 3)
        assert b == exact_coefficients(LEGENDRE, 4)
        assert c == exact_coefficients(LEGENDRE, 5)

    def test_irrational_parameter_rejected(self):
        from turankit.errors import IrrationalParameterError

        with pytest.raises(IrrationalParameterError):
            exact_coefficients(Ultraspherical(0.123456789), 3)


class TestNormalization:
    def test_unit_at_one_exact(self):
        for fam in (LEGENDRE, Ultraspherical(mpq(-1, 4)), Ultraspherical(0),
                    SymmetricUnit(UltrasphericalRatio(mpq(-1, 4)))):
            for n in range(1, 21):
                _, val, _ = eval_triple_exact(fam, n, 1)
                assert val == 1

    def test_unit_at_one_numeric(self):
        # forced through the generic recurrence (derivatives disable the shortcut)
        for n in (5, 20):
            t = eval_triple(Ultraspherical(mpq(1, 3)), n, 1, 192, with_derivatives=True)
            assert abs(t.p_cur - 1) < mpfr(2) ** -96

    def test_symmetry_numeric(self):
        rng = random.Random(41)
        for fam in (Ultraspherical(mpq(5, 4)), HERMITE):
            for _ in range(10):
                x = mpq(rng.randint(-200, 200), 100)
                n = rng.randint(1, 12)
                tp = eval_triple(fam, n, x, 128)
                tm = eval_triple(fam, n, -x, 128)
                assert tp.p_cur == (-1) ** n * tm.p_cur

    def test_chebyshev_specialization(self):
        fam = Ultraspherical(0)
        for n in (1, 4, 9):
            for k in range(1, 8):
                phi = k * math.pi / 8.3
                t = eval_triple(fam, n, math.cos(phi), 128)
                assert abs(t.p_cur - math.cos(n * phi)) < 1e-14


class TestDerivatives:
    def test_against_central_difference(self):
        bits = 192
        h = mpq(1, 2 ** (bits // 3))
        rng = random.Random(43)
        for fam in (LEGENDRE, Ultraspherical(mpq(-1, 3)), HERMITE):
            for _ in range(6):
                n = rng.randint(1, 15)
                x = mpq(rng.randint(-80, 80), 100)
                t = eval_triple(fam, n, x, bits, with_derivatives=True)
                tp = eval_triple(fam, n, x + h, bits)
                tm = eval_triple(fam, n, x - h, bits)
                fd = (tp.p_cur - tm.p_cur) / (2 * h)
                scale = max(mpfr(1), abs(t.dp_cur))
                assert abs(t.dp_cur - fd) <= scale * mpfr(2) ** (-bits // 3)

    def test_known_derivative(self):
        # P_3' = (15x^2 - 3)/2
        t = eval_triple(LEGENDRE, 3, mpq(1, 2), with_derivatives=True)
        assert abs(t.dp_cur - mpfr("0.375")) < 1e-30


class TestHermiteConvert:
    def test_monic_to_standard_n1(self):
        t = eval_triple(HERMITE, 1, 1)
        s = hermite_convert(t, "standard")
        assert (s.p_prev, s.p_cur, s.p_next) == (1, 2, 2)  # H0, H1, H2 at 1

    def test_standard_h3_at_one(self):
        t = eval_triple(HERMITE, 2, 1)
        s = hermite_convert(t, "standard")
        assert s.p_next == -4  # H3(1) = 8 - 12
        back = hermite_convert(s, "monic")
        assert back.p_next == mpq(-1, 2)

    def test_roundtrip_identity(self):
        t = eval_triple(HERMITE, 5, mpq(-3, 2))
        back = hermite_convert(hermite_convert(t, "standard"), "monic")
        assert back.p_cur == t.p_cur

    def test_bad_target(self):
        t = eval_triple(HERMITE, 1, 1)
        with pytest.raises(ValueError):
            hermite_convert(t, "physicist")


class TestGeneralThreeTerm:
    def test_evaluates_with_offsets(self):
        fam = GeneralThreeTerm(
            a=ExplicitList(["1/3", "2/5"], start=1),
            b=ExplicitList(["2", "1/2", "3/2"], start=0),
            c=ExplicitList(["0", "1/7", "-2/3"], start=0),
        )
        p_prev, p_cur, p_next = eval_triple_exact(fam, 1, mpq(1, 2))
        assert p_prev == 1
        assert p_cur == 1  # b0 x + c0 = 2 * 1/2
        assert p_next == (mpq(1, 4) + mpq(1, 7)) * 1 - mpq(1, 3) * 1
