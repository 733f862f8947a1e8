from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qphi import exactnum
from qphi.errors import AngleParseError, DepthCapError
from qphi.exactnum import (AffineAngle, LiouvilleAngle, QuadraticSurd,
                           SurdAngle, dist_to_nearest_integer, eval_angle,
                           frac_multiple, parse_angle, working_bits)


def sqrt_oracle(d: int, bits: int) -> Fraction:
    """Independent sqrt(d) via the integer square root of d * 4**bits."""
    return Fraction(math.isqrt(d << (2 * bits)), 1 << bits)


class TestParse:
    def test_sqrt2(self):
        spec = parse_angle("surd:sqrt2")
        assert isinstance(spec, SurdAngle)
        assert (spec.surd.p, spec.surd.mult, spec.surd.d, spec.surd.c) == (0, 1, 2, 1)

    def test_general_surd(self):
        spec = parse_angle("surd:(1+1*sqrt5)/2")
        assert spec.surd == QuadraticSurd(1, 1, 5, 2)

    def test_affine(self):
        spec = parse_angle("affine:1/2*sqrt2+1/3")
        assert isinstance(spec, AffineAngle)
        assert spec.r1 == Fraction(1, 2)
        assert spec.r2 == Fraction(1, 3)
        assert spec.base.d == 2

    def test_affine_negative_offset(self):
        spec = parse_angle("affine:1*sqrt2-1")
        assert spec.r2 == -1

    def test_affine_zero_r1_rejected(self):
        with pytest.raises(AngleParseError):
            parse_angle("affine:0*sqrt2+1/3")

    def test_non_squarefree_rejected(self):
        with pytest.raises(AngleParseError):
            parse_angle("surd:sqrt12")

    def test_rational_surd_rejected(self):
        with pytest.raises(AngleParseError):
            parse_angle("surd:sqrt1")

    def test_liouville(self):
        spec = parse_angle("liouville:2,2")
        assert isinstance(spec, LiouvilleAngle)
        assert spec.k_seq == (2, 2)
        assert spec.depth == 3
        assert spec.shift == 0

    def test_liouville_shift(self):
        spec = parse_angle("liouville:2,3;shift=1/4")
        assert spec.k_seq == (2, 3)
        assert spec.shift == Fraction(1, 4)

    def test_liouville_bad_multiplier(self):
        with pytest.raises(AngleParseError):
            parse_angle("liouville:2,5")

    def test_garbage(self):
        with pytest.raises(AngleParseError):
            parse_angle("frobnicate:1")

    def test_depth_cap(self):
        with pytest.raises(DepthCapError):
            LiouvilleAngle((2, 2, 2, 2), 5)


class TestEval:
    def test_sqrt2_against_isqrt(self, sqrt2):
        br = eval_angle(sqrt2, 64)
        oracle = sqrt_oracle(2, 100)
        assert abs(Fraction(br.value) - oracle) <= br.abs_error + Fraction(1, 1 << 99)
        assert br.abs_error <= math.ldexp(1 + 1.5, -63)

    def test_affine_value(self):
        spec = parse_angle("affine:1*sqrt2-1")
        br = eval_angle(spec, 64)
        oracle = sqrt_oracle(2, 100) - 1
        assert abs(Fraction(br.value) - oracle) < Fraction(1, 1 << 60)

    def test_liouville_partial(self, liou22):
        br = eval_angle(liou22, 64)
        exact = Fraction(1, 2) + Fraction(1, 8) + Fraction(1, 645120)
        assert exact == Fraction(403201, 645120)
        assert abs(Fraction(br.value) - exact) < Fraction(1, 1 << 60)
        assert float(br) == pytest.approx(0.62500155009, abs=1e-10)

    def test_min_precision(self, sqrt2):
        with pytest.raises(ValueError):
            eval_angle(sqrt2, 4)


class TestFracMultiple:
    def test_k_zero(self, sqrt2):
        br = frac_multiple(sqrt2, 0, 1e-12)
        assert br.value == 0 and br.abs_error == 0

    def test_two_sqrt2(self, sqrt2):
        br = frac_multiple(sqrt2, 2, 1e-12)
        oracle = 2 * sqrt_oracle(2, 120) - 2
        assert abs(Fraction(br.value) - oracle) < 1e-12

    def test_liouville_exact(self, liou22):
        br = frac_multiple(liou22, 8, 1e-12)
        assert br.value == Fraction(1, 80640)
        assert float(br) == pytest.approx(1.2400794e-5, rel=1e-6)

    def test_congruence_exact_for_liouville(self, liou22):
        # defining congruence: k * (partial sum) - value is an integer
        for k in (1, 3, 8, 37, 645120):
            br = frac_multiple(liou22, k, 1e-9)
            diff = k * liou22.partial_value() - Fraction(br.value)
            assert diff.denominator == 1

    def test_error_within_target(self, sqrt2):
        for k in (1, 17, 99999):
            br = frac_multiple(sqrt2, k, 1e-15)
            assert br.abs_error <= 1e-15


class TestDist:
    def test_five_sqrt2(self, sqrt2):
        br = dist_to_nearest_integer(sqrt2, 5)
        oracle = abs(5 * sqrt_oracle(2, 120) - 7)
        assert abs(Fraction(br.value) - oracle) < 1e-15
        assert float(br) == pytest.approx(0.0710678, abs=1e-7)

    def test_two_sqrt2(self, sqrt2):
        br = dist_to_nearest_integer(sqrt2, 2)
        assert float(br) == pytest.approx(0.1715729, abs=1e-7)

    def test_liouville_eight(self, liou22):
        br = dist_to_nearest_integer(liou22, 8)
        assert float(br) == pytest.approx(1.24008e-5, rel=1e-4)

    def test_range(self, sqrt2):
        for k in (1, 2, 3, 10, 1000):
            v = float(dist_to_nearest_integer(sqrt2, k))
            assert 0 <= v <= 0.5

    def test_k_zero_rejected(self, sqrt2):
        with pytest.raises(ValueError):
            dist_to_nearest_integer(sqrt2, 0)


class TestIntervalSoundness:
    @given(k=st.integers(min_value=1, max_value=10**6))
    @settings(max_examples=60, deadline=None)
    def test_recompute_at_double_precision(self, k):
        spec = parse_angle("surd:sqrt2")
        br = frac_multiple(spec, k, 1e-12)
        fine = frac_multiple(spec, k, 1e-30)
        # compare on the circle: the two reductions drop the same integer
        delta = abs(Fraction(br.value) - Fraction(fine.value))
        delta = min(delta, 1 - delta)
        assert delta <= br.abs_error + fine.abs_error

    @given(k=st.integers(min_value=1, max_value=10**6),
           num=st.integers(min_value=1, max_value=20),
           den=st.integers(min_value=1, max_value=20))
    @settings(max_examples=30, deadline=None)
    def test_affine_specs(self, k, num, den):
        spec = AffineAngle(Fraction(num, den), QuadraticSurd(0, 1, 2, 1),
                           Fraction(den, num + den))
        br = frac_multiple(spec, k, 1e-10)
        fine = frac_multiple(spec, k, 1e-25)
        delta = abs(Fraction(br.value) - Fraction(fine.value))
        delta = min(delta, 1 - delta)
        assert delta <= br.abs_error + fine.abs_error


class TestPolicy:
    def test_working_bits_formula(self):
        assert working_bits(10**5) == 2 * 17 + 64
        assert working_bits(10**6) == 2 * 20 + 64

    def test_env_floor(self, monkeypatch):
        monkeypatch.setenv("QPHI_PRECISION_BITS", "300")
        assert working_bits(100) == 300

    def test_surd_normalization(self):
        s = QuadraticSurd(2, 2, 3, 4)
        assert (s.p, s.mult, s.c) == (1, 1, 2)

    def test_squarefree_table(self):
        good = [2, 3, 5, 6, 7, 10, 11, 13, 15]
        bad = [4, 8, 9, 12, 16, 18, 25, 50]
        for d in good:
            QuadraticSurd(0, 1, d, 1)
        for d in bad:
            with pytest.raises(AngleParseError):
                QuadraticSurd(0, 1, d, 1)
