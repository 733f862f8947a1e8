from __future__ import annotations

import math
from fractions import Fraction

import pytest

from qphi import liouville
from qphi.errors import DepthCapError, InsufficientDepthError, SizeRefusedError
from qphi.liouville import (build_denominators, check_small,
                            product_bound_witness, shifted_variant,
                            theta_partial)
from qphi.qpoch import combo, root_test_sequence


class TestDenominators:
    def test_spec_family(self, seq3):
        assert seq3.denominators == (2, 8, 645120)

    def test_k3_family(self):
        assert build_denominators((3,), 2).denominators == (2, 12)

    def test_depth_one(self):
        assert build_denominators((), 1).denominators == (2,)

    def test_recurrence_exact(self, seq3):
        a = seq3.denominators
        assert a[1] == 2 * a[0] * math.factorial(a[0])
        assert a[2] == 2 * a[1] * math.factorial(a[1])

    def test_depth_cap(self):
        with pytest.raises(DepthCapError):
            build_denominators((2, 2, 2, 2), 5)

    def test_depth_four(self, seq4):
        a = seq4.denominators
        assert a[3] == 2 * a[2] * math.factorial(a[2])
        assert a[3].bit_length() == 11519625


class TestThetaPartial:
    def test_single_term(self, seq3):
        assert theta_partial(seq3, 1)["value"] == Fraction(1, 2)

    def test_two_terms(self, seq3):
        assert theta_partial(seq3, 2)["value"] == Fraction(5, 8)

    def test_three_terms(self, seq3):
        got = theta_partial(seq3, 3)
        assert got["value"] == Fraction(403201, 645120)
        # tail bound is exactly 2/a_4, materialized on demand
        a4 = 2 * 645120 * math.factorial(645120)
        assert got["tail_bound"] == Fraction(2, a4)

    def test_shift(self, seq3):
        got = theta_partial(seq3, 2, Fraction(1, 4))
        assert got["value"] == Fraction(5, 8) + Fraction(1, 4)

    def test_depth_checked(self, seq3):
        with pytest.raises(InsufficientDepthError):
            theta_partial(seq3, 4)

    def test_tail_is_valid_upper_bound(self, seq4):
        # tail past N is below the bound and above the next term
        for N in (1, 2, 3):
            tail_true_low = Fraction(1, seq4.denominators[N])
            bound = theta_partial(seq4, N)["tail_bound"]
            assert tail_true_low < bound


class TestCheckSmall:
    def test_n1(self, seq4):
        c = check_small(seq4, 1)
        assert c.holds
        assert c.bound == Fraction(1, 2)
        assert float(c.distance_lo) == pytest.approx(0.2500031, abs=1e-7)
        assert c.distance_lo <= c.distance_hi
        assert float(c.distance_hi) == pytest.approx(0.2500031, abs=1e-6)

    def test_n2(self, seq4):
        c = check_small(seq4, 2)
        assert c.holds
        assert c.bound == Fraction(1, 40320)
        assert float(c.distance_lo) == pytest.approx(1.2400794e-5, rel=1e-6)

    def test_n3(self, seq4):
        c = check_small(seq4, 3)
        assert c.holds
        # distance ~ 1/(2 * a_3!) is far below any float: compare in logs
        assert c.distance_lo > 0
        assert c.distance_hi < c.bound

    def test_verdicts_are_exact_rationals(self, seq4):
        c = check_small(seq4, 2)
        assert isinstance(c.distance_lo, Fraction)
        assert isinstance(c.distance_hi, Fraction)
        assert isinstance(c.bound, Fraction)

    def test_needs_tail_depth(self, seq3):
        with pytest.raises(InsufficientDepthError):
            check_small(seq3, 3)

    def test_inequality_chain(self, seq4):
        # distance <= a_n * (exact partial tail + tail bound) < 1/a_n!
        for n in (1, 2):
            c = check_small(seq4, n)
            a_n = seq4.denominators[n - 1]
            s = Fraction(0)
            for a in seq4.denominators[n:3]:
                s += Fraction(a_n, a)
            s += a_n * liouville._cheap_tail(seq4, 3)
            assert c.distance_hi <= s
            assert s < c.bound

    def test_phase_chord_bound(self, seq4):
        # |1 - e^(2 pi i a_n theta)| <= 2 pi ||a_n theta|| <= 2 pi / a_n!
        for n in (1, 2):
            c = check_small(seq4, n)
            d = float(c.distance_hi)
            chord = 2 * math.sin(math.pi * d)
            assert chord <= 2 * math.pi * d
            assert 2 * math.pi * d <= 2 * math.pi * float(c.bound)


class TestProductWitness:
    def test_n2(self, seq3):
        w = product_bound_witness(seq3, 2)
        assert w.a_n == 8
        bound_root = (2**8 * math.pi / math.factorial(8)) ** (1 / 8)
        assert bound_root == pytest.approx(0.613, abs=5e-3)
        assert float(w.root) <= bound_root
        assert w.holds
        assert w.log_product.value <= w.log_bound.value

    def test_n3(self, seq3):
        w = product_bound_witness(seq3, 3)
        assert w.a_n == 645120
        assert w.log_bound.value / w.a_n == pytest.approx(-11.7, abs=0.1)
        assert float(w.root) <= 1e-4
        assert w.holds

    def test_roots_decrease(self, seq3):
        w2 = product_bound_witness(seq3, 2)
        w3 = product_bound_witness(seq3, 3)
        assert float(w3.root) < float(w2.root)

    def test_size_refusal(self, seq4):
        with pytest.raises(SizeRefusedError):
            product_bound_witness(seq4, 4)

    def test_product_against_cyclotomic_identity(self, seq3):
        # prod_{m=1}^{Q-1} 2 sin(pi m / Q) = Q: with gcd(P, Q) = 1 the orbit
        # phases j*P/Q (j < Q) are a permutation, so log|(q;q)_{a_3}| equals
        # log Q plus the exactly-handled singular term plus tail corrections
        w = product_bound_witness(seq3, 3)
        Q = 645120
        lnfact, _ = liouville._ln_factorial(Q)
        ln_a4 = math.log(2) + math.log(Q) + lnfact
        expected = math.log(Q) + (math.log(2 * math.pi) + math.log(Q) - ln_a4)
        assert w.log_product.value == pytest.approx(expected, abs=1e-4)


class TestShiftedVariant:
    def test_zero_shift(self, seq3):
        spec, N = shifted_variant(seq3, Fraction(0))
        assert N == 1
        assert spec.shift == 0

    def test_quarter(self, seq3, seq4):
        spec, N = shifted_variant(seq3, Fraction(1, 4))
        assert N == 2
        for n in (2, 3):
            assert check_small(seq4, n, Fraction(1, 4)).holds

    def test_one_seventh(self, seq3):
        spec, N = shifted_variant(seq3, Fraction(1, 7))
        assert N == 3

    def test_persistence_from_N(self, seq4):
        spec, N = shifted_variant(seq4, Fraction(1, 7))
        assert N == 3
        assert check_small(seq4, 3, Fraction(1, 7)).holds

    def test_huge_denominator_refused(self, seq3):
        with pytest.raises(ValueError):
            shifted_variant(seq3, Fraction(1, 10**9))


class TestRootTestFeed:
    def test_qq_collapse_at_witnesses(self, liou22):
        pts = root_test_sequence(combo(0, 1), liou22, [8, 645120])
        assert pts[0].value < 0.62
        assert pts[1].value < 1e-4
