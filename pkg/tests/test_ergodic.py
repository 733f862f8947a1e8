from __future__ import annotations

import math
from fractions import Fraction

import pytest

from qphi import ergodic
from qphi.ergodic import (LogKernel, SingularitySpec, closed_form_integral,
                          envelope_integral, epsilon_sweep, exclusion_set,
                          quadrature_integral, singular_average_report,
                          weyl_average, weyl_average_sawtooth)


class TestClosedForm:
    def test_inside(self):
        assert closed_form_integral(0.5) == 0.0

    def test_at_one(self):
        assert closed_form_integral(1) == 0.0

    def test_outside(self):
        assert closed_form_integral(2) == pytest.approx(math.log(2))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            closed_form_integral(-1)


class TestQuadrature:
    @pytest.mark.parametrize("r", [0, Fraction(3, 10), Fraction(9, 10),
                                   Fraction(11, 10), 2, 10])
    def test_matches_closed_form_smooth(self, r):
        q = quadrature_integral(LogKernel(Fraction(r)), 1e-8)
        assert float(q) == pytest.approx(closed_form_integral(r), abs=1e-6)

    def test_singular_case(self):
        q = quadrature_integral(LogKernel(Fraction(1)), 1e-8)
        assert float(q) == pytest.approx(0.0, abs=1e-3)

    def test_shift_invariance(self):
        for shift in (Fraction(1, 3), Fraction(7, 11)):
            q = quadrature_integral(LogKernel(Fraction(2), shift), 1e-8)
            assert float(q) == pytest.approx(math.log(2), abs=1e-6)
            qs = quadrature_integral(LogKernel(Fraction(1), shift), 1e-8)
            assert float(qs) == pytest.approx(0.0, abs=1e-3)

    def test_tolerance_floor(self):
        with pytest.raises(ValueError):
            quadrature_integral(LogKernel(Fraction(2)), 1e-12)

    def test_subinterval(self):
        # int_eps^{1-eps} log(2 sin pi x) dx for the unit kernel
        q = quadrature_integral(LogKernel(Fraction(1)), 1e-8, lo=0.05, hi=0.95)
        # independent midpoint-rule check
        n = 20001
        h = 0.9 / n
        mid = sum(math.log(2 * math.sin(math.pi * (0.05 + (i + 0.5) * h)))
                  for i in range(n)) * h
        assert float(q) == pytest.approx(mid, abs=1e-5)


class TestWeylAverage:
    def test_r2(self, sqrt2):
        w = weyl_average(LogKernel(Fraction(2)), sqrt2, 10**4)
        assert float(w) == pytest.approx(math.log(2), abs=5e-3)

    def test_r_half(self, sqrt2):
        w = weyl_average(LogKernel(Fraction(1, 2)), sqrt2, 10**4)
        assert float(w) == pytest.approx(0.0, abs=5e-3)

    def test_unit(self, sqrt2):
        w = weyl_average(LogKernel(Fraction(1)), sqrt2, 10**5)
        assert float(w) == pytest.approx(0.0, abs=1e-2)

    def test_convergence_improves(self, sqrt2):
        for r in (Fraction(2), Fraction(1, 2)):
            cf = closed_form_integral(r)
            coarse = abs(float(weyl_average(LogKernel(r), sqrt2, 10**3)) - cf)
            fine = abs(float(weyl_average(LogKernel(r), sqrt2, 10**5)) - cf)
            assert fine < coarse

    def test_sawtooth_smoke(self, sqrt2):
        w = weyl_average_sawtooth(sqrt2, 10**5)
        assert float(w) == pytest.approx(0.5, abs=5e-3)

    def test_matches_brute_force(self, sqrt2):
        from qphi.exactnum import eval_angle
        theta = float(Fraction(eval_angle(sqrt2, 200).value))
        direct = sum(math.log(abs(1 - 2 * math.e ** (2j * math.pi * ((k * theta) % 1))))
                     for k in range(1, 201)) / 200
        w = weyl_average(LogKernel(Fraction(2)), sqrt2, 200)
        assert float(w) == pytest.approx(direct, abs=1e-9)


class TestAdmissibility:
    def test_rational_offsets_admissible(self):
        assert SingularitySpec(Fraction(0), Fraction(0)).admissible()
        assert SingularitySpec(Fraction(1, 2), Fraction(1, 3)).admissible()
        assert SingularitySpec(Fraction(-3), Fraction(2)).admissible()

    def test_orbit_collision_rejected(self):
        # c = k*theta + integer is hit by the orbit at k
        assert not SingularitySpec(Fraction(2), Fraction(0)).admissible()
        assert not SingularitySpec(Fraction(1), Fraction(5)).admissible()

    def test_exclusion_rejects_inadmissible(self, sqrt2):
        with pytest.raises(ValueError):
            exclusion_set(sqrt2, SingularitySpec(Fraction(3), Fraction(1)),
                          100, 0.1)


class TestExclusionSets:
    def test_tiny_epsilon_empty(self, sqrt2):
        assert exclusion_set(sqrt2, SingularitySpec(0, 0), 100, 1e-9) == []

    def test_density_two_epsilon(self, sqrt2):
        J = exclusion_set(sqrt2, SingularitySpec(0, 0), 10**5, 0.1)
        assert len(J) / 10**5 == pytest.approx(0.2, rel=0.1)

    def test_near_half_every_index(self, sqrt2):
        J = exclusion_set(sqrt2, SingularitySpec(0, 0), 1000, 0.499999)
        assert len(J) / 1000 > 0.99

    def test_theta_shifted_center(self, sqrt2):
        # c = theta/2 + 1/4: still ~2 eps density
        c = SingularitySpec(Fraction(1, 2), Fraction(1, 4))
        J = exclusion_set(sqrt2, c, 10**5, 0.05)
        assert len(J) / 10**5 == pytest.approx(0.1, rel=0.1)

    def test_matches_brute_force(self, sqrt2):
        from qphi.exactnum import eval_angle
        theta = Fraction(eval_angle(sqrt2, 200).value)
        eps = 0.07
        expected = []
        for k in range(1, 2001):
            x = (k * theta) % 1
            d = min(x, 1 - x)
            if float(d) < eps:
                expected.append(k)
        got = exclusion_set(sqrt2, SingularitySpec(0, 0), 2000, eps)
        assert got == expected


@pytest.fixture(scope="module")
def report(sqrt2):
    return singular_average_report(LogKernel(Fraction(1)), sqrt2,
                                   [SingularitySpec(0, 0)], 10**5, 0.05)


class TestSingularAverageReport:
    def test_density(self, report):
        assert report.density == pytest.approx(0.1, rel=0.1)

    def test_full_average_near_zero(self, report):
        assert abs(float(report.full_avg)) < 0.01

    def test_bookkeeping_exact(self, report):
        # the three averages share their summands: full = restricted + excluded
        assert float(report.full_avg) == float(report.restricted_avg) + \
            float(report.excluded_sum)

    def test_envelope_holds(self, report):
        assert report.holds_envelope
        assert float(report.excluded_mass) <= report.envelope_bound

    def test_restricted_matches_quadrature(self, report, sqrt2):
        q = quadrature_integral(LogKernel(Fraction(1)), 1e-8, lo=0.05, hi=0.95)
        assert float(report.restricted_avg) == pytest.approx(float(q), abs=5e-3)

    def test_sweep_mass_decreases(self, sqrt2):
        reps = epsilon_sweep(LogKernel(Fraction(1)), sqrt2,
                             [SingularitySpec(0, 0)], 10**5)
        masses = [float(r.excluded_mass) for r in reps]
        assert all(b < a for a, b in zip(masses, masses[1:]))
        assert all(r.holds_envelope for r in reps)

    def test_kernel_must_be_unit(self, sqrt2):
        with pytest.raises(ValueError):
            singular_average_report(LogKernel(Fraction(2)), sqrt2,
                                    [SingularitySpec(0, 0)], 100, 0.05)

    def test_singularity_must_coincide(self, sqrt2):
        with pytest.raises(ValueError):
            singular_average_report(LogKernel(Fraction(1), Fraction(1, 3)),
                                    sqrt2, [SingularitySpec(0, 0)], 100, 0.05)

    def test_shifted_kernel_report(self, sqrt2):
        rep = singular_average_report(
            LogKernel(Fraction(1), Fraction(1, 3)), sqrt2,
            [SingularitySpec(Fraction(0), Fraction(-1, 3))], 10**4, 0.05)
        assert rep.holds_envelope
        assert abs(float(rep.full_avg)) < 0.05


class TestEnvelopeIntegral:
    def test_closed_form_against_quadrature(self):
        for x in (0.01, 0.1, 1 / math.pi, 0.5, 0.9):
            n = 40000
            h = x / n
            mid = sum(abs(math.log(math.pi * ((i + 0.5) * h)))
                      for i in range(n)) * h
            assert envelope_integral(x) == pytest.approx(mid, rel=1e-4)

    def test_zero(self):
        assert envelope_integral(0.0) == 0.0
