"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with  pytest tests/test_acceptance.py -v -s  to see the per-criterion
lines.  Every tolerance is pinned here; the limit statements behind the
trend-style criteria come without rates, so those tolerances are measured
engineering bounds and are asserted as such.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import pytest

from qphi import diophant, ergodic, liouville, qseries
from qphi.ergodic import LogKernel, SingularitySpec
from qphi.qpoch import combo, polar, root_test_sequence
from qphi.qseries import SeriesParams


def _criterion(num: int, ok: bool, desc: str, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    tail = f"  ({detail})" if detail else ""
    print(f"\n[criterion {num:02d}] {status}: {desc}{tail}")
    assert ok, f"criterion {num:02d} failed: {desc}{tail}"


def test_criterion_01_integral_formula():
    t0 = time.time()
    ok = True
    worst = 0.0
    for r in (Fraction(0), Fraction(3, 10), Fraction(9, 10), Fraction(11, 10),
              Fraction(2), Fraction(10)):
        q = ergodic.quadrature_integral(LogKernel(r), 1e-8)
        diff = abs(float(q) - ergodic.closed_form_integral(r))
        worst = max(worst, diff)
        ok &= diff < 1e-6
    q1 = ergodic.quadrature_integral(LogKernel(Fraction(1)), 1e-8)
    diff1 = abs(float(q1))
    ok &= diff1 < 1e-3
    elapsed = time.time() - t0
    ok &= elapsed < 60
    _criterion(1, ok, "quadrature matches the closed-form integral",
               f"worst smooth diff {worst:.2e}, r=1 diff {diff1:.2e}, {elapsed:.1f}s")


def test_criterion_02_nonunit_root_tests(sqrt2):
    t0 = time.time()
    big = root_test_sequence(polar(2, 0), sqrt2, [10**5])[0].value
    small = root_test_sequence(polar(Fraction(1, 2), 0), sqrt2, [10**5])[0].value
    ok = abs(big / 2 - 1) < 0.01 and abs(small / 1 - 1) < 0.01
    _criterion(2, ok, "root test at n=1e5 within 1% of max(|a|,1) for |a|=2, 1/2",
               f"{big:.6f} vs 2, {small:.6f} vs 1, {time.time()-t0:.1f}s")


def test_criterion_03_unit_base_limit(sqrt2):
    pts = root_test_sequence(combo(0, 1), sqrt2, [10**4, 10**5])
    v4, v5 = pts[0], pts[1]
    in_band = 0.95 <= v5.value <= 1.05
    trend = abs(v5.log_mean.value) < abs(v4.log_mean.value)
    _criterion(3, in_band and trend,
               "|(q;q)_n|^(1/n) in [0.95, 1.05] at n=1e5 with shrinking |log|",
               f"value {v5.value:.6f}, |log| {abs(v4.log_mean.value):.2e} -> "
               f"{abs(v5.log_mean.value):.2e} (measured bound, not a proved rate)")


def test_criterion_04_running_max(sqrt2, golden, liou22):
    worst = 0.0
    for theta in (sqrt2, golden, liou22):
        pts = root_test_sequence(combo(0, 1), theta, [100, 1000, 10**4, 10**5])
        worst = max(worst, max(p.value for p in pts))
    _criterion(4, worst <= 1.05,
               "running max of the (q;q)_n root test (n >= 100) stays <= 1.05",
               f"max over the three bases {worst:.4f}")


def test_criterion_05_radius_formula(sqrt2):
    p = SeriesParams((polar(2, 0), combo(Fraction(1, 5), Fraction(1, 2))),
                     (polar(3, 0),), sqrt2)
    pred = qseries.predicted_radius(p)
    emp = qseries.empirical_radius(p, 10**4)
    exact = pred.value == Fraction(3, 2) and pred.case_tag == "unit_bad_approx"
    close = abs(emp.estimate / 1.5 - 1) < 0.1
    _criterion(5, exact and close,
               "predicted radius exactly 3/2; empirical within 10% at n=1e4",
               f"empirical {emp.estimate:.6f}")


def test_criterion_06_classical_radii(sqrt2):
    inf_case = qseries.predicted_radius(
        SeriesParams((polar(2, 0),), (polar(3, 0),), sqrt2, Fraction(1, 2)))
    one_case = qseries.predicted_radius(
        SeriesParams((polar(2, 0), polar(5, 0)), (polar(3, 0),), sqrt2,
                     Fraction(1, 2)))
    out_case = qseries.predicted_radius(
        SeriesParams((polar(3, 0),), (polar(5, 0),), sqrt2, Fraction(2)))
    ok = (inf_case.value == math.inf and one_case.value == 1
          and out_case.value == Fraction(10, 3))
    _criterion(6, ok, "classical radii: inf (r<=s), 1 (r=s+1), 10/3 (|q|=2) exact",
               f"{inf_case.value}, {one_case.value}, {out_case.value}")


def test_criterion_07_sqrt2_inequality():
    t0 = time.time()
    res = diophant.verify_sqrt2_inequality(10**6)
    elapsed = time.time() - t0
    min_val = float(res["min_margin"]) + 1 / 3
    ok = (res["holds"] and abs(min_val - 0.343146) < 1e-6
          and res["argmin_m"] == 2 and elapsed < 10)
    _criterion(7, ok, "m*||m*sqrt2|| > 1/3 up to 1e6; min ~0.343146 at m=2",
               f"min {min_val:.7f}, argmin {res['argmin_m']}, {elapsed:.2f}s")


def test_criterion_08_liouville_construction(seq3, seq4):
    t0 = time.time()
    certs = [liouville.check_small(seq4, n) for n in (1, 2, 3)]
    all_hold = all(c.holds for c in certs)
    exact = all(isinstance(c.distance_hi, Fraction) and isinstance(c.bound, Fraction)
                for c in certs)
    w2 = liouville.product_bound_witness(seq3, 2)
    w3 = liouville.product_bound_witness(seq3, 3)
    ok_w2 = float(w2.root) <= 0.62 and w2.holds
    ok_w3 = float(w3.root) <= 1e-4 and w3.holds
    decreasing = float(w3.root) < float(w2.root)
    elapsed = time.time() - t0
    ok = all_hold and exact and ok_w2 and ok_w3 and decreasing and elapsed < 60
    _criterion(8, ok,
               "smallness certificates exact at n=1,2,3; product roots capped "
               "and decreasing",
               f"roots {float(w2.root):.4f} -> {float(w3.root):.2e}, {elapsed:.1f}s")


def test_criterion_09_radius_collapse(liou22):
    p = SeriesParams((polar(2, 0),), (polar(3, 0),), liou22)
    emp = qseries.empirical_radius(p, 10**3)
    witness_ns = [n for n, _ in emp.witnesses]
    ok = (emp.collapse and emp.estimate < 0.1
          and 8 in witness_ns and 645120 in witness_ns)
    _criterion(9, ok, "empirical radius collapses on the Liouville base",
               f"estimate {emp.estimate:.2e}, witnesses at n={witness_ns}")


def test_criterion_10_exclusion_harness(sqrt2):
    n = 10**5
    kernel = LogKernel(Fraction(1))
    c = [SingularitySpec(0, 0)]
    reps = ergodic.epsilon_sweep(kernel, sqrt2, c, n, (0.1, 0.05, 0.02, 0.01))
    by_eps = {r.epsilon: r for r in reps}
    density_ok = abs(by_eps[0.05].density / 0.1 - 1) < 0.1
    masses = [float(r.excluded_mass) for r in reps]
    decreasing = all(b < a for a, b in zip(masses, masses[1:]))
    under_envelope = all(r.holds_envelope for r in reps)
    avg_ok = abs(float(by_eps[0.05].full_avg)) < 0.01
    ok = density_ok and decreasing and under_envelope and avg_ok
    _criterion(10, ok,
               "exclusion density ~2*eps, masses decrease under the envelope, "
               "full average ~0",
               f"density {by_eps[0.05].density:.4f}, masses "
               + "->".join(f"{m:.3f}" for m in masses)
               + f", avg {float(by_eps[0.05].full_avg):.2e}")


def test_criterion_11_ratio_consistency(sqrt2, liou22):
    matrix = [
        SeriesParams((polar(2, 0), combo(Fraction(1, 5), Fraction(1, 2))),
                     (polar(3, 0),), sqrt2),
        SeriesParams((polar(2, 0), polar(3, 0)), (polar(4, 0),), sqrt2),
        SeriesParams((polar(2, 0),), (polar(3, 0),), liou22),
        SeriesParams((polar(2, 0), polar(5, 0)), (polar(3, 0),), sqrt2,
                     Fraction(1, 2)),
    ]
    worst = 0.0
    ok = True
    for p in matrix:
        logc, err = qseries._window_logc(p, 1, 1001)
        tol = 2 * err + 1e-9
        for n in range(1, 1001, 7):
            tr = qseries.term_ratio(p, n, 1)
            diff = abs((logc[n] - logc[n - 1]) - tr.log_magnitude)
            worst = max(worst, diff)
            ok &= diff <= tol
    _criterion(11, ok,
               "log|c_{n+1}| - log|c_n| matches log|ratio(n, z=1)| for n <= 1e3",
               f"worst deviation {worst:.2e} across 4 parameter sets")
