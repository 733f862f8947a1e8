"""Equidistribution averages and the singular-average exclusion harness.

For irrational theta the orbit k*theta mod 1 equidistributes, so Riemann
sums (1/n) sum f(k*theta) tend to the integral of f.  The integrand of
interest, log|1 - r e^(2*pi*i*(x+shift))|, has closed-form integral 0 for
r <= 1 and log r for r >= 1; at r = 1 it is unbounded at one point of the
circle, and the harness here quantifies how little the orbit points falling
into an eps-ball around each admissible singularity c_j contribute:
their mass is capped by (2/C) * int_0^{6 eps/C} |log(pi t)| dt with C the
finite-scan badly-approximable constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _kernels
from .exactnum import AngleSpec, BoundedReal, phase_walk, working_bits
from .qpoch import UnitComboParam, _qpoch_segment, _scan_params_error, _singular_term

__all__ = [
    "LogKernel",
    "SingularitySpec",
    "ExclusionReport",
    "closed_form_integral",
    "quadrature_integral",
    "weyl_average",
    "weyl_average_sawtooth",
    "exclusion_set",
    "singular_average_report",
    "epsilon_sweep",
    "envelope_integral",
]

SCAN_CAP = 10**6
_SING_BITS = 40


@dataclass(frozen=True)
class LogKernel:
    """f(x) = log|1 - r * e^(2*pi*i*(x + shift))|, periodic with period 1."""

    r: Fraction
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "shift", Fraction(self.shift) % 1)
        if self.r < 0:
            raise ValueError("modulus must be nonnegative")

    @property
    def unit(self) -> bool:
        return self.r == 1

    @property
    def log_r(self) -> float:
        if self.r == 0 or self.r == 1:
            return 0.0
        return math.log(self.r.numerator) - math.log(self.r.denominator)

    def __call__(self, x: float) -> float:
        xf = x % 1.0
        d = xf + float(self.shift)
        d = d % 1.0
        d = d if d <= 0.5 else 1.0 - d
        if self.r == 0:
            return 0.0
        return _kernels.log_term(self.log_r, d, self.unit)


@dataclass(frozen=True)
class SingularitySpec:
    """c = r_j * theta + offset (mod 1) with rational r_j and offset.

    The admissibility requirement is that no orbit point k*theta (k >= 1)
    hits c exactly: k*theta - c = (k - r_j)*theta - offset is an integer only
    when the theta coefficient vanishes, i.e. r_j is a positive integer and
    the offset is integral.  That degenerate combination is rejected; every
    other rational pair is admissible because theta is irrational.
    """

    r_j: Fraction
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r_j", Fraction(self.r_j))
        object.__setattr__(self, "offset", Fraction(self.offset))

    def admissible(self) -> bool:
        return not (self.r_j.denominator == 1 and self.r_j >= 1
                    and self.offset.denominator == 1)


@dataclass(frozen=True)
class ExclusionReport:
    n: int
    epsilon: float
    excluded_indices: tuple
    density: float
    full_avg: BoundedReal
    restricted_avg: BoundedReal
    excluded_sum: BoundedReal
    excluded_mass: BoundedReal
    envelope_constant: float
    envelope_scan_limit: int
    envelope_bound: float
    holds_envelope: bool


def closed_form_integral(r) -> float:
    """int_0^1 log|1 - r e^(2*pi*i*x)| dx: 0 for r <= 1, log r for r >= 1."""
    r = float(r)
    if r < 0:
        raise ValueError("r must be nonnegative")
    return 0.0 if r <= 1.0 else math.log(r)


def envelope_integral(x: float) -> float:
    """int_0^x |log(pi t)| dt in closed form (h is the monotone envelope)."""
    if x <= 0.0:
        return 0.0
    if x <= 1.0 / math.pi:
        return x * (1.0 - math.log(math.pi * x))
    return 2.0 / math.pi + x * (math.log(math.pi * x) - 1.0)


def _adaptive_simpson(f, a, b, fa, fm, fb, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0, abs(delta) / 7.5
    lv, le = _adaptive_simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1)
    rv, re = _adaptive_simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1)
    return lv + rv, le + re


def _quad_smooth(f, a, b, tol):
    if b <= a:
        return 0.0, 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    return _adaptive_simpson(f, a, b, fa, fm, fb, tol, 48)


def quadrature_integral(kernel: LogKernel, tolerance: float,
                        lo: float = 0.0, hi: float = 1.0) -> BoundedReal:
    """Numerical int_lo^hi of the kernel with an adaptive panel scheme.

    Panels are split at the kernel's root and at the half-turn kink.  For
    r = 1 the log singularity is removed by subtracting the integrable model
    log(2*pi*|x - x0|) near x0 (its panel integral is in closed form) and
    quadrating the smooth remainder log(sin(pi t)/(pi t)).
    """
    if tolerance < 1e-10:
        raise ValueError("tolerance must be >= 1e-10")
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError("need 0 <= lo < hi <= 1")
    x0 = float((-kernel.shift) % 1)
    cuts = {lo, hi}
    for b in (x0, (x0 + 0.5) % 1.0):
        for cand in (b - 1.0, b, b + 1.0):
            if lo < cand < hi:
                cuts.add(cand)
    cuts = sorted(cuts)
    total = 0.0
    err = 0.0
    n_panels = max(1, len(cuts) - 1)
    if not kernel.unit:
        for a, b in zip(cuts, cuts[1:]):
            v, e = _quad_smooth(kernel, a, b, tolerance / n_panels)
            total += v
            err += e
        return BoundedReal(total, err + 1e-12)

    # unit modulus: integrate around each image of the singularity within
    # [lo, hi] with the model subtraction, the rest directly
    delta = 1.0 / 64.0

    def remainder(t):
        # log(sin(pi t)/(pi t)) for t in (0, 1/2]; smooth, -> 0 at 0
        if t <= 0.0:
            return 0.0
        return math.log(2.0 * math.sin(math.pi * t)) - math.log(2.0 * math.pi * t)

    sing_images = [x0 + j for j in (-1, 0, 1) if lo - delta < x0 + j < hi + delta]

    def near_sing(x):
        return any(abs(x - s) < delta for s in sing_images)

    for a, b in zip(cuts, cuts[1:]):
        mid = 0.5 * (a + b)
        if near_sing(a) or near_sing(b) or near_sing(mid):
            # split [a, b] into the model part and the remainder
            s = min(sing_images, key=lambda v: abs(v - mid))
            # int log(2 pi |x - s|) over [a, b], both sides of s clipped to it
            for p, q in ((a, min(b, s)), (max(a, s), b)):
                if q <= p:
                    continue
                w1, w2 = abs(p - s), abs(q - s)
                w_lo, w_hi = min(w1, w2), max(w1, w2)
                # int_{w_lo}^{w_hi} log(2 pi t) dt
                def F(w):
                    return 0.0 if w == 0.0 else w * (math.log(2.0 * math.pi * w) - 1.0)
                total += F(w_hi) - F(w_lo)
                v, e = _quad_smooth(lambda t: remainder(abs(t - s)), p, q,
                                    tolerance / (2 * n_panels))
                total += v
                err += e
        else:
            v, e = _quad_smooth(kernel, a, b, tolerance / n_panels)
            total += v
            err += e
    return BoundedReal(total, err + 1e-12)


def _orbit_walk(theta: AngleSpec, kernel: LogKernel, n: int, p_bits=None):
    """Walk for f(k*theta), k = 1..n: phases shift + (1 + k')*theta, k' in [0, n)."""
    return phase_walk(theta, kernel.shift, Fraction(1), n, p_bits=p_bits)


def weyl_average(kernel: LogKernel, theta: AngleSpec, n: int) -> BoundedReal:
    """(1/n) * sum_{k=1..n} f(k*theta) with a certified error bound."""
    if n < 1:
        raise ValueError("n must be positive")
    if kernel.r == 0:
        return BoundedReal(0.0, 0.0)
    walk = _orbit_walk(theta, kernel, n)
    a_eff = UnitComboParam(kernel.shift, Fraction(1))
    total, err = _qpoch_segment(a_eff, theta, 0, n, walk,
                                kernel.log_r, 0.0, kernel.unit)
    return BoundedReal(total / n, err / n + 1e-16 * abs(total / n))


def weyl_average_sawtooth(theta: AngleSpec, n: int) -> BoundedReal:
    """Smoke-test kernel f(x) = frac(x): the average tends to 1/2."""
    if n < 1:
        raise ValueError("n must be positive")
    walk = phase_walk(theta, Fraction(0), Fraction(1), n)
    full = 1 << walk.p_bits
    mask = full - 1
    s = walk.offset_fp % full
    inv = math.ldexp(1.0, -walk.p_bits)
    acc = 0.0
    comp = 0.0
    for _ in range(n):
        term = float(s) * inv
        y = term - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        s = (s + walk.step_fp) & mask
    err = walk.offset_err + n * walk.step_err + 1e-15 * n
    return BoundedReal(acc / n, err + 1e-16)


def _center_fp(theta: AngleSpec, c: SingularitySpec, p_bits: int,
               extra_offset: Fraction = Fraction(0)) -> int:
    w = phase_walk(theta, c.offset + extra_offset, c.r_j, 1, p_bits=p_bits)
    return w.offset_fp


def exclusion_set(theta: AngleSpec, c: SingularitySpec, n: int,
                  epsilon: float) -> list:
    """J = { 1 <= k <= n : min_m |k*theta - c - m| < epsilon }, ascending."""
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    if not c.admissible():
        raise ValueError(
            "inadmissible singularity: the orbit hits it exactly at k = r_j")
    p = working_bits(n)
    walk = phase_walk(theta, Fraction(0), Fraction(0), n, p_bits=p)
    c_fp = _center_fp(theta, c, p)
    eps_fp = round(epsilon * (1 << p))
    return _kernels.exclusion_scan(walk.step_fp, c_fp, p, n, eps_fp)


def _scan_constant_offset(theta: AngleSpec, c: SingularitySpec, limit: int):
    p = working_bits(limit)
    walk = phase_walk(theta, Fraction(0), Fraction(0), limit, p_bits=p)
    c_fp = _center_fp(theta, c, p)
    m, best = _kernels.min_prod_scan(walk.step_fp, p, limit, c_fp)
    return float(Fraction(best, 1 << p)), m


def singular_average_report(kernel: LogKernel, theta: AngleSpec,
                            c_list: Sequence[SingularitySpec], n: int,
                            epsilon: float) -> ExclusionReport:
    """Partition the Weyl sum of a unit-modulus kernel around its singularity.

    The report carries the full average, the average restricted to indices
    outside every eps-ball (full = restricted + excluded holds exactly, the
    three sums share their summands), the excluded absolute mass, and the
    envelope cap (2/C) * int_0^{6 eps/C} |log(pi t)| dt computed with the
    finite-scan constant C (heuristic exactly to the extent the scan is
    finite).  The kernel's own singularity, at x = -shift mod 1, must appear
    among the c_j, which pins r_j = 0 and offset = -shift mod 1 for that
    entry.
    """
    if not kernel.unit:
        raise ValueError("singular averages need a unit-modulus kernel")
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    if n < 1:
        raise ValueError("n must be positive")
    if not c_list:
        raise ValueError("need at least one singularity")
    for c in c_list:
        if not c.admissible():
            raise ValueError("inadmissible singularity in c_list")
    if not any(c.r_j == 0 and (c.offset + kernel.shift) % 1 == 0 for c in c_list):
        raise ValueError(
            "the kernel's singularity (-shift mod 1) is not among the c_j")
    if len(c_list) > 8:
        raise ValueError("at most 8 singularities per report")

    p = working_bits(n)
    walk = _orbit_walk(theta, kernel, n, p_bits=p)
    c_fps = tuple(_center_fp(theta, c, p, extra_offset=kernel.shift)
                  for c in c_list)
    eps_fp = round(epsilon * (1 << p))
    sing_fp = 1 << (p - _SING_BITS)
    if eps_fp <= sing_fp:
        raise ValueError("epsilon below the exact-escalation threshold 2**-40")
    res = _kernels.phase_scan(walk.step_fp, walk.offset_fp, p, 0, n,
                              0.0, 0.0, True, sing_fp, c_fps, eps_fp)
    err = _scan_params_error(walk, res, 0.0, 0.0, True, 0, n)
    excl_sum = res.excl_sum
    excl_abs = res.excl_abs
    excluded = [k + 1 for k in res.excluded]
    for k in res.singular:
        term, term_err = _singular_term(theta, kernel.shift, Fraction(1), k, p)
        excl_sum += term
        excl_abs += abs(term)
        err += term_err
        excluded.append(k + 1)
    excluded.sort()
    restricted_avg = res.main_sum / n
    excl_avg = excl_sum / n
    # the partition identity full = restricted + excluded holds exactly in
    # floats: the full average is defined as this one addition
    full_avg = restricted_avg + excl_avg

    limit = min(n, SCAN_CAP)
    c_eff = min(_scan_constant_offset(theta, c, limit)[0] for c in c_list)
    zero = SingularitySpec(Fraction(0), Fraction(0))
    c_eff = min(c_eff, _scan_constant_offset(theta, zero, limit)[0])
    mass = excl_abs / n
    bound = (2.0 / c_eff) * envelope_integral(6.0 * epsilon / c_eff)

    return ExclusionReport(
        n=n,
        epsilon=float(epsilon),
        excluded_indices=tuple(excluded),
        density=len(excluded) / n,
        full_avg=BoundedReal(full_avg, err / n),
        restricted_avg=BoundedReal(restricted_avg, err / n),
        excluded_sum=BoundedReal(excl_avg, err / n),
        excluded_mass=BoundedReal(mass, err / n),
        envelope_constant=c_eff,
        envelope_scan_limit=limit,
        envelope_bound=bound,
        holds_envelope=bool(mass + err / n <= bound),
    )


def epsilon_sweep(kernel: LogKernel, theta: AngleSpec,
                  c_list: Sequence[SingularitySpec], n: int,
                  epsilons: Sequence[float] = (0.1, 0.05, 0.02, 0.01)) -> list:
    """One ExclusionReport per epsilon (default sweep 0.1, 0.05, 0.02, 0.01)."""
    return [singular_average_report(kernel, theta, c_list, n, e) for e in epsilons]
