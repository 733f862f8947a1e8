"""Log-magnitude evaluation of q-Pochhammer symbols on the unit circle.

(a;q)_n = prod_{j=1..n} (1 - a q^(j-1)) with q = e^(2*pi*i*theta).  Only
magnitudes are computed: log|(a;q)_n| is a sum of log|1 - r e^(2*pi*i*x_j)|
terms whose phases x_j walk an exact fixed-point orbit.  Unit-modulus terms
use log(2*sin(pi*d)) on the circle distance d, which is stable arbitrarily
close to the singularity; indices whose distance drops below 2**-40 are
recomputed outside the kernel at escalated precision (exact rationals for
Liouville bases).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import _kernels
from .errors import PrecisionError, SingularTermError
from .exactnum import (AngleSpec, BoundedReal, LiouvilleAngle, PhaseWalk,
                       float_up, liouville_exact_phase, phase_walk)

__all__ = [
    "PolarParam",
    "UnitComboParam",
    "ComplexParam",
    "polar",
    "combo",
    "param_from_text",
    "RootTestPoint",
    "log_abs_one_minus",
    "log_abs_qpochhammer",
    "root_test_sequence",
    "classify_limit",
]

SINGULAR_BITS = 40  # circle distances below 2**-40 escalate out of the kernel
_EVAL_EPS = 1e-15   # per-term double rounding allowance for the libm path


@dataclass(frozen=True)
class PolarParam:
    """r * e^(2*pi*i*angle_turns) with exact rational modulus r != 1.

    Unit modulus with a rational angle is the beta = 0 case of
    UnitComboParam; the polar() factory performs that normalization.
    """

    modulus: Fraction
    angle_turns: Fraction

    def __post_init__(self):
        object.__setattr__(self, "modulus", Fraction(self.modulus))
        object.__setattr__(self, "angle_turns", Fraction(self.angle_turns))
        if self.modulus < 0:
            raise ValueError("modulus must be nonnegative")
        if self.modulus == 1:
            raise ValueError("unit modulus: use UnitComboParam (polar() normalizes)")

    def __str__(self):
        return f"polar:{self.modulus}@{self.angle_turns}"


@dataclass(frozen=True)
class UnitComboParam:
    """e^(2*pi*i*alpha) * q^beta with rational alpha, beta; modulus exactly 1."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))

    def __str__(self):
        return f"combo:{self.alpha},{self.beta}"


ComplexParam = Union[PolarParam, UnitComboParam]


def polar(modulus, angle_turns=0) -> ComplexParam:
    modulus = Fraction(modulus)
    if modulus == 1:
        return UnitComboParam(Fraction(angle_turns), Fraction(0))
    return PolarParam(modulus, Fraction(angle_turns))


def combo(alpha, beta) -> UnitComboParam:
    return UnitComboParam(Fraction(alpha), Fraction(beta))


def param_from_text(text: str) -> ComplexParam:
    """Parse "polar:<mod>@<angle_turns>" or "combo:<alpha>,<beta>"."""
    text = text.strip()
    if text.startswith("polar:"):
        body = text[6:]
        if "@" not in body:
            raise ValueError(f"polar parameter needs <mod>@<angle>: {text!r}")
        mod, _, ang = body.partition("@")
        return polar(Fraction(mod), Fraction(ang))
    if text.startswith("combo:"):
        body = text[6:]
        alpha, _, beta = body.partition(",")
        if not beta:
            raise ValueError(f"combo parameter needs <alpha>,<beta>: {text!r}")
        return combo(Fraction(alpha), Fraction(beta))
    raise ValueError(f"unrecognized parameter: {text!r}")


def modulus_of(a: ComplexParam) -> Fraction:
    return Fraction(1) if isinstance(a, UnitComboParam) else a.modulus


def check_as1(a: ComplexParam, on_circle: bool = True) -> str | None:
    """None when a q^n != 1 for all n >= 0, else a violation description."""
    if isinstance(a, UnitComboParam):
        if not on_circle and a.beta != 0:
            return "q^beta with |q| != 1 has an irrational modulus; unsupported off the circle"
        if (a.beta.denominator == 1 and a.beta <= 0
                and a.alpha.denominator == 1):
            return f"a*q^{-a.beta} = 1 (alpha and beta integral)"
        return None
    if a.modulus == 0:
        return None  # As2's problem, not As1's
    if not on_circle:
        return None  # rho*|q|^n = 1 needs n = 0 and rho = 1, excluded by type
    return None


@dataclass(frozen=True)
class RootTestPoint:
    """n-th root of |(a;q)_n| via its log mean."""

    n: int
    log_mean: BoundedReal
    value: float


def log_abs_one_minus(r, x) -> float:
    """log|1 - r*e^(2*pi*i*x)| for r > 0.

    Unit modulus goes through log(2*sin(pi*d)) with d the circle distance of
    x, avoiding cancellation near the singularity; the input (r=1, x integral)
    is the genuine log 0 = -inf singularity and raises.
    """
    rf = Fraction(r) if not isinstance(r, float) else r
    unit = rf == 1
    xf = Fraction(x) % 1
    d = xf if xf <= Fraction(1, 2) else 1 - xf
    if unit and d == 0:
        raise SingularTermError("log|1 - e^(2*pi*i*0)| is -infinity")
    if not unit and rf == 0:
        return 0.0
    logr = 0.0 if unit else math.log(float(rf))
    return _kernels.log_term(logr, float(d), unit)


def _walk_for(a: ComplexParam, theta: AngleSpec, n_max: int):
    """(walk, logr0, dlogr, unit) for the factor phases of (a;q)_n on-circle."""
    if isinstance(a, UnitComboParam):
        walk = phase_walk(theta, a.alpha, a.beta, n_max)
        return walk, 0.0, 0.0, True
    walk = phase_walk(theta, a.angle_turns, Fraction(0), n_max)
    logr = math.log(a.modulus.numerator) - math.log(a.modulus.denominator)
    return walk, logr, 0.0, False


def _grad_bound(logr0: float, dlogr: float, n0: int, n1: int) -> float:
    """Upper bound for |d term / d x| (x in turns) away from the circle."""
    if dlogr == 0.0:
        gap = abs(logr0)
    else:
        gap = min(abs(logr0 + k * dlogr) for k in (n0, n1 - 1))
        k_star = -logr0 / dlogr
        if n0 <= k_star <= n1 - 1:
            gap = min(gap, abs(logr0 + round(k_star) * dlogr))
    if gap == 0.0:
        return math.inf
    # |1 - e^L| >= |L|/2 for |L| < 1; farther out the gap only grows
    denom = min(gap, 1.0) / 2.0
    peak_r = math.exp(min(abs(logr0) + (n1 - 1) * abs(dlogr), 30.0) / 2.0)
    return 2.0 * math.pi * peak_r / denom


def _scan_params_error(walk: PhaseWalk, res, logr0, dlogr, unit, n0, n1) -> float:
    e_phase = walk.offset_err + n1 * walk.step_err
    if unit:
        # |d/dx log(2 sin(pi d))| = pi|cot(pi d)| <= 1/d
        err = e_phase * res.inv_dist_sum
    else:
        # per-term gradient <= min(2 pi sqrt(r)/|1-r|, pi/sin(pi d) <= pi/(2 d))
        flat = (n1 - n0) * _grad_bound(logr0, dlogr, n0, n1)
        err = e_phase * min(flat, 1.6 * res.inv_dist_sum)
    err += _EVAL_EPS * (res.main_abs + res.excl_abs) + 5e-16 * (n1 - n0)
    # modulus enters through logr as a double: one-ulp slack per term
    if not unit:
        err += (n1 - n0) * 4e-16 * (1.0 + abs(logr0) + n1 * abs(dlogr))
    return err


def _singular_term(theta: AngleSpec, alpha: Fraction, beta: Fraction,
                   k: int, p_bits: int):
    """(term, err) for a unit-modulus factor whose kernel distance was < 2**-40."""
    coeff = beta + k
    if isinstance(theta, LiouvilleAngle):
        got = liouville_exact_phase(theta, coeff, alpha)
        if got[0] == "tail":
            mult = got[1]
            lo, hi = theta.tail_log_bounds()
            mid = 0.5 * (lo + hi)
            term = math.log(2.0 * math.pi) + math.log(float(mult)) + mid
            return term, 0.5 * (hi - lo) + 1e-12
        _, d, corr = got
        if 2 * corr >= d:
            raise PrecisionError("tail correction swamps the exact distance")
        df = float(d)
        if df > 1e-12:
            term = math.log(2.0 * math.sin(math.pi * df))
        else:
            term = (math.log(2.0 * math.pi)
                    + math.log(d.numerator) - math.log(d.denominator))
        return term, float_up(corr / d) + 2e-15 * (1.0 + abs(term))
    # surd-backed angle: retry at doubled precision
    p2 = 2 * p_bits + 64
    walk = phase_walk(theta, alpha, beta, k + 1, p_bits=p2)
    full = 1 << p2
    s = (walk.offset_fp + k * walk.step_fp) % full
    d_fp = s if s <= full >> 1 else full - s
    e_phase = walk.offset_err + (k + 1) * walk.step_err
    x = float(d_fp) * math.ldexp(1.0, -p2)
    if x == 0.0 or e_phase >= 0.5 * x:
        raise PrecisionError(
            f"phase at index {k} indistinguishable from the singularity "
            f"at {p2} bits")
    term = math.log(2.0 * math.sin(math.pi * x))
    return term, e_phase / x + 2e-15 * (1.0 + abs(term))


def _qpoch_segment(a: ComplexParam, theta: AngleSpec, n0: int, n1: int,
                   walk: PhaseWalk, logr0: float, dlogr: float, unit: bool):
    """(sum, err) of the factor logs for indices [n0, n1)."""
    sing_fp = 1 << (walk.p_bits - SINGULAR_BITS)
    res = _kernels.phase_scan(walk.step_fp, walk.offset_fp, walk.p_bits,
                              n0, n1, logr0, dlogr, unit, sing_fp)
    total = res.total
    err = _scan_params_error(walk, res, logr0, dlogr, unit, n0, n1)
    if unit:
        alpha, beta = a.alpha, a.beta
        for k in res.singular:
            term, term_err = _singular_term(theta, alpha, beta, k, walk.p_bits)
            total += term
            err += term_err
    return total, err


def log_abs_qpochhammer(a: ComplexParam, theta: AngleSpec, n: int) -> BoundedReal:
    """log|(a;q)_n| with a certified error bound ((a;q)_0 = 1 gives 0)."""
    bad = check_as1(a, on_circle=True)
    if bad is not None:
        raise ValueError(f"parameter violates the never-vanishing condition: {bad}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return BoundedReal(0.0, 0.0)
    walk, logr0, dlogr, unit = _walk_for(a, theta, n)
    total, err = _qpoch_segment(a, theta, 0, n, walk, logr0, dlogr, unit)
    return BoundedReal(total, err)


def root_test_sequence(a: ComplexParam, theta: AngleSpec,
                       checkpoints) -> list[RootTestPoint]:
    """RootTestPoints |(a;q)_n|^(1/n) at each checkpoint, in one pass."""
    cps = [int(c) for c in checkpoints]
    if not cps or any(c <= 0 for c in cps) or any(b <= a_ for a_, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly increasing positive integers")
    bad = check_as1(a, on_circle=True)
    if bad is not None:
        raise ValueError(f"parameter violates the never-vanishing condition: {bad}")
    n_max = cps[-1]
    walk, logr0, dlogr, unit = _walk_for(a, theta, n_max)
    points = []
    total = 0.0
    err = 0.0
    prev = 0
    for cp in cps:
        seg, seg_err = _qpoch_segment(a, theta, prev, cp, walk, logr0, dlogr, unit)
        total += seg
        err += seg_err
        prev = cp
        mean = BoundedReal(total / cp, err / cp + 1e-16 * abs(total / cp))
        points.append(RootTestPoint(cp, mean, math.exp(mean.value)))
    return points


@dataclass(frozen=True)
class LimitVerdict:
    verdict: str  # consistent | inconsistent | inconclusive
    residuals: tuple
    tolerance: float


def classify_limit(points, predicted, tolerance: float | None = None) -> LimitVerdict:
    """Compare a root-test sequence against its predicted limit.

    consistent: residuals |value - predicted| non-increasing and the final one
    below tolerance; inconclusive: non-monotone but every increase is within
    the points' own error bounds; inconsistent otherwise.
    """
    if len(points) < 2:
        raise ValueError("need at least two checkpoints to classify")
    predicted = float(predicted)
    if tolerance is None:
        tolerance = 0.05 * max(1.0, predicted)
    res = [abs(p.value - predicted) for p in points]
    errs = [p.value * p.log_mean.abs_error for p in points]
    nominal_dec = all(res[i + 1] <= res[i] for i in range(len(res) - 1))
    within_err = all(res[i + 1] <= res[i] + errs[i] + errs[i + 1]
                     for i in range(len(res) - 1))
    if nominal_dec and res[-1] < tolerance:
        verdict = "consistent"
    elif not nominal_dec and within_err:
        verdict = "inconclusive"
    else:
        verdict = "inconsistent"
    return LimitVerdict(verdict, tuple(res), tolerance)
