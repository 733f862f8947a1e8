"""Series-level layer: validation, coefficients, radius prediction and
empirical radius estimation for the two-parameter-family power series

    sum_n  c_n * ((-1)^n q^(n(n-1)/2))^(s+1-r) * z^n,
    c_n = prod_i (a_i;q)_n / ((q;q)_n * prod_j (b_j;q)_n).

Off the unit circle the radius is classed by closed form alone (infinite for
r <= s inside, |b_1..b_s q| / |a_1..a_r| outside, 1 for r = s+1 inside).  On
the circle the prediction is prod max(|b_j|,1) / prod max(|a_i|,1) whenever
theta is badly approximable (every surd is) and each parameter either has
modulus != 1 or is of the e^(2*pi*i*alpha) q^beta family; Liouville-type
bases with all moduli off the circle collapse the radius to zero, which the
root test over the coefficients exhibits along the witness indices a_k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from . import _kernels
from .exactnum import (AffineAngle, AngleSpec, BoundedReal, LiouvilleAngle,
                       SurdAngle, eval_angle, phase_walk)
from .diophant import DiophantineConstant
from .qpoch import (ComplexParam, PolarParam, UnitComboParam, _qpoch_segment,
                    _scan_params_error, check_as1, modulus_of)

__all__ = [
    "SeriesParams",
    "RadiusPrediction",
    "EmpiricalRadius",
    "TermRatio",
    "PartialSum",
    "validate_params",
    "term_ratio",
    "log_abs_coefficient",
    "predicted_radius",
    "empirical_radius",
    "partial_sum",
]

WITNESS_CAP = 10**6
COLLAPSE_THRESHOLD = math.log(10.0)
_OVERFLOW_LOG = 640.0


@dataclass(frozen=True)
class SeriesParams:
    """Upper parameters a_i, lower parameters b_j, the base angle, and the
    base modulus (1 selects the on-circle regime)."""

    upper: tuple
    lower: tuple
    theta: AngleSpec
    base_modulus: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "lower", tuple(self.lower))
        object.__setattr__(self, "base_modulus", Fraction(self.base_modulus))
        if self.base_modulus <= 0:
            raise ValueError("base modulus must be positive")

    @property
    def on_circle(self) -> bool:
        return self.base_modulus == 1

    @property
    def r_count(self) -> int:
        return len(self.upper)

    @property
    def s_count(self) -> int:
        return len(self.lower)


@dataclass(frozen=True)
class RadiusPrediction:
    """value is an exact Fraction, 0, math.inf, or None (no claim made)."""

    value: Union[Fraction, float, None]
    case_tag: str


@dataclass(frozen=True)
class TermRatio:
    value: complex
    magnitude: float
    log_magnitude: float
    phase_turns: float


@dataclass(frozen=True)
class PartialSum:
    value: Optional[complex]
    n_terms: int
    last_term_magnitude: float
    last_term_log_magnitude: float
    overflow: bool


@dataclass(frozen=True)
class EmpiricalRadius:
    estimate: float
    window: tuple
    window_values: tuple       # (n, log|c_n|/n) samples over the window
    regression_slope: float
    collapse: bool
    growth: bool
    witnesses: tuple           # (n, log|c_n|/n) at Liouville witness indices


def validate_params(p: SeriesParams) -> Optional[str]:
    """None when both never-vanishing conditions hold, else a description.

    Checked exactly: no parameter product vanishes (a modulus-0 entry) and
    no a_i q^n or b_j q^n equals 1 for n >= 0.  On the circle the latter can
    only happen for e^(2*pi*i*alpha) q^beta with beta a nonpositive integer
    and alpha integral; off the circle unit-combo parameters with beta != 0
    are refused outright (their modulus |q|^beta is irrational).
    """
    for side, params in (("upper", p.upper), ("lower", p.lower)):
        for i, a in enumerate(params):
            if isinstance(a, PolarParam) and a.modulus == 0:
                return f"{side} parameter {i} has modulus 0 (vanishing product)"
            bad = check_as1(a, on_circle=p.on_circle)
            if bad is not None:
                return f"{side} parameter {i}: {bad}"
    return None


def _require_valid(p: SeriesParams):
    bad = validate_params(p)
    if bad is not None:
        raise ValueError(bad)


@lru_cache(maxsize=64)
def _theta_value(theta: AngleSpec, bits: int) -> Fraction:
    return Fraction(eval_angle(theta, bits).value)


def _param_complex(a: ComplexParam, p: SeriesParams, n: int) -> complex:
    """a * q^n as a complex double (log-domain modulus to dodge overflow)."""
    t = _theta_value(p.theta, 192)
    if isinstance(a, UnitComboParam):
        log_mod = float(n) * _log_base(p)
        phase = float((a.alpha + (a.beta + n) * t) % 1)
    else:
        log_mod = _log_fraction(a.modulus) + float(n) * _log_base(p)
        phase = float((a.angle_turns + n * t) % 1)
    return cmath.exp(complex(log_mod, 2.0 * math.pi * phase))


def _log_fraction(x: Fraction) -> float:
    if x == 0:
        return -math.inf
    return math.log(x.numerator) - math.log(x.denominator)


def _log_base(p: SeriesParams) -> float:
    return 0.0 if p.on_circle else _log_fraction(p.base_modulus)


def term_ratio(p: SeriesParams, n: int, z: complex) -> TermRatio:
    """v_{n+1}/v_n: the ratio of consecutive z^n terms.

    prod(1 - a_i q^n) / ((1 - q^(n+1)) prod(1 - b_j q^n)) * (-q^n)^(1+s-r) * z.
    """
    _require_valid(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    t = _theta_value(p.theta, 192)
    num = complex(1.0)
    for a in p.upper:
        num *= 1.0 - _param_complex(a, p, n)
    den = 1.0 - _q_power(p, n + 1, t)
    for b in p.lower:
        den *= 1.0 - _param_complex(b, p, n)
    e = 1 + p.s_count - p.r_count
    ratio = num / den
    if e:
        minus_qn = -_q_power(p, n, t)
        ratio *= minus_qn ** e
    ratio *= complex(z)
    mag = abs(ratio)
    return TermRatio(
        value=ratio,
        magnitude=mag,
        log_magnitude=math.log(mag) if mag > 0 else -math.inf,
        phase_turns=cmath.phase(ratio) / (2.0 * math.pi),
    )


def _q_power(p: SeriesParams, n: int, t: Fraction) -> complex:
    return cmath.exp(complex(n * _log_base(p), 2.0 * math.pi * float((n * t) % 1)))


def _factor_specs(p: SeriesParams):
    """(sign, param, walk builder inputs) for every Pochhammer factor of c_n.

    Yields (sign, a, alpha, beta, logr0, dlogr, unit): sign +1 for upper
    factors, -1 for (q;q)_n and the lower factors.  Factor j of (a;q)_n has
    modulus |a| * |q|^(j-1) and phase alpha + (beta + j - 1) * theta.
    """
    lm = _log_base(p)
    out = []
    for sign, params in ((1, p.upper), (-1, p.lower)):
        for a in params:
            if isinstance(a, UnitComboParam):
                unit = p.on_circle
                logr0 = 0.0
                out.append((sign, a, a.alpha, a.beta, logr0, lm, unit))
            else:
                logr0 = _log_fraction(a.modulus)
                out.append((sign, a, a.angle_turns, Fraction(0), logr0, lm, False))
    q_param = UnitComboParam(Fraction(0), Fraction(1))
    out.append((-1, q_param, Fraction(0), Fraction(1), lm, lm, p.on_circle))
    return out


def log_abs_coefficient(p: SeriesParams, n: int) -> BoundedReal:
    """log|c_n| for the Pochhammer-ratio coefficient.

    The sign/power factor has magnitude 1 exactly when |q| = 1 or r = s+1;
    outside those regimes the factor's |q|^(n(n-1)/2 (s+1-r)) dominates
    everything and this operation refuses (the predictor covers the closed
    forms; see empirical_radius for the growth diagnostic).
    """
    _require_valid(p)
    if not p.on_circle and p.r_count != p.s_count + 1:
        raise ValueError(
            "off-circle coefficients with r != s+1 carry the q^(n(n-1)/2) "
            "power factor; use predicted_radius / empirical_radius")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return BoundedReal(0.0, 0.0)
    total = 0.0
    err = 0.0
    for sign, a, alpha, beta, logr0, dlogr, unit in _factor_specs(p):
        walk = phase_walk(p.theta, alpha, beta, n)
        seg, seg_err = _qpoch_segment(a, p.theta, 0, n, walk, logr0, dlogr, unit)
        total += sign * seg
        err += seg_err
    return BoundedReal(total, err)


def predicted_radius(p: SeriesParams,
                     dio: Optional[DiophantineConstant] = None) -> RadiusPrediction:
    """Radius of convergence by the closed-form case analysis.

    ``dio`` is accepted as corroborating evidence for reports; the decision
    itself rests on the base regime and the exact parameter moduli.
    """
    _require_valid(p)
    m = p.base_modulus
    r_n, s_n = p.r_count, p.s_count
    if m < 1:
        if r_n <= s_n:
            return RadiusPrediction(math.inf, "q_inside_r_le_s")
        if r_n == s_n + 1:
            return RadiusPrediction(Fraction(1), "q_inside_r_eq_s_plus_1")
        raise ValueError(
            "|q| < 1 with r > s+1 is outside the covered radius cases")
    if m > 1:
        num = m
        for b in p.lower:
            num *= modulus_of(b)
        den = Fraction(1)
        for a in p.upper:
            den *= modulus_of(a)
        return RadiusPrediction(num / den, "q_outside")
    # on the circle
    unit_moduli = [a for a in p.upper + p.lower if modulus_of(a) == 1]
    if isinstance(p.theta, (SurdAngle, AffineAngle)):
        num = Fraction(1)
        for b in p.lower:
            num *= max(modulus_of(b), Fraction(1))
        den = Fraction(1)
        for a in p.upper:
            den *= max(modulus_of(a), Fraction(1))
        return RadiusPrediction(num / den, "unit_bad_approx")
    if isinstance(p.theta, LiouvilleAngle):
        if not unit_moduli:
            return RadiusPrediction(Fraction(0), "unit_liouville_zero")
        return RadiusPrediction(None, "unit_unknown")
    return RadiusPrediction(None, "unit_unknown")


def _window_logc(p: SeriesParams, n_lo: int, n_hi: int):
    """log|c_n| for every n in [n_lo, n_hi], plus the accumulated error bound.

    Runs one prefix walk per Pochhammer factor and combines them; singular
    indices patched in exactly afterwards.
    """
    from .qpoch import _singular_term  # local import to keep module load light

    count = n_hi - n_lo + 1
    logc = [0.0] * count
    err = 0.0
    for sign, a, alpha, beta, logr0, dlogr, unit in _factor_specs(p):
        walk = phase_walk(p.theta, alpha, beta, n_hi)
        sing_fp = 1 << (walk.p_bits - 40)
        out, abs_sum, inv_dist, singular = _kernels.phase_prefix(
            walk.step_fp, walk.offset_fp, walk.p_bits, n_lo - 1, n_hi,
            logr0, dlogr, unit, sing_fp)
        res = _kernels.ScanResult(0.0, 0.0, abs_sum, 0.0, inv_dist,
                                  [], singular, 0, n_hi)
        err += _scan_params_error(walk, res, logr0, dlogr, unit, 0, n_hi)
        patches = []
        for k in singular:
            term, term_err = _singular_term(p.theta, alpha, beta, k, walk.p_bits)
            err += term_err
            patches.append((k, term))
        for i in range(count):
            v = out[i]
            for k, term in patches:
                if k <= n_lo - 1 + i:
                    v += term
            logc[i] = logc[i] + sign * v
    return logc, err


def _lsq_slope(xs, ys) -> float:
    n = len(xs)
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    num = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    den = math.fsum((x - xbar) ** 2 for x in xs)
    return num / den if den else 0.0


def empirical_radius(p: SeriesParams, n_max: int) -> EmpiricalRadius:
    """Root-test estimate of the radius from the coefficient window.

    estimate = exp(-L) with L the max of log|c_n|/n over [n_max/2, n_max]
    (a stable limsup proxy: root-test sequences on the circle oscillate, the
    windowed max is an upper envelope).  For Liouville bases the witness
    indices a_k <= 10**6 are evaluated as well; any of them pushing
    log|c_n|/n past log 10 raises the collapse flag.  Off the circle with
    r <= s the power factor drives the root test to zero at a closed-form
    rate: the estimate is reported as infinite growth, no window needed.
    """
    _require_valid(p)
    if n_max < 100:
        raise ValueError("n_max must be at least 100")
    if p.base_modulus < 1 and p.r_count > p.s_count + 1:
        raise ValueError(
            "|q| < 1 with r > s+1 is outside the covered radius cases")
    n_lo = n_max // 2
    if p.base_modulus < 1 and p.r_count <= p.s_count:
        # the full term carries |q|^((s+1-r) n(n-1)/2) -> 0: the root test
        # collapses at a closed-form rate and the radius is unbounded
        e = 1 + p.s_count - p.r_count
        lm = _log_base(p)
        samples = []
        for n in (n_lo, (n_lo + n_max) // 2, n_max):
            ratio_part = log_abs_ratio_poch_only(p, n)
            power = e * lm * (n * (n - 1) // 2)
            samples.append((n, (ratio_part + power) / n))
        slope = _lsq_slope([s[0] for s in samples], [s[1] * s[0] for s in samples])
        return EmpiricalRadius(
            estimate=math.inf,
            window=(n_lo, n_max),
            window_values=tuple(samples),
            regression_slope=slope,
            collapse=False,
            growth=True,
            witnesses=(),
        )
    logc, err = _window_logc(p, n_lo, n_max)
    if not p.on_circle and p.r_count != p.s_count + 1:
        # |q| > 1: fold in the power factor, which exactly offsets the
        # Pochhammer growth and leaves a geometric coefficient sequence
        e = 1 + p.s_count - p.r_count
        lm = _log_base(p)
        for i in range(len(logc)):
            n = n_lo + i
            logc[i] += e * lm * (n * (n - 1) // 2)
    values = [(n_lo + i, logc[i] / (n_lo + i)) for i in range(len(logc))]
    L = max(v for _, v in values)
    slope = _lsq_slope([n for n, _ in values], list(logc))
    witnesses = []
    collapse = False
    if isinstance(p.theta, LiouvilleAngle):
        for a_k in p.theta.denominators():
            if a_k > WITNESS_CAP:
                break
            w_val = float(log_abs_coefficient(p, a_k)) / a_k
            witnesses.append((a_k, w_val))
            if w_val > COLLAPSE_THRESHOLD:
                collapse = True
            L = max(L, w_val)
    estimate = math.inf if -L > _OVERFLOW_LOG else math.exp(-L)
    return EmpiricalRadius(
        estimate=estimate,
        window=(n_lo, n_max),
        window_values=tuple(values),
        regression_slope=slope,
        collapse=collapse,
        growth=bool(estimate == math.inf),
        witnesses=tuple(witnesses),
    )


def log_abs_ratio_poch_only(p: SeriesParams, n: int) -> float:
    """log of the Pochhammer-quotient part of |c_n| (no power factor)."""
    total = 0.0
    for sign, a, alpha, beta, logr0, dlogr, unit in _factor_specs(p):
        walk = phase_walk(p.theta, alpha, beta, n)
        seg, _ = _qpoch_segment(a, p.theta, 0, n, walk, logr0, dlogr, unit)
        total += sign * seg
    return total


def partial_sum(p: SeriesParams, z: complex, N: int) -> PartialSum:
    """sum_{n=0}^{N} v_n with the terms built by the running ratio.

    When a term's log magnitude passes the overflow guard the complex
    accumulation stops (flagged) and only the log-domain magnitude keeps
    tracking; the last term magnitude is the heuristic convergence readout.
    """
    _require_valid(p)
    if N < 1:
        raise ValueError("N must be positive")
    z = complex(z)
    if z == 0:
        return PartialSum(complex(1.0), 1, 0.0, -math.inf, False)
    total = complex(1.0)
    term = complex(1.0)
    log_mag = 0.0
    overflow = False
    for n in range(N):
        rat = term_ratio(p, n, z)
        log_mag += rat.log_magnitude
        if not overflow:
            term *= rat.value
            if log_mag > _OVERFLOW_LOG:
                overflow = True
            else:
                total += term
    mag = math.exp(log_mag) if log_mag < _OVERFLOW_LOG else math.inf
    return PartialSum(
        value=None if overflow else total,
        n_terms=N + 1,
        last_term_magnitude=mag,
        last_term_log_magnitude=log_mag,
        overflow=overflow,
    )
