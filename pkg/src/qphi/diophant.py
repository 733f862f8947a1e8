"""Continued fractions, convergents and badly-approximable constants.

The quality of rational approximation of theta is what separates a positive
radius of convergence from a collapsed one: bounded partial quotients (every
quadratic surd) give inf m*||m*theta|| > 0, while the Liouville-type series
have quotients growing beyond any bound.  The finite-scan constant
min_{m<=M} m*||m*theta|| is the empirical stand-in for that infimum and is
always reported together with its scan limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .exactnum import (AffineAngle, AngleSpec, BoundedReal, LiouvilleAngle,
                       QuadraticSurd, SurdAngle, dist_to_nearest_integer,
                       phase_walk, working_bits)

__all__ = [
    "ContinuedFraction",
    "DiophantineConstant",
    "cf_expand",
    "convergents",
    "bad_approx_constant",
    "verify_sqrt2_inequality",
    "affine_transfer",
]

FULL_SCAN_CAP = 10**6
_PERIOD_SAFETY = 100_000


@dataclass(frozen=True)
class ContinuedFraction:
    """[a0; a1, a2, ...] with an eventually-periodic tail for surd sources.

    ``period`` is empty exactly when the source was not a quadratic
    irrational; ``truncated`` marks expansions cut off by the term budget or
    by the Liouville validity guard.
    """

    preperiod: tuple
    period: tuple
    truncated: bool

    def quotients(self, count: int) -> list[int]:
        """First ``count`` partial quotients, unrolling the period."""
        out = list(self.preperiod[:count])
        if len(out) < count:
            if not self.period:
                raise ValueError(
                    f"only {len(self.preperiod)} quotients available, need {count}")
            i = 0
            while len(out) < count:
                out.append(self.period[i % len(self.period)])
                i += 1
        return out

    @property
    def available(self) -> float:
        return math.inf if self.period else len(self.preperiod)


@dataclass(frozen=True)
class DiophantineConstant:
    """min_{1<=m<=M} m*||m*theta|| with the minimizing m and the scan limit."""

    scan_limit: int
    min_value: BoundedReal
    argmin_m: int


def _surd_cf(surd: QuadraticSurd, budget: int) -> ContinuedFraction:
    """Exact eventually-periodic expansion by the integer (P + sqrt(D))/Q walk."""
    if surd.mult > 0:
        P, D, Q = surd.p, surd.mult * surd.mult * surd.d, surd.c
    else:
        P, D, Q = -surd.p, surd.mult * surd.mult * surd.d, -surd.c
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    s = math.isqrt(D)
    quotients = []
    seen = {}
    limit = max(budget, _PERIOD_SAFETY)
    for i in range(limit):
        state = (P, Q)
        if state in seen:
            start = seen[state]
            return ContinuedFraction(tuple(quotients[:start]),
                                     tuple(quotients[start:]), False)
        seen[state] = i
        if Q > 0:
            a = (P + s) // Q
        else:
            a = -((P + s) // (-Q)) - 1
        quotients.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    return ContinuedFraction(tuple(quotients[:budget]), (), True)


def _rational_cf_even(x: Fraction) -> list[int]:
    """Euclid quotients of x, adjusted so the last convergent index is even.

    A rational has two expansions ([..., a] and [..., a-1, 1]); picking the
    even-length-parity one makes the list a prefix of the expansion of any
    real slightly *above* x, which is how the Liouville partial sums sit
    under their full series.
    """
    p, q = x.numerator, x.denominator
    quotients = []
    while q:
        a = p // q
        quotients.append(a)
        p, q = q, p - a * q
    last = len(quotients) - 1
    if last % 2 == 1:
        if quotients[-1] >= 2:
            quotients[-1] -= 1
            quotients.append(1)
        elif len(quotients) >= 2:
            quotients.pop()
            quotients[-1] += 1
    return quotients


def cf_expand(spec: AngleSpec, max_terms: int) -> ContinuedFraction:
    """Continued fraction of theta.

    Surd-backed specs get their exact expansion with the period detected by
    state repetition.  Liouville specs expand the exact partial-sum rational;
    a quotient is emitted only while q_k**2 * tail_bound < 1/2, the classical
    criterion under which the truncation's convergents are provably also
    convergents of the full theta.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be positive")
    if isinstance(spec, SurdAngle):
        return _surd_cf(spec.surd, max_terms)
    if isinstance(spec, AffineAngle):
        return _surd_cf(spec.combined(), max_terms)
    if isinstance(spec, LiouvilleAngle):
        x = spec.partial_value()
        tail = spec.tail_upper()
        quotients = _rational_cf_even(x)
        guard = Fraction(1, 2)
        kept = []
        p0, p1 = 1, 0   # p_{k-1}, p_{k-2}
        q0, q1 = 0, 1
        for a in quotients:
            p0, p1 = a * p0 + p1, p0
            q0, q1 = a * q0 + q1, q0
            if q0 * q0 * tail >= guard:
                break
            kept.append(a)
            if len(kept) >= max_terms:
                break
        return ContinuedFraction(tuple(kept), (), True)
    raise TypeError(f"not an AngleSpec: {spec!r}")


def convergents(cf: ContinuedFraction, depth: int) -> list:
    """First ``depth`` convergents (p, q) in lowest terms by the recurrence
    p_k = a_k p_{k-1} + p_{k-2} (and likewise for q)."""
    if depth < 1:
        raise ValueError("depth must be positive")
    if not cf.period and depth > len(cf.preperiod):
        raise ValueError(f"depth {depth} exceeds the {len(cf.preperiod)} "
                         "available quotients")
    out = []
    p0, p1 = 1, 0
    q0, q1 = 0, 1
    for a in cf.quotients(depth):
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        out.append((p0, q0))
    return out


def _scan_constant(spec: AngleSpec, limit: int) -> DiophantineConstant:
    walk = phase_walk(spec, Fraction(0), Fraction(0), limit)
    argmin, best = _kernels.min_prod_scan(walk.step_fp, walk.p_bits, limit)
    scale = 1 << walk.p_bits
    # the walk's phase error at index m is <= m * step_err, so the product
    # m * d is off by at most m**2 * step_err
    err = limit * limit * walk.step_err
    return DiophantineConstant(limit, BoundedReal(Fraction(best, scale), err), argmin)


def bad_approx_constant(spec: AngleSpec, M: int) -> DiophantineConstant:
    """min over 1 <= m <= M of m*||m*theta||.

    Full scan up to 10**6.  Beyond that only convergent denominators are
    inspected: for q_k <= m < q_{k+1} the best-approximation property gives
    ||m*theta|| >= ||q_k*theta||, hence m*||m*theta|| >= q_k*||q_k*theta||,
    so the minimum over all m <= M is attained at a convergent denominator.
    """
    if M < 1:
        raise ValueError("M must be positive")
    if M <= FULL_SCAN_CAP:
        return _scan_constant(spec, M)
    base = _scan_constant(spec, FULL_SCAN_CAP)
    best = base.min_value
    best_m = base.argmin_m
    cf = cf_expand(spec, 300)
    count = 300 if cf.period else len(cf.preperiod)
    for _, q in convergents(cf, count):
        if q <= FULL_SCAN_CAP:
            continue
        if q > M:
            break
        d = dist_to_nearest_integer(spec, q, target_error=1e-6 / q)
        val = BoundedReal(q * d.value, q * d.abs_error)
        if float(val) < float(best):
            best = val
            best_m = q
    return DiophantineConstant(M, best, best_m)


def verify_sqrt2_inequality(M: int) -> dict:
    """Check m*||m*sqrt(2)|| > 1/3 for every m <= M.

    Returns holds, the minimal margin min(m*||m*sqrt2||) - 1/3 as a
    BoundedReal, and the m attaining it.
    """
    if M < 1:
        raise ValueError("M must be positive")
    spec = SurdAngle(QuadraticSurd(0, 1, 2, 1))
    dio = bad_approx_constant(spec, M)
    margin = dio.min_value.value - Fraction(1, 3)
    err = dio.min_value.abs_error
    holds = margin - err > 0
    return {
        "holds": bool(holds),
        "min_margin": BoundedReal(margin, err),
        "argmin_m": dio.argmin_m,
        "scan_limit": M,
    }


def affine_transfer(C, r1, r2):
    """Transfer a badly-approximable constant along theta -> r1*theta + r2.

    With r1 = k1/m1 and r2 = k2/m2 in lowest terms, C' = C/(|k1|*m1*m2**2)
    is valid for the image whenever C is valid for theta.
    """
    r1 = Fraction(r1)
    r2 = Fraction(r2)
    if r1 == 0:
        raise ValueError("r1 must be nonzero")
    denom = abs(r1.numerator) * r1.denominator * r2.denominator**2
    if isinstance(C, Fraction):
        return C / denom
    return float(C) / denom
