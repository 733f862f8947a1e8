"""Exact angle specifications and error-bounded evaluation.

An angle theta (always irrational by construction) is one of

  * a quadratic surd (p + mult*sqrt(d))/c,
  * a rational affine image r1*surd + r2 with r1 != 0, or
  * a Liouville-type series sum(1/a_n) + shift with a_1 = 2 and
    a_{n+1} = k_{n+1} * a_n * a_n!, k in {2, 3}.

Evaluations return a BoundedReal: a value together with a guaranteed bound
on its absolute error.  Surd-backed specs are carried as integer fixed-point
approximations (p bits of fraction, obtained from integer square roots), so
phase walks downstream stay exact integer arithmetic.  Liouville specs are
exact rationals with explicit tail bounds throughout.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

from .errors import AngleParseError, DepthCapError, PrecisionError

__all__ = [
    "BoundedReal",
    "QuadraticSurd",
    "SurdAngle",
    "AffineAngle",
    "LiouvilleAngle",
    "AngleSpec",
    "parse_angle",
    "eval_angle",
    "frac_multiple",
    "dist_to_nearest_integer",
    "working_bits",
]

LIOUVILLE_DEPTH_CAP = 4
_DEFAULT_MAX_BITS = 16384
_SQUAREFREE_TRIAL_LIMIT = 1_000_000


def _max_bits() -> int:
    return int(os.environ.get("QPHI_MAX_BITS", _DEFAULT_MAX_BITS))


def working_bits(n: int, extra: int = 0) -> int:
    """Fixed-point precision for phase walks up to index n.

    Doubling the log-index plus a 64-bit guard keeps the accumulated walk
    error far below every distance the scans can legitimately meet; the
    QPHI_PRECISION_BITS environment variable raises the floor.
    """
    p = 2 * max(1, (n + 2).bit_length()) + 64 + extra
    floor = int(os.environ.get("QPHI_PRECISION_BITS", 0))
    return max(p, floor)


def float_up(x) -> float:
    """Smallest double >= x (x a Fraction or float), never 0 for x > 0."""
    if isinstance(x, float):
        return x
    f = float(x)
    if Fraction(f) < x:
        f = math.nextafter(f, math.inf)
    if f == 0.0 and x > 0:
        f = 5e-324
    return f


@dataclass(frozen=True)
class BoundedReal:
    """A real value with a certified absolute error bound.

    ``value`` may be a float or an exact Fraction; the represented number is
    guaranteed to lie in [value - abs_error, value + abs_error].
    """

    value: Union[float, Fraction]
    abs_error: float

    def __post_init__(self):
        if not (self.abs_error >= 0.0 and math.isfinite(self.abs_error)):
            raise ValueError("abs_error must be finite and nonnegative")

    def __float__(self) -> float:
        return float(self.value)

    @property
    def lo(self) -> float:
        return float(self.value) - self.abs_error

    @property
    def hi(self) -> float:
        return float(self.value) + self.abs_error

    def contains(self, x) -> bool:
        return self.lo <= float(x) <= self.hi


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    m = d
    f = 2
    while f <= _SQUAREFREE_TRIAL_LIMIT and f * f <= m:
        if m % f == 0:
            m //= f
            if m % f == 0:
                return False
        f += 1 if f == 2 else 2
    # residual cofactor has no prime factor below the trial limit; the only
    # way it is non-squarefree at desk scale is being a perfect square
    r = isqrt(m)
    return r * r != m


@dataclass(frozen=True)
class QuadraticSurd:
    """(p + mult*sqrt(d)) / c with d squarefree >= 2, c > 0, mult != 0."""

    p: int
    mult: int
    d: int
    c: int = 1

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("zero denominator")
        if self.mult == 0:
            raise AngleParseError("mult = 0 denotes a rational, not a surd")
        if self.d < 2 or self.d >= 1 << 64 or not _squarefree(self.d):
            raise AngleParseError(f"d = {self.d} must be squarefree, 2 <= d < 2**64")
        p, mult, c = self.p, self.mult, self.c
        if c < 0:
            p, mult, c = -p, -mult, -c
        g = math.gcd(math.gcd(abs(p), abs(mult)), c)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "mult", mult // g)
        object.__setattr__(self, "c", c // g)

    def affine(self, r1: Fraction, r2: Fraction) -> "QuadraticSurd":
        """Exact r1*self + r2 as a new surd (r1 != 0)."""
        if r1 == 0:
            raise AngleParseError("r1 = 0 makes the affine value rational")
        rat = r1 * Fraction(self.p, self.c) + r2
        coef = r1 * Fraction(self.mult, self.c)
        den = math.lcm(rat.denominator, coef.denominator)
        return QuadraticSurd(
            rat.numerator * (den // rat.denominator),
            coef.numerator * (den // coef.denominator),
            self.d,
            den,
        )

    def scaled(self, p_bits: int) -> int:
        """round(value * 2**p_bits) to the nearest integer, half to even.

        The result is off by at most one unit in the last place; callers
        account a single ulp of error.
        """
        guard = 32
        s = isqrt(self.d << (2 * (p_bits + guard)))
        num = (self.p << (p_bits + guard)) + self.mult * s
        return _round_div(num, self.c << guard)

    def __str__(self):
        if self.p == 0 and self.c == 1 and self.mult == 1:
            return f"sqrt{self.d}"
        return f"({self.p}{self.mult:+d}*sqrt{self.d})/{self.c}"


def _round_div(a: int, b: int) -> int:
    """round(a / b) with ties to even, b > 0."""
    q, r = divmod(a, b)
    twice = 2 * r
    if twice > b or (twice == b and q % 2):
        q += 1
    return q


@dataclass(frozen=True)
class SurdAngle:
    surd: QuadraticSurd

    def __str__(self):
        return f"surd:{self.surd}"


@dataclass(frozen=True)
class AffineAngle:
    r1: Fraction
    base: QuadraticSurd
    r2: Fraction

    def __post_init__(self):
        if self.r1 == 0:
            raise AngleParseError("affine form requires r1 != 0")
        object.__setattr__(self, "r1", Fraction(self.r1))
        object.__setattr__(self, "r2", Fraction(self.r2))

    def combined(self) -> QuadraticSurd:
        return self.base.affine(self.r1, self.r2)

    def __str__(self):
        return f"affine:{self.r1}*{self.base}+{self.r2}"


@dataclass(frozen=True)
class LiouvilleAngle:
    """shift + sum(1/a_n), with k_seq supplying k_2, k_3, ...

    Levels beyond the provided k_seq use k = 2, so the spec denotes one
    concrete number; every tail bound used here is also valid for any other
    continuation with k in {2, 3} (larger k only shrinks the tail).
    """

    k_seq: tuple
    depth: int
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "k_seq", tuple(int(k) for k in self.k_seq))
        object.__setattr__(self, "shift", Fraction(self.shift))
        if any(k not in (2, 3) for k in self.k_seq):
            raise AngleParseError("Liouville multipliers must be 2 or 3")
        if not 1 <= self.depth <= LIOUVILLE_DEPTH_CAP:
            raise DepthCapError(
                f"depth must be within [1, {LIOUVILLE_DEPTH_CAP}], got {self.depth}")

    def multiplier(self, level: int) -> int:
        """k_level for level >= 2 (defaults to 2 past the provided entries)."""
        if level < 2:
            raise ValueError("multipliers start at level 2")
        idx = level - 2
        return self.k_seq[idx] if idx < len(self.k_seq) else 2

    def denominators(self, depth: int | None = None) -> tuple:
        return liouville_denominators(self.k_seq, depth if depth is not None else self.depth)

    def partial_value(self, depth: int | None = None) -> Fraction:
        """shift + sum of 1/a_n through the given depth, exactly."""
        dens = self.denominators(depth)
        acc = self.shift
        for a in dens:
            acc += Fraction(1, a)
        return acc

    def tail_upper(self, depth: int | None = None) -> Fraction:
        """Exact rational upper bound for the tail past the given depth.

        tail < 2/a_{D+1} <= 1/(a_D * a_D!); a_D! >= 2**(a_D - 1) gives a bound
        whose denominator stays desk sized, and past the depth cap a_D! >= a_D
        still yields a valid 1/a_D**2.
        """
        D = depth if depth is not None else self.depth
        a_D = self.denominators(D)[-1]
        if a_D <= 2_000_000:
            return Fraction(1, a_D << (a_D - 1))
        return Fraction(1, a_D * a_D)

    def tail_log_bounds(self, depth: int | None = None) -> tuple:
        """(lo, hi) floats bracketing ln(tail) past the given depth.

        tail lies in (1/a_{D+1}, 1/a_{D+1} + 1/a_{D+1}**2), so ln(tail) is
        pinned to within ~1/a_{D+1} once ln(a_{D+1}) is known; ln of the huge
        factorials comes from summed logs (<= 2e6 terms) or Robbins' form of
        Stirling beyond that, both with explicit slack.
        """
        D = depth if depth is not None else self.depth
        a_D = self.denominators(D)[-1]
        k_next = self.multiplier(D + 1)
        ln_fact, ln_fact_err = _ln_factorial(a_D)
        ln_next = math.log(k_next) + math.log(a_D) + ln_fact
        slack = ln_fact_err + 1e-9
        return (-ln_next - slack, -ln_next + slack + 1e-6)

    def scaled(self, p_bits: int) -> int:
        v = self.partial_value() * (1 << p_bits)
        return _round_div(v.numerator, v.denominator) if v >= 0 else -_round_div(
            -v.numerator, v.denominator)

    def __str__(self):
        s = "liouville:" + ",".join(str(k) for k in self.k_seq)
        if self.shift:
            s += f";shift={self.shift}"
        return s


AngleSpec = Union[SurdAngle, AffineAngle, LiouvilleAngle]


# --- Liouville denominator machinery (shared with the liouville module) ---

_FACT_CACHE: dict = {}
_LNFACT_CACHE: dict = {}


def _factorial(n: int) -> int:
    f = _FACT_CACHE.get(n)
    if f is None:
        f = math.factorial(n)
        _FACT_CACHE[n] = f
    return f


def _ln_factorial(n: int) -> tuple:
    """(ln n!, error bound).  Summed logs up to 2e6, Robbins bounds beyond."""
    got = _LNFACT_CACHE.get(n)
    if got is not None:
        return got
    if n <= 2_000_000:
        v = math.fsum(math.log(j) for j in range(2, n + 1))
        res = (v, 1e-10 * max(1.0, v))
    else:
        ln_n = math.log(n)
        base = 0.5 * math.log(2.0 * math.pi) + (n + 0.5) * ln_n - n
        res = (base + 1.0 / (12.0 * n), 1.0 / (12.0 * n) + 1e-9 * base)
    _LNFACT_CACHE[n] = res
    return res


def liouville_denominators(k_seq, depth: int) -> tuple:
    """a_1..a_depth by a_1 = 2, a_{n+1} = k_{n+1} * a_n * a_n! (k defaults to 2)."""
    if depth < 1:
        raise ValueError("depth must be positive")
    if depth > LIOUVILLE_DEPTH_CAP:
        raise DepthCapError(
            f"depth {depth} exceeds the cap {LIOUVILLE_DEPTH_CAP} "
            "(a_5 would have ~10**3500000 digits)")
    dens = [2]
    for lvl in range(2, depth + 1):
        idx = lvl - 2
        k = int(k_seq[idx]) if idx < len(k_seq) else 2
        if k not in (2, 3):
            raise ValueError("Liouville multipliers must be 2 or 3")
        a = dens[-1]
        dens.append(k * a * _factorial(a))
    return tuple(dens)


# --- parsing ---

_RAT = r"-?\d+(?:/\d+)?"
_RE_SQRT = re.compile(r"^surd:sqrt(\d+)$")
_RE_SURD = re.compile(r"^surd:\((-?\d+)([+-]\d+)\*sqrt(\d+)\)/(\d+)$")
_RE_AFFINE = re.compile(rf"^affine:({_RAT})\*sqrt(\d+)([+-](?:\d+(?:/\d+)?))$")
_RE_LIOU = re.compile(rf"^liouville:(\d+(?:,\d+)*)(?:;shift=({_RAT}))?$")


def parse_angle(text: str) -> AngleSpec:
    """Parse the angle grammar.

    Accepted forms::

        surd:sqrt<d>
        surd:(<p>+<mult>*sqrt<d>)/<c>          (also <p>-<mult>*...)
        affine:<r1>*sqrt<d>+<r2>               (r1, r2 rationals, r1 != 0)
        liouville:<k2>,<k3>,...[;shift=<r>]    (k_i in {2,3}; depth = count+1)
    """
    text = text.strip()
    m = _RE_SQRT.match(text)
    if m:
        return SurdAngle(QuadraticSurd(0, 1, int(m.group(1)), 1))
    m = _RE_SURD.match(text)
    if m:
        p, mult, d, c = (int(m.group(i)) for i in range(1, 5))
        if c == 0:
            raise AngleParseError("zero denominator in surd")
        return SurdAngle(QuadraticSurd(p, mult, d, c))
    m = _RE_AFFINE.match(text)
    if m:
        r1 = Fraction(m.group(1))
        if r1 == 0:
            raise AngleParseError("affine form with r1 = 0 is rational")
        d = int(m.group(2))
        r2 = Fraction(m.group(3))
        return AffineAngle(r1, QuadraticSurd(0, 1, d, 1), r2)
    m = _RE_LIOU.match(text)
    if m:
        ks = tuple(int(x) for x in m.group(1).split(","))
        shift = Fraction(m.group(2)) if m.group(2) else Fraction(0)
        return LiouvilleAngle(ks, len(ks) + 1, shift)
    raise AngleParseError(f"unrecognized angle spec: {text!r}")


# --- evaluation ---

def _scaled_with_err(spec: AngleSpec, p_bits: int):
    """(t, err_ulps) with |theta*2**p - t| <= err_ulps (+ tail for Liouville).

    err_ulps is a small float in units of 2**-p_bits turns; the Liouville
    series tail is returned separately as an exact Fraction of turns.
    """
    if isinstance(spec, SurdAngle):
        return spec.surd.scaled(p_bits), 1.0, Fraction(0)
    if isinstance(spec, AffineAngle):
        return spec.combined().scaled(p_bits), 1.0, Fraction(0)
    if isinstance(spec, LiouvilleAngle):
        return spec.scaled(p_bits), 1.0, spec.tail_upper()
    raise TypeError(f"not an AngleSpec: {spec!r}")


def eval_angle(spec: AngleSpec, precision_bits: int) -> BoundedReal:
    """Evaluate theta to at least the requested precision.

    The error bound satisfies abs_error <= 2**(1-precision_bits) * (1+|value|);
    Liouville specs fold the exact series tail bound into the error.
    """
    if precision_bits < 8:
        raise ValueError("precision_bits must be >= 8")
    p = precision_bits + 2
    t, err_ulps, tail = _scaled_with_err(spec, p)
    value = Fraction(t, 1 << p)
    err = math.ldexp(err_ulps, -p) + float_up(tail)
    return BoundedReal(value, err)


def frac_multiple(spec: AngleSpec, k: int, target_error: float) -> BoundedReal:
    """Fractional part of k*theta with abs_error <= target_error.

    The bound is on the circle distance |k*theta - m - value| for the integer
    m dropped by the reduction, i.e. the defining congruence is what is
    certified; a value near 0 may stand for a true fractional part near 1.
    Liouville specs reduce k * (partial sum) exactly and add the tail bound.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not 0 < target_error < 0.25:
        raise ValueError("target_error must lie in (0, 1/4)")
    if k == 0:
        return BoundedReal(Fraction(0), 0.0)
    if isinstance(spec, LiouvilleAngle):
        x = (k * spec.partial_value()) % 1
        err = float_up(k * spec.tail_upper())
        if err > target_error:
            raise PrecisionError("tail bound exceeds the requested error")
        return BoundedReal(x, err)
    p = max(64, k.bit_length() + max(0, math.ceil(-math.log2(target_error))) + 8)
    if p > _max_bits():
        raise PrecisionError(
            f"needs {p} fixed-point bits, above the configured cap {_max_bits()}")
    t, err_ulps, _ = _scaled_with_err(spec, p)
    v = (k * t) % (1 << p)
    err = math.ldexp(k * err_ulps, -p)
    return BoundedReal(Fraction(v, 1 << p), err)


def dist_to_nearest_integer(spec: AngleSpec, k: int,
                            target_error: float = 1e-18) -> BoundedReal:
    """||k*theta|| = min over integers m of |k*theta - m|, certified."""
    if k < 1:
        raise ValueError("k must be >= 1")
    fm = frac_multiple(spec, k, target_error)
    x = fm.value
    d = x if x <= Fraction(1, 2) else 1 - x
    return BoundedReal(d, fm.abs_error)


# --- phase-walk parameter assembly ---

@dataclass(frozen=True)
class PhaseWalk:
    """Fixed-point parameters for the walk x_k = alpha + (beta + k) * theta.

    step_err/offset_err are in turns; the accumulated phase error at index k
    is offset_err + (k+1) * step_err.
    """

    step_fp: int
    offset_fp: int
    p_bits: int
    step_err: float
    offset_err: float


def phase_walk(spec: AngleSpec, alpha: Fraction, beta: Fraction,
               n_max: int, p_bits: int | None = None) -> PhaseWalk:
    if p_bits is None:
        extra = max(0, (abs(beta.numerator) // max(1, beta.denominator)).bit_length())
        p_bits = working_bits(n_max, extra)
    scale = 1 << p_bits
    t, err_ulps, tail = _scaled_with_err(spec, p_bits)
    step = t % scale
    a = alpha * scale
    off_exact = _round_div(a.numerator, a.denominator) if a >= 0 else -_round_div(
        -a.numerator, a.denominator)
    b = beta * t
    off_theta = _round_div(b.numerator, b.denominator) if b >= 0 else -_round_div(
        -b.numerator, b.denominator)
    offset = (off_exact + off_theta) % scale
    ulp = math.ldexp(1.0, -p_bits)
    tail_f = float_up(tail)
    beta_f = abs(float(beta))
    return PhaseWalk(
        step_fp=step,
        offset_fp=offset,
        p_bits=p_bits,
        step_err=err_ulps * ulp + tail_f,
        offset_err=(1.0 + (beta_f + 1.0) * err_ulps) * ulp + beta_f * tail_f,
    )


def liouville_exact_phase(spec: LiouvilleAngle, coeff: Fraction, add: Fraction):
    """Exact decomposition of the phase add + coeff*theta modulo 1.

    Returns ("tail", |coeff|) when the rational part vanishes, so the circle
    distance is |coeff| * tail; otherwise ("rational", dist, corr) with the
    exact rational distance of the partial-sum phase and an exact Fraction
    bound on the |coeff| * tail correction.
    """
    x = (add + coeff * spec.partial_value()) % 1
    corr = abs(coeff) * spec.tail_upper()
    if x == 0:
        return ("tail", abs(coeff))
    d = x if x <= Fraction(1, 2) else 1 - x
    return ("rational", d, corr)
