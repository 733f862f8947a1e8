"""The explicit radius-zero construction.

Denominators a_1 = 2, a_{n+1} = k_{n+1} * a_n * a_n! (k in {2,3}) grow so
fast that theta = sum 1/a_n satisfies ||a_n * theta|| < 1/a_n!: the partial
sum times a_n is an integer (the a_k divide each other), so the distance is
a_n times the series tail.  That drives |(q;q)_{a_n}|^(1/a_n) to zero, and
with it the radius of convergence of any series over this base whose
parameters stay off the unit circle.  Every verdict in this module is an
exact rational comparison; floats appear only inside error-bounded
log-domain evaluations of the astronomically small quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientDepthError, SizeRefusedError
from .exactnum import (BoundedReal, LiouvilleAngle, _factorial, _ln_factorial,
                       liouville_denominators)
from .qpoch import combo, log_abs_qpochhammer

__all__ = [
    "LiouvilleSeq",
    "SmallnessCertificate",
    "ProductWitness",
    "build_denominators",
    "theta_partial",
    "check_small",
    "product_bound_witness",
    "shifted_variant",
]

PRODUCT_CAP = 10**6


@dataclass(frozen=True, repr=False)
class LiouvilleSeq:
    """Multipliers k_2..k_depth and the exact denominators a_1..a_depth."""

    k_seq: tuple
    denominators: tuple

    def __repr__(self):
        dens = ", ".join(str(a) if a.bit_length() < 64 else f"<{a.bit_length()}b>"
                         for a in self.denominators)
        return f"LiouvilleSeq(k_seq={self.k_seq}, denominators=({dens}))"

    @property
    def depth(self) -> int:
        return len(self.denominators)

    def multiplier(self, level: int) -> int:
        idx = level - 2
        return self.k_seq[idx] if 0 <= idx < len(self.k_seq) else 2

    def angle(self, shift: Fraction = Fraction(0)) -> LiouvilleAngle:
        return LiouvilleAngle(self.k_seq, self.depth, Fraction(shift))


@dataclass(frozen=True, repr=False)
class SmallnessCertificate:
    """Exact interval certificate for min_m |a_n*theta - m| < 1/a_n!."""

    n: int
    a_n: int
    distance_lo: Fraction
    distance_hi: Fraction
    bound: Fraction
    holds: bool
    shift: Fraction

    def __repr__(self):
        def short(fr):
            bits = fr.numerator.bit_length() + fr.denominator.bit_length()
            return str(fr) if bits < 128 else f"<rational, {bits} bits>"

        return (f"SmallnessCertificate(n={self.n}, a_n={self.a_n}, "
                f"distance=[{short(self.distance_lo)}, {short(self.distance_hi)}], "
                f"bound={short(self.bound)}, holds={self.holds}, "
                f"shift={self.shift})")


@dataclass(frozen=True)
class ProductWitness:
    n: int
    a_n: int
    log_product: BoundedReal
    log_bound: BoundedReal
    root: BoundedReal
    holds: bool


def build_denominators(k_seq, depth: int) -> LiouvilleSeq:
    """Exact big-integer denominators through the given depth (capped at 4:
    a_4 already has ~3.5 million digits, a_5 would have ~10**3500000)."""
    dens = liouville_denominators(tuple(k_seq), depth)
    return LiouvilleSeq(tuple(int(k) for k in k_seq), dens)


def _raw_fraction(num: int, den: int) -> Fraction:
    # bypass Fraction.__new__'s gcd for values already in lowest terms
    f = Fraction.__new__(Fraction)
    f._numerator = num
    f._denominator = den
    return f


def _frac_add(a: Fraction, b: Fraction) -> Fraction:
    """a + b through the lcm of the denominators.

    Fraction.__add__ multiplies the denominators outright, which is a
    multi-second big*big product once a_4-sized values are involved; the
    denominators here always share structure, so the gcd route stays cheap.
    """
    na, da = a.numerator, a.denominator
    nb, db = b.numerator, b.denominator
    g = math.gcd(da, db)
    l = da * (db // g)
    num = na * (l // da) + nb * (l // db)
    g2 = math.gcd(num, l)
    return _raw_fraction(num // g2, l // g2)


def _mul_int(m: int, f: Fraction) -> Fraction:
    g = math.gcd(m, f.denominator)
    return _raw_fraction((m // g) * f.numerator, f.denominator // g)


def _cheap_tail(seq: LiouvilleSeq, D: int) -> Fraction:
    """Exact rational upper bound for the tail past depth D, kept desk-sized.

    tail < 2/a_{D+1} <= 1/(a_D * a_D!); a_D! >= 2**(a_D-1) keeps the bound's
    denominator around a_D bits, and at the depth cap a_D! >= 2 still gives
    the valid 1/(2*a_D).
    """
    a_D = seq.denominators[D - 1]
    if a_D <= 2_000_000:
        return _raw_fraction(1, a_D << (a_D - 1))
    return _raw_fraction(1, 2 * a_D)


def theta_partial(seq: LiouvilleSeq, N: int, shift: Fraction = Fraction(0)) -> dict:
    """shift + sum_{n<=N} 1/a_n exactly, plus an exact tail bound.

    The tail bound is 2/a_{N+1} (the denominators grow super-geometrically,
    so the tail is below twice its first term); a_{N+1} is computed on
    demand when the sequence stops at N.  At the depth cap the weaker but
    still exact 1/(2*a_N) is used, since a_5 cannot be materialized.
    """
    if not 1 <= N <= seq.depth:
        raise InsufficientDepthError(f"N = {N} outside the built depth {seq.depth}")
    value = Fraction(shift)
    for a in seq.denominators[:N]:
        value = _frac_add(value, Fraction(1, a))
    if N + 1 <= seq.depth:
        tail = Fraction(2, seq.denominators[N])
    elif N + 1 <= 4:
        a_N = seq.denominators[N - 1]
        tail = Fraction(2, seq.multiplier(N + 1) * a_N * _factorial(a_N))
    else:
        a_N = seq.denominators[N - 1]
        tail = Fraction(1, 2 * a_N)
    return {"value": value, "tail_bound": tail}


def _dist_interval(lo_v: Fraction, hi_v: Fraction):
    """Range of the distance-to-nearest-integer over [lo_v, hi_v]."""
    one = Fraction(1)
    half = Fraction(1, 2)
    if _frac_add(hi_v, -lo_v) >= half:
        return Fraction(0), half
    m = lo_v.numerator // lo_v.denominator
    lo_v = _frac_add(lo_v, Fraction(-m))
    hi_v = _frac_add(hi_v, Fraction(-m))
    if hi_v <= half:
        return lo_v, hi_v
    if lo_v >= half:
        if hi_v <= one:
            return _frac_add(one, -hi_v), _frac_add(one, -lo_v)
        return Fraction(0), max(_frac_add(one, -lo_v), _frac_add(hi_v, -one))
    return min(lo_v, _frac_add(one, -hi_v)), half


def check_small(seq: LiouvilleSeq, n: int, shift: Fraction = Fraction(0)) -> SmallnessCertificate:
    """Certify min_m |a_n*(theta+shift') - m| < 1/a_n! by exact rationals.

    Needs the denominators through n+1 (the tail past depth n is what the
    distance *is*).  With a nonzero shift the certificate is for the shifted
    number; it can legitimately fail below the persistence index.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n + 1 > seq.depth:
        raise InsufficientDepthError(
            f"check_small(n={n}) needs depth >= {n + 1}, sequence has {seq.depth}")
    shift = Fraction(shift)
    a_n = seq.denominators[n - 1]
    # partial depth: at least n+1 (the leading tail term is the distance),
    # one deeper when cheap so the reported interval is pinned tightly
    D = min(seq.depth, max(n + 1, 3))
    value = Fraction(shift)
    for a in seq.denominators[:D]:
        value = _frac_add(value, Fraction(1, a))
    x = _mul_int(a_n, value)
    frac_x = _frac_add(x, Fraction(-(x.numerator // x.denominator)))
    lo_v = frac_x
    hi_v = _frac_add(frac_x, _mul_int(a_n, _cheap_tail(seq, D)))
    d_lo, d_hi = _dist_interval(lo_v, hi_v)
    bound = Fraction(1, _factorial(a_n))
    return SmallnessCertificate(
        n=n,
        a_n=a_n,
        distance_lo=d_lo,
        distance_hi=d_hi,
        bound=bound,
        holds=bool(d_hi < bound),
        shift=shift,
    )


def product_bound_witness(seq: LiouvilleSeq, n: int) -> ProductWitness:
    """prod_{j<=a_n} |1 - q^j| against the cap 2**a_n * pi / a_n!.

    The product is the (q;q)_{a_n} magnitude, evaluated along exact rational
    phases (the index j = a_n lands on the near-singular distance a_n * tail
    and is handled in the log domain).  log(a_n!) is a compensated sum of
    logs, not Stirling, so the cap itself carries a ~1e-10 relative bound.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > seq.depth:
        raise InsufficientDepthError(f"n = {n} beyond built depth {seq.depth}")
    a_n = seq.denominators[n - 1]
    if a_n > PRODUCT_CAP:
        raise SizeRefusedError(
            f"a_{n} (a {a_n.bit_length()}-bit integer) exceeds the direct "
            f"product cap {PRODUCT_CAP}")
    theta = seq.angle()
    log_product = log_abs_qpochhammer(combo(0, 1), theta, a_n)
    lnfact, lnfact_err = _ln_factorial(a_n)
    bound_val = a_n * math.log(2.0) + math.log(math.pi) - lnfact
    log_bound = BoundedReal(bound_val, lnfact_err + 1e-12 * (1 + abs(bound_val)))
    root_val = math.exp(log_product.value / a_n)
    root = BoundedReal(root_val,
                       root_val * (log_product.abs_error / a_n) + 5e-324)
    holds = log_product.hi <= log_bound.lo
    return ProductWitness(n=n, a_n=a_n, log_product=log_product,
                          log_bound=log_bound, root=root, holds=bool(holds))


def shifted_variant(seq: LiouvilleSeq, r: Fraction):
    """Angle spec for theta + r and the persistence index N.

    N is the smallest index with r*a_N integral; divisibility then persists
    (a_n! divides a_{n+1}), so the smallness certificates hold for n >= N.
    """
    r = Fraction(r)
    den = r.denominator
    for idx, a in enumerate(seq.denominators, start=1):
        if a % den == 0:
            return seq.angle(shift=r), idx
    if seq.depth + 1 <= 4 and den <= seq.denominators[-1]:
        # every integer up to a_D divides a_D! and hence a_{D+1}
        return seq.angle(shift=r), seq.depth + 1
    raise ValueError(
        f"persistence index for denominator {den} lies beyond the depth cap")
