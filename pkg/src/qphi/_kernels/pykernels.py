"""Pure-Python implementations of the hot numeric kernels.

These are the reference semantics for ``qphi._kernels._ckernels``; the
compiled extension mirrors the walk order, the double-precision operation
sequence and the compensated accumulation exactly, so both backends produce
bit-identical results.  Phases are carried as integer fixed-point values
modulo 2**p_bits, which keeps the walk exact; doubles enter only when a
phase distance is converted for the libm call.

Conventions shared by every scan:
  * the walk visits s_k = (offset + k*step) mod 2**p for k in [n0, n1);
  * d_k = min(s_k, 2**p - s_k) is the fixed-point distance of the phase to
    the nearest integer;
  * the per-index term is log|1 - r * e^(2*pi*i*x)| evaluated at circle
    distance d = d_k / 2**p, with the modulus carried as log r so that
    geometric modulus schedules (off-circle bases) cannot overflow;
  * on the unit modulus path, indices with d_k < sing_fp are skipped and
    reported for exact treatment by the caller.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass


@dataclass
class ScanResult:
    main_sum: float
    excl_sum: float
    main_abs: float
    excl_abs: float
    inv_dist_sum: float
    excluded: list
    singular: list
    min_dist_fp: int
    count: int

    @property
    def total(self) -> float:
        return self.main_sum + self.excl_sum


def log_term(logr: float, d: float, unit: bool) -> float:
    """log|1 - r*e^(2*pi*i*x)| at circle distance d = min(frac(x), 1-frac(x)).

    ``unit`` selects the exact r == 1 branch log(2*sin(pi*d)), which avoids
    the cancellation of complex subtraction near the singularity.  Large and
    small moduli are folded through log|1 - r e^(it)| = log r + log|1 - e^(-it)/r|.
    """
    if unit:
        return math.log(2.0 * math.sin(math.pi * d))
    s = math.sin(math.pi * d)
    if logr > 0.35:
        ri = math.exp(-logr)
        return logr + 0.5 * math.log((1.0 - ri) * (1.0 - ri) + 4.0 * ri * (s * s))
    r = math.exp(logr)
    return 0.5 * math.log((1.0 - r) * (1.0 - r) + 4.0 * r * (s * s))


def phase_scan(step_fp, offset_fp, p_bits, n0, n1, logr0, dlogr, unit,
               sing_fp, c_fps=(), eps_fp=0):
    """Accumulate log-magnitude terms over the phase walk.

    Returns a ScanResult whose main/excl compensated sums partition the
    indices by membership in the union of eps-balls around the fixed-point
    offsets in ``c_fps`` (empty tuple: everything is "main").
    """
    full = 1 << p_bits
    mask = full - 1
    half = full >> 1
    inv_scale = math.ldexp(1.0, -p_bits)

    s = (offset_fp + n0 * step_fp) & mask
    main = 0.0
    main_c = 0.0
    excl = 0.0
    excl_c = 0.0
    main_abs = 0.0
    excl_abs = 0.0
    inv_dist = 0.0
    excluded = []
    singular = []
    min_dist = mask
    fixed_r = dlogr == 0.0
    logr = logr0
    sin_ = math.sin
    log_ = math.log
    exp_ = math.exp
    pi_ = math.pi

    for k in range(n0, n1):
        d_fp = s if s <= half else full - s
        if unit and d_fp < sing_fp:
            singular.append(k)
            s = (s + step_fp) & mask
            continue
        x = float(d_fp) * inv_scale
        if d_fp:
            inv_dist += 1.0 / x
            if d_fp < min_dist:
                min_dist = d_fp
        if unit:
            term = log_(2.0 * sin_(pi_ * x))
        else:
            if not fixed_r:
                logr = logr0 + k * dlogr
            sn = sin_(pi_ * x)
            if logr > 0.35:
                ri = exp_(-logr)
                term = logr + 0.5 * log_((1.0 - ri) * (1.0 - ri) + 4.0 * ri * (sn * sn))
            else:
                r = exp_(logr)
                term = 0.5 * log_((1.0 - r) * (1.0 - r) + 4.0 * r * (sn * sn))
        member = False
        for c in c_fps:
            dc = (s - c) & mask
            dd = dc if dc <= half else full - dc
            if dd < eps_fp:
                member = True
                break
        if member:
            excluded.append(k)
            y = term - excl_c
            t = excl + y
            excl_c = (t - excl) - y
            excl = t
            excl_abs += abs(term)
        else:
            y = term - main_c
            t = main + y
            main_c = (t - main) - y
            main = t
            main_abs += abs(term)
        s = (s + step_fp) & mask

    return ScanResult(main, excl, main_abs, excl_abs, inv_dist,
                      excluded, singular, min_dist, n1 - n0)


def phase_prefix(step_fp, offset_fp, p_bits, n_lo, n_hi, logr0, dlogr, unit, sing_fp):
    """Walk indices [0, n_hi) and record the running compensated sum.

    out[i] holds the sum of terms for indices 0..n_lo+i, so out has length
    n_hi - n_lo.  Singular indices contribute nothing here and are returned
    for the caller to patch in exactly.
    """
    full = 1 << p_bits
    mask = full - 1
    half = full >> 1
    inv_scale = math.ldexp(1.0, -p_bits)

    out = array("d", bytes(8 * (n_hi - n_lo)))
    s = offset_fp & mask
    tot = 0.0
    comp = 0.0
    abs_sum = 0.0
    inv_dist = 0.0
    singular = []
    fixed_r = dlogr == 0.0
    logr = logr0
    sin_ = math.sin
    log_ = math.log
    exp_ = math.exp
    pi_ = math.pi

    for k in range(n_hi):
        d_fp = s if s <= half else full - s
        if unit and d_fp < sing_fp:
            singular.append(k)
        else:
            x = float(d_fp) * inv_scale
            if d_fp:
                inv_dist += 1.0 / x
            if unit:
                term = log_(2.0 * sin_(pi_ * x))
            else:
                if not fixed_r:
                    logr = logr0 + k * dlogr
                sn = sin_(pi_ * x)
                if logr > 0.35:
                    ri = exp_(-logr)
                    term = logr + 0.5 * log_((1.0 - ri) * (1.0 - ri) + 4.0 * ri * (sn * sn))
                else:
                    r = exp_(logr)
                    term = 0.5 * log_((1.0 - r) * (1.0 - r) + 4.0 * r * (sn * sn))
            y = term - comp
            t = tot + y
            comp = (t - tot) - y
            tot = t
            abs_sum += abs(term)
        if k >= n_lo:
            out[k - n_lo] = tot
        s = (s + step_fp) & mask

    return out, abs_sum, inv_dist, singular


def min_prod_scan(step_fp, p_bits, m_max, c_fp=0):
    """Minimize m * dist((m*step - c) mod 1) over 1 <= m <= m_max, exactly.

    All arithmetic is on fixed-point integers; the returned product is in
    units of 2**-p_bits.  Ties keep the smaller m.
    """
    full = 1 << p_bits
    mask = full - 1
    half = full >> 1
    s = 0
    best = None
    best_m = 0
    for m in range(1, m_max + 1):
        s = (s + step_fp) & mask
        dc = (s - c_fp) & mask
        d = dc if dc <= half else full - dc
        v = m * d
        if best is None or v < best:
            best = v
            best_m = m
    return best_m, best


def exclusion_scan(step_fp, c_fp, p_bits, n, eps_fp):
    """Indices 1 <= k <= n with dist((k*step - c) mod 1) < eps, ascending."""
    full = 1 << p_bits
    mask = full - 1
    half = full >> 1
    s = 0
    hits = []
    for k in range(1, n + 1):
        s = (s + step_fp) & mask
        dc = (s - c_fp) & mask
        d = dc if dc <= half else full - dc
        if d < eps_fp:
            hits.append(k)
    return hits
