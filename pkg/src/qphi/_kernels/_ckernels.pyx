# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot numeric kernels.

Mirrors ``qphi._kernels.pykernels`` operation for operation: same fixed-point
walk, same double-precision expression order, same Kahan accumulation, so
results are bit-identical to the pure path.  Fixed-point values are 128-bit
and arrive split into (hi, lo) 64-bit limbs; the dispatch wrapper in
``qphi._kernels`` does the splitting and enforces p_bits <= 120.
"""

from array import array

from libc.math cimport M_PI, exp, fabs, ldexp, log, sin

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

ctypedef unsigned long long u64


cdef inline u128 _join(u64 hi, u64 lo) noexcept:
    return ((<u128> hi) << 64) | (<u128> lo)


def log_term(double logr, double d, bint unit):
    if unit:
        return log(2.0 * sin(M_PI * d))
    cdef double s = sin(M_PI * d)
    cdef double r, ri
    if logr > 0.35:
        ri = exp(-logr)
        return logr + 0.5 * log((1.0 - ri) * (1.0 - ri) + 4.0 * ri * (s * s))
    r = exp(logr)
    return 0.5 * log((1.0 - r) * (1.0 - r) + 4.0 * r * (s * s))


def phase_scan(u64 step_hi, u64 step_lo, u64 off_hi, u64 off_lo,
               int p_bits, long long n0, long long n1,
               double logr0, double dlogr, bint unit,
               u64 sing_hi, u64 sing_lo, c_pairs, u64 eps_hi, u64 eps_lo):
    cdef u128 step = _join(step_hi, step_lo)
    cdef u128 offset = _join(off_hi, off_lo)
    cdef u128 sing_fp = _join(sing_hi, sing_lo)
    cdef u128 eps_fp = _join(eps_hi, eps_lo)
    cdef u128 full = (<u128> 1) << p_bits
    cdef u128 mask = full - 1
    cdef u128 half = full >> 1
    cdef double inv_scale = ldexp(1.0, -p_bits)

    cdef int n_c = len(c_pairs)
    cdef u128 c_arr[8]
    cdef int i
    if n_c > 8:
        raise ValueError("at most 8 exclusion centers per scan")
    for i in range(n_c):
        c_arr[i] = _join(<u64> c_pairs[i][0], <u64> c_pairs[i][1])

    cdef u128 s = (offset + (<u128> n0) * step) & mask
    cdef double main = 0.0, main_c = 0.0, excl = 0.0, excl_c = 0.0
    cdef double main_abs = 0.0, excl_abs = 0.0, inv_dist = 0.0
    cdef u128 min_dist = mask
    cdef list excluded = []
    cdef list singular = []
    cdef bint fixed_r = dlogr == 0.0
    cdef double logr = logr0
    cdef long long k
    cdef u128 d_fp, dc, dd
    cdef double x, term, sn, r, ri, y, t
    cdef bint member

    for k in range(n0, n1):
        d_fp = s if s <= half else full - s
        if unit and d_fp < sing_fp:
            singular.append(k)
            s = (s + step) & mask
            continue
        x = (<double> d_fp) * inv_scale
        if d_fp != 0:
            inv_dist += 1.0 / x
            if d_fp < min_dist:
                min_dist = d_fp
        if unit:
            term = log(2.0 * sin(M_PI * x))
        else:
            if not fixed_r:
                logr = logr0 + k * dlogr
            sn = sin(M_PI * x)
            if logr > 0.35:
                ri = exp(-logr)
                term = logr + 0.5 * log((1.0 - ri) * (1.0 - ri) + 4.0 * ri * (sn * sn))
            else:
                r = exp(logr)
                term = 0.5 * log((1.0 - r) * (1.0 - r) + 4.0 * r * (sn * sn))
        member = False
        for i in range(n_c):
            dc = (s - c_arr[i]) & mask
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
            excl_abs += fabs(term)
        else:
            y = term - main_c
            t = main + y
            main_c = (t - main) - y
            main = t
            main_abs += fabs(term)
        s = (s + step) & mask

    return (main, excl, main_abs, excl_abs, inv_dist, excluded, singular,
            (<u64> (min_dist >> 64), <u64> (min_dist & <u128> 0xFFFFFFFFFFFFFFFFULL)),
            n1 - n0)


def phase_prefix(u64 step_hi, u64 step_lo, u64 off_hi, u64 off_lo,
                 int p_bits, long long n_lo, long long n_hi,
                 double logr0, double dlogr, bint unit, u64 sing_hi, u64 sing_lo):
    cdef u128 step = _join(step_hi, step_lo)
    cdef u128 offset = _join(off_hi, off_lo)
    cdef u128 sing_fp = _join(sing_hi, sing_lo)
    cdef u128 full = (<u128> 1) << p_bits
    cdef u128 mask = full - 1
    cdef u128 half = full >> 1
    cdef double inv_scale = ldexp(1.0, -p_bits)

    out = array("d", bytes(8 * (n_hi - n_lo)))
    cdef double[::1] mv = out
    cdef u128 s = offset & mask
    cdef double tot = 0.0, comp = 0.0, abs_sum = 0.0, inv_dist = 0.0
    cdef list singular = []
    cdef bint fixed_r = dlogr == 0.0
    cdef double logr = logr0
    cdef long long k
    cdef u128 d_fp
    cdef double x, term, sn, r, ri, y, t

    for k in range(n_hi):
        d_fp = s if s <= half else full - s
        if unit and d_fp < sing_fp:
            singular.append(k)
        else:
            x = (<double> d_fp) * inv_scale
            if d_fp != 0:
                inv_dist += 1.0 / x
            if unit:
                term = log(2.0 * sin(M_PI * x))
            else:
                if not fixed_r:
                    logr = logr0 + k * dlogr
                sn = sin(M_PI * x)
                if logr > 0.35:
                    ri = exp(-logr)
                    term = logr + 0.5 * log((1.0 - ri) * (1.0 - ri) + 4.0 * ri * (sn * sn))
                else:
                    r = exp(logr)
                    term = 0.5 * log((1.0 - r) * (1.0 - r) + 4.0 * r * (sn * sn))
            y = term - comp
            t = tot + y
            comp = (t - tot) - y
            tot = t
            abs_sum += fabs(term)
        if k >= n_lo:
            mv[k - n_lo] = tot
        s = (s + step) & mask

    return out, abs_sum, inv_dist, singular


def min_prod_scan(u64 step_hi, u64 step_lo, int p_bits, long long m_max,
                  u64 c_hi, u64 c_lo):
    cdef u128 step = _join(step_hi, step_lo)
    cdef u128 c_fp = _join(c_hi, c_lo)
    cdef u128 full = (<u128> 1) << p_bits
    cdef u128 mask = full - 1
    cdef u128 half = full >> 1
    cdef u128 s = 0
    cdef u128 best = 0
    cdef bint have = False
    cdef long long best_m = 0
    cdef long long m
    cdef u128 d, dc, v
    for m in range(1, m_max + 1):
        s = (s + step) & mask
        dc = (s - c_fp) & mask
        d = dc if dc <= half else full - dc
        v = (<u128> m) * d
        if (not have) or v < best:
            best = v
            best_m = m
            have = True
    return best_m, (<u64> (best >> 64), <u64> (best & <u128> 0xFFFFFFFFFFFFFFFFULL))


def exclusion_scan(u64 step_hi, u64 step_lo, u64 c_hi, u64 c_lo,
                   int p_bits, long long n, u64 eps_hi, u64 eps_lo):
    cdef u128 step = _join(step_hi, step_lo)
    cdef u128 c_fp = _join(c_hi, c_lo)
    cdef u128 eps_fp = _join(eps_hi, eps_lo)
    cdef u128 full = (<u128> 1) << p_bits
    cdef u128 mask = full - 1
    cdef u128 half = full >> 1
    cdef u128 s = 0
    cdef list hits = []
    cdef long long k
    cdef u128 d, dc
    for k in range(1, n + 1):
        s = (s + step) & mask
        dc = (s - c_fp) & mask
        d = dc if dc <= half else full - dc
        if d < eps_fp:
            hits.append(k)
    return hits
