"""Kernel backend selection.

The compiled extension is used when it imported cleanly; set QPHI_BACKEND to
``pure`` or ``compiled`` to force a choice (forcing ``compiled`` raises if
the extension is unavailable).  The compiled kernels carry phases in 128-bit
integers, so calls with p_bits > 120 (never reached by the default precision
policy below the 10**7 index cap) fall back to the pure path, which has no
width limit.
"""

from __future__ import annotations

import os

from . import pykernels
from .pykernels import ScanResult

_COMPILED_MAX_BITS = 120
_LO = (1 << 64) - 1

_choice = os.environ.get("QPHI_BACKEND", "auto").strip().lower()
_compiled = None
if _choice in ("auto", "", "compiled", "c"):
    try:
        from . import _ckernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None
    if _compiled is None and _choice in ("compiled", "c"):
        raise ImportError("QPHI_BACKEND=compiled but qphi._kernels._ckernels is not built")
elif _choice in ("pure", "py", "python"):
    _compiled = None
else:
    raise ValueError(f"unrecognized QPHI_BACKEND value: {_choice!r}")

BACKEND = "compiled" if _compiled is not None else "pure"


def _pair(v: int) -> tuple[int, int]:
    return (v >> 64, v & _LO)


def log_term(logr: float, d: float, unit: bool) -> float:
    if _compiled is not None:
        return _compiled.log_term(logr, d, unit)
    return pykernels.log_term(logr, d, unit)


def phase_scan(step_fp, offset_fp, p_bits, n0, n1, logr0, dlogr, unit,
               sing_fp, c_fps=(), eps_fp=0) -> ScanResult:
    if _compiled is not None and p_bits <= _COMPILED_MAX_BITS and len(c_fps) <= 8:
        sh, sl = _pair(step_fp)
        oh, ol = _pair(offset_fp)
        gh, gl = _pair(sing_fp)
        eh, el = _pair(eps_fp)
        pairs = [_pair(c) for c in c_fps]
        (main, excl, main_abs, excl_abs, inv_dist, excluded, singular,
         md_pair, count) = _compiled.phase_scan(
            sh, sl, oh, ol, p_bits, n0, n1, logr0, dlogr, unit,
            gh, gl, pairs, eh, el)
        min_dist = (md_pair[0] << 64) | md_pair[1]
        return ScanResult(main, excl, main_abs, excl_abs, inv_dist,
                          excluded, singular, min_dist, count)
    return pykernels.phase_scan(step_fp, offset_fp, p_bits, n0, n1,
                                logr0, dlogr, unit, sing_fp, c_fps, eps_fp)


def phase_prefix(step_fp, offset_fp, p_bits, n_lo, n_hi, logr0, dlogr, unit, sing_fp):
    if _compiled is not None and p_bits <= _COMPILED_MAX_BITS:
        sh, sl = _pair(step_fp)
        oh, ol = _pair(offset_fp)
        gh, gl = _pair(sing_fp)
        return _compiled.phase_prefix(sh, sl, oh, ol, p_bits, n_lo, n_hi,
                                      logr0, dlogr, unit, gh, gl)
    return pykernels.phase_prefix(step_fp, offset_fp, p_bits, n_lo, n_hi,
                                  logr0, dlogr, unit, sing_fp)


def min_prod_scan(step_fp, p_bits, m_max, c_fp=0):
    # the exact integer product m * d needs p_bits + bits(m_max) <= 127
    if (_compiled is not None and p_bits <= _COMPILED_MAX_BITS
            and p_bits + m_max.bit_length() <= 126):
        sh, sl = _pair(step_fp)
        ch, cl = _pair(c_fp)
        best_m, pair = _compiled.min_prod_scan(sh, sl, p_bits, m_max, ch, cl)
        return best_m, (pair[0] << 64) | pair[1]
    return pykernels.min_prod_scan(step_fp, p_bits, m_max, c_fp)


def exclusion_scan(step_fp, c_fp, p_bits, n, eps_fp):
    if _compiled is not None and p_bits <= _COMPILED_MAX_BITS:
        sh, sl = _pair(step_fp)
        ch, cl = _pair(c_fp)
        eh, el = _pair(eps_fp)
        return _compiled.exclusion_scan(sh, sl, ch, cl, p_bits, n, eh, el)
    return pykernels.exclusion_scan(step_fp, c_fp, p_bits, n, eps_fp)
