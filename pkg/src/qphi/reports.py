"""Machine-readable report emission (JSON and CSV) and re-parsing.

JSON output is deterministic byte for byte (sorted keys, fixed float repr).
Exact rationals are embedded as numerator/denominator decimal strings while
they fit; the astronomically sized certificate values are encoded as a
17-significant-digit scientific string rounded in a stated direction plus
exact digit counts, so a re-parsed interval is still a valid outer bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from functools import lru_cache

from .exactnum import BoundedReal

EXACT_DIGIT_LIMIT = 64
_SIG = 17


@lru_cache(maxsize=64)
def _digits10(n: int) -> int:
    """Exact decimal digit count of a positive integer."""
    if n < 10**18:
        return len(str(n))
    e = int(n.bit_length() * 0.30102999566398114)
    while 10**e <= n:
        e += 1
    while 10**(e - 1) > n:
        e -= 1
    return e


def encode_fraction(fr: Fraction, round_up: bool = False) -> dict:
    """JSON encoding of an exact rational.

    Small values carry exact num/den strings; huge ones a directional
    scientific approximation ("rounded" says which way) plus digit counts.
    """
    fr = Fraction(fr)
    sign = -1 if fr < 0 else 1
    p, q = abs(fr.numerator), fr.denominator
    dn = _digits10(p) if p else 1
    dd = _digits10(q)
    if dn <= EXACT_DIGIT_LIMIT and dd <= EXACT_DIGIT_LIMIT:
        return {"num": str(fr.numerator), "den": str(q)}
    if p == 0:
        return {"num": "0", "den": "1"}
    mant, e10 = _sci_parts(p, q, round_up if sign > 0 else not round_up)
    return {
        "approx": f"{'-' if sign < 0 else ''}{mant}e{e10:+d}",
        "rounded": "up" if round_up else "down",
        "num_digits": dn,
        "den_digits": dd,
    }


def _sci_parts(p: int, q: int, round_up: bool):
    e = _digits10(p) - _digits10(q)
    k = _SIG - 1 - e
    c = (p * 10**k) // q if k >= 0 else p // (q * 10**(-k))
    while c >= 10**_SIG:
        c //= 10
        e += 1
    while c < 10**(_SIG - 1):
        c *= 10
        e -= 1
        # refine from the exact quotient to keep the digits true
        k = _SIG - 1 - e
        c = (p * 10**k) // q if k >= 0 else p // (q * 10**(-k))
    if round_up:
        c += 1
        if c >= 10**_SIG:
            c //= 10
            e += 1
    s = str(c)
    return f"{s[0]}.{s[1:]}", e


def decode_fraction(obj) -> Fraction:
    if isinstance(obj, str):
        return Fraction(obj)
    if "num" in obj:
        return Fraction(int(obj["num"]), int(obj["den"]))
    mant, _, exp = obj["approx"].partition("e")
    return Fraction(mant) * Fraction(10) ** int(exp)


def encode_value(v, round_up: bool = False):
    """Recursive JSON encoding for report payloads."""
    if isinstance(v, BoundedReal):
        out = {"abs_error": v.abs_error}
        if isinstance(v.value, Fraction):
            out["value"] = float(v.value)
            out["exact"] = encode_fraction(v.value, round_up)
        else:
            out["value"] = v.value
        return out
    if isinstance(v, Fraction):
        return encode_fraction(v, round_up)
    if is_dataclass(v) and not isinstance(v, type):
        return {k: encode_value(x) for k, x in asdict(v).items()}
    if isinstance(v, dict):
        return {k: encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


def decode_bounded(obj) -> BoundedReal:
    if "exact" in obj:
        return BoundedReal(decode_fraction(obj["exact"]), obj["abs_error"])
    return BoundedReal(obj["value"], obj["abs_error"])


def emit_json(report: dict) -> str:
    return json.dumps(encode_value(report), sort_keys=True, indent=2) + "\n"


def parse_json(text: str) -> dict:
    return json.loads(text)


def _csv_escape(x) -> str:
    s = str(x)
    if any(ch in s for ch in ",\"\n"):
        s = '"' + s.replace('"', '""') + '"'
    return s


def emit_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_escape(x) for x in row))
    return "\n".join(lines) + "\n"


def roottest_csv(points) -> str:
    """Fixed schema: n,log_mean,value,abs_error."""
    return emit_csv(
        ("n", "log_mean", "value", "abs_error"),
        [(p.n, repr(float(p.log_mean.value)), repr(p.value),
          repr(p.log_mean.abs_error)) for p in points],
    )


def radius_csv(window_values, witnesses) -> str:
    rows = [(n, repr(v), "window") for n, v in window_values]
    rows += [(n, repr(v), "witness") for n, v in witnesses]
    return emit_csv(("n", "log_coeff_over_n", "kind"), rows)


def weyl_csv(reports) -> str:
    return emit_csv(
        ("epsilon", "n", "density", "full_avg", "restricted_avg",
         "excluded_mass", "envelope_bound", "holds_envelope"),
        [(repr(r.epsilon), r.n, repr(r.density), repr(float(r.full_avg)),
          repr(float(r.restricted_avg)), repr(float(r.excluded_mass)),
          repr(r.envelope_bound), r.holds_envelope) for r in reports],
    )


def quotients_csv(cf) -> str:
    rows = [(i, a, "preperiod") for i, a in enumerate(cf.preperiod)]
    rows += [(len(cf.preperiod) + i, a, "period")
             for i, a in enumerate(cf.period)]
    return emit_csv(("index", "quotient", "part"), rows)


def liouville_csv(results) -> str:
    return emit_csv(("check", "n", "holds", "detail"), results)
