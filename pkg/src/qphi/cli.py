"""Command-line front end.

One subcommand per result family:

  analyze-theta   continued fraction + finite-scan diophantine constant
  sqrt2-check     m*||m*sqrt2|| > 1/3 scan
  roottest        |(a;q)_n|^(1/n) at checkpoints, optional limit check
  radius          predicted + empirical radius of convergence
  weyl            equidistribution averages / singular-average reports
  liouville       radius-zero construction certificates

Exit codes: 0 success, 1 a requested check ran and failed, 2 usage error.
Reports are deterministic: identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__, diophant, ergodic, liouville, qseries
from ._kernels import BACKEND
from .errors import AngleParseError
from .exactnum import LiouvilleAngle, parse_angle
from .qpoch import classify_limit, param_from_text, root_test_sequence
from .qseries import SeriesParams
from . import reports

N_MAX_CAP = 10**7
_DEFAULT_CHECKPOINTS = "10,100,1000,10000,100000"


@dataclass
class RunConfig:
    subcommand: str
    theta: str | None = None
    params: tuple = ()
    n_max: int | None = None
    checkpoints: tuple = ()
    epsilons: tuple = ()
    output_format: str = "json"
    threads: int = 1
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "theta": self.theta,
            "params": list(self.params),
            "n_max": self.n_max,
            "checkpoints": list(self.checkpoints),
            "epsilons": list(self.epsilons),
            "output_format": self.output_format,
            "threads": self.threads,
            "seed": self.seed,
            **self.extra,
        }


def _envelope(kind: str, config: RunConfig, data: dict, partial: bool = False) -> dict:
    return {
        "version": __version__,
        "backend": BACKEND,
        "kind": kind,
        "partial": partial,
        "config": config.as_dict(),
        "data": data,
    }


def _common_flags(sp):
    sp.add_argument("--format", choices=("json", "csv"), default="json",
                    help="output format (default json)")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker threads for independent jobs (default 1)")
    sp.add_argument("--seed", type=int, default=0,
                    help="seed echoed into the report (reserved for sweeps)")
    sp.add_argument("--precision-bits", type=int, default=None,
                    help="floor for the fixed-point working precision")


def _fractions_csv(text: str) -> tuple:
    return tuple(Fraction(x) for x in text.split(","))


def _floats_csv(text: str) -> tuple:
    return tuple(float(x) for x in text.split(","))


def _ints_csv(text: str) -> tuple:
    return tuple(int(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qphi",
        description="convergence analysis of basic hypergeometric series on |q| = 1",
    )
    ap.add_argument("--version", action="version", version=f"qphi {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("analyze-theta", help="continued fraction and scan constant")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--max-terms", type=int, default=32)
    sp.add_argument("--scan-limit", type=int, default=10**4)
    _common_flags(sp)

    sp = sub.add_parser("sqrt2-check", help="verify m*||m*sqrt2|| > 1/3 up to a bound")
    sp.add_argument("--max-m", type=int, default=10**6)
    _common_flags(sp)

    sp = sub.add_parser("roottest", help="n-th roots of |(a;q)_n| at checkpoints")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--param", required=True,
                    help='"polar:<mod>@<angle_turns>" or "combo:<alpha>,<beta>"')
    sp.add_argument("--checkpoints", default=_DEFAULT_CHECKPOINTS)
    sp.add_argument("--predicted", type=float, default=None,
                    help="limit to classify the sequence against")
    _common_flags(sp)

    sp = sub.add_parser("radius", help="predicted and empirical radius of convergence")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--upper", action="append", default=[],
                    help="upper parameter (repeatable)")
    sp.add_argument("--lower", action="append", default=[],
                    help="lower parameter (repeatable)")
    sp.add_argument("--base-modulus", default="1")
    sp.add_argument("--n-max", type=int, default=10**4)
    _common_flags(sp)

    sp = sub.add_parser("weyl", help="equidistribution averages and exclusion reports")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--r", default="1", help="kernel modulus (rational)")
    sp.add_argument("--shift", default="0", help="kernel shift in turns (rational)")
    sp.add_argument("--n", type=int, default=10**5)
    sp.add_argument("--epsilon-sweep", default="0.1,0.05,0.02,0.01")
    sp.add_argument("--c-rj", default="0", help="singularity theta-coefficients")
    sp.add_argument("--c-offset", default="0", help="singularity rational offsets")
    _common_flags(sp)

    sp = sub.add_parser("liouville", help="radius-zero construction certificates")
    sp.add_argument("--k-seq", default="2,2")
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--shift", default="0")
    sp.add_argument("--check", choices=("small", "product", "roots", "all"),
                    default="all")
    _common_flags(sp)
    return ap


def _config_from(args, **extra) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        theta=getattr(args, "theta", None),
        output_format=args.format,
        threads=args.threads,
        seed=args.seed,
        extra=extra,
    )


def _cap_n(n: int):
    if n > N_MAX_CAP:
        raise ValueError(f"index bound {n} above the hard cap {N_MAX_CAP}")
    if n < 1:
        raise ValueError("index bound must be positive")


def cmd_analyze_theta(args) -> tuple:
    spec = parse_angle(args.theta)
    _cap_n(args.scan_limit)
    cf = diophant.cf_expand(spec, args.max_terms)
    dio = diophant.bad_approx_constant(spec, args.scan_limit)
    depth = min(8, len(cf.preperiod) + (len(cf.period) or 0)) or 1
    convs = diophant.convergents(cf, depth)
    config = _config_from(args, max_terms=args.max_terms,
                          scan_limit=args.scan_limit)
    data = {
        "quotients": list(cf.preperiod),
        "period": list(cf.period),
        "truncated": cf.truncated,
        "convergents": [{"p": p, "q": q} for p, q in convs],
        "constant": reports.encode_value(dio.min_value),
        "argmin": dio.argmin_m,
        "scan_limit": dio.scan_limit,
    }
    partial = cf.truncated and len(cf.preperiod) < args.max_terms
    if args.format == "csv":
        return 0, None, reports.quotients_csv(cf)
    return 0, _envelope("analyze-theta", config, data, partial=partial), None


def cmd_sqrt2_check(args) -> tuple:
    _cap_n(args.max_m)
    res = diophant.verify_sqrt2_inequality(args.max_m)
    config = _config_from(args, max_m=args.max_m)
    data = {
        "holds": res["holds"],
        "min_margin": reports.encode_value(res["min_margin"]),
        "argmin_m": res["argmin_m"],
        "scan_limit": res["scan_limit"],
    }
    code = 0 if res["holds"] else 1
    if args.format == "csv":
        csv = reports.emit_csv(
            ("max_m", "holds", "min_margin", "abs_error", "argmin_m"),
            [(args.max_m, res["holds"], repr(float(res["min_margin"])),
              repr(res["min_margin"].abs_error), res["argmin_m"])])
        return code, None, csv
    return code, _envelope("sqrt2-check", config, data), None


def cmd_roottest(args) -> tuple:
    spec = parse_angle(args.theta)
    param = param_from_text(args.param)
    cps = _ints_csv(args.checkpoints)
    _cap_n(max(cps))
    points = root_test_sequence(param, spec, cps)
    config = _config_from(args, param=args.param,
                          checkpoints=list(cps), predicted=args.predicted)
    data = {
        "points": [{"n": p.n, "log_mean": reports.encode_value(p.log_mean),
                    "value": p.value} for p in points],
    }
    code = 0
    if args.predicted is not None:
        verdict = classify_limit(points, args.predicted)
        data["classification"] = {
            "verdict": verdict.verdict,
            "residuals": list(verdict.residuals),
            "tolerance": verdict.tolerance,
        }
        if verdict.verdict == "inconsistent":
            code = 1
    if args.format == "csv":
        return code, None, reports.roottest_csv(points)
    return code, _envelope("roottest", config, data), None


def _radius_verdict(prediction, empirical) -> str | None:
    v = prediction.value
    if prediction.case_tag == "unit_unknown":
        return None
    if prediction.case_tag == "unit_liouville_zero":
        return "consistent" if empirical.collapse and empirical.estimate < 0.1 \
            else "inconsistent"
    if v == math.inf:
        return "consistent" if empirical.growth else "inconsistent"
    rel = abs(empirical.estimate / float(v) - 1.0)
    return "consistent" if rel < 0.1 else "inconsistent"


def cmd_radius(args) -> tuple:
    spec = parse_angle(args.theta)
    upper = tuple(param_from_text(t) for t in args.upper)
    lower = tuple(param_from_text(t) for t in args.lower)
    _cap_n(args.n_max)
    p = SeriesParams(upper, lower, spec, Fraction(args.base_modulus))
    bad = qseries.validate_params(p)
    if bad is not None:
        raise ValueError(f"invalid series parameters: {bad}")
    prediction = qseries.predicted_radius(p)
    empirical = qseries.empirical_radius(p, args.n_max)
    verdict = _radius_verdict(prediction, empirical)
    config = _config_from(args, upper=list(args.upper), lower=list(args.lower),
                          base_modulus=args.base_modulus, n_max=args.n_max)
    window = empirical.window_values
    decimated = window[:: max(1, len(window) // 128)]
    data = {
        "prediction": {
            "value": reports.encode_value(prediction.value),
            "case_tag": prediction.case_tag,
        },
        "empirical": {
            "estimate": reports.encode_value(empirical.estimate),
            "window": list(empirical.window),
            "window_values": [[n, v] for n, v in decimated],
            "regression_slope": empirical.regression_slope,
            "collapse": empirical.collapse,
            "growth": empirical.growth,
            "witnesses": [[n, v] for n, v in empirical.witnesses],
        },
        "verdict": verdict,
    }
    code = 1 if verdict == "inconsistent" else 0
    if args.format == "csv":
        return code, None, reports.radius_csv(decimated, empirical.witnesses)
    return code, _envelope("radius", config, data), None


def cmd_weyl(args) -> tuple:
    spec = parse_angle(args.theta)
    r = Fraction(args.r)
    shift = Fraction(args.shift)
    _cap_n(args.n)
    kernel = ergodic.LogKernel(r, shift)
    epsilons = _floats_csv(args.epsilon_sweep)
    config = _config_from(args, r=args.r, shift=args.shift, n=args.n,
                          epsilon_sweep=list(epsilons),
                          c_rj=args.c_rj, c_offset=args.c_offset)
    if not kernel.unit:
        avg = ergodic.weyl_average(kernel, spec, args.n)
        closed = ergodic.closed_form_integral(r)
        quad = ergodic.quadrature_integral(kernel, 1e-8)
        data = {
            "average": reports.encode_value(avg),
            "closed_form": closed,
            "quadrature": reports.encode_value(quad),
            "n": args.n,
        }
        return 0, _envelope("weyl", config, data), None
    rjs = _fractions_csv(args.c_rj)
    offs = _fractions_csv(args.c_offset)
    if len(rjs) != len(offs):
        raise ValueError("--c-rj and --c-offset need the same length")
    c_list = [ergodic.SingularitySpec(rj, off) for rj, off in zip(rjs, offs)]
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reps = list(pool.map(
                lambda e: ergodic.singular_average_report(kernel, spec, c_list,
                                                          args.n, e),
                epsilons))
    else:
        reps = [ergodic.singular_average_report(kernel, spec, c_list, args.n, e)
                for e in epsilons]
    holds = all(r.holds_envelope for r in reps)
    data = {
        "reports": [{
            "epsilon": r.epsilon,
            "n": r.n,
            "density": r.density,
            "excluded_count": len(r.excluded_indices),
            "full_avg": reports.encode_value(r.full_avg),
            "restricted_avg": reports.encode_value(r.restricted_avg),
            "excluded_sum": reports.encode_value(r.excluded_sum),
            "excluded_mass": reports.encode_value(r.excluded_mass),
            "envelope_constant": r.envelope_constant,
            "envelope_scan_limit": r.envelope_scan_limit,
            "envelope_bound": r.envelope_bound,
            "holds_envelope": r.holds_envelope,
        } for r in reps],
    }
    code = 0 if holds else 1
    if args.format == "csv":
        return code, None, reports.weyl_csv(reps)
    return code, _envelope("weyl", config, data), None


def cmd_liouville(args) -> tuple:
    ks = _ints_csv(args.k_seq)
    depth = args.depth if args.depth is not None else len(ks) + 1
    shift = Fraction(args.shift)
    checks = ("small", "product", "roots") if args.check == "all" else (args.check,)
    config = _config_from(args, k_seq=list(ks), depth=depth, shift=args.shift,
                          check=args.check)
    data = {}
    rows = []
    ok = True
    if "small" in checks:
        seq = liouville.build_denominators(ks, max(depth, 2) if depth < 4 else depth)
        max_n = seq.depth - 1
        if seq.depth < 4 and max_n < 3:
            seq = liouville.build_denominators(ks, min(4, depth + 1))
            max_n = seq.depth - 1
        certs = [liouville.check_small(seq, n, shift) for n in range(1, max_n + 1)]
        data["check_small"] = [{
            "n": c.n,
            "a_n": c.a_n,
            "distance_lo": reports.encode_fraction(c.distance_lo),
            "distance_hi": reports.encode_fraction(c.distance_hi, round_up=True),
            "bound": reports.encode_fraction(c.bound, round_up=True),
            "holds": c.holds,
        } for c in certs]
        ok &= all(c.holds for c in certs)
        rows += [("small", c.n, c.holds, f"a_n={c.a_n}") for c in certs]
    if "product" in checks or "roots" in checks:
        seq = liouville.build_denominators(ks, depth)
        wit = []
        for n in range(1, seq.depth + 1):
            if seq.denominators[n - 1] > liouville.PRODUCT_CAP:
                break
            wit.append(liouville.product_bound_witness(seq, n))
        data["product_bound"] = [{
            "n": w.n,
            "a_n": w.a_n,
            "log_product": reports.encode_value(w.log_product),
            "log_bound": reports.encode_value(w.log_bound),
            "root": reports.encode_value(w.root),
            "holds": w.holds,
        } for w in wit]
        ok &= all(w.holds for w in wit)
        rows += [("product", w.n, w.holds, f"root={float(w.root):.6g}") for w in wit]
    if shift:
        spec, N = liouville.shifted_variant(
            liouville.build_denominators(ks, depth), shift)
        data["shift_persistence_index"] = N
    code = 0 if ok else 1
    if args.format == "csv":
        return code, None, reports.liouville_csv(rows)
    return code, _envelope("liouville", config, data), None


_HANDLERS = {
    "analyze-theta": cmd_analyze_theta,
    "sqrt2-check": cmd_sqrt2_check,
    "roottest": cmd_roottest,
    "radius": cmd_radius,
    "weyl": cmd_weyl,
    "liouville": cmd_liouville,
}


def run(argv) -> int:
    """Parse argv, run the subcommand, print the report, return the exit code."""
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.precision_bits is not None:
        os.environ["QPHI_PRECISION_BITS"] = str(args.precision_bits)
    if args.threads < 1:
        ap.error("--threads must be >= 1")
    try:
        code, payload, csv_text = _HANDLERS[args.subcommand](args)
    except (AngleParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(reports.emit_json(payload))
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
