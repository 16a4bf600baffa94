"""Command-line front end.

Every invocation prints one JSON record on stdout::

    {"schema_version": 1, "command": ..., "inputs": {...}, "result": {...}}

Integers are written as decimal strings. Exit codes: 0 success, 1 internal
error or failed verification, 2 bad input, 3 search exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from . import __version__
from .classpoly import hilbert_class_poly
from .collision import measure
from .construct import (
    TRIAL_CAP_FACTOR,
    SMOOTH_EXPECTED_TRIALS,
    ConstructionResult,
    SubgroupSpec,
    TraceCertificate,
    check_smooth_inputs,
    cm_construct,
    cm_construct_average,
    naive_trial,
    require_prime_field,
    smooth_trial,
    subgroup_construct,
    validate_certificate,
)
from .curve import Curve, CurveOrder, count_points, group_structure, j_invariant
from .errors import PreconditionError, SearchExhausted, TrialsExhausted
from .smooth import choose_y

SCHEMA_VERSION = 1
MAX_P_ENV = "CURVESMITH_MAX_P"

log = logging.getLogger("curvesmith")


def _s(v):
    """Stringify integers recursively; bools and strings pass through."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, dict):
        return {k: _s(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_s(x) for x in v]
    raise TypeError(f"cannot serialize {type(v).__name__}")


def curve_fields(E: Curve) -> dict:
    return {"p": E.p, "a": E.a, "b": E.b}


def result_fields(res: ConstructionResult) -> dict:
    out = {
        "curve": curve_fields(res.curve),
        "N": res.order.N,
        "t": res.order.t,
        "j": res.j,
        "method": res.method,
        "trials": res.trials,
    }
    c = res.certificate
    if c is not None:
        out["certificate"] = {
            "t": c.t,
            "v": c.v,
            "s_lift": c.s_lift,
            "u": c.u,
            "D": c.D,
            "crt_residue": c.crt_residue,
            "crt_modulus": c.crt_modulus,
            "fallback": c.fallback,
        }
    return out


def result_from_fields(d: dict) -> ConstructionResult:
    cv = d["curve"]
    E = Curve(int(cv["p"]), int(cv["a"]), int(cv["b"]))
    cert = None
    if "certificate" in d:
        c = d["certificate"]
        cert = TraceCertificate(
            int(c["t"]), int(c["v"]), int(c["s_lift"]), int(c["u"]), int(c["D"]),
            int(c["crt_residue"]), int(c["crt_modulus"]), bool(c.get("fallback", False)),
        )
    order = CurveOrder(int(d["N"]), int(d["t"]))
    return ConstructionResult(E, order, int(d.get("j", j_invariant(E))), d.get("method", "cm"), cert, int(d.get("trials", 0)))


def _check_p(p):
    cap = int(os.environ.get(MAX_P_ENV, str(2**64)))
    if p > cap:
        raise PreconditionError(f"p = {p} exceeds {MAX_P_ENV} = {cap}")
    require_prime_field(p)


def _first_success(fn, args, cap, jobs):
    """Run trials 0..cap-1, returning the lowest-index success."""
    if jobs <= 1:
        for i in range(cap):
            res = fn(*args, i)
            if res is not None:
                return res
        return None
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for start in range(0, cap, jobs):
            idx = range(start, min(cap, start + jobs))
            futures = [pool.submit(fn, *args, i) for i in idx]
            for fut in futures:
                res = fut.result()
                if res is not None:
                    return res
    return None


def cmd_construct(a):
    _check_p(a.p)
    if a.m < 1:
        raise PreconditionError("m must be positive")
    method = a.method
    if method == "auto":
        method = "cm" if 16 * a.m * a.m <= a.p else "naive"
    if method == "cm":
        res = cm_construct(a.p, a.m)
    elif method == "cm-avg":
        res = cm_construct_average(a.p, a.m)
    elif method == "naive":
        cap = a.max_trials or TRIAL_CAP_FACTOR * a.m
        res = _first_success(naive_trial, (a.p, a.m, a.seed), cap, a.jobs)
        if res is None:
            raise TrialsExhausted(f"no curve with {a.m} | N in {cap} trials", cap)
    else:
        pair = _smooth(a.p, a.m, None, a.seed, a.max_trials, a.jobs)
        out = result_fields(pair.result)
        out.update(method_used="smooth-wrap", m_found=pair.m, y=pair.y)
        return out
    out = result_fields(res)
    out["method_used"] = method
    return out


def _smooth(p, M, y, seed, max_trials, jobs):
    _check_p(p)
    check_smooth_inputs(p, M)
    y = y if y is not None else choose_y(p)
    cap = max_trials or TRIAL_CAP_FACTOR * SMOOTH_EXPECTED_TRIALS
    pair = _first_success(smooth_trial, (p, M, y, seed), cap, jobs)
    if pair is None:
        raise TrialsExhausted(f"no {y}-smooth divisor in [{M}, {2 * M}] after {cap} trials", cap)
    return pair


def cmd_smooth_pair(a):
    pair = _smooth(a.p, a.M, a.y, a.seed, a.max_trials, a.jobs)
    out = result_fields(pair.result)
    out.update(m=pair.m, y=pair.y, factorization=[list(f) for f in pair.factorization.factors])
    return out


def cmd_subgroup(a):
    _check_p(a.p)
    res = subgroup_construct(a.p, SubgroupSpec(a.r, a.s))
    gs = group_structure(res.curve, res.order)
    out = result_fields(res)
    out["structure"] = {"n1": gs.n1, "n2": gs.n2}
    return out


def cmd_classpoly(a):
    H = hilbert_class_poly(a.D)
    return {"D": H.D, "degree": H.degree, "coefficients": list(H.coeffs)}


def _curve_arg(a):
    _check_p(a.p)
    return Curve(a.p, a.a, a.b)


def cmd_count(a):
    E = _curve_arg(a)
    order = count_points(E, seed=a.seed)
    return {"curve": curve_fields(E), "N": order.N, "t": order.t, "j": j_invariant(E)}


def cmd_structure(a):
    E = _curve_arg(a)
    order = count_points(E)
    gs = group_structure(E, order)
    return {"curve": curve_fields(E), "N": order.N, "n1": gs.n1, "n2": gs.n2}


def cmd_collision(a):
    _check_p(a.p)
    if (a.a is None) != (a.b is None):
        raise PreconditionError("--a and --b go together")
    if a.a is None:
        E = cm_construct(a.p, a.m).curve
    else:
        E = Curve(a.p, a.a, a.b)
    rep = measure(E, a.m)
    return {
        "curve": curve_fields(E),
        "m": rep.m,
        "domain_size": rep.domain_size,
        "image_size": rep.image_size,
        "degree": rep.degree,
        "collision_count": rep.collision_count,
        "torsion_hits": rep.torsion_hits,
    }


class VerificationFailed(Exception):
    pass


def cmd_verify(a):
    try:
        record = json.load(sys.stdin)
        res_fields = record["result"]
        inputs = record.get("inputs", {})
        res = result_from_fields(res_fields)
    except (ValueError, KeyError, TypeError) as exc:
        raise PreconditionError(f"unreadable record: {exc}") from exc
    p = res.curve.p
    m = int(inputs.get("m", 1))
    if "r" in inputs:
        m = int(inputs["r"]) ** 2 * int(inputs.get("s", 1))
    if "m_found" in res_fields:
        m = int(res_fields["m_found"])
    elif "m" in res_fields:
        m = int(res_fields["m"])
    recount = count_points(res.curve)
    checks = {
        "order_matches": recount.N == res.order.N and recount.t == res.order.t,
        "divisible": recount.N % m == 0,
    }
    if res.certificate is not None:
        checks["certificate"] = validate_certificate(p, m, res)
    valid = all(checks.values())
    out = {"valid": valid, "checks": checks, "N": recount.N, "m": m}
    if not valid:
        raise VerificationFailed(out)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvesmith", description="Elliptic curves with prescribed divisibility.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--quiet", action="store_true", help="print only the record")
    sub = parser.add_subparsers(dest="command", required=True)
    # --quiet is accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="print only the record")

    c = sub.add_parser("construct", parents=[common], help="curve with m | #E(F_p)")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--method", choices=["naive", "smooth-wrap", "cm", "cm-avg", "auto"], default="auto")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--max-trials", type=int, default=None)
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("smooth-pair", parents=[common], help="y-smooth m in [M, 2M] and a curve with m | N")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--y", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-trials", type=int, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_smooth_pair)

    g = sub.add_parser("subgroup", parents=[common], help="curve containing Z/r x Z/rs")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--s", type=int, required=True)
    g.set_defaults(func=cmd_subgroup)

    h = sub.add_parser("classpoly", parents=[common], help="Hilbert class polynomial")
    h.add_argument("--D", type=int, required=True)
    h.set_defaults(func=cmd_classpoly)

    for name, func, helptext in (
        ("count", cmd_count, "#E(F_p) and trace"),
        ("structure", cmd_structure, "group invariants n1 | n2"),
    ):
        k = sub.add_parser(name, parents=[common], help=helptext)
        k.add_argument("--p", type=int, required=True)
        k.add_argument("--a", type=int, required=True)
        k.add_argument("--b", type=int, required=True)
        k.add_argument("--seed", type=int, default=0)
        k.set_defaults(func=func)

    x = sub.add_parser("collision", parents=[common], help="image and collisions of the [m] x-map")
    x.add_argument("--p", type=int, required=True)
    x.add_argument("--m", type=int, required=True)
    x.add_argument("--a", type=int, default=None)
    x.add_argument("--b", type=int, default=None)
    x.set_defaults(func=cmd_collision)

    v = sub.add_parser("verify", parents=[common], help="check a record read from stdin")
    v.set_defaults(func=cmd_verify)
    return parser


def _inputs(args):
    skip = {"func", "quiet", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def emit(command, inputs, result, elapsed_ms, stream=None):
    result = dict(result)
    result["timings"] = {"total_ms": int(round(elapsed_ms))}
    record = {"schema_version": SCHEMA_VERSION, "command": command, "inputs": _s(inputs), "result": _s(result)}
    stream = stream or sys.stdout
    stream.write(json.dumps(record, sort_keys=True) + "\n")
    stream.flush()


def _configure_logging(quiet):
    # diagnostics go to the current stderr only; stdout carries the record
    for h in list(log.handlers):
        if getattr(h, "_curvesmith_cli", False):
            log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._curvesmith_cli = True
    log.addHandler(handler)
    log.setLevel(logging.ERROR if quiet else logging.INFO)
    log.propagate = False


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.quiet)
    inputs = _inputs(args)
    start = time.perf_counter()
    try:
        result = args.func(args)
    except PreconditionError as exc:
        log.error("%s", exc)
        return 2
    except SearchExhausted as exc:
        log.error("%s", exc)
        return 3
    except VerificationFailed as exc:
        emit(args.command, inputs, exc.args[0], (time.perf_counter() - start) * 1000)
        log.error("verification failed")
        return 1
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        log.exception("internal error: %s", exc)
        return 1
    elapsed = (time.perf_counter() - start) * 1000
    emit(args.command, inputs, result, elapsed)
    if not args.quiet:
        log.info("%s finished in %.1f ms", args.command, elapsed)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
