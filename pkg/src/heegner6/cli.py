"""Command line: unit-identity, construct, scan, selftest.

Exit codes: 0 pass, 1 mathematical failure, 2 usage error (including rejected
hypotheses), 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction

import mpmath as mp

from .config import FORMATS, RunConfig

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


# ------------------------------------------------------------------ serialization

def _q(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)


def _num(v, digits: int = 20) -> str:
    return mp.nstr(v, digits) if v is not None else None


def _record(command: str, inputs: dict, precision_used, t0: float, cfg: RunConfig, **fields) -> dict:
    rec = {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
           "precision_used": precision_used,
           "wall_time_ms": 0 if cfg.reproducible else int((time.perf_counter() - t0) * 1000)}
    rec.update(fields)
    return rec


def _flatten(rec: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


class Emitter:
    """Writes records in the configured format; csv takes its header from the first record."""

    def __init__(self, cfg: RunConfig, stream=None):
        self.cfg = cfg
        self.stream = stream or sys.stdout
        self._csv = None

    def emit(self, rec: dict):
        fmt = self.cfg.output_format
        if fmt == "json-lines":
            self.stream.write(json.dumps(rec, sort_keys=True) + "\n")
        elif fmt == "csv":
            flat = _flatten(rec)
            if self._csv is None:
                self._csv = csv.DictWriter(self.stream, fieldnames=list(flat), extrasaction="ignore")
                self._csv.writeheader()
            self._csv.writerow(flat)
        else:
            self.stream.write(_pretty(rec) + "\n")
        self.stream.flush()


def _pretty(rec: dict, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in rec.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_pretty(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {v}")
    if indent == 0:
        lines.append("")
    return "\n".join(lines)


# ------------------------------------------------------------------ commands

def unit_identity_record(n: int, cfg: RunConfig, workers: int = 1) -> tuple[dict, int]:
    from .cubicfield import SearchBudgetExceeded, verify_unit_identity
    from .eisenstein import admissibility_reason

    t0 = time.perf_counter()
    inputs = {"n": n}
    reason = admissibility_reason(n)
    if reason is not None:
        return _record("unit-identity", inputs, None, t0, cfg, status="rejected", reason=reason,
                       **{"pass": False}), EXIT_USAGE
    try:
        r = verify_unit_identity(n, cfg.precision_bits, workers=workers)
    except SearchBudgetExceeded as exc:
        return _record("unit-identity", inputs, cfg.precision_bits, t0, cfg, status="budget", reason=str(exc),
                       **{"pass": False}), EXIT_BUDGET
    rec = _record("unit-identity", inputs, cfg.precision_bits, t0, cfg, status="ok",
                  n=n, f_n=r.f, sigma=r.sigma, h_K=r.h, log_u=_num(r.log_u),
                  recovered_exponent=_num(r.recovered_exponent, 30), expected_exponent=r.expected_exponent,
                  error=_num(r.exponent_error, 5), **{"pass": r.passed})
    return rec, EXIT_OK if r.passed else EXIT_FAIL


def certificate_fields(cert) -> dict:
    d = cert.descent
    return {
        "a": cert.a, "b": cert.b, "n": cert.n, "rho": cert.rho, "eps": cert.eps,
        "curve": f"y^2 = x^3 + {_q(cert.D)}",
        "x": _q(cert.point[0]), "y": _q(cert.point[1]),
        "x_rho_n": _q(cert.point_rho_n[0]), "y_rho_n": _q(cert.point_rho_n[1]),
        "on_curve": cert.on_curve, "non_torsion": cert.non_torsion,
        "trace_residual": _num(cert.trace_residual, 5),
        "naive_height": round(cert.naive_height, 10),
        "canonical_height": _num(cert.canonical_height, 20),
        "division_index": cert.division_index,
        "h_K": cert.h_K,
        "generator": None if cert.generator is None else [_q(cert.generator[0]), _q(cert.generator[1])],
        "height_ratio": _num(cert.height_ratio, 20),
        "odd_square": cert.odd_square,
        "descent": None if d is None else {"passed": d.passed, "square_class": d.square_class},
        "notes": list(cert.notes),
    }


def construct_record(a: int, b: int, cfg: RunConfig, workers: int = 1) -> tuple[dict, int]:
    from .cubicfield import SearchBudgetExceeded
    from .heegner import HeegnerJob, InvalidJob, MembershipError, RecognitionError, finalize

    t0 = time.perf_counter()
    inputs = {"a": a, "b": b}
    try:
        job = HeegnerJob(a, b, prec=cfg.precision_bits, max_prec=cfg.max_precision_bits,
                         max_digits=cfg.max_digits)
    except InvalidJob as exc:
        return _record("construct", inputs, None, t0, cfg, status="rejected", reason=str(exc),
                       **{"pass": False}), EXIT_USAGE
    try:
        cert = finalize(job, workers=workers)
    except RecognitionError as exc:
        return _record("construct", inputs, cfg.max_precision_bits, t0, cfg, status="budget", reason=str(exc),
                       **{"pass": False}), EXIT_BUDGET
    except SearchBudgetExceeded as exc:
        return _record("construct", inputs, None, t0, cfg, status="budget", reason=str(exc),
                       **{"pass": False}), EXIT_BUDGET
    except MembershipError as exc:
        return _record("construct", inputs, None, t0, cfg, status="failure", reason=str(exc),
                       **{"pass": False}), EXIT_FAIL
    fields = certificate_fields(cert)
    ok = cert.on_curve and cert.non_torsion
    if cert.h_K is not None and cert.h_K % 2 == 1:
        if cert.odd_square is None and cert.generator is not None:
            ok = False
        if cert.descent is not None and not cert.descent.passed:
            ok = False
    rec = _record("construct", inputs, cert.precision_used, t0, cfg, status="ok", **fields, **{"pass": ok})
    return rec, EXIT_OK if ok else EXIT_FAIL


def _unit_job(args):
    n, cfg = args
    return unit_identity_record(n, cfg)


def _point_job(args):
    a, b, cfg = args
    return construct_record(a, b, cfg)


def scan_inputs_unit(lo: int, hi: int) -> list[int]:
    from .eisenstein import admissibility_reason

    return [n for n in range(max(lo, 2), hi + 1) if admissibility_reason(n) is None]


def scan_inputs_points(lo: int, hi: int, b: int) -> list[int]:
    from .heegner import job_rejection

    out = []
    for m in range(max(lo, 1), hi + 1):
        for a in (m, -m):
            if job_rejection(a, b) is None:
                out.append(a)
    return out


def run_scan(jobs, fn, workers: int):
    """Results in input order; a worker pool when workers > 1."""
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(fn, jobs)
    else:
        for j in jobs:
            yield fn(j)


# ------------------------------------------------------------------ argument parsing

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--precision", type=int, default=None, help="working precision in bits (default 384 or $HEEGNER6_PRECISION)")
    p.add_argument("--max-precision", type=int, default=None, help="cap for automatic precision doubling")
    p.add_argument("--guard-bits", type=int, default=None)
    p.add_argument("--max-digits", type=int, default=None, help="largest denominator size (decimal digits) for recognition")
    p.add_argument("--threads", type=int, default=None, help="worker processes (0 = all cores)")
    p.add_argument("--format", choices=FORMATS, default=None, dest="output_format")
    p.add_argument("--reproducible", action="store_true", help="report wall_time_ms = 0 for byte-identical reruns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heegner6", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("unit-identity", help="check the unit identity for N(X(n w) + 1)")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("construct", help="build the rational point for (a, b)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("scan", help="run many jobs, one record per admissible parameter")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--unit", action="store_true", help="unit identity for admissible n")
    mode.add_argument("--points", action="store_true", help="construct for admissible a with fixed b")
    p.add_argument("--min", type=int, default=1)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--b", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("selftest", help="golden series, matrix invariants, combinatorial and class-group oracles")
    p.add_argument("--quick", action="store_true", help="skip the class-group oracle and shorten sampling")
    p.add_argument("--golden", default=None, help="path to a golden q-series file")
    _add_common(p)
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig.from_env(precision_bits=args.precision, max_precision_bits=args.max_precision,
                              guard_bits=args.guard_bits, max_digits=args.max_digits,
                              thread_count=args.threads, output_format=args.output_format,
                              reproducible=args.reproducible or None)


def main(argv=None, stdout=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Emitter(cfg, stdout)

    if args.command == "unit-identity":
        rec, code = unit_identity_record(args.n, cfg, workers=cfg.workers if args.threads else 1)
        out.emit(rec)
        return code

    if args.command == "construct":
        rec, code = construct_record(args.a, args.b, cfg, workers=cfg.workers if args.threads else 1)
        out.emit(rec)
        return code

    if args.command == "scan":
        workers = cfg.workers if args.threads is not None else 1
        worst = EXIT_OK
        if args.unit:
            jobs = [(n, cfg) for n in scan_inputs_unit(args.min, args.max)]
            fn = _unit_job
        else:
            jobs = [(a, args.b, cfg) for a in scan_inputs_points(args.min, args.max, args.b)]
            fn = _point_job
        for rec, code in run_scan(jobs, fn, workers):
            out.emit(rec)
            if code != EXIT_OK:
                worst = max(worst, code)
        # failures are recorded in the stream; the scan itself only fails on mathematical failures
        return EXIT_FAIL if worst == EXIT_FAIL else EXIT_OK

    if args.command == "selftest":
        from .checks import selftest

        t0 = time.perf_counter()
        results = selftest(quick=args.quick, golden=args.golden)
        for r in results:
            print(r.line(), file=sys.stderr)
        ok = all(r.passed for r in results)
        out.emit(_record("selftest", {"quick": args.quick}, None, t0, cfg,
                         checks=[{"name": r.name, "pass": r.passed, "detail": r.detail} for r in results],
                         failed=[r.name for r in results if not r.passed], **{"pass": ok}))
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
