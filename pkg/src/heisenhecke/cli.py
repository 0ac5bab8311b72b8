"""Command-line front end.

Structured output goes to stdout as one JSON document per command; progress
and timing lines go to stderr.  Exit codes: 0 pass, 1 counterexample,
2 usage error, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

from . import __version__, docs
from .cache import ENV_VAR, StructureCache, default_cache_dir
from .core import CosetSystem, HeckeElement, IllDefinedProduct, hecke_series
from .gl import gl_system, verify_rationality
from .global_hecke import (
    verify_euler_product,
    verify_global_identity,
    verify_multiplicativity,
    verify_recovery,
)
from .heisenberg import HeisElt, heis_system, verify_heis_identity
from .report import Report

log = logging.getLogger("heisenhecke")

TARGETS = ("rationality", "heisenberg", "multiplicativity", "euler", "global", "recovery", "all")

# (target, params) run by `verify all`; mirrors the acceptance ranges
DEFAULT_JOBS: list[tuple[str, dict]] = [
    ("rationality", {"r": 2, "p": 2, "N": 5}),
    ("rationality", {"r": 2, "p": 3, "N": 5}),
    ("rationality", {"r": 2, "p": 5, "N": 5}),
    ("rationality", {"r": 3, "p": 2, "N": 3}),
    ("heisenberg", {"p": 2, "N": 6}),
    ("heisenberg", {"p": 3, "N": 4}),
    ("multiplicativity", {"system": "gl2", "bound": 100}),
    ("multiplicativity", {"system": "heis", "bound": 100}),
    ("euler", {"system": "gl2", "bound": 100}),
    ("euler", {"system": "heis", "bound": 100}),
    ("global", {"bound": 100}),
    ("recovery", {"bound": 100}),
]

RUNNERS: dict[str, Callable[..., Report]] = {
    "rationality": lambda r, p, N: verify_rationality(r, p, N, strict=False),
    "heisenberg": lambda p, N: verify_heis_identity(p, N, strict=False),
    "multiplicativity": lambda system, bound: verify_multiplicativity(system, bound, strict=False),
    "euler": lambda system, bound: verify_euler_product(system, bound, strict=False),
    "global": lambda bound: verify_global_identity(bound, strict=False),
    "recovery": lambda bound: verify_recovery(bound, strict=False),
}


class UsageError(ValueError):
    pass


def parse_key(system: CosetSystem, text: str):
    """GL keys are exponent lists ``0,1``; Heisenberg keys ``a11,a12,a21,a22[;c1,c2]``."""
    try:
        if system.tag == "heis":
            mat, _, vec = text.partition(";")
            entries = [int(t) for t in mat.split(",")]
            a = tuple(int(t) for t in vec.split(",")) if vec else (0, 0)
            if len(entries) != 4 or len(a) != 2:
                raise ValueError("expected 4 matrix entries and 2 translation entries")
            A = ((entries[0], entries[1]), (entries[2], entries[3]))
            return system.double_key(HeisElt(A, a))
        return system.key_from_json([int(t) for t in text.split(",")])
    except (ValueError, ArithmeticError) as exc:
        raise UsageError(f"cannot parse key {text!r} for {system.tag}: {exc}") from exc


def make_system(args) -> CosetSystem:
    if args.p is None:
        raise UsageError("--p is required")
    if args.system == "heis":
        return heis_system(args.p)
    return gl_system(args.r or 2, args.p)


def cmd_mul(args) -> tuple[int, dict]:
    S = make_system(args)
    x = HeckeElement.basis(S, parse_key(S, args.key1))
    y = HeckeElement.basis(S, parse_key(S, args.key2))
    return 0, docs.element_doc(x * y)


def cmd_series(args) -> tuple[int, dict]:
    S = make_system(args)
    if args.N is None or args.N < 0:
        raise UsageError("--N must be a nonnegative integer")
    return 0, docs.series_doc(hecke_series(S, args.N))


def cmd_double_cosets(args) -> tuple[int, dict]:
    S = make_system(args)
    if args.v is None or args.v < 0:
        raise UsageError("--v must be a nonnegative integer")
    rows = [{"key": docs.render_key(S, k), "degree": S.degree(k)} for k in S.all_doubles(args.v)]
    doc = {
        "schema": "heisenhecke.double-cosets/1",
        "engine": __version__,
        "system": docs.system_family(S),
        "p": S.p,
        "index_valuation": args.v,
        "double_cosets": rows,
        "left_cosets": sum(r["degree"] for r in rows),
    }
    return 0, doc


def jobs_for(args) -> list[tuple[str, dict]]:
    t = args.target
    if t == "all":
        return list(DEFAULT_JOBS)
    if t == "rationality":
        return [(t, {"r": args.r or 2, "p": args.p or 3, "N": args.N if args.N is not None else 5})]
    if t == "heisenberg":
        return [(t, {"p": args.p or 2, "N": args.N if args.N is not None else 6})]
    bound = args.bound or 100
    if t in ("multiplicativity", "euler"):
        systems = {"gl": [f"gl{args.r or 2}"], "heis": ["heis"], None: ["gl2", "heis"]}[args.system]
        return [(t, {"system": s, "bound": bound}) for s in systems]
    return [(t, {"bound": bound})]


def run_job(job: tuple[str, dict]) -> tuple[Report, float]:
    name, params = job
    start = time.perf_counter()
    report = RUNNERS[name](**params)
    return report, time.perf_counter() - start


def cmd_verify(args) -> tuple[int, dict]:
    jobs = jobs_for(args)
    workers = max(1, args.workers)
    if workers == 1:
        results = [run_job(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_job, jobs))
    entries = []
    for (name, params), (report, elapsed) in zip(jobs, results):
        labels = [c.label for c in report.checks]
        span = f"{labels[0]} .. {labels[-1]}" if labels else "(empty)"
        status = "PASS" if report.passed else "FAIL"
        print(f"{status}  {name:<16} {params}  {len(labels)} checks [{span}]  {elapsed:.2f}s", file=sys.stderr)
        entry = report.to_json(docs.render)
        entry["target"] = name
        entries.append(entry)
    passed = all(e["passed"] for e in entries)
    doc = {"schema": docs.REPORT_SCHEMA, "engine": __version__, "target": args.target, "passed": passed, "reports": entries}
    return (0 if passed else 1), doc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", choices=("gl", "heis"), default=None)
    common.add_argument("--r", type=int, default=None, help="rank for the GL system (default 2)")
    common.add_argument("--p", type=int, default=None, help="prime")
    common.add_argument("--N", type=int, default=None, help="truncation degree")
    common.add_argument("--bound", type=int, default=None, help="Dirichlet truncation bound")
    common.add_argument("--json", action="store_true", help="compact single-line JSON")
    common.add_argument("--cache-dir", default=None, help=f"structure-constant cache (env {ENV_VAR})")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the cache")
    common.add_argument("--no-uniformity-check", action="store_true", help="skip product well-definedness checks")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="heisenhecke", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mul", parents=[common], help="product of two double cosets")
    p.add_argument("key1")
    p.add_argument("key2")
    p.set_defaults(func=cmd_mul)

    p = sub.add_parser("series", parents=[common], help="local Hecke series coefficients")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("double-cosets", parents=[common], help="double cosets at one index valuation")
    p.add_argument("--v", type=int, default=None, help="index valuation")
    p.set_defaults(func=cmd_double_cosets)

    p = sub.add_parser("verify", parents=[common], help="verify identities")
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def configure(args) -> None:
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    CosetSystem.check_uniformity = not args.no_uniformity_check
    if args.no_cache:
        CosetSystem.store = None
    else:
        CosetSystem.store = StructureCache(args.cache_dir or default_cache_dir())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.system is None and args.command in ("mul", "series", "double-cosets"):
        args.system = "gl"
    try:
        configure(args)
        code, doc = args.func(args)
    except UsageError as exc:
        print(f"heisenhecke: error: {exc}", file=sys.stderr)
        return 2
    except IllDefinedProduct as exc:
        print(f"heisenhecke: internal invariant breach: {exc}", file=sys.stderr)
        return 3
    finally:
        if CosetSystem.store is not None:
            log.info("cache %s: %d hits, %d misses", CosetSystem.store.root, CosetSystem.store.hits, CosetSystem.store.misses)
        CosetSystem.store = None
        CosetSystem.check_uniformity = True
    print(docs.dumps(doc, compact=args.json))
    return code
