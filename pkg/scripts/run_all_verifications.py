"""Run every identity check over ranges wider than the acceptance suite.

Prints one line per report and optionally writes the full JSON document.
"""

from pathlib import Path

from heisenhecke import __version__, docs
from heisenhecke.cli import run_job
from heisenhecke.config import SweepConfig, parse_config


def jobs(cfg: SweepConfig) -> list[tuple[str, dict]]:
    out = [("rationality", {"r": 2, "p": p, "N": cfg.gl_degree}) for p in cfg.gl_primes]
    out += [("rationality", {"r": 3, "p": p, "N": 3}) for p in cfg.gl_primes[:2]]
    out += [("heisenberg", {"p": p, "N": cfg.heis_degree}) for p in cfg.heis_primes]
    for target in ("multiplicativity", "euler"):
        out += [(target, {"system": s, "bound": cfg.bound}) for s in ("gl2", "heis")]
    out += [("global", {"bound": cfg.bound}), ("recovery", {"bound": cfg.bound})]
    return out


def main(argv=None) -> int:
    cfg = parse_config(SweepConfig, argv, __doc__.splitlines()[0])
    todo = jobs(cfg)
    if cfg.workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(run_job, todo))
    else:
        results = [run_job(j) for j in todo]
    entries = []
    for (name, params), (report, elapsed) in zip(todo, results):
        status = "PASS" if report.passed else "FAIL"
        print(f"{status}  {name:<16} {params}  {len(report.checks)} checks  {elapsed:.2f}s")
        entries.append(dict(report.to_json(docs.render), target=name))
    passed = all(e["passed"] for e in entries)
    if cfg.output:
        doc = {"schema": docs.REPORT_SCHEMA, "engine": __version__, "passed": passed, "reports": entries}
        Path(cfg.output).write_text(docs.dumps(doc))
    return 0 if passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
