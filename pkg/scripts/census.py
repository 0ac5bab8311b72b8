"""Double-coset census of the local Heisenberg Hecke ring.

For each prime and each level m (det A = p^m, index p^(2m)) print the number
of left cosets and the degrees of the double cosets they fall into.
"""

import json
import time

from heisenhecke.config import CensusConfig, parse_config
from heisenhecke.heisenberg import enumerate_left_cosets, heis_system


def census(cfg: CensusConfig) -> list[dict]:
    rows = []
    for p in cfg.primes:
        S = heis_system(p)
        for m in range(cfg.max_level + 1):
            start = time.perf_counter()
            keys = S.all_doubles(2 * m)
            degrees = sorted(S.degree(k) for k in keys)
            rows.append(
                {
                    "p": p,
                    "level": m,
                    "left_cosets": len(enumerate_left_cosets(p, m)),
                    "double_cosets": len(keys),
                    "degrees": degrees,
                    "seconds": round(time.perf_counter() - start, 3),
                }
            )
    return rows


def main(argv=None) -> None:
    cfg = parse_config(CensusConfig, argv, __doc__.splitlines()[0])
    rows = census(cfg)
    if cfg.json:
        print(json.dumps(rows, indent=2))
        return
    for r in rows:
        assert sum(r["degrees"]) == r["left_cosets"]
        print(
            f"p={r['p']} m={r['level']}: {r['left_cosets']} left cosets, "
            f"{r['double_cosets']} double cosets, degrees {r['degrees']}  ({r['seconds']}s)"
        )


if __name__ == "__main__":
    main()
