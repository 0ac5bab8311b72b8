"""Search for noncommuting pairs of double cosets in the local Heisenberg Hecke ring."""

from heisenhecke.config import ProbeConfig, parse_config
from heisenhecke.core import HeckeElement
from heisenhecke.heisenberg import heis_system, noncommutativity_probe


def main(argv=None) -> None:
    cfg = parse_config(ProbeConfig, argv, __doc__)
    for p in cfg.primes:
        S = heis_system(p)
        pairs = noncommutativity_probe(p, cfg.max_valuation)
        print(f"p={p}, index valuation <= {cfg.max_valuation}: {len(pairs)} noncommuting pairs")
        for k1, k2 in pairs:
            print(f"  {k1!r}  x  {k2!r}")
            if cfg.show_products:
                x, y = HeckeElement.basis(S, k1), HeckeElement.basis(S, k2)
                print(f"    xy = {x * y!r}")
                print(f"    yx = {y * x!r}")


if __name__ == "__main__":
    main()
