"""Dataclass configs for the experiment scripts, parsed from the command line."""

import argparse
import dataclasses
import typing
from dataclasses import dataclass


@dataclass(frozen=True)
class CensusConfig:
    primes: tuple[int, ...] = (2, 3, 5)
    max_level: int = 3
    json: bool = False


@dataclass(frozen=True)
class ProbeConfig:
    primes: tuple[int, ...] = (2, 3)
    max_valuation: int = 6
    show_products: bool = False


@dataclass(frozen=True)
class SweepConfig:
    gl_primes: tuple[int, ...] = (2, 3, 5, 7)
    gl_degree: int = 6
    heis_primes: tuple[int, ...] = (2, 3)
    heis_degree: int = 6
    bound: int = 200
    workers: int = 1
    output: str = ""


def parse_config(cls, argv=None, description=None):
    """Build ``cls`` from ``--field value`` flags, defaulting to the dataclass defaults."""
    hints = typing.get_type_hints(cls)
    parser = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        kind = hints[f.name]
        if kind is bool:
            parser.add_argument(flag, action="store_true", default=f.default)
        elif typing.get_origin(kind) is tuple:
            parser.add_argument(flag, type=int, nargs="+", default=f.default)
        else:
            parser.add_argument(flag, type=kind, default=f.default)
    args = vars(parser.parse_args(argv))
    return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in args.items()})
