"""Generic Hecke-ring engine over an abstract coset system.

A double coset is handled through its list of canonical left-coset
representatives; products are computed by tallying canonical forms of all
pairwise products of left-coset representatives.
"""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Mapping, Sequence

Key = Hashable


class IllDefinedProduct(RuntimeError):
    """The left-coset tally of a product was not uniform on a double coset."""


class VerificationError(AssertionError):
    """An identity under verification failed; carries the failing report."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class CosetSystem(ABC):
    """A pair (Gamma, Delta) presented through canonical left cosets.

    Subclasses supply the monoid law and the coset combinatorics; the base
    class provides degrees and memoized structure constants.
    """

    p: int
    tag: str
    check_uniformity: bool = True
    store: Any = None

    def __init__(self) -> None:
        self._struct: dict[tuple[Key, Key], dict[Key, int]] = {}
        self._lock = threading.Lock()

    @abstractmethod
    def identity(self) -> Any: ...

    @abstractmethod
    def mul(self, x: Any, y: Any) -> Any: ...

    @abstractmethod
    def canonical_left(self, x: Any) -> Any: ...

    @abstractmethod
    def index_valuation(self, x: Any) -> int: ...

    @abstractmethod
    def double_key(self, x: Any) -> Key: ...

    @abstractmethod
    def left_cosets(self, key: Key) -> Sequence[Any]: ...

    @abstractmethod
    def all_doubles(self, v: int) -> list[Key]: ...

    @abstractmethod
    def key_valuation(self, key: Key) -> int: ...

    @abstractmethod
    def sort_key(self, key: Key) -> tuple: ...

    @abstractmethod
    def key_to_json(self, key: Key) -> Any: ...

    @abstractmethod
    def key_from_json(self, data: Any) -> Key: ...

    @property
    def unit_key(self) -> Key:
        return self.double_key(self.canonical_left(self.identity()))

    def degree(self, key: Key) -> int:
        return len(self.left_cosets(key))

    def structure_constants(self, k1: Key, k2: Key) -> dict[Key, int]:
        """Expansion of ``T(k1) T(k2)`` as ``{key: coefficient}``."""
        memo = self._struct.get((k1, k2))
        if memo is not None:
            return memo
        if self.store is not None:
            cached = self.store.load(self, k1, k2)
            if cached is not None:
                with self._lock:
                    self._struct[(k1, k2)] = cached
                return cached
        result = self._tally(k1, k2)
        with self._lock:
            self._struct[(k1, k2)] = result
        if self.store is not None:
            self.store.save(self, k1, k2, result)
        return result

    def _tally(self, k1: Key, k2: Key) -> dict[Key, int]:
        tally: Counter = Counter()
        right = self.left_cosets(k2)
        for a in self.left_cosets(k1):
            for b in right:
                tally[self.canonical_left(self.mul(a, b))] += 1
        by_key: dict[Key, list] = {}
        for coset, count in tally.items():
            by_key.setdefault(self.double_key(coset), []).append(count)
        out = {}
        for key in sorted(by_key, key=self.sort_key):
            counts = by_key[key]
            if self.check_uniformity:
                if len(counts) != self.degree(key) or len(set(counts)) != 1:
                    raise IllDefinedProduct(
                        f"ill-defined product: {k1!r} * {k2!r} tallies {sorted(counts)} "
                        f"on the {self.degree(key)} left cosets of {key!r}"
                    )
            out[key] = tally[self.left_cosets(key)[0]]
        total = sum(c * self.degree(k) for k, c in out.items())
        if total != self.degree(k1) * self.degree(k2):
            raise IllDefinedProduct("tally conservation failed")
        return out


class HeckeElement:
    """Finitely supported integer combination of double cosets of one system."""

    __slots__ = ("system", "terms")

    def __init__(self, system: CosetSystem, terms: Mapping[Key, int] | None = None):
        self.system = system
        self.terms: dict[Key, int] = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def unit(cls, system: CosetSystem) -> HeckeElement:
        return cls(system, {system.unit_key: 1})

    @classmethod
    def basis(cls, system: CosetSystem, key: Key, coeff: int = 1) -> HeckeElement:
        return cls(system, {key: coeff})

    @classmethod
    def zero(cls, system: CosetSystem) -> HeckeElement:
        return cls(system)

    def _same(self, other: HeckeElement) -> None:
        if other.system is not self.system:
            raise ValueError(f"mixed systems: {self.system.tag} vs {other.system.tag}")

    def __add__(self, other: HeckeElement) -> HeckeElement:
        self._same(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return HeckeElement(self.system, terms)

    def __neg__(self) -> HeckeElement:
        return HeckeElement(self.system, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: HeckeElement) -> HeckeElement:
        return self + (-other)

    def __mul__(self, other: HeckeElement | int) -> HeckeElement:
        if isinstance(other, int):
            return HeckeElement(self.system, {k: c * other for k, c in self.terms.items()})
        return hecke_mul(self.system, self, other)

    def __rmul__(self, other: int) -> HeckeElement:
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeckeElement):
            return NotImplemented
        return self.system is other.system and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.system.tag, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> list[tuple[Key, int]]:
        """Terms in the canonical key order."""
        return sorted(self.terms.items(), key=lambda kv: self.system.sort_key(kv[0]))

    def total_degree(self) -> int:
        return sum(c * self.system.degree(k) for k, c in self.terms.items())

    def __repr__(self) -> str:
        if not self.terms:
            return f"<{self.system.tag}: 0>"
        body = " + ".join(f"{c}*T{k!r}" for k, c in self.items())
        return f"<{self.system.tag}: {body}>"


def hecke_mul(system: CosetSystem, x: HeckeElement, y: HeckeElement) -> HeckeElement:
    x._same(y)
    out: dict[Key, int] = {}
    for k1, c1 in x.terms.items():
        for k2, c2 in y.terms.items():
            for k, c in system.structure_constants(k1, k2).items():
                out[k] = out.get(k, 0) + c1 * c2 * c
    return HeckeElement(system, out)


def degree(system: CosetSystem, key: Key) -> int:
    return system.degree(key)


def t_index(system: CosetSystem, k: int) -> HeckeElement:
    """Sum of all double cosets whose index is ``p**k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return HeckeElement(system, {key: 1 for key in system.all_doubles(k)})


@dataclass(frozen=True)
class TruncSeries:
    """Power series with Hecke coefficients, truncated after degree ``N``."""

    system: CosetSystem
    coeffs: tuple[HeckeElement, ...]

    def __post_init__(self) -> None:
        for c in self.coeffs:
            if c.system is not self.system:
                raise ValueError("series coefficient from another system")

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> HeckeElement:
        return self.coeffs[k]

    def __mul__(self, other: TruncSeries) -> TruncSeries:
        return series_mul(self, other)

    def is_one(self) -> bool:
        unit = HeckeElement.unit(self.system)
        return self.coeffs[0] == unit and not any(self.coeffs[1:])


def hecke_series(system: CosetSystem, N: int) -> TruncSeries:
    if N < 0:
        raise ValueError("N must be nonnegative")
    return TruncSeries(system, tuple(t_index(system, k) for k in range(N + 1)))


def series_from(system: CosetSystem, coeffs: Iterable[HeckeElement], N: int) -> TruncSeries:
    """Pad or truncate ``coeffs`` to a series of degree ``N``."""
    coeffs = list(coeffs)[: N + 1]
    coeffs += [HeckeElement.zero(system)] * (N + 1 - len(coeffs))
    return TruncSeries(system, tuple(coeffs))


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Cauchy product keeping ``a`` on the left."""
    if a.system is not b.system:
        raise ValueError("cannot multiply series over different systems")
    if a.N != b.N:
        raise ValueError(f"truncation mismatch: {a.N} vs {b.N}")
    out = []
    for k in range(a.N + 1):
        acc = HeckeElement.zero(a.system)
        for i in range(k + 1):
            if a[i] and b[k - i]:
                acc = acc + a[i] * b[k - i]
        out.append(acc)
    return TruncSeries(a.system, tuple(out))
