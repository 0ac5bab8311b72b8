"""Hecke rings of (GL_r(Z_p), M_r(Z_p) n GL_r(Q_p))."""

from __future__ import annotations

from functools import lru_cache

from . import linalg
from .core import CosetSystem, HeckeElement, TruncSeries, hecke_series, series_from, series_mul
from .linalg import Matrix
from .report import Report


class GLSystem(CosetSystem):
    """Double cosets labelled by ascending elementary-divisor exponents."""

    def __init__(self, r: int, p: int):
        if r < 1:
            raise ValueError("r must be positive")
        super().__init__()
        self.r = r
        self.p = p
        self.tag = f"gl{r}"
        self._cosets: dict[int, dict[tuple[int, ...], tuple[Matrix, ...]]] = {}

    def identity(self) -> Matrix:
        return linalg.identity(self.r)

    def mul(self, x: Matrix, y: Matrix) -> Matrix:
        return linalg.matmul(x, y)

    def canonical_left(self, x: Matrix) -> Matrix:
        return linalg.hnf_p(x, self.p)

    def index_valuation(self, x: Matrix) -> int:
        return linalg.det_valuation(x, self.p)

    def double_key(self, x: Matrix) -> tuple[int, ...]:
        return linalg.snf_exponents(x, self.p)

    def _level(self, v: int) -> dict[tuple[int, ...], tuple[Matrix, ...]]:
        level = self._cosets.get(v)
        if level is None:
            grouped: dict[tuple[int, ...], list[Matrix]] = {k: [] for k in self.all_doubles(v)}
            for H in linalg.enumerate_hnf(self.r, self.p, v):
                grouped[self.double_key(H)].append(H)
            level = {k: tuple(hs) for k, hs in grouped.items()}
            self._cosets[v] = level
        return level

    def left_cosets(self, key: tuple[int, ...]) -> tuple[Matrix, ...]:
        return self._level(sum(key))[tuple(key)]

    def all_doubles(self, v: int) -> list[tuple[int, ...]]:
        return linalg.partitions(v, self.r)

    def key_valuation(self, key: tuple[int, ...]) -> int:
        return sum(key)

    def sort_key(self, key: tuple[int, ...]) -> tuple:
        return (sum(key), tuple(reversed(key)))

    def key_to_json(self, key: tuple[int, ...]) -> list[int]:
        return list(key)

    def key_from_json(self, data) -> tuple[int, ...]:
        key = tuple(int(x) for x in data)
        if len(key) != self.r or list(key) != sorted(key) or min(key) < 0:
            raise ValueError(f"not an ascending exponent vector of length {self.r}: {data!r}")
        return key

    def representative(self, key: tuple[int, ...]) -> Matrix:
        return linalg.diag(*(self.p**e for e in key))

    def __repr__(self) -> str:
        return f"GLSystem(r={self.r}, p={self.p})"


@lru_cache(maxsize=None)
def gl_system(r: int, p: int) -> GLSystem:
    return GLSystem(r, p)


def elementary_key(r: int, i: int) -> tuple[int, ...]:
    if not 0 <= i <= r:
        raise ValueError(f"need 0 <= i <= {r}, got {i}")
    return (0,) * (r - i) + (1,) * i


def t_elementary(r: int, p: int, i: int) -> HeckeElement:
    """The generator GL_r diag(1,..,1,p,..,p) GL_r with ``i`` entries ``p``."""
    if not 1 <= i <= r:
        raise ValueError(f"need 1 <= i <= {r}, got {i}")
    return HeckeElement.basis(gl_system(r, p), elementary_key(r, i))


def f_poly(r: int, p: int, N: int) -> TruncSeries:
    if N < r:
        raise ValueError("N must be at least r")
    S = gl_system(r, p)
    coeffs = [HeckeElement.unit(S)]
    for i in range(1, r + 1):
        coeffs.append(t_elementary(r, p, i) * ((-1) ** i * p ** (i * (i - 1) // 2)))
    return series_from(S, coeffs, N)


def verify_rationality(r: int, p: int, N: int, strict: bool = True) -> Report:
    """Check ``f_{r,p}(X) P(X) = 1`` coefficientwise through ``X**N``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    S = gl_system(r, p)
    prod = series_mul(f_poly(r, p, max(N, r)), hecke_series(S, max(N, r)))
    report = Report("gl-rationality", {"r": r, "p": p, "N": N})
    unit = HeckeElement.unit(S)
    for k in range(N + 1):
        expected = unit if k == 0 else HeckeElement.zero(S)
        report.add(f"X^{k}", prod[k] == expected, prod[k])
    return report.finish(strict)
