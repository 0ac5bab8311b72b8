"""Exact integer linear algebra at a fixed prime.

Matrices are tuples of row tuples of Python ints.  Everything that depends on
a matrix only through its left coset ``GL_r(Z_p) A`` (or double coset) is
determined modulo a power of ``p``, so plain integer arithmetic is lossless.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Iterator, Sequence

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


class DeterminantError(ValueError):
    """Raised when a matrix cannot belong to the monoid M_r(Z_p) n GL_r(Q_p)."""


def valuation(n: int, p: int) -> int:
    """Largest ``e`` with ``p**e`` dividing ``n``."""
    if n == 0:
        raise ValueError("undefined valuation of 0")
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(r: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))


def diag(*entries: int) -> Matrix:
    r = len(entries)
    return tuple(tuple(entries[i] if i == j else 0 for j in range(r)) for i in range(r))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    cols = tuple(zip(*B))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in A)


def vecmat(v: Sequence[int], A: Matrix) -> Vector:
    """Row vector times matrix."""
    return tuple(sum(v[i] * A[i][j] for i in range(len(v))) for j in range(len(A[0])))


def det(A: Matrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def det_valuation(A: Matrix, p: int) -> int:
    d = det(A)
    if d == 0:
        raise DeterminantError("matrix is singular; not in GL_r(Q_p)")
    return valuation(d, p)


def hnf_p(A: Matrix, p: int) -> Matrix:
    """Canonical representative of the left coset ``GL_r(Z_p) A``.

    The result is upper triangular with diagonal ``p**e_j`` and every entry
    above the diagonal in column ``j`` lying in ``[0, p**e_j)``.  Nonzero
    determinants with a ``p``-adic unit cofactor are accepted, since such
    matrices lie in the same monoid.
    """
    r = len(A)
    m = det_valuation(A, p)
    mod = p ** (m + 1)
    # p**m Z_p^r lies in the row lattice, so working mod p**(m+1) loses nothing
    M = [[x % mod for x in row] for row in A]
    exps = []
    for j in range(r):
        best, best_v = None, m + 1
        for i in range(j, r):
            if M[i][j]:
                v = valuation(M[i][j], p)
                if v < best_v:
                    best, best_v = i, v
        if best is None:
            raise AssertionError("pivot search failed; determinant bookkeeping is broken")
        M[j], M[best] = M[best], M[j]
        unit = M[j][j] // p**best_v
        inv = pow(unit, -1, mod)
        M[j] = [(x * inv) % mod for x in M[j]]
        pivot = p**best_v
        for i in range(j + 1, r):
            if M[i][j]:
                q = M[i][j] // pivot
                M[i] = [(x - q * y) % mod for x, y in zip(M[i], M[j])]
        exps.append(best_v)
    if sum(exps) != m:
        raise AssertionError("diagonal exponents do not add up to v_p(det)")
    for j in range(r):
        M[j][j] = p ** exps[j]
        for i in range(j + 1, r):
            M[i][j] = 0
    for j in range(1, r):
        d = M[j][j]
        for i in range(j):
            q = M[i][j] // d
            if q:
                M[i] = [x - q * y for x, y in zip(M[i], M[j])]
    return tuple(tuple(row) for row in M)


def hnf_exponents(H: Matrix, p: int) -> Vector:
    return tuple(valuation(H[j][j], p) for j in range(len(H)))


def snf_exponents(A: Matrix, p: int) -> Vector:
    """Ascending elementary-divisor exponents of ``A`` over ``Z_p``."""
    m = det_valuation(A, p)
    mod = p ** (m + 1)
    M = [[x % mod for x in row] for row in A]
    exps = []
    while M:
        n = len(M)
        best, best_v = None, m + 1
        for i in range(n):
            for j in range(n):
                if M[i][j]:
                    v = valuation(M[i][j], p)
                    if v < best_v:
                        best, best_v = (i, j), v
        if best is None:
            raise AssertionError("pivot search failed; determinant bookkeeping is broken")
        i0, j0 = best
        M[0], M[i0] = M[i0], M[0]
        for row in M:
            row[0], row[j0] = row[j0], row[0]
        unit = M[0][0] // p**best_v
        inv = pow(unit, -1, mod)
        M[0] = [(x * inv) % mod for x in M[0]]
        pivot = p**best_v
        rest = []
        for i in range(1, n):
            q = M[i][0] // pivot
            rest.append([(M[i][j] - q * M[0][j]) % mod for j in range(1, n)])
        # column clearing is implied: every remaining entry is divisible by the pivot
        exps.append(best_v)
        M = rest
    if sum(exps) != m:
        raise AssertionError("elementary divisor exponents do not add up to v_p(det)")
    return tuple(sorted(exps))


def lattice_reduce(H: Matrix, c: Sequence[int]) -> Vector:
    """Reduce ``c`` modulo the row lattice of the canonical form ``H``.

    Coordinate ``j`` is reduced by row ``j`` in increasing ``j``; rows of an
    upper-triangular ``H`` never disturb earlier coordinates.
    """
    c = list(c)
    for j, row in enumerate(H):
        q = c[j] // row[j]
        if q:
            c = [x - q * y for x, y in zip(c, row)]
    return tuple(c)


def compositions(total: int, parts: int) -> Iterator[Vector]:
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for tail in compositions(total - first, parts - 1):
            yield (first,) + tail


@lru_cache(maxsize=None)
def enumerate_hnf(r: int, p: int, k: int) -> tuple[Matrix, ...]:
    """Every canonical left-coset representative with determinant ``p**k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = []
    for exps in compositions(k, r):
        slots = [(i, j) for j in range(r) for i in range(j)]
        ranges = [range(p ** exps[j]) for (_, j) in slots]
        for values in itertools.product(*ranges):
            M = [[0] * r for _ in range(r)]
            for j in range(r):
                M[j][j] = p ** exps[j]
            for (i, j), x in zip(slots, values):
                M[i][j] = x
            out.append(tuple(tuple(row) for row in M))
    return tuple(out)


def partitions(total: int, parts: int) -> list[Vector]:
    """Ascending exponent vectors of length ``parts`` summing to ``total``."""
    out: list[Vector] = []

    def rec(prefix: list[int], remaining: int, slots: int, lo: int) -> None:
        if slots == 0:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for x in range(lo, remaining // slots + 1):
            rec(prefix + [x], remaining - x, slots - 1, x)

    rec([], total, parts, 0)
    return sorted(out, key=lambda e: tuple(reversed(e)))


def gaussian_binomial(r: int, i: int, p: int) -> int:
    if not 0 <= i <= r:
        raise ValueError("need 0 <= i <= r")
    num = den = 1
    for j in range(i):
        num *= p ** (r - j) - 1
        den *= p ** (j + 1) - 1
    return num // den


def elementary_generators(r: int, units: Sequence[int] = ()) -> list[Matrix]:
    """Transvections, a swap and unit scalings generating GL_r(Z_p) mod p**m."""
    gens = []
    for i in range(r):
        for j in range(r):
            if i != j:
                M = [list(row) for row in identity(r)]
                M[i][j] = 1
                gens.append(as_matrix(M))
    if r > 1:
        M = [list(row) for row in identity(r)]
        M[0], M[1] = M[1], M[0]
        gens.append(as_matrix(M))
    for u in units:
        for i in range(r):
            M = [list(row) for row in identity(r)]
            M[i][i] = u
            gens.append(as_matrix(M))
    return gens


def unit_generators(p: int) -> tuple[int, ...]:
    """Integers whose images generate ``(Z/p^m)^*`` for every ``m``."""
    if p == 2:
        return (-1, 5)
    for g in range(2, p * p):
        if g % p == 0:
            continue
        order = 1
        x = g % (p * p)
        while x != 1:
            x = (x * g) % (p * p)
            order += 1
        if order == p * (p - 1):
            return (g,)
    raise AssertionError(f"no primitive root found mod {p}^2")


def random_unimodular(r: int, rng: random.Random, steps: int = 12) -> Matrix:
    """Random product of elementary integer generators (det = +-1)."""
    M = identity(r)
    for _ in range(steps):
        i, j = rng.sample(range(r), 2) if r > 1 else (0, 0)
        kind = rng.randrange(3)
        E = [list(row) for row in identity(r)]
        if kind == 0 and r > 1:
            E[i][j] = rng.choice((-3, -2, -1, 1, 2, 3))
        elif kind == 1 and r > 1:
            E[i], E[j] = E[j], E[i]
        else:
            E[i][i] = -1
        M = matmul(as_matrix(E), M)
    return M
