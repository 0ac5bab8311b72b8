"""Hecke ring of the Heisenberg Lie algebra over Z_p.

With basis x, y, z and [x, y] = z, an endomorphism is a pair (A, a):
x -> A11 x + A21 y + a1 z, y -> A12 x + A22 y + a2 z, z -> det(A) z.
Composition gives (A, a)(B, b) = (AB, aB + det(A) b).  The automorphism
group Gamma consists of the pairs with A in GL_2(Z_p).

Left multiplication by (U, u) sends (A, a) to (UA, uA + det(U) a), so the
left coset of (A, a) is determined by H = hnf(A) and the class of
det(H)/det(A) * a modulo the row lattice of H.
"""

from __future__ import annotations

import threading
from collections import Counter, deque
from functools import lru_cache
from typing import NamedTuple

from . import linalg
from .core import (
    CosetSystem,
    HeckeElement,
    IllDefinedProduct,
    TruncSeries,
    hecke_series,
)
from .gl import gl_system
from .linalg import Matrix, Vector
from .report import Report


class HeisElt(NamedTuple):
    A: Matrix
    a: Vector

    def __repr__(self) -> str:
        return f"({[list(r) for r in self.A]}, {list(self.a)})"


def heis_mul(x: HeisElt, y: HeisElt) -> HeisElt:
    d = linalg.det(x.A)
    aB = linalg.vecmat(x.a, y.A)
    return HeisElt(linalg.matmul(x.A, y.A), tuple(s + d * t for s, t in zip(aB, y.a)))


def heis_identity() -> HeisElt:
    return HeisElt(linalg.identity(2), (0, 0))


def heis_canonical_left(x: HeisElt, p: int) -> HeisElt:
    H = linalg.hnf_p(x.A, p)
    d = linalg.det(x.A)
    m = linalg.valuation(d, p)
    mod = p**m
    # det(U0) = det(H)/det(A) is the inverse of the unit part of det(A)
    scale = pow(d // mod, -1, mod) if mod > 1 else 0
    c = tuple((t * scale) % mod if mod > 1 else 0 for t in x.a)
    return HeisElt(H, linalg.lattice_reduce(H, c))


@lru_cache(maxsize=None)
def _right_generators(p: int) -> tuple[HeisElt, ...]:
    gens = [HeisElt(g, (0, 0)) for g in linalg.elementary_generators(2, linalg.unit_generators(p))]
    gens += [HeisElt(linalg.identity(2), (1, 0)), HeisElt(linalg.identity(2), (0, 1))]
    return tuple(gens)


def heis_sort_key(x: HeisElt) -> tuple:
    """Total order on canonical forms: index, diagonal, off-diagonal, translation.

    Canonical diagonals are powers of p, so comparing the entries compares
    the exponents.
    """
    A = x.A
    return (A[0][0] * A[1][1], A[0][0], A[1][1], A[0][1], tuple(x.a))


def heis_double_orbit(x: HeisElt, p: int) -> tuple[HeisElt, ...]:
    """Left cosets inside Gamma x Gamma, by BFS under right multiplication."""
    start = heis_canonical_left(x, p)
    seen = {start}
    frontier = deque([start])
    gens = _right_generators(p)
    while frontier:
        cur = frontier.popleft()
        for g in gens:
            nxt = heis_canonical_left(heis_mul(cur, g), p)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return tuple(sorted(seen, key=heis_sort_key))


def enumerate_left_cosets(p: int, m: int) -> list[HeisElt]:
    """All canonical left cosets with det A = p**m (index p**(2m))."""
    out = []
    for H in linalg.enumerate_hnf(2, p, m):
        for c0 in range(H[0][0]):
            for c1 in range(H[1][1]):
                out.append(HeisElt(H, (c0, c1)))
    return out


class HeisSystem(CosetSystem):
    """Double cosets keyed by their minimal canonical left coset."""

    def __init__(self, p: int):
        super().__init__()
        self.p = p
        self.tag = "heis"
        self._keys: dict[HeisElt, HeisElt] = {}
        self._orbits: dict[int, dict[HeisElt, tuple[HeisElt, ...]]] = {}
        self._level_lock = threading.RLock()

    def identity(self) -> HeisElt:
        return heis_identity()

    def mul(self, x: HeisElt, y: HeisElt) -> HeisElt:
        return heis_mul(x, y)

    def canonical_left(self, x: HeisElt) -> HeisElt:
        return heis_canonical_left(x, self.p)

    def index_valuation(self, x: HeisElt) -> int:
        return 2 * linalg.det_valuation(x.A, self.p)

    def level(self, m: int) -> dict[HeisElt, tuple[HeisElt, ...]]:
        """Orbit partition of all left cosets with det A = p**m."""
        orbits = self._orbits.get(m)
        if orbits is not None:
            return orbits
        with self._level_lock:
            if m in self._orbits:
                return self._orbits[m]
            keys: dict[HeisElt, HeisElt] = {}
            found = {}
            for coset in enumerate_left_cosets(self.p, m):
                if coset in keys:
                    continue
                orbit = heis_double_orbit(coset, self.p)
                for member in orbit:
                    if member in keys:
                        raise AssertionError("double-coset orbits overlap")
                    keys[member] = orbit[0]
                found[orbit[0]] = orbit
            self._keys.update(keys)
            self._orbits[m] = dict(sorted(found.items(), key=lambda kv: heis_sort_key(kv[0])))
            return self._orbits[m]

    def double_key(self, x: HeisElt) -> HeisElt:
        key = self._keys.get(x)
        if key is None:
            x = self.canonical_left(x)
            self.level(linalg.det_valuation(x.A, self.p))
            key = self._keys[x]
        return key

    def left_cosets(self, key: HeisElt) -> tuple[HeisElt, ...]:
        return self.level(linalg.det_valuation(key.A, self.p))[key]

    def all_doubles(self, v: int) -> list[HeisElt]:
        if v % 2:
            return []
        return list(self.level(v // 2))

    def key_valuation(self, key: HeisElt) -> int:
        return 2 * linalg.det_valuation(key.A, self.p)

    def sort_key(self, key: HeisElt) -> tuple:
        return heis_sort_key(key)

    def key_to_json(self, key: HeisElt) -> dict:
        return {"A": [list(r) for r in key.A], "a": list(key.a)}

    def key_from_json(self, data) -> HeisElt:
        A = linalg.as_matrix(data["A"])
        a = tuple(int(t) for t in data["a"])
        if len(A) != 2 or any(len(r) != 2 for r in A) or len(a) != 2:
            raise ValueError(f"not a Heisenberg element: {data!r}")
        return self.double_key(HeisElt(A, a))

    def __repr__(self) -> str:
        return f"HeisSystem(p={self.p})"


@lru_cache(maxsize=None)
def heis_system(p: int) -> HeisSystem:
    return HeisSystem(p)


def t2(p: int, k: int) -> HeckeElement:
    """Sum of double cosets whose matrix part has determinant p**k."""
    S = heis_system(p)
    keys = [key for key in S.level(k) if linalg.det_valuation(key.A, p) == k]
    return HeckeElement(S, {key: 1 for key in keys})


# -- morphisms ---------------------------------------------------------------


def s_key(p: int, key: tuple[int, ...]) -> HeisElt:
    S = heis_system(p)
    rep = HeisElt(gl_system(2, p).representative(key), (0, 0))
    return S.double_key(rep)


def s_map(x: HeckeElement) -> HeckeElement:
    """R(GL_2) -> R(H): Gamma' A Gamma' -> Gamma (A, 0) Gamma."""
    G = x.system
    S = heis_system(G.p)
    out: dict[HeisElt, int] = {}
    for key, c in x.terms.items():
        image = s_key(G.p, key)
        if S.degree(image) != G.degree(key):
            raise IllDefinedProduct("s is not degree preserving")
        out[image] = out.get(image, 0) + c
    return HeckeElement(S, out)


@lru_cache(maxsize=None)
def phi_key(p: int, key: HeisElt) -> tuple[tuple[int, ...], int]:
    """Image of one double coset under phi as (GL key, multiplicity)."""
    S = heis_system(p)
    G = gl_system(2, p)
    fibers = Counter(coset.A for coset in S.left_cosets(key))
    gl_key = G.double_key(key.A)
    sizes = set(fibers.values())
    if set(fibers) != set(G.left_cosets(gl_key)) or len(sizes) != 1:
        raise IllDefinedProduct(f"phi ill-defined on {key!r}: fibers {sorted(sizes)}")
    return gl_key, sizes.pop()


def phi_map(x: HeckeElement) -> HeckeElement:
    """R(H) -> R(GL_2), induced by (A, a) -> A on left cosets."""
    p = x.system.p
    G = gl_system(2, p)
    out: dict[tuple[int, ...], int] = {}
    for key, c in x.terms.items():
        gl_key, mult = phi_key(p, key)
        out[gl_key] = out.get(gl_key, 0) + c * mult
    return HeckeElement(G, out)


@lru_cache(maxsize=None)
def theta_key(p: int, key: HeisElt) -> tuple[tuple[HeisElt, int], ...]:
    """Image of one double coset under theta, as ((key, coeff), ...).

    theta pushes each left coset Gamma (A, a) forward to Gamma (A, p a); the
    image of a double coset is the resulting multiset of left cosets, which
    is a multiple of a single double coset.
    """
    S = heis_system(p)
    tally = Counter(S.canonical_left(HeisElt(c.A, tuple(p * t for t in c.a))) for c in S.left_cosets(key))
    out: dict[HeisElt, int] = {}
    for target in {S.double_key(c) for c in tally}:
        counts = [tally.get(c, 0) for c in S.left_cosets(target)]
        if len(set(counts)) != 1 or counts[0] == 0:
            raise IllDefinedProduct(f"theta ill-defined on {key!r}")
        out[target] = counts[0]
    return tuple(sorted(out.items(), key=lambda kv: heis_sort_key(kv[0])))


def theta_map(x: HeckeElement, times: int = 1) -> HeckeElement:
    p = x.system.p
    for _ in range(times):
        out: dict[HeisElt, int] = {}
        for key, c in x.terms.items():
            for target, mult in theta_key(p, key):
                out[target] = out.get(target, 0) + c * mult
        x = HeckeElement(x.system, out)
    return x


class ThetaPoly:
    """Polynomial in theta with coefficients in R(GL_2); acts on R(H)."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: dict[int, HeckeElement] | None = None):
        self.p = p
        self.coeffs = {j: a for j, a in (coeffs or {}).items() if a}

    @classmethod
    def monomial(cls, a: HeckeElement, j: int = 0) -> ThetaPoly:
        return cls(a.system.p, {j: a})

    def __add__(self, other: ThetaPoly) -> ThetaPoly:
        out = dict(self.coeffs)
        for j, a in other.coeffs.items():
            out[j] = out[j] + a if j in out else a
        return ThetaPoly(self.p, out)

    def __mul__(self, other: ThetaPoly) -> ThetaPoly:
        out: dict[int, HeckeElement] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                out[i + j] = out[i + j] + a * b if i + j in out else a * b
        return ThetaPoly(self.p, out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ThetaPoly) and self.p == other.p and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return " + ".join(f"({a!r})θ^{j}" for j, a in sorted(self.coeffs.items())) or "0"


def module_action(q: ThetaPoly, m: HeckeElement) -> HeckeElement:
    """(sum_j a_j theta^j) . m = sum_j s(a_j) theta^j(m)."""
    S = m.system
    out = HeckeElement.zero(S)
    for j, a in sorted(q.coeffs.items()):
        out = out + s_map(a) * theta_map(m, j)
    return out


def g_coefficients(p: int) -> dict[int, ThetaPoly]:
    """Coefficients of g_{2,p}(theta; p X^2) keyed by the power of X."""
    G = gl_system(2, p)
    t1 = HeckeElement.basis(G, (0, 1))
    t2_ = HeckeElement.basis(G, (1, 1))
    return {
        0: ThetaPoly.monomial(HeckeElement.unit(G), 2),
        2: ThetaPoly.monomial(t1 * (-p), 1),
        4: ThetaPoly.monomial(t2_ * p**3, 0),
    }


def verify_heis_identity(p: int, N: int, strict: bool = True) -> Report:
    """Check g_{2,p}(theta; p X^2) P_H(X) = 1 through X**N."""
    if N < 0 or N % 2:
        raise ValueError("N must be even and nonnegative")
    S = heis_system(p)
    P = hecke_series(S, N)
    g = g_coefficients(p)
    unit = HeckeElement.unit(S)
    report = Report("heisenberg-local", {"p": p, "N": N})
    for k in range(N + 1):
        acc = HeckeElement.zero(S)
        for i, q in g.items():
            if i <= k and P[k - i]:
                acc = acc + module_action(q, P[k - i])
        expected = unit if k == 0 else HeckeElement.zero(S)
        report.add(f"X^{k}", acc == expected, acc)
    return report.finish(strict)


def t2_series(p: int, N: int) -> TruncSeries:
    """D_{2,2}(X^2) built from t2, to compare with hecke_series(heis, N)."""
    from .core import series_from

    S = heis_system(p)
    coeffs = [t2(p, k // 2) if k % 2 == 0 else HeckeElement.zero(S) for k in range(N + 1)]
    return series_from(S, coeffs, N)


def noncommutativity_probe(p: int, max_valuation: int) -> list[tuple[HeisElt, HeisElt]]:
    """Pairs of double cosets (v1 + v2 <= max_valuation) that do not commute."""
    S = heis_system(p)
    keys = [k for v in range(2, max_valuation + 1, 2) for k in S.all_doubles(v)]
    found = []
    for i, k1 in enumerate(keys):
        for k2 in keys[i + 1 :]:
            if S.key_valuation(k1) + S.key_valuation(k2) > max_valuation:
                continue
            x, y = HeckeElement.basis(S, k1), HeckeElement.basis(S, k2)
            if x * y != y * x:
                found.append((k1, k2))
    return found
