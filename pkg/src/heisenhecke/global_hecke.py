"""Restricted-product global Hecke elements and truncated Dirichlet series.

A global double coset is a finitely supported map prime -> local double-coset
key, stored as a tuple of (p, key) pairs sorted by p with trivial components
dropped.  Components at distinct primes commute, so products are computed
prime by prime.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Hashable, Iterable, Mapping

from sympy import divisors, factorint, primerange

from . import linalg
from .core import CosetSystem, HeckeElement, t_index
from .gl import elementary_key, gl_system
from .heisenberg import HeisElt, heis_canonical_left, heis_system, phi_key, s_key, theta_key
from .report import Report

GlobalKey = tuple[tuple[int, Hashable], ...]
ThetaExps = tuple[tuple[int, int], ...]


def local_system(tag: str, p: int) -> CosetSystem:
    if tag == "heis":
        return heis_system(p)
    if tag.startswith("gl") and tag[2:].isdigit():
        return gl_system(int(tag[2:]), p)
    raise ValueError(f"unknown system tag {tag!r}")


def gl_tag(r: int) -> str:
    return f"gl{r}"


def _local_valuation(tag: str, p: int, key: Hashable) -> int:
    return local_system(tag, p).key_valuation(key)


def key_index(tag: str, key: GlobalKey) -> int:
    n = 1
    for p, k in key:
        n *= p ** _local_valuation(tag, p, k)
    return n


def global_sort_key(tag: str, key: GlobalKey) -> tuple:
    return (key_index(tag, key), tuple((p, local_system(tag, p).sort_key(k)) for p, k in key))


def make_key(tag: str, parts: Iterable[tuple[int, Hashable]]) -> GlobalKey:
    out = []
    for p, k in sorted(parts, key=lambda pk: pk[0]):
        if k != local_system(tag, p).unit_key:
            out.append((p, k))
    return tuple(out)


class GlobalElement:
    """Integer combination of global double cosets of one system."""

    __slots__ = ("tag", "terms")

    def __init__(self, tag: str, terms: Mapping[GlobalKey, int] | None = None):
        self.tag = tag
        self.terms: dict[GlobalKey, int] = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def unit(cls, tag: str) -> GlobalElement:
        return cls(tag, {(): 1})

    @classmethod
    def from_local(cls, x: HeckeElement) -> GlobalElement:
        """Image of R_{L_p} inside the restricted product."""
        tag = x.system.tag
        p = x.system.p
        return cls(tag, {make_key(tag, [(p, k)]): c for k, c in x.terms.items()})

    def _same(self, other: GlobalElement) -> None:
        if self.tag != other.tag:
            raise ValueError(f"tag mismatch: {self.tag} vs {other.tag}")

    def __add__(self, other: GlobalElement) -> GlobalElement:
        self._same(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return GlobalElement(self.tag, terms)

    def __neg__(self) -> GlobalElement:
        return GlobalElement(self.tag, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: GlobalElement) -> GlobalElement:
        return self + (-other)

    def __mul__(self, other: GlobalElement | int) -> GlobalElement:
        if isinstance(other, int):
            return GlobalElement(self.tag, {k: c * other for k, c in self.terms.items()})
        if not isinstance(other, GlobalElement):
            return NotImplemented
        self._same(other)
        out: dict[GlobalKey, int] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                for k, c in _key_product(self.tag, k1, k2).items():
                    out[k] = out.get(k, 0) + c1 * c2 * c
        return GlobalElement(self.tag, out)

    def __rmul__(self, other: int) -> GlobalElement:
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GlobalElement):
            return NotImplemented
        return self.tag == other.tag and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.tag, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def primes(self) -> set[int]:
        return {p for k in self.terms for p, _ in k}

    def items(self) -> list[tuple[GlobalKey, int]]:
        return sorted(self.terms.items(), key=lambda kv: global_sort_key(self.tag, kv[0]))

    def __repr__(self) -> str:
        if not self.terms:
            return f"<{self.tag}^: 0>"
        return f"<{self.tag}^: " + " + ".join(f"{c}*T{dict(k)!r}" for k, c in self.items()) + ">"


def _expand(tag: str, factors: list[list[tuple[int, Hashable, int]]]) -> dict[GlobalKey, int]:
    """Tensor out per-prime expansions [(p, key, coeff), ...] into global keys."""
    out: dict[GlobalKey, int] = {}
    for combo in itertools.product(*factors):
        coeff = 1
        for _, _, c in combo:
            coeff *= c
        key = make_key(tag, [(p, k) for p, k, _ in combo])
        out[key] = out.get(key, 0) + coeff
    return out


def _key_product(tag: str, k1: GlobalKey, k2: GlobalKey) -> dict[GlobalKey, int]:
    d1, d2 = dict(k1), dict(k2)
    factors = []
    for p in sorted(d1.keys() | d2.keys()):
        S = local_system(tag, p)
        unit = S.unit_key
        a, b = d1.get(p, unit), d2.get(p, unit)
        if a == unit:
            factors.append([(p, b, 1)])
        elif b == unit:
            factors.append([(p, a, 1)])
        else:
            factors.append([(p, k, c) for k, c in S.structure_constants(a, b).items()])
    return _expand(tag, factors)


# -- theta-decorated coefficients -------------------------------------------


def _add_exps(e1: ThetaExps, e2: ThetaExps) -> ThetaExps:
    d = dict(e1)
    for p, j in e2:
        d[p] = d.get(p, 0) + j
    return tuple(sorted((p, j) for p, j in d.items() if j))


class GlobalThetaElement:
    """Element of R^_{Z^2}[theta_p : p] acting on R^_H.

    Terms are keyed by (GL_2 global key, theta exponents); the theta part is
    only ever applied through the module action, never multiplied into a
    Heisenberg element.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[GlobalKey, ThetaExps], int] | None = None):
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def monomial(cls, a: GlobalElement, exps: Mapping[int, int] | None = None) -> GlobalThetaElement:
        if a.tag != "gl2":
            raise ValueError("theta coefficients must come from the GL_2 system")
        e = tuple(sorted((p, j) for p, j in (exps or {}).items() if j))
        return cls({(k, e): c for k, c in a.terms.items()})

    def __add__(self, other: GlobalThetaElement) -> GlobalThetaElement:
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return GlobalThetaElement(terms)

    def __mul__(self, other):
        if isinstance(other, GlobalThetaElement):
            out: dict[tuple[GlobalKey, ThetaExps], int] = {}
            for (k1, e1), c1 in self.terms.items():
                for (k2, e2), c2 in other.terms.items():
                    e = _add_exps(e1, e2)
                    for k, c in _key_product("gl2", k1, k2).items():
                        out[(k, e)] = out.get((k, e), 0) + c1 * c2 * c
            return GlobalThetaElement(out)
        if isinstance(other, GlobalElement):
            return act(self, other)
        if isinstance(other, int):
            return GlobalThetaElement({k: c * other for k, c in self.terms.items()})
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GlobalThetaElement) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        parts = [f"{c}*T{dict(k)!r}θ{dict(e)!r}" for (k, e), c in sorted(self.terms.items(), key=repr)]
        return "<θ: " + (" + ".join(parts) or "0") + ">"


# -- lifted morphisms ---------------------------------------------------------


def s_hat(x: GlobalElement) -> GlobalElement:
    if x.tag != "gl2":
        raise ValueError(f"s^ expects gl2, got {x.tag}")
    out: dict[GlobalKey, int] = {}
    for key, c in x.terms.items():
        k = make_key("heis", [(p, s_key(p, lk)) for p, lk in key])
        out[k] = out.get(k, 0) + c
    return GlobalElement("heis", out)


def phi_hat(x: GlobalElement) -> GlobalElement:
    if x.tag != "heis":
        raise ValueError(f"phi^ expects heis, got {x.tag}")
    out: dict[GlobalKey, int] = {}
    for key, c in x.terms.items():
        mult = 1
        parts = []
        for p, lk in key:
            gk, m = phi_key(p, lk)
            mult *= m
            parts.append((p, gk))
        k = make_key("gl2", parts)
        out[k] = out.get(k, 0) + c * mult
    return GlobalElement("gl2", out)


def theta_hat(x: GlobalElement, p: int, times: int = 1) -> GlobalElement:
    """theta_p applied at the p-component only."""
    if x.tag != "heis":
        raise ValueError(f"theta^ expects heis, got {x.tag}")
    unit = heis_system(p).unit_key
    for _ in range(times):
        out: dict[GlobalKey, int] = {}
        for key, c in x.terms.items():
            d = dict(key)
            local = d.get(p, unit)
            for target, mult in theta_key(p, local):
                d2 = dict(d)
                d2[p] = target
                k = make_key("heis", d2.items())
                out[k] = out.get(k, 0) + c * mult
        x = GlobalElement("heis", out)
    return x


def psi_hat(q: GlobalThetaElement) -> GlobalElement:
    """Specialise every theta_p to 1."""
    out: dict[GlobalKey, int] = {}
    for (k, _), c in q.terms.items():
        out[k] = out.get(k, 0) + c
    return GlobalElement("gl2", out)


def act(q: GlobalThetaElement, m: GlobalElement) -> GlobalElement:
    """Module action: (a * prod theta_p^j_p) . m = s^(a) (prod theta_p^j_p)(m)."""
    if m.tag != "heis":
        raise ValueError("theta elements act on Heisenberg elements only")
    out = GlobalElement("heis")
    by_exps: dict[ThetaExps, dict[GlobalKey, int]] = {}
    for (k, e), c in q.terms.items():
        by_exps.setdefault(e, {})[k] = c
    for e in sorted(by_exps):
        moved = m
        for p, j in e:
            moved = theta_hat(moved, p, j)
        out = out + s_hat(GlobalElement("gl2", by_exps[e])) * moved
    return out


# -- global T(n) by enumeration over Z ------------------------------------------


def _ordered_factorizations(n: int, parts: int) -> Iterable[tuple[int, ...]]:
    if parts == 1:
        yield (n,)
        return
    for d in map(int, divisors(n)):
        for rest in _ordered_factorizations(n // d, parts - 1):
            yield (d,) + rest


def integer_hnfs(r: int, n: int) -> Iterable[linalg.Matrix]:
    """Upper-triangular integer HNFs of determinant n (left GL_r(Z) cosets)."""
    for diagonal in _ordered_factorizations(n, r):
        slots = [(i, j) for j in range(r) for i in range(j)]
        for values in itertools.product(*(range(diagonal[j]) for _, j in slots)):
            M = [[0] * r for _ in range(r)]
            for j in range(r):
                M[j][j] = diagonal[j]
            for (i, j), x in zip(slots, values):
                M[i][j] = x
            yield tuple(tuple(row) for row in M)


@lru_cache(maxsize=None)
def global_t(tag: str, n: int) -> GlobalElement:
    """Sum of all global double cosets of index n.

    Computed from the global left cosets over Z: each one is localised at
    every prime dividing n and labelled by its local double-coset keys.
    """
    if n < 1:
        raise ValueError("n must be positive")
    primes = sorted(int(p) for p in factorint(n))
    keys: set[GlobalKey] = set()
    if tag == "heis":
        d = math.isqrt(n)
        if d * d != n:
            return GlobalElement(tag)
        for H in integer_hnfs(2, d):
            for c0 in range(H[0][0]):
                for c1 in range(H[1][1]):
                    x = HeisElt(H, (c0, c1))
                    keys.add(
                        make_key(tag, [(p, heis_system(p).double_key(heis_canonical_left(x, p))) for p in primes])
                    )
    else:
        r = int(tag[2:])
        for H in integer_hnfs(r, n):
            keys.add(make_key(tag, [(p, linalg.snf_exponents(H, p)) for p in primes]))
    return GlobalElement(tag, {k: 1 for k in keys})


# -- truncated Dirichlet series -------------------------------------------------


@dataclass
class DirichletTrunc:
    """Coefficients n -> element for 1 <= n <= bound; zero entries omitted."""

    bound: int
    coeffs: dict[int, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.bound < 1:
            raise ValueError("bound must be positive")
        bad = [n for n in self.coeffs if not 1 <= n <= self.bound]
        if bad:
            raise ValueError(f"coefficients outside [1, {self.bound}]: {bad}")
        self.coeffs = {n: c for n, c in sorted(self.coeffs.items()) if c}

    def __getitem__(self, n: int):
        return self.coeffs.get(n)

    def __mul__(self, other: DirichletTrunc) -> DirichletTrunc:
        return dirichlet_mul(self, other)

    def support(self) -> list[int]:
        return sorted(self.coeffs)


def dirichlet_mul(a: DirichletTrunc, b: DirichletTrunc) -> DirichletTrunc:
    """c(n) = sum_{d | n} a(d) b(n/d); a's coefficients go on the left."""
    if a.bound != b.bound:
        raise ValueError(f"bound mismatch: {a.bound} vs {b.bound}")
    out: dict[int, Any] = {}
    for d, x in a.coeffs.items():
        for e, y in b.coeffs.items():
            n = d * e
            if n > a.bound:
                continue
            z = x * y
            out[n] = out[n] + z if n in out else z
    return DirichletTrunc(a.bound, out)


def dirichlet_trunc(tag: str, bound: int) -> DirichletTrunc:
    return DirichletTrunc(bound, {n: global_t(tag, n) for n in range(1, bound + 1)})


def local_series_at(tag: str, p: int, bound: int) -> DirichletTrunc:
    """P_{L_p}(p^{-s}) truncated at ``bound``."""
    S = local_system(tag, p)
    coeffs = {}
    k = 0
    while p**k <= bound:
        coeffs[p**k] = GlobalElement.from_local(t_index(S, k))
        k += 1
    return DirichletTrunc(bound, coeffs)


def euler_product(tag: str, bound: int) -> DirichletTrunc:
    """prod_{p <= bound} P_{L_p}(p^{-s}) as a truncated Dirichlet series."""
    out = DirichletTrunc(bound, {1: GlobalElement.unit(tag)})
    for p in primerange(2, bound + 1):
        out = dirichlet_mul(out, local_series_at(tag, int(p), bound))
    return out


def I_r_trunc(r: int, bound: int) -> DirichletTrunc:
    """prod_p f_{r,p}(p^{-s}) truncated at ``bound``."""
    tag = gl_tag(r)
    out = DirichletTrunc(bound, {1: GlobalElement.unit(tag)})
    for p in map(int, primerange(2, bound + 1)):
        G = gl_system(r, p)
        factor = {1: GlobalElement.unit(tag)}
        for i in range(1, r + 1):
            if p**i > bound:
                break
            coeff = (-1) ** i * p ** (i * (i - 1) // 2)
            factor[p**i] = GlobalElement.from_local(HeckeElement.basis(G, elementary_key(r, i))) * coeff
        out = dirichlet_mul(out, DirichletTrunc(bound, factor))
    return out


def I2_theta_trunc(bound: int) -> DirichletTrunc:
    """prod_{p^2 <= bound} g_{2,p}(theta_p; p^{1-2s}) with symbolic thetas."""
    unit = GlobalElement.unit("gl2")
    out = DirichletTrunc(bound, {1: GlobalThetaElement.monomial(unit)})
    for p in map(int, primerange(2, math.isqrt(bound) + 1)):
        G = gl_system(2, p)
        t1 = GlobalElement.from_local(HeckeElement.basis(G, (0, 1)))
        t2 = GlobalElement.from_local(HeckeElement.basis(G, (1, 1)))
        factor = {1: GlobalThetaElement.monomial(unit, {p: 2}), p**2: GlobalThetaElement.monomial(t1 * -p, {p: 1})}
        if p**4 <= bound:
            factor[p**4] = GlobalThetaElement.monomial(t2 * p**3)
        out = dirichlet_mul(out, DirichletTrunc(bound, factor))
    return out


def reindex_square(series: DirichletTrunc, bound: int) -> DirichletTrunc:
    """Substitute s -> 2s - 1: coefficient c at n becomes n*c at n**2."""
    out = {}
    for n, c in series.coeffs.items():
        if n * n <= bound:
            out[n * n] = c * n
    return DirichletTrunc(bound, out)


def map_series(series: DirichletTrunc, fn: Callable[[Any], Any]) -> DirichletTrunc:
    return DirichletTrunc(series.bound, {n: fn(c) for n, c in series.coeffs.items()})


# -- verifications ------------------------------------------------------------------


def _check_delta(report: Report, series: DirichletTrunc, unit: Any, prefix: str = "n=") -> None:
    for n in range(1, series.bound + 1):
        got = series[n]
        ok = got == unit if n == 1 else got is None
        report.add(f"{prefix}{n}", ok, got)


def verify_multiplicativity(tag: str, bound: int, strict: bool = True) -> Report:
    report = Report("multiplicativity", {"system": tag, "bound": bound})
    for m in range(2, bound + 1):
        for n in range(m + 1, bound // m + 1):
            if math.gcd(m, n) != 1:
                continue
            lhs = global_t(tag, m * n)
            rhs = global_t(tag, m) * global_t(tag, n)
            report.add(f"T({m * n}) = T({m})T({n})", lhs == rhs, [lhs, rhs])
    return report.finish(strict)


def verify_euler_product(tag: str, bound: int, strict: bool = True) -> Report:
    report = Report("euler-product", {"system": tag, "bound": bound})
    direct = dirichlet_trunc(tag, bound)
    product = euler_product(tag, bound)
    for n in range(1, bound + 1):
        a, b = direct[n], product[n]
        report.add(f"n={n}", a == b, [a, b])
    return report.finish(strict)


def verify_global_rationality(r: int, bound: int, strict: bool = True) -> Report:
    tag = gl_tag(r)
    report = Report("gl-global-rationality", {"r": r, "bound": bound})
    _check_delta(report, dirichlet_mul(I_r_trunc(r, bound), dirichlet_trunc(tag, bound)), GlobalElement.unit(tag))
    return report.finish(strict)


def verify_global_identity(bound: int, strict: bool = True) -> Report:
    report = Report("heisenberg-global", {"bound": bound})
    prod = dirichlet_mul(I2_theta_trunc(bound), dirichlet_trunc("heis", bound))
    _check_delta(report, prod, GlobalElement.unit("heis"))
    return report.finish(strict)


def verify_recovery(bound: int, strict: bool = True) -> Report:
    report = Report("recovery", {"bound": bound})
    root = math.isqrt(bound)
    psi_image = map_series(I2_theta_trunc(bound), psi_hat)
    phi_image = map_series(dirichlet_trunc("heis", bound), phi_hat)
    expected_psi = reindex_square(I_r_trunc(2, root), bound)
    expected_phi = reindex_square(dirichlet_trunc("gl2", root), bound)
    for n in range(1, bound + 1):
        ok = psi_image[n] == expected_psi[n]
        report.add(f"psi n={n}", ok, [psi_image[n], expected_psi[n]])
    for n in range(1, bound + 1):
        ok = phi_image[n] == expected_phi[n]
        report.add(f"phi n={n}", ok, [phi_image[n], expected_phi[n]])
    _check_delta(report, dirichlet_mul(psi_image, phi_image), GlobalElement.unit("gl2"), "product n=")
    return report.finish(strict)
