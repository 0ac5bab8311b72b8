import pytest

from heisenhecke import linalg
from heisenhecke.core import HeckeElement, hecke_series, t_index
from heisenhecke.gl import f_poly, gl_system, t_elementary, verify_rationality
from heisenhecke.core import VerificationError

PRIMES = [2, 3, 5]


def test_gl_system_basics():
    S = gl_system(2, 3)
    assert S.index_valuation(linalg.diag(1, 3)) == 1
    assert len(S.left_cosets((0, 1))) == 4
    assert set(S.all_doubles(2)) == {(0, 2), (1, 1)}
    assert S.unit_key == (0, 0)
    assert gl_system(2, 3) is S


@pytest.mark.parametrize("r,p", [(2, 2), (2, 3), (3, 2)])
def test_all_doubles_match_enumeration(r, p):
    S = gl_system(r, p)
    for v in range(4):
        seen = {linalg.snf_exponents(H, p) for H in linalg.enumerate_hnf(r, p, v)}
        assert seen == set(S.all_doubles(v))


def test_t_elementary_keys():
    assert t_elementary(2, 5, 1).terms == {(0, 1): 1}
    assert t_elementary(2, 5, 2).terms == {(1, 1): 1}
    assert t_elementary(3, 2, 2).terms == {(0, 1, 1): 1}
    with pytest.raises(ValueError):
        t_elementary(2, 3, 3)
    with pytest.raises(ValueError):
        t_elementary(2, 3, 0)


@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("p", PRIMES)
def test_degree_is_gaussian_binomial(r, p):
    S = gl_system(r, p)
    for i in range(1, r + 1):
        (key,) = t_elementary(r, p, i).terms
        assert S.degree(key) == linalg.gaussian_binomial(r, i, p)


def test_f_poly_coefficients():
    f = f_poly(2, 3, 4)
    S = gl_system(2, 3)
    assert f[0] == HeckeElement.unit(S)
    assert f[1].terms == {(0, 1): -1}
    assert f[2].terms == {(1, 1): 3}
    assert not f[3] and not f[4]
    g = f_poly(3, 2, 3)
    assert g[2].terms == {(0, 1, 1): 2}
    assert g[3].terms == {(1, 1, 1): -8}
    with pytest.raises(ValueError):
        f_poly(3, 2, 2)


@pytest.mark.parametrize("r,p,N", [(2, 2, 5), (2, 3, 5), (2, 5, 4), (3, 2, 3), (1, 3, 4), (2, 7, 3), (3, 3, 2)])
def test_rationality(r, p, N):
    report = verify_rationality(r, p, N)
    assert report.passed and len(report.checks) == N + 1


def test_rationality_failure_names_coefficient(monkeypatch):
    import heisenhecke.gl as gl

    real = gl.f_poly

    def wrong(r, p, N):
        f = real(r, p, N)
        coeffs = list(f.coeffs)
        coeffs[2] = coeffs[2] * 2
        return type(f)(f.system, tuple(coeffs))

    monkeypatch.setattr(gl, "f_poly", wrong)
    with pytest.raises(VerificationError, match="X\\^2"):
        gl.verify_rationality(2, 3, 4)


@pytest.mark.parametrize("p", PRIMES)
def test_recursion_form(p):
    S = gl_system(2, p)
    P = hecke_series(S, 6)
    t1, t2 = t_elementary(2, p, 1), t_elementary(2, p, 2)
    for k in range(2, 7):
        assert P[k] == t1 * P[k - 1] - (t2 * p) * P[k - 2]


@pytest.mark.parametrize("p", [2, 3])
def test_central_scaling(p):
    S = gl_system(2, p)
    t2 = t_elementary(2, p, 2)
    for v in range(5):
        for key in S.all_doubles(v):
            shifted = HeckeElement.basis(S, tuple(e + 1 for e in key))
            assert t2 * HeckeElement.basis(S, key) == shifted


@pytest.mark.parametrize("r,p", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_commutativity(r, p):
    S = gl_system(r, p)
    keys = [k for v in range(1, 4) for k in S.all_doubles(v)]
    for a in keys:
        for b in keys:
            if sum(a) + sum(b) <= 3:
                x, y = HeckeElement.basis(S, a), HeckeElement.basis(S, b)
                assert x * y == y * x


def test_series_generated_by_generators():
    """Every T(p^k) is a polynomial in the generators (r = 2): checked via rationality above;
    here the coefficient at k=1 is T(1,p) alone."""
    assert t_index(gl_system(2, 5), 1) == t_elementary(2, 5, 1)
