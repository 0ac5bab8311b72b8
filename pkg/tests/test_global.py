import math
import random

import pytest
from sympy import divisor_count, divisor_sigma

from heisenhecke import linalg
from heisenhecke.core import HeckeElement, VerificationError
from heisenhecke.gl import gl_system
from heisenhecke.global_hecke import (
    DirichletTrunc,
    GlobalElement,
    GlobalThetaElement,
    I2_theta_trunc,
    I_r_trunc,
    act,
    dirichlet_mul,
    dirichlet_trunc,
    euler_product,
    global_t,
    integer_hnfs,
    key_index,
    local_system,
    make_key,
    phi_hat,
    psi_hat,
    reindex_square,
    s_hat,
    theta_hat,
    verify_euler_product,
    verify_global_identity,
    verify_global_rationality,
    verify_multiplicativity,
    verify_recovery,
)
from heisenhecke.heisenberg import HeisElt

BOUND = 100


def total_degree(x: GlobalElement) -> int:
    total = 0
    for key, c in x.terms.items():
        d = c
        for p, k in key:
            d *= local_system(x.tag, p).degree(k)
        total += d
    return total


def test_global_t_examples():
    assert global_t("gl2", 1) == GlobalElement.unit("gl2")
    assert global_t("heis", 1) == GlobalElement.unit("heis")
    assert global_t("gl2", 6).terms == {((2, (0, 1)), (3, (0, 1))): 1}
    assert global_t("gl2", 4).terms == {((2, (0, 2)),): 1, ((2, (1, 1)),): 1}
    assert not global_t("heis", 12)
    assert set(global_t("heis", 4).terms) == {
        ((2, HeisElt(linalg.diag(1, 2), (0, 0))),),
        ((2, HeisElt(linalg.diag(1, 2), (0, 1))),),
    }
    with pytest.raises(ValueError):
        global_t("gl2", 0)


@pytest.mark.parametrize("n", range(1, 61))
def test_gl2_sublattice_count(n):
    assert total_degree(global_t("gl2", n)) == divisor_sigma(n)
    assert all(key_index("gl2", k) == n for k in global_t("gl2", n).terms)


@pytest.mark.parametrize("n", range(1, BOUND + 1))
def test_heis_support_is_squares(n):
    x = global_t("heis", n)
    d = math.isqrt(n)
    if d * d == n:
        assert total_degree(x) == d * divisor_sigma(d)
    else:
        assert not x


def test_integer_hnfs_counts():
    for n in range(1, 30):
        assert len(list(integer_hnfs(2, n))) == divisor_sigma(n)
    assert len(list(integer_hnfs(3, 4))) == 35


def test_make_key_drops_units():
    assert make_key("gl2", [(3, (0, 1)), (2, (0, 0))]) == ((3, (0, 1)),)


def test_mixed_tags_rejected():
    with pytest.raises(ValueError):
        GlobalElement.unit("gl2") + GlobalElement.unit("heis")
    with pytest.raises(ValueError):
        local_system("sl2", 2)


def test_dirichlet_unit_and_bounds():
    D = dirichlet_trunc("gl2", 30)
    one = DirichletTrunc(30, {1: GlobalElement.unit("gl2")})
    assert dirichlet_mul(one, D) == D
    assert dirichlet_mul(D, one) == D
    with pytest.raises(ValueError):
        dirichlet_mul(D, DirichletTrunc(31, {}))
    with pytest.raises(ValueError):
        DirichletTrunc(5, {6: 1})


def test_dirichlet_mul_integers():
    ones = DirichletTrunc(12, {n: 1 for n in range(1, 13)})
    tau = dirichlet_mul(ones, ones)
    assert [tau[n] for n in range(1, 13)] == [divisor_count(n) for n in range(1, 13)]


def test_reindex_square():
    s = DirichletTrunc(10, {1: 1, 2: 5, 3: 7, 4: 2})
    assert reindex_square(s, 10).coeffs == {1: 1, 4: 10, 9: 21}


@pytest.mark.parametrize("tag", ["gl2", "heis"])
def test_multiplicativity(tag):
    assert verify_multiplicativity(tag, BOUND).passed


@pytest.mark.parametrize("tag", ["gl2", "heis"])
def test_euler_product(tag):
    assert verify_euler_product(tag, BOUND).passed


def test_euler_product_small_values():
    E = euler_product("gl2", 12)
    assert E[12] == global_t("gl2", 12)
    assert E[1] == GlobalElement.unit("gl2")


def test_phi_s_identity():
    for n in range(1, 37):
        x = global_t("gl2", n)
        assert phi_hat(s_hat(x)) == x


def test_lift_rejects_wrong_system():
    with pytest.raises(ValueError):
        s_hat(global_t("heis", 4))
    with pytest.raises(ValueError):
        phi_hat(global_t("gl2", 4))
    with pytest.raises(ValueError):
        theta_hat(global_t("gl2", 4), 2)


def test_thetas_at_distinct_primes_commute():
    M = global_t("heis", 36)
    assert theta_hat(theta_hat(M, 2), 3) == theta_hat(theta_hat(M, 3), 2)


def random_theta(rng):
    n = rng.choice([1, 2, 3, 4, 5, 6])
    base = global_t("gl2", n)
    exps = {p: rng.randrange(3) for p in rng.sample([2, 3, 5], rng.randrange(3))}
    return GlobalThetaElement.monomial(base, exps)


def test_phi_intertwines_action():
    rng = random.Random(7)
    for _ in range(20):
        q = random_theta(rng)
        M = global_t("heis", rng.choice([1, 4, 9, 16, 25, 36]))
        assert phi_hat(act(q, M)) == psi_hat(q) * phi_hat(M)


def test_psi_multiplicative():
    rng = random.Random(11)
    for _ in range(20):
        q1, q2 = random_theta(rng), random_theta(rng)
        assert psi_hat(q1 * q2) == psi_hat(q1) * psi_hat(q2)


def test_cross_prime_components_commute():
    rng = random.Random(3)
    for _ in range(50):
        a = global_t("heis", rng.choice([4, 16]))
        b = global_t("heis", rng.choice([9, 25, 49]))
        assert a * b == b * a
        c = global_t("gl2", rng.choice([2, 4, 8]))
        d = global_t("gl2", rng.choice([3, 9, 5]))
        assert c * d == d * c


def test_I2_coefficients():
    I2 = I_r_trunc(2, 30)
    t1 = lambda p: GlobalElement.from_local(HeckeElement.basis(gl_system(2, p), (0, 1)))
    t2 = lambda p: GlobalElement.from_local(HeckeElement.basis(gl_system(2, p), (1, 1)))
    assert I2[1] == GlobalElement.unit("gl2")
    assert I2[2] == t1(2) * -1
    assert I2[4] == t2(2) * 2
    assert I2[6] == t1(2) * t1(3)
    assert I2[8] is None
    assert I2[12] == t2(2) * t1(3) * -2


def test_I2_theta_coefficients():
    Q = I2_theta_trunc(16)
    unit = GlobalElement.unit("gl2")
    t1 = GlobalElement.from_local(HeckeElement.basis(gl_system(2, 2), (0, 1)))
    assert Q[1] == GlobalThetaElement.monomial(unit, {2: 2, 3: 2})
    assert Q[4] == GlobalThetaElement.monomial(t1 * -2, {2: 1, 3: 2})
    assert Q[2] is None


def test_global_rationality():
    assert verify_global_rationality(2, BOUND).passed
    assert verify_global_rationality(3, 30).passed


def test_global_identity():
    report = verify_global_identity(BOUND)
    assert report.passed and len(report.checks) == BOUND


def test_recovery():
    assert verify_recovery(BOUND).passed


def test_global_identity_detects_wrong_series(monkeypatch):
    import heisenhecke.global_hecke as gh

    real = gh.dirichlet_trunc

    def shifted(tag, bound):
        D = real(tag, bound)
        coeffs = dict(D.coeffs)
        coeffs[4] = coeffs[4] + coeffs[4]
        return DirichletTrunc(bound, coeffs)

    monkeypatch.setattr(gh, "dirichlet_trunc", shifted)
    with pytest.raises(VerificationError, match="n=4"):
        gh.verify_global_identity(16)
