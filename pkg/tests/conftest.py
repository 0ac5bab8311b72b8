import random
from fractions import Fraction

import pytest

from heisenhecke import linalg

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_monoid_matrix(rng: random.Random, p: int, r: int = 2, max_k: int = 3) -> linalg.Matrix:
    """U * H * V with H a random canonical form and U, V unimodular."""
    k = rng.randrange(max_k + 1)
    H = rng.choice(linalg.enumerate_hnf(r, p, k))
    return linalg.matmul(linalg.matmul(linalg.random_unimodular(r, rng), H), linalg.random_unimodular(r, rng))


def inverse(A):
    (a, b), (c, d) = A
    det = a * d - b * c
    return ((Fraction(d, det), Fraction(-b, det)), (Fraction(-c, det), Fraction(a, det)))


def in_gl_zp(M, p):
    """M has p-integral entries and a p-adic unit determinant."""
    if any(Fraction(x).denominator % p == 0 for row in M for x in row):
        return False
    d = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    return Fraction(d).numerator % p != 0


def brute_force_square(p):
    """T(1,p)^2 by counting pairs (i, j) with alpha_i beta_j in Gamma gamma."""
    cosets = [((1, b), (0, p)) for b in range(p)] + [((p, 0), (0, 1))]
    out = {}
    for gamma, key in ((linalg.diag(1, p * p), (0, 2)), (linalg.diag(p, p), (1, 1))):
        g_inv = inverse(gamma)
        count = 0
        for a in cosets:
            for b in cosets:
                if in_gl_zp(linalg.matmul(linalg.matmul(a, b), g_inv), p):
                    count += 1
        out[key] = count
    return out
