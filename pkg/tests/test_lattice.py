import random
from itertools import combinations, product
from math import gcd

import mpmath as mp
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix

from heegner6.lattice import HNFBasis, fincke_pohst, hnf, lll

vec3 = st.lists(st.integers(-20, 20), min_size=3, max_size=3)


@settings(max_examples=60)
@given(st.lists(vec3, min_size=3, max_size=6))
def test_hnf_determinant_matches_gcd_of_minors(rows):
    H = HNFBasis(3)
    for r in rows:
        H.add(r)
    M = Matrix(rows)
    if M.rank() < 3:
        assert not H.full_rank()
        return

    g = 0
    for idx in combinations(range(len(rows)), 3):
        g = gcd(g, int(M.extract(list(idx), [0, 1, 2]).det()))
    assert H.det() == g
    for r in rows:
        assert H.contains(r)


@settings(max_examples=40)
@given(st.lists(vec3, min_size=3, max_size=5), vec3)
def test_hnf_reduce_vector_is_canonical(rows, v):
    H = HNFBasis(3)
    for r in rows:
        H.add(r)
    if not H.full_rank():
        return
    w = [a + 3 * b for a, b in zip(v, H.matrix()[0])]
    assert H.reduce_vector(v) == H.reduce_vector(w)


def test_hnf_shape():
    rows = hnf([[2, 4, 6], [0, 3, 9], [1, 1, 1]], 3)
    for i, r in enumerate(rows):
        assert all(c == 0 for c in r[:i]) and r[i] > 0
        for j in range(i + 1, 3):
            assert 0 <= r[j] < rows[j][j] or rows[j][j] == 0


def test_lll_transform_is_unimodular_and_shortens():
    rng = random.Random(5)
    with mp.workprec(100):
        basis = [[mp.mpf(rng.randint(-1000, 1000)) for _ in range(3)] for _ in range(3)]
        red, T = lll(basis)
        assert abs(Matrix(T).det()) == 1
        for i in range(3):
            for j in range(3):
                assert abs(red[i][j] - sum(T[i][k] * basis[k][j] for k in range(3))) < 1e-20
        norm = lambda v: mp.sqrt(sum(x * x for x in v))
        assert norm(red[0]) <= min(norm(b) for b in basis) + 1e-20


def test_fincke_pohst_against_brute_force():
    with mp.workprec(80):
        basis = [[mp.mpf(3), mp.mpf(1), 0], [mp.mpf(1), mp.mpf(4), mp.mpf(1)], [0, mp.mpf(2), mp.mpf(5)]]
        bound = 40
        got = set(fincke_pohst(basis, bound))
        want = set()
        for x in product(range(-8, 9), repeat=3):
            if not any(x):
                continue
            v = [sum(x[i] * basis[i][j] for i in range(3)) for j in range(3)]
            if sum(c * c for c in v) <= bound and next(c for c in x if c) > 0:
                want.add(x)
        assert got == want
