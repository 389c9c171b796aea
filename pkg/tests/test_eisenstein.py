from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import isprime

from heegner6.eisenstein import (
    EisensteinInt,
    admissibility_reason,
    chi_exponent,
    cubic_residue_symbol,
    enumerate_conjugates,
    f_of_n,
    galois_representatives,
    mod2_class,
    mod3_class,
    norm,
    primary_associate,
    root_of_unity,
    split_prime,
)

ints = st.integers(-60, 60)
eis = st.builds(EisensteinInt, ints, ints)


@given(eis, eis)
def test_norm_is_multiplicative(x, y):
    assert norm(x * y) == norm(x) * norm(y)


@given(eis)
def test_conjugate_gives_norm(x):
    p = x * x.conj()
    assert p == EisensteinInt(norm(x), 0)


@given(eis, eis, eis)
def test_ring_laws(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


def test_omega_is_a_cube_root_of_unity():
    w = EisensteinInt(0, 1)
    assert w ** 3 == EisensteinInt(1, 0)
    assert w * w + w + 1 == EisensteinInt(0, 0)


def _primary_primes(limit):
    out = []
    for p in range(5, limit):
        if not isprime(p):
            continue
        if p % 3 == 1:
            pi = split_prime(p)
            out += [primary_associate(pi), primary_associate(pi.conj())]
        else:
            out.append(primary_associate(EisensteinInt(p, 0)))
    return out


PRIMARY = _primary_primes(60)


@settings(max_examples=60)
@given(st.sampled_from(PRIMARY), st.sampled_from(PRIMARY))
def test_cubic_reciprocity(p, q):
    if norm(p) == norm(q):
        return
    assert cubic_residue_symbol(p, q) == cubic_residue_symbol(q, p)


@settings(max_examples=60)
@given(eis, eis, st.sampled_from(PRIMARY))
def test_symbol_is_multiplicative(x, y, lam):
    if lam.divides(x) or lam.divides(y) or x.is_zero() or y.is_zero():
        return
    prod = cubic_residue_symbol(x, lam) * cubic_residue_symbol(y, lam)
    assert cubic_residue_symbol(x * y, lam) == prod


def test_symbol_of_cube_is_one():
    lam = split_prime(7)
    for x in (EisensteinInt(2, 0), EisensteinInt(2, 1), EisensteinInt(5, 1)):
        assert cubic_residue_symbol(x * x * x, lam) == root_of_unity(0)


@pytest.mark.parametrize("n,reason", [(17, "-1 (mod 9)"), (19, "+1 (mod 9)"), (10, "coprime to 6"),
                                      (15, "coprime to 6"), (875, "divisible by 3"), (1, ">= 2")])
def test_admissibility_rejections(n, reason):
    r = admissibility_reason(n)
    assert r is not None and reason in r


@pytest.mark.parametrize("n", [5, 7, 11, 13, 23, 25, 29, 31, 41, 43, 47, 49])
def test_admissible(n):
    assert admissibility_reason(n) is None


def test_f_of_n_values():
    assert f_of_n(5) == 6
    assert f_of_n(7) == 6
    assert f_of_n(25) == 30
    assert f_of_n(35) == 36


@pytest.mark.parametrize("n", [5, 7, 11, 13, 25, 41])
def test_conjugate_set_sizes(n):
    cs = enumerate_conjugates(n)
    fn = f_of_n(n)
    assert all(len(A) == fn for A in cs.A)
    assert all(3 * len(B) == fn for B in cs.B)
    reps = galois_representatives(n)
    assert 3 * len(reps) == fn
    for x in reps:
        assert x.a % 6 == 1 and x.b % 6 == 0
        assert gcd(norm(x), n) == 1


@pytest.mark.parametrize("n", [5, 7, 13, 41])
def test_character_is_trivial_on_B(n):
    for B in enumerate_conjugates(n).B:
        for x in B:
            assert chi_exponent(x, n) == 0


@given(eis)
def test_mod_classes(x):
    i = mod2_class(x)
    if i is not None:
        assert (x - root_of_unity(i)).a % 2 == 0 and (x - root_of_unity(i)).b % 2 == 0
    j = mod3_class(x)
    if j is not None:
        assert x.congruent(root_of_unity(j), 3)
