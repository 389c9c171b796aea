import random
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heegner6 import curves as cv

G5 = cv.ProjPoint(Fraction(-1), Fraction(2), Fraction(1), cv.E(5))
small = st.integers(-6, 6)


def test_generator_on_curve_and_erratum_point_is_not():
    assert cv.E(5).contains(G5)
    # (1, 2) does not satisfy y^2 = x^3 + 5
    assert not cv.E(5).contains(cv.ProjPoint(Fraction(1), Fraction(2), Fraction(1), cv.E(5)))


@settings(max_examples=40)
@given(small, small, small)
def test_group_law_exact(i, j, k):
    P, Q, R = cv.mul(i, G5), cv.mul(j, G5), cv.mul(k, G5)
    assert cv.add(cv.add(P, Q), R).equals(cv.add(P, cv.add(Q, R)))
    assert cv.add(P, Q).equals(cv.mul(i + j, G5))
    assert cv.add(P, cv.neg(P)).is_identity()


def test_multiples_stay_on_curve():
    for k in range(1, 8):
        P = cv.mul(k, G5)
        assert cv.E(5).contains(P)
    assert cv.mul(3, G5).normalized().x == Fraction(6319, 3249)


def _rand_point(D, rng, prec):
    x = mp.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
    return cv.ProjPoint(x, mp.sqrt(x ** 3 + D), mp.mpf(1), cv.E(D))


@pytest.mark.parametrize("N", [1, 5, 25])
def test_phi_round_trip_and_homomorphism(N):
    rng = random.Random(N)
    with mp.workprec(128):
        P = _rand_point(-27 * N * N, rng, 128)
        Q = _rand_point(-27 * N * N, rng, 128)
        T = cv.phi_N(P, N)
        assert T.curve == cv.Etilde(2 * N) and T.curve.contains(T)
        back = cv.phi_N_inverse(T, N)
        assert cv.close(back.x, P.x) and cv.close(back.y, P.y)
        lhs = cv.phi_N(cv.add(P, Q), N)
        rhs = cv.add(cv.phi_N(P, N), cv.phi_N(Q, N))
        assert cv.close(lhs.x, rhs.x) and cv.close(lhs.y, rhs.y)


def test_tilde_exact_point():
    P = cv.ProjPoint(Fraction(1), Fraction(1), Fraction(1), cv.Etilde(2))
    assert cv.Etilde(2).contains(P)
    assert cv.Etilde(2).contains(cv.add(P, P))


@pytest.mark.parametrize("n", [5, 7])
def test_descent_maps_and_lambda(n):
    rng = random.Random(n)
    with mp.workprec(128):
        x = mp.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
        P = cv.ProjPoint(x, mp.cbrt(2 - x ** 3), mp.mpf(1), cv.Etilde(2))
        C = cv.g_map(P, n) if n % 9 == 5 else cv.h_map(P, n)
        assert C.curve.contains(C)
        L = cv.lambda_AB(C)
        assert L.curve == cv.Etilde(2 * n * n) and L.curve.contains(L)


def test_sextic_twist_target_check():
    with mp.workprec(128):
        P = _rand_point(1, random.Random(0), 128)
        Q = cv.sextic_twist(P, -mp.mpc(0, mp.sqrt(3)), target_D=-27)
        assert Q.curve == cv.E(-27) and Q.curve.contains(Q)
        with pytest.raises(ValueError):
            cv.sextic_twist(P, mp.mpf(2), target_D=-27)


def test_curve_mismatch():
    with pytest.raises(cv.CurveMismatch):
        cv.add(G5, cv.ProjPoint(Fraction(0), Fraction(1), Fraction(0), cv.E(7)))
