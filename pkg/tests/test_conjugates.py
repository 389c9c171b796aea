from math import gcd

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heegner6.conjugates import (
    Mat2Q,
    c_coeff,
    c_coeff_closed,
    cusps_X,
    matrix_M,
    matrix_R,
    matrix_S,
    norm_U,
    order_of_U,
    order_of_U_brute,
    randj_holds,
    randj_prediction,
)
from heegner6.eisenstein import EisensteinInt, norm

NS = [5, 7, 11, 13, 25, 41]


@st.composite
def unit_mod_6n(draw):
    n = draw(st.sampled_from(NS))
    a = draw(st.integers(-300, 300))
    b = draw(st.integers(-300, 300))
    x = EisensteinInt(a, b)
    if gcd(norm(x), 6 * n) != 1:
        x = EisensteinInt(1, 6 * n)
    return x, n


@settings(max_examples=200)
@given(unit_mod_6n())
def test_S_matrix_invariants(xn):
    x, n = xn
    S, M = matrix_S(x, n), matrix_M(x, n)
    assert S.det() == 1
    assert S.scale(n).is_integral()
    R = M @ S.inverse()
    assert R.is_integral() and R.congruent(Mat2Q.identity(), 6)
    assert matrix_R(x, n).scale(1).is_integral()


@settings(max_examples=200)
@given(st.sampled_from(NS), st.integers(-300, 300), st.integers(-50, 50))
def test_randj_on_Z_n_omega(n, a, c):
    x = EisensteinInt(a, c * n)
    if gcd(norm(x), 6 * n) != 1:
        return
    assert randj_holds(x, n)
    assert len(randj_prediction(x, n)) == 4


def test_S_rejects_non_units():
    with pytest.raises(ValueError):
        matrix_S(EisensteinInt(2, 0), 5)


@settings(max_examples=60)
@given(st.sampled_from([5, 7, 25, 35]), st.integers(0, 300), st.integers(0, 300))
def test_c_closed_form(n, a, b):
    if gcd(a, b) != 1:
        return
    for d in [d for d in range(1, n + 1) if n % d == 0]:
        assert c_coeff(a, b, d, n) == c_coeff_closed(a, b, d, n)


@pytest.mark.parametrize("n", [5, 7])
def test_order_of_U_closed_form(n):
    for a, b in list(cusps_X(6 * n))[:40]:
        assert order_of_U(a, b, n) == order_of_U_brute(a, b, n)


def test_norm_value_n5():
    r = norm_U(5, 256)
    with mp.workprec(256):
        assert abs(2 * r.log_abs - mp.mpf("21.0276333505")) < 1e-9


def test_norm_independent_of_workers():
    a, b = norm_U(7, 192), norm_U(7, 192, workers=2)
    with mp.workprec(192):
        assert abs(a.log_abs - b.log_abs) < mp.mpf(2) ** -150
