from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heegner6.modular import (
    PrecisionError,
    QuadPoint,
    division_value,
    eval_f_pm,
    eval_XY,
    phi_at_cusp,
    reduce_to_fundamental_domain,
)
from heegner6.qseries import X_series, Y_series

P = 160
taus = st.builds(lambda x, y: mp.mpc(x, y), st.floats(-3, 3), st.floats(0.25, 2.5))


def _close(a, b, bits=P - 40):
    return abs(a - b) <= mp.mpf(2) ** (-bits) * max(1, abs(a), abs(b))


@settings(max_examples=15, deadline=None)
@given(taus)
def test_curve_equation(tau):
    with mp.workprec(P):
        X, Y = eval_XY(tau, P)
        assert _close(Y * Y, X ** 3 + 1)


@settings(max_examples=8, deadline=None)
@given(taus)
def test_gamma6_invariance(tau):
    # (7, 6; 36, 31) is congruent to the identity mod 6
    with mp.workprec(P):
        X0, Y0 = eval_XY(tau, P)
        X1, Y1 = eval_XY(tau + 6, P)
        X2, Y2 = eval_XY((7 * tau + 6) / (36 * tau + 31), P)
        assert _close(X0, X1) and _close(Y0, Y1)
        assert _close(X0, X2) and _close(Y0, Y2)


def _series_value(s, q):
    w = mp.expjpi(mp.mpf(2) / 3)
    total = mp.mpc(0)
    for e in range(s.val, s.precision):
        c = s.coefficient(e)
        total += (mp.mpf(c.a.numerator) / c.a.denominator + w * mp.mpf(c.b.numerator) / c.b.denominator) * q ** e
    return total


@pytest.mark.parametrize("tau", [mp.mpc(0.1, 2.0), mp.mpc(-0.4, 1.5)])
def test_evaluator_matches_q_series(tau):
    with mp.workprec(P):
        X, Y = eval_XY(tau, P)
        q = mp.exp(2j * mp.pi * tau / 6)
        trunc = abs(q) ** 50
        rel = mp.mpf(2) ** (-(P - 40))
        assert abs(_series_value(X_series(60), q) - X) < trunc + rel * abs(X)
        assert abs(_series_value(Y_series(60), q) - Y) < trunc + rel * abs(Y)


@settings(max_examples=10, deadline=None)
@given(taus)
def test_two_torsion_values_sum_to_zero(tau):
    with mp.workprec(P):
        t0 = reduce_to_fundamental_domain(tau).tau0
        s = sum(division_value(6, a, b, t0, P) for a, b in ((3, 0), (0, 3), (3, 3)))
        assert abs(s) < mp.mpf(2) ** (-(P - 40)) * max(1, abs(division_value(6, 3, 0, t0, P)))


@settings(max_examples=25)
@given(st.fractions(-5, 5, max_denominator=30), st.fractions(Fraction(1, 20), 5, max_denominator=30))
def test_exact_reduction(r, s):
    tau = QuadPoint(r, s)
    red = reduce_to_fundamental_domain(tau)
    t0 = red.tau0.tau
    assert abs(t0.r) <= Fraction(1, 2) and t0.abs2() >= 1
    assert t0.mobius(red.gamma) == tau


@settings(max_examples=25)
@given(st.fractions(-5, 5, max_denominator=30), st.fractions(Fraction(1, 20), 5, max_denominator=30),
       st.sampled_from([(1, 1, 0, 1), (0, -1, 1, 0), (2, 1, 1, 1), (5, 2, 2, 1)]))
def test_exact_mobius_matches_numeric(r, s, g):
    tau = QuadPoint(r, s)
    with mp.workprec(P):
        a, b, c, d = g
        z = tau.to_mpc()
        assert _close(tau.mobius(g).to_mpc(), (a * z + b) / (c * z + d))


def test_quad_point_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        QuadPoint(0, -1)


def test_f_pm_lie_on_tilde_curve():
    with mp.workprec(P):
        fp, fm = eval_f_pm(QuadPoint.omega_multiple(5), P)
        assert _close(fm ** 3 - fp ** 3, 2)


def test_f_pm_undefined_at_zero_of_X():
    # X vanishes at the cusp 1/3; approach it closely
    with pytest.raises(PrecisionError):
        eval_f_pm(QuadPoint(Fraction(1, 3), Fraction(1, 3000)), 64)


def test_cusp_with_pole_is_identity():
    assert not phi_at_cusp("inf", P).is_affine
