import random
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heegner6 import curves as cv
from heegner6.eisenstein import EisensteinInt, galois_representatives
from heegner6.heegner import (
    HeegnerJob,
    InvalidJob,
    RealPeriod,
    an_bn,
    base_point_via_chain,
    canonical_height,
    conjugate_point,
    descent_check,
    finalize,
    is_torsion,
    push_through_chain,
    random_point_E1,
    job_rejection,
    point_from_x,
    recognize_point,
    recognize_rational,
    search_generator,
    torsion_shift,
    trace_point,
)
from heegner6.modular import QuadPoint


def _close(P, Q, tol):
    return abs(P.x - Q.x) <= tol * max(1, abs(P.x)) and abs(P.y - Q.y) <= tol * max(1, abs(P.y))


# ---------------------------------------------------------------- job validation

@pytest.mark.parametrize("a,b", [(5, 1), (41, 1), (61, 1), (77, 1), (-23, 1)])
def test_valid_jobs(a, b):
    assert job_rejection(a, b) is None
    job = HeegnerJob(a, b)
    assert job.rho_n == job.rho * job.n


@pytest.mark.parametrize("a,b", [(7, 1), (9, 1), (5, 5), (50, 1), (3, 1), (23, 0), (20, 1)])
def test_invalid_jobs(a, b):
    assert job_rejection(a, b) is not None
    with pytest.raises(InvalidJob):
        HeegnerJob(a, b)


def test_job_rejects_wrong_residue_mod_4():
    # a = b + 2 (mod 4) fails a = b (mod 4)
    assert job_rejection(3, 1) is not None


# ---------------------------------------------------------------- recognition

def test_recognize_rational_simple():
    with mp.workprec(256):
        assert recognize_rational(mp.mpf(1) / 2, 20) == Fraction(1, 2)
        assert recognize_rational(mp.mpf(22) / 7, 20) == Fraction(22, 7)
        assert recognize_rational(mp.mpf(-6319) / 3249, 20) == Fraction(-6319, 3249)


def test_recognize_rational_refuses_irrationals():
    with mp.workprec(256):
        assert recognize_rational(mp.pi, 8) is None
        assert recognize_rational(mp.sqrt(2), 15) is None


@settings(max_examples=100, deadline=None)
@given(st.integers(-10 ** 12, 10 ** 12), st.integers(1, 10 ** 12))
def test_recognize_rational_round_trip(p, q):
    with mp.workprec(256):
        assert recognize_rational(mp.mpf(p) / q, 30) == Fraction(p, q)


def test_real_period_round_trip():
    with mp.workprec(192):
        per = RealPeriod(5)
        for x, y in [(-1, 2), (-1, -2), (4, mp.sqrt(69)), (mp.mpf(6319) / 3249, mp.mpf(-650998) / 185193)]:
            z = per.log(mp.mpf(x), mp.mpf(y))
            xr, yr = per.exp(z)
            assert abs(xr - x) < mp.mpf(2) ** -150 * max(1, abs(x))
            assert abs(yr - y) < mp.mpf(2) ** -150 * max(1, abs(y))


def test_recognize_via_division_point():
    G = point_from_x(Fraction(2), 41, 1)
    S = cv.mul(27, G)
    with mp.workprec(384):
        num = cv.ProjPoint(mp.mpf(S.x.numerator) / S.x.denominator, mp.mpf(S.y.numerator) / S.y.denominator,
                           mp.mpf(1), cv.E(41))
        rec = recognize_point(num, 41, max_digits=10, max_division=9)
    assert rec.point.equals(S)
    assert 27 % rec.division == 0


# ---------------------------------------------------------------- conjugates and trace

def test_identity_conjugate_is_base_point():
    n, prec = 5, 256
    c = conjugate_point(EisensteinInt(1, 0), n, prec)
    a, b = an_bn(QuadPoint.omega_multiple(n), n, 2 * prec)
    with mp.workprec(2 * prec):
        E = cv.E(n)
        T = cv.ProjPoint(torsion_shift(n, 1, mp.cbrt(n)), mp.mpf(0), mp.mpf(1), E)
        Q = cv.add(cv.ProjPoint(a, b, mp.mpf(1), E), T)
        assert _close(c.point, Q, mp.mpf(2) ** -200)


def test_trace_is_real():
    # the individual conjugates are not real, their symmetrized sum is
    tr = trace_point(5, 256)
    with mp.workprec(256):
        assert tr.imag_size < mp.mpf(2) ** -200
        assert any(abs(mp.im(c.point.x)) > 1e-3 for c in tr.conjugates)


def test_trace_independent_of_order():
    reps = list(galois_representatives(5))
    a = trace_point(5, 256)
    b = trace_point(5, 256, order=list(reversed(range(len(reps)))))
    with mp.workprec(256):
        assert _close(a.point, b.point, mp.mpf(2) ** -200)


def test_precision_doubling_keeps_point():
    pts = []
    for prec in (384, 768):
        tr = trace_point(5, prec)
        with mp.workprec(prec):
            pts.append(recognize_point(tr.point, 5, 60, 16).point)
    assert pts[0].equals(pts[1])


def test_chain_matches_closed_form_up_to_y_sign():
    # the chain lands on (a_n, b_n) + T, with y negated when rho = -1
    prec = 256
    for n in (5, 7, 23, 41):
        rho = 1 if ((n - 1) // 2) % 2 == 0 else -1
        chain = base_point_via_chain(n, prec)
        Q = conjugate_point(EisensteinInt(1, 0), n, prec).point
        with mp.workprec(prec):
            if rho < 0:
                Q = cv.ProjPoint(Q.x, -Q.y, mp.mpf(1), Q.curve)
            assert _close(chain, Q, mp.mpf(2) ** -200), n


def test_chain_ends_on_target_curve():
    rng = random.Random(3)
    with mp.workprec(256):
        for n in (5, 7, 23):
            rho = 1 if ((n - 1) // 2) % 2 == 0 else -1
            last = push_through_chain(random_point_E1(rng, 256), n)[-1]
            assert last.curve == cv.E(rho * n)
            assert cv.membership_residual(last) < mp.mpf(2) ** -200


# ---------------------------------------------------------------- heights

@pytest.mark.parametrize("D,x", [(5, -1), (41, 2), (-2, 3), (17, -2)])
def test_canonical_height_quadratic(D, x):
    P = point_from_x(Fraction(x), D, 1)
    h = canonical_height(P, 128)
    with mp.workprec(128):
        assert h > 0
        assert abs(canonical_height(cv.mul(2, P), 128) - 4 * h) < 1e-20 * h
        assert abs(canonical_height(cv.mul(3, P), 128) - 9 * h) < 1e-20 * h


def test_torsion_detection():
    assert is_torsion(point_from_x(Fraction(2), 1, 1))    # (2, 3) has order 6 on y^2 = x^3 + 1
    assert not is_torsion(point_from_x(Fraction(-1), 5, 1))


def test_generator_search_small_cases():
    assert Fraction(search_generator(5).x) in (Fraction(-1), Fraction(4))
    assert search_generator(7) is None


def test_stated_point_for_D5_is_not_on_curve():
    # (1, 2) fails y^2 = x^3 + 5; (-1, 2) is the small point actually on the curve
    assert point_from_x(Fraction(1), 5, 1) is None
    assert point_from_x(Fraction(-1), 5, 1).y == 2


# ---------------------------------------------------------------- descent and end to end

def test_descent_accepts_trace_point_n5():
    S = cv.mul(3, point_from_x(Fraction(-1), 5, -1))
    d = descent_check(S, 5)
    assert d.passed


def test_finalize_5_1():
    cert = finalize(HeegnerJob(5, 1))
    X, Y = cert.point
    assert Y * Y == X ** 3 + cert.D
    assert cert.non_torsion and cert.h_K == 1 and cert.odd_square == 3
    assert cert.descent.passed


@pytest.mark.slow
def test_finalize_41_1():
    cert = finalize(HeegnerJob(41, 1))
    assert cert.odd_square == 27 and cert.h_K == 1
