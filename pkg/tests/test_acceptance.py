"""Acceptance criteria 1-9. Each test records a line that the terminal summary
prints as `criterion k: PASS/FAIL`. Tolerances and inputs are the stated ones."""

import time

import mpmath as mp
import pytest

from conftest import record
from heegner6 import checks
from heegner6 import curves as cv
from heegner6.heegner import HeegnerJob, finalize, push_through_chain, random_point_E1


def _report(k, part, result, budget=None):
    ok = result.passed and (budget is None or result.seconds < budget)
    detail = result.detail + (f", {result.seconds:.1f}s" + (f" < {budget}s" if budget else ""))
    record(k, part, ok, detail)
    print(f"criterion {k} [{part}]: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def test_criterion_1_golden_q_expansions():
    assert _report(1, "X through q^40, Y through q^33", checks.golden_qseries(), budget=5)


def test_criterion_2_parametrization_identity():
    assert _report(2, "100 random tau at P=256", checks.parametrization_identity(prec=256, count=100), budget=30)


def test_criterion_3_special_values():
    assert _report(3, "five cusp values at P=256", checks.special_values(prec=256))


def test_criterion_4_transformation_laws():
    assert _report(4, "gamma+-, gamma' on 10 random tau", checks.transformation_laws(prec=256, count=10))


def test_criterion_5_unit_identity():
    assert _report(5, "n <= 50 at P=384", checks.unit_identity(checks.UNIT_IDENTITY_NS, prec=384), budget=600)


def test_criterion_6_c_coefficients():
    assert _report(6, "c closed form vs brute force", checks.c_coefficients(checks.COMBINATORIAL_NS, pairs=20),
                   budget=60)


@pytest.mark.xfail(strict=True, reason="the stated sum is 1/3 of f(n) n^3 prod(1 - p^-2); see the degree-via-cusps test")
def test_criterion_6_degree_identity_literal():
    literal, _ = checks.degree_identity_check(checks.COMBINATORIAL_NS)
    assert _report(6, "degree identity as stated", literal, budget=60)


def test_criterion_6_degree_identity_via_cusp_orders():
    # not a substitute for the literal statement: it pins down the factor 3 discrepancy
    _, by_deg = checks.degree_identity_check(checks.COMBINATORIAL_NS)
    assert by_deg.passed, by_deg.detail
    print(f"criterion 6 [supporting]: {by_deg.detail}")


def test_criterion_7_matrix_invariants():
    assert _report(7, "all representatives, n <= 50", checks.matrix_invariants(max_n=50))


def _construct_case(a, b):
    t0 = time.perf_counter()
    cert = finalize(HeegnerJob(a, b))
    secs = time.perf_counter() - t0
    X, Y = cert.point
    exact = Y * Y == X ** 3 + cert.D
    parts = [f"({a},{b}): point ({X}, {Y})" if len(str(X)) < 40 else f"({a},{b}): x has {len(str(X))} chars",
             f"h_K={cert.h_K}", f"{secs:.1f}s"]
    if cert.h_K % 2 == 0:
        # the criterion ranges over cases with h_K confirmed odd
        return True, "; ".join(parts + ["h_K even, outside the criterion"]), cert
    ok = exact and cert.on_curve and cert.non_torsion
    if cert.generator is not None:
        sq = cert.odd_square
        ok &= sq is not None and abs(cert.height_ratio - sq * sq) < 1e-6 * sq * sq
        parts.append(f"ratio {mp.nstr(cert.height_ratio, 12)} = {sq}^2")
    else:
        ok &= cert.descent is not None and cert.descent.passed
        parts.append("no generator in box, descent " + ("ok" if cert.descent.passed else "failed"))
    parts.append("descent " + ("ok" if cert.descent and cert.descent.passed else "failed"))
    return ok, "; ".join(parts), cert


@pytest.mark.parametrize("a,b", checks.HEEGNER_CASES)
def test_criterion_8_heegner_construction(a, b):
    ok, detail, _ = _construct_case(a, b)
    record(8, f"({a},{b})", ok, detail)
    print(f"criterion 8 [({a},{b})]: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok


def test_criterion_9_isogeny_chain():
    import random

    P = 256
    rng = random.Random(99)
    worst = mp.mpf(0)
    with mp.workprec(P):
        tol = mp.mpf(2) ** (-(P - 40))
        ends = []
        for n in (5, 7, 23, 41, 77):
            rho = 1 if ((n - 1) // 2) % 2 == 0 else -1
            last = push_through_chain(random_point_E1(rng, P), n)[-1]
            ends.append(last.curve == cv.E(rho * n))
            worst = max(worst, cv.membership_residual(last))
        ok = all(ends) and worst < tol
        detail = f"max residual on E_(rho n) {mp.nstr(worst, 3)} < {mp.nstr(tol, 3)} for n in 5, 7, 23, 41, 77"
    record(9, "random point through 8 maps", ok, detail)
    print(f"criterion 9: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok
