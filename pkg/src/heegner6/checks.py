"""Self-contained numerical and combinatorial checks, shared by the self-test
command and the acceptance suite. Each check returns a CheckResult."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import gcd
from pathlib import Path

import mpmath as mp

from . import curves as cv
from .conjugates import (
    GAMMA_MINUS,
    GAMMA_PLUS,
    GAMMA_PRIME,
    Mat2Q,
    c_coeff,
    c_coeff_closed,
    degree_identity,
    matrix_M,
    matrix_S,
    randj_holds,
)
from .eisenstein import EisensteinInt, admissibility_reason, enumerate_conjugates, galois_representatives, mod2_class, mod3_class
from .modular import eval_phi, eval_XY, phi_at_cusp
from .qseries import QOmega, X_series, Y_series

UNIT_IDENTITY_NS = (5, 7, 11, 13, 23, 25, 29, 31, 41, 43, 47, 49)
COMBINATORIAL_NS = (5, 7, 25, 35)
HEEGNER_CASES = ((5, 1), (41, 1), (61, 1), (77, 1))
# class numbers of Q(cbrt n) used as an oracle by the self-test
KNOWN_CLASS_NUMBERS = {5: 1, 7: 3, 11: 2, 13: 3, 23: 1, 25: 1, 29: 1, 31: 3, 41: 1, 43: 12, 47: 2, 61: 6, 77: 3}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(name, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported by name
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


# ------------------------------------------------------------------ q-expansions

def default_golden_path() -> Path:
    return Path(str(resources.files("heegner6") / "data" / "golden_qseries.json"))


def golden_qseries(path: str | Path | None = None) -> CheckResult:
    """Integer coefficients of X through q^40 and Y through q^33 against a golden file."""
    def run():
        data = json.loads(Path(path or default_golden_path()).read_text())
        bad = []
        for name, series in (("X", X_series(48)), ("Y", Y_series(48))):
            spec = data[name]
            want = {int(k): v for k, v in spec["coefficients"].items()}
            for e in range(spec["from"], spec["through"] + 1):
                if series.coefficient(e) != QOmega(want.get(e, 0)):
                    bad.append(f"{name} q^{e}")
        return not bad, "all coefficients match" if not bad else "mismatch at " + ", ".join(bad)
    return _timed("golden q-expansions", run)


def parametrization_identity(prec: int = 256, count: int = 100, seed: int = 2024) -> CheckResult:
    """|Y^2 - X^3 - 1| < 2^-(P-32) at random tau with Im tau in [0.2, 3]."""
    def run():
        rng = random.Random(seed)
        worst = mp.mpf(0)
        with mp.workprec(prec):
            tol = mp.mpf(2) ** (-(prec - 32))
            for _ in range(count):
                tau = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.2, 3.0))
                X, Y = eval_XY(tau, prec)
                worst = max(worst, abs(Y * Y - X ** 3 - 1))
            return worst < tol, f"max residual {mp.nstr(worst, 3)} vs {mp.nstr(tol, 3)}"
    return _timed("parametrization identity", run)


SPECIAL_VALUES = {"1/3": ("0", "1"), "1/2": ("-w", "0"), "-3/2": ("-1", "0"), "-1": ("2w", "-3"), "-1/2": ("-w^2", "0")}


def special_values(prec: int = 256) -> CheckResult:
    """phi at the cusps 1/3, 1/2, -3/2, -1, -1/2."""
    def run():
        with mp.workprec(prec):
            w = mp.expjpi(mp.mpf(2) / 3)
            table = {"1/3": (0, 1), "1/2": (-w, 0), "-3/2": (-1, 0), "-1": (2 * w, -3), "-1/2": (-w * w, 0)}
            tol = mp.mpf(2) ** (-(prec - 32))
            worst = mp.mpf(0)
            for c, (x, y) in table.items():
                P = phi_at_cusp(c, prec)
                if not P.is_affine:
                    return False, f"phi({c}) is the identity"
                worst = max(worst, abs(P.x - x), abs(P.y - y))
            return worst < tol, f"max error {mp.nstr(worst, 3)}"
    return _timed("special values at cusps", run)


def _act(g, tau):
    a, b, c, d = g
    return (a * tau + b) / (c * tau + d)


def transformation_laws(prec: int = 256, count: int = 10, seed: int = 7) -> CheckResult:
    """phi(g+- tau) = [w^-+1] phi(tau) + (-w^-+1, 0) and phi(g' tau) = phi(tau) + (0, 1)."""
    def run():
        rng = random.Random(seed)
        worst = mp.mpf(0)
        with mp.workprec(prec):
            w = mp.expjpi(mp.mpf(2) / 3)
            tol = mp.mpf(2) ** (-(prec - 40))
            E1 = cv.E(1)
            for _ in range(count):
                tau = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.5))
                p0 = eval_phi(tau, prec)
                for g, k in ((GAMMA_PLUS, -1), (GAMMA_MINUS, 1)):
                    p1 = eval_phi(_act(g, tau), prec)
                    rhs = cv.add(cv.ProjPoint(w ** k * p0.x, p0.y, 1, E1), cv.ProjPoint(-(w ** k), 0, 1, E1))
                    worst = max(worst, abs(p1.x - rhs.x) / max(1, abs(rhs.x)), abs(p1.y - rhs.y) / max(1, abs(rhs.y)))
                p1 = eval_phi(_act(GAMMA_PRIME, tau), prec)
                rhs = cv.add(p0, cv.ProjPoint(0, 1, 1, E1))
                worst = max(worst, abs(p1.x - rhs.x) / max(1, abs(rhs.x)), abs(p1.y - rhs.y) / max(1, abs(rhs.y)))
            return worst < tol, f"max relative error {mp.nstr(worst, 3)} over {3 * count} evaluations"
    return _timed("transformation laws", run)


# ------------------------------------------------------------------ combinatorics

def _coprime_pairs(n: int, count: int, rng):
    out = []
    while len(out) < count:
        a, b = rng.randrange(0, 6 * n), rng.randrange(0, 6 * n)
        if gcd(a, b) == 1:
            out.append((a, b))
    return out


def c_coefficients(ns=COMBINATORIAL_NS, pairs: int = 20, seed: int = 11) -> CheckResult:
    """Closed form of c_{a,b}(d) against brute force for all d | n."""
    from sympy import divisors

    def run():
        rng = random.Random(seed)
        total, bad = 0, []
        for n in ns:
            for a, b in _coprime_pairs(n, pairs, rng):
                for d in divisors(n):
                    total += 1
                    if c_coeff(a, b, d, n) != c_coeff_closed(a, b, d, n):
                        bad.append((n, a, b, d))
        return not bad, f"{total} comparisons" + ("" if not bad else f", mismatches {bad[:5]}")
    return _timed("c coefficients closed form", run)


def degree_identity_check(ns=COMBINATORIAL_NS) -> tuple[CheckResult, CheckResult]:
    """(literal sum = f(n) n^3 prod(1 - p^-2), same target read as half the degree of U)."""
    results = {}

    def literal():
        out = []
        for n in ns:
            r = degree_identity(n)
            results[n] = r
            out.append((n, r.range_sum, r.target))
        ok = all(s == t for _, s, t in out)
        return ok, "; ".join(f"n={n}: sum {s} vs {t}" for n, s, t in out)

    def by_degree():
        out = []
        for n in ns:
            r = degree_identity(n, with_cusps=True)
            out.append((n, r.range_sum, r.b0_index, r.half_degree, r.target))
        ok = all(s == b and h == t for _, s, b, h, t in out)
        return ok, "; ".join(f"n={n}: sum {s} = |B0||SL2| {b}, deg/2 {h} = {t}" for n, s, b, h, t in out)

    return _timed("degree identity (literal)", literal), _timed("degree identity (via cusp orders)", by_degree)


def matrix_invariants(max_n: int = 50) -> CheckResult:
    """det S(x) = 1, n S(x) integral, M(x) S(x)^-1 = I (mod 6) for every representative;
    the S(x) (mod 6) congruence for every x in Z[n w] of the enumeration box."""
    def run():
        counts = [0, 0]
        bad = []
        I = Mat2Q.identity()
        for n in range(2, max_n + 1):
            if admissibility_reason(n):
                continue
            reps = set(enumerate_conjugates(n).all_B()) | set(galois_representatives(n))
            for x in sorted(reps):
                S, M = matrix_S(x, n), matrix_M(x, n)
                R = M @ S.inverse()
                counts[0] += 1
                if S.det() != 1 or not S.scale(n).is_integral() or not (R.is_integral() and R.congruent(I, 6)):
                    bad.append((n, x))
            for a in range(1, 6 * n, 2):
                for c in range(0, 6, 1):
                    x = EisensteinInt(a, c * n)
                    if mod2_class(x) is None or (mod3_class(x) is None and mod3_class(-x) is None):
                        continue
                    if gcd(x.norm(), n) != 1:
                        continue
                    counts[1] += 1
                    if not randj_holds(x, n):
                        bad.append(("randj", n, x))
        return not bad, f"{counts[0]} representatives, {counts[1]} elements of Z[n w]" + (
            "" if not bad else f"; failures {bad[:5]}")
    return _timed("matrix invariants", run)


# ------------------------------------------------------------------ cubic fields, units, chain

def class_group_oracle(ns=None) -> CheckResult:
    from .cubicfield import class_number

    def run():
        ns_ = ns or sorted(KNOWN_CLASS_NUMBERS)
        bad = [(n, class_number(n).h, KNOWN_CLASS_NUMBERS[n]) for n in ns_
               if class_number(n).h != KNOWN_CLASS_NUMBERS[n]]
        return not bad, f"{len(ns_)} fields" + ("" if not bad else f"; mismatches {bad}")
    return _timed("class numbers", run)


def unit_identity(ns=UNIT_IDENTITY_NS, prec: int = 384, workers: int = 1) -> CheckResult:
    from .cubicfield import verify_unit_identity

    def run():
        parts, ok = [], True
        for n in ns:
            r = verify_unit_identity(n, prec, workers=workers)
            ok &= r.passed
            parts.append(f"n={n} e={mp.nstr(r.recovered_exponent, 12)} (expect {r.expected_exponent})")
        return ok, "; ".join(parts)
    return _timed("unit identity", run)


def isogeny_chain(ns=(5, 7, 23, 41, 77), prec: int = 256, seed: int = 3) -> CheckResult:
    from .heegner import push_through_chain, random_point_E1

    def run():
        rng = random.Random(seed)
        worst = mp.mpf(0)
        with mp.workprec(prec):
            tol = mp.mpf(2) ** (-(prec - 40))
            for n in ns:
                rho = 1 if ((n - 1) // 2) % 2 == 0 else -1
                pts = push_through_chain(random_point_E1(rng, prec), n)
                if pts[-1].curve != cv.E(rho * n):
                    return False, f"n={n}: chain ends on {pts[-1].curve}"
                for P in pts:
                    Q = P.normalized()
                    size = max(1, abs(Q.X), abs(Q.Y), abs(Q.Z)) ** 3
                    worst = max(worst, cv.membership_residual(P) / size)
            return worst < tol, f"max relative residual {mp.nstr(worst, 3)} over {len(ns)} values of n"
    return _timed("isogeny chain", run)


def selftest(quick: bool = False, golden: str | Path | None = None) -> list[CheckResult]:
    out = [golden_qseries(golden), parametrization_identity(count=20 if quick else 100), special_values(),
           transformation_laws(count=3 if quick else 10), c_coefficients(),
           degree_identity_check()[1], matrix_invariants(max_n=25 if quick else 50), isogeny_chain()]
    if not quick:
        out.append(class_group_oracle())
    return out
