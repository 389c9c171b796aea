"""Galois conjugates of X(n w) + 1 through the matrices M(x), S(x), and the
combinatorics of the orders of U at the cusps of X(6n).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath as mp
from sympy import divisors, factorint

from .eisenstein import (
    EisensteinInt,
    as_eis,
    chi_exponent,
    enumerate_conjugates,
    f_of_n,
    legendre3,
    mod2_class,
    mod3_class,
    norm,
    radical,
)
from .modular import QuadPoint, eval_X


@dataclass(frozen=True)
class Mat2Q:
    """2x2 matrix [[a, b], [c, d]] with exact rational entries."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def identity(cls) -> "Mat2Q":
        return cls(1, 0, 0, 1)

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o: "Mat2Q") -> "Mat2Q":
        return Mat2Q(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                     self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def scale(self, k) -> "Mat2Q":
        return Mat2Q(*(k * e for e in self.entries))

    def inverse(self) -> "Mat2Q":
        dt = self.det()
        if dt == 0:
            raise ZeroDivisionError("singular matrix")
        return Mat2Q(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def mod(self, m: int) -> tuple[int, int, int, int]:
        if not self.is_integral():
            raise ValueError("matrix is not integral")
        return tuple(int(e) % m for e in self.entries)

    def congruent(self, other: "Mat2Q", m: int) -> bool:
        return self.mod(m) == other.mod(m)

    def apply(self, tau):
        """Moebius action on an exact QuadPoint or a numeric complex number."""
        if isinstance(tau, QuadPoint):
            return tau.mobius(self.entries)
        a, b, c, d = (mp.mpf(e.numerator) / e.denominator for e in self.entries)
        return (a * tau + b) / (c * tau + d)

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def matrix_M(x, n: int) -> Mat2Q:
    """M(x) = [[a - b, -b n], [b/n, a]], the matrix of multiplication by x on (n w, 1)."""
    x = as_eis(x)
    if x.is_zero():
        raise ValueError("x must be nonzero")
    a, b = x.a, x.b
    return Mat2Q(a - b, -b * n, Fraction(b, n), a)


def _egcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, u, v = _egcd(b, a % b)
    return g, v, u - (a // b) * v


def _round_div(num: int, den: int) -> int:
    # nearest integer to num/den, ties towards the even-rounded value via Fraction
    return round(Fraction(num, den))


def matrix_S(x, n: int) -> Mat2Q:
    """S(x) of determinant 1 with M(x) S(x)^-1 integral and = I (mod 6), n S(x) integral.

    q = +-gcd(a, b) with q = 1 (mod 6), and (r, s) solves
    r a/q + s b/q = (N(x)/q^2 - 1)/6 with |r| minimal.
    """
    x = as_eis(x)
    if gcd(norm(x), 6 * n) != 1:
        raise ValueError(f"norm({x}) must be coprime to 6n")
    a, b = x.a, x.b
    g = gcd(a, b)
    q = g if g % 6 == 1 else -g
    if q % 6 != 1:
        raise ArithmeticError("gcd(a, b) is not +-1 mod 6")
    ap, bp = a // q, b // q
    rhs, rem = divmod(norm(x) // (q * q) - 1, 6)
    if rem:
        raise ArithmeticError("N(x/q) is not 1 mod 6")
    if bp == 0:
        r, s = rhs * ap, 0  # ap = +-1
    elif ap == 0:
        r, s = 0, rhs * bp
    else:
        _, u, v = _egcd(ap, bp)  # u ap + v bp = 1
        r0, s0 = u * rhs, v * rhs
        # general solution r = r0 + t bp, s = s0 - t ap; minimise |r|
        t = _round_div(-r0, bp)
        best = None
        for tt in (t - 1, t, t + 1):
            r, s = r0 + tt * bp, s0 - tt * ap
            key = (abs(r), -r, abs(s))
            if best is None or key < best[0]:
                best = (key, r, s)
        _, r, s = best
    assert r * ap + s * bp == rhs
    return Mat2Q(ap - bp - 6 * r, -(bp - 6 * s) * n, Fraction(bp, n), ap)


def matrix_R(x, n: int) -> Mat2Q:
    """R(x) = S(x) diag(n, 1)."""
    return matrix_S(x, n) @ Mat2Q(n, 0, 0, 1)


# ------------------------------------------------------------------ Lemma on S(x) mod 6

def _crt_matrix(m2, m3):
    return tuple(next(v for v in range(6) if v % 2 == u % 2 and v % 3 == w % 3) for u, w in zip(m2, m3))


_I = (1, 0, 0, 1)
# gamma_+ = I (mod 2), T S (mod 3); gamma_- = I (mod 2), T^-1 S (mod 3); gamma' = T S (mod 2), I (mod 3)
GAMMA_PLUS = (-11, -10, 10, 9)
GAMMA_MINUS = (-7, -10, -2, -3)
GAMMA_PRIME = (-5, -3, -3, -2)
for _g, _m2, _m3 in ((GAMMA_PLUS, _I, (1, -1, 1, 0)), (GAMMA_MINUS, _I, (-1, -1, 1, 0)),
                     (GAMMA_PRIME, (1, 1, 1, 0), _I)):
    assert tuple(v % 6 for v in _g) == _crt_matrix(_m2, _m3)


def _mul_mod(g, h, m=6):
    a, b, c, d = g
    e, f, g2, h2 = h
    return ((a * e + b * g2) % m, (a * f + b * h2) % m, (c * e + d * g2) % m, (c * f + d * h2) % m)


def _pow_mod(g, k, m=6):
    out = _I
    for _ in range(k % 6 if k >= 0 else (-k) % 6):
        out = _mul_mod(out, g, m)
    if k < 0:
        raise ValueError("negative exponent")
    return out


def randj_prediction(x, n: int) -> tuple[int, int, int, int]:
    """(gamma')^r gamma_{-(n/3)}^j mod 6 for x = w^r (mod 2), x = w^j (mod 3)."""
    x = as_eis(x)
    if mod3_class(x) is None:
        x = -x  # x and -x generate the same ideal
    r, j = mod2_class(x), mod3_class(x)
    if r is None or j is None:
        raise ValueError("x must be a unit mod 2 and a root of unity mod 3")
    gj = GAMMA_MINUS if legendre3(n) == 1 else GAMMA_PLUS
    return _mul_mod(_pow_mod(GAMMA_PRIME, r), _pow_mod(gj, j))


def randj_holds(x, n: int) -> bool:
    S = matrix_S(x, n)
    if not S.is_integral():
        return False
    pred = randj_prediction(x, n)
    neg = tuple((-v) % 6 for v in pred)
    return S.mod(6) in (pred, neg)


# ------------------------------------------------------------------ conjugate values

@dataclass(frozen=True)
class ConjugateEvaluation:
    x: EisensteinInt
    S: Mat2Q
    value: object  # mp.mpc, U_x(w)
    tau_transported: QuadPoint


def transported_point(x, n: int, tau: QuadPoint | None = None) -> QuadPoint:
    """S(x) applied to n*tau exactly (tau defaults to w)."""
    base = QuadPoint.omega_multiple(n) if tau is None else QuadPoint(n * tau.r, n * tau.s)
    return matrix_S(x, n).apply(base)


def conjugate_value(x, n: int, prec: int, tau: QuadPoint | None = None) -> ConjugateEvaluation:
    """U_x(tau) = X(S(x) n tau) + 1, by default at tau = w."""
    x = as_eis(x)
    S = matrix_S(x, n)
    t = transported_point(x, n, tau)
    with mp.workprec(prec):
        v = eval_X(t, prec) + 1
    return ConjugateEvaluation(x, S, v, t)


def _tree_sum(values):
    values = list(values)
    if not values:
        return mp.mpf(0)
    while len(values) > 1:
        nxt = [values[i] + values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            nxt.append(values[-1])
        values = nxt
    return values[0]


@dataclass(frozen=True)
class NormResult:
    n: int
    value: object          # mp.mpc, the product U(w)
    log_abs: object        # mp.mpf, sum of log|U_x(w)|
    evaluations: tuple


def norm_U(n: int, prec: int, workers: int = 1) -> NormResult:
    """prod over B_0 u B_1 u B_2 of U_x(w), accumulated as a sum of logs in canonical order."""
    cs = enumerate_conjugates(n)
    xs = sorted(cs.all_B())
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            evals = list(pool.map(_conj_eval_star, [(x, n, prec) for x in xs]))
    else:
        evals = [conjugate_value(x, n, prec) for x in xs]
    evals.sort(key=lambda e: (e.x.a, e.x.b))
    with mp.workprec(prec + 32):
        logs = [mp.log(e.value) for e in evals]
        total = _tree_sum(logs)
        log_abs = _tree_sum([mp.re(l) for l in logs])
        value = mp.exp(total)
    with mp.workprec(prec):
        return NormResult(n, +value, +log_abs, tuple(evals))


def _conj_eval_star(args):
    return conjugate_value(*args)


# ------------------------------------------------------------------ combinatorics

def _mod2_index(alpha: int, beta: int) -> int:
    i = mod2_class(EisensteinInt(alpha, -beta))
    if i is None:
        raise ValueError("alpha - beta w must be a unit mod 2 (gcd(alpha, beta) = 1)")
    return i


def c_coeff(alpha: int, beta: int, d: int, n: int) -> int:
    """#{x = a + b w in B_i : d | a beta + b alpha}, with alpha - beta w = w^i (mod 2)."""
    if gcd(alpha, beta) != 1:
        raise ValueError("alpha and beta must be coprime")
    if n % d:
        raise ValueError("d must divide n")
    i = _mod2_index(alpha, beta)
    Bi = enumerate_conjugates(n, strict=False).B[i]
    return sum(1 for x in Bi if (x.a * beta + x.b * alpha) % d == 0)


def _chi_or_zero(alpha: int, beta: int, n: int):
    """chi_n(alpha - beta w) as an exponent, or None when not coprime to n."""
    z = EisensteinInt(alpha, -beta)
    if gcd(norm(z), n) != 1:
        return None
    return chi_exponent(z, n)


def c_coeff_closed(alpha: int, beta: int, d: int, n: int) -> int:
    """Closed form for c_{alpha,beta}(d)."""
    if gcd(alpha, beta) != 1:
        raise ValueError("alpha and beta must be coprime")
    if n % d:
        raise ValueError("d must divide n")
    nprime = radical(n)
    fn = f_of_n(n)
    if d % nprime == 0:
        k = _chi_or_zero(alpha, beta, n)
        return fn // f_of_n(d) if k == 0 else 0
    delta = gcd(n, alpha * alpha + alpha * beta + beta * beta)
    if gcd(d, delta) == 1:
        return fn // (3 * f_of_n(d))
    return 0


def _prod_one_minus_inv_sq(d: int) -> Fraction:
    out = Fraction(1)
    for p in factorint(d):
        out *= 1 - Fraction(1, p * p)
    return out


def C_value(alpha: int, beta: int, n: int) -> Fraction:
    """C(alpha, beta) from its two-sum definition (alpha, beta only matter mod n)."""
    nprime = radical(n)
    fn = f_of_n(n)
    delta = gcd(n, alpha * alpha + alpha * beta + beta * beta)
    total = Fraction(0)
    for d in divisors(n):
        if gcd(d, delta) == 1:
            total += Fraction(d * d * fn, 3 * f_of_n(d)) * _prod_one_minus_inv_sq(d)
    k = _chi_or_zero(alpha, beta, n)
    re_chi = Fraction(0) if k is None else (Fraction(1) if k == 0 else Fraction(-1, 2))
    second = Fraction(0)
    for d in divisors(n):
        if d % nprime == 0:
            second += d * n * _prod_one_minus_inv_sq(d)
    return total + Fraction(2, 3) * re_chi * second


def _w_sign(alpha: int, beta: int) -> int:
    if alpha % 3 == 0:
        return 1
    if beta % 3 == 0:
        return -1
    return 0


def order_of_U(alpha: int, beta: int, n: int) -> int:
    """ord of U at the cusp [alpha/beta] of X(6n): 2 w C(alpha, beta)."""
    if gcd(alpha, beta) != 1:
        raise ValueError("alpha and beta must be coprime")
    v = 2 * _w_sign(alpha, beta) * C_value(alpha, beta, n)
    if v.denominator != 1:
        raise ArithmeticError("order is not an integer")
    return int(v)


def order_of_U_brute(alpha: int, beta: int, n: int) -> int:
    """Sum over x in B_i of +-2 gcd(n, a beta + b alpha)^2."""
    if gcd(alpha, beta) != 1:
        raise ValueError("alpha and beta must be coprime")
    w = _w_sign(alpha, beta)
    if w == 0:
        return 0
    i = _mod2_index(alpha, beta)
    Bi = enumerate_conjugates(n, strict=False).B[i]
    return 2 * w * sum(gcd(n, x.a * beta + x.b * alpha) ** 2 for x in Bi)


@dataclass(frozen=True)
class DegreeCheck:
    """Quantities around the degree of U on X(6n).

    range_sum: sum of C(a, b) over 1 <= a, b <= 3n, 3 | a, b = 1 (3), gcd(a, b, n) = 1.
    half_degree: half the sum of |ord U| over all cusps of X(6n) (None unless requested).
    target: f(n) n^3 prod_{p | n}(1 - p^-2).
    b0_index: |B_0| [Gamma(6) : Gamma(6n)] = |B_0| |SL_2(Z/n)|.
    """

    n: int
    range_sum: Fraction
    target: Fraction
    b0_index: Fraction
    half_degree: Fraction | None = None

    @property
    def literal_holds(self) -> bool:
        return self.range_sum == self.target


def cusps_X(N: int):
    """Primitive pairs (a, b) modulo +-1 and N, lifted to coprime integers."""
    seen = set()
    for a in range(N):
        for b in range(N):
            if gcd(gcd(a, b), N) != 1:
                continue
            key = min((a, b), ((-a) % N, (-b) % N))
            if key in seen:
                continue
            seen.add(key)
            aa, bb = key
            if aa == 0:
                aa = N
            while gcd(aa, bb) != 1:
                bb += N
            yield aa, bb


def degree_identity(n: int, with_cusps: bool = False) -> DegreeCheck:
    range_sum = Fraction(0)
    for a in range(3, 3 * n + 1, 3):
        for b in range(1, 3 * n + 1, 3):
            if gcd(gcd(a, b), n) == 1:
                range_sum += C_value(a, b, n)
    sl2 = n ** 3 * _prod_one_minus_inv_sq(n)
    target = f_of_n(n) * sl2
    b0 = len(enumerate_conjugates(n, strict=False).B[0])
    half = None
    if with_cusps:
        half = Fraction(sum(abs(order_of_U(a, b, n)) for a, b in cusps_X(6 * n)), 4)
    return DegreeCheck(n, range_sum, target, b0 * sl2, half)
