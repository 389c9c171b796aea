"""Exact Fourier expansions of level-6 division values over Q(w).

Series are in the local parameter q = exp(2*pi*i*tau/6). Coefficients live in
Q(w), which contains the sixth roots of unity (zeta_6 = 1 + w).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


@dataclass(frozen=True)
class QOmega:
    """a + b*w with rational a, b."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def __add__(self, o):
        o = qw(o)
        return QOmega(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = qw(o)
        return QOmega(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return qw(o) - self

    def __neg__(self):
        return QOmega(-self.a, -self.b)

    def __mul__(self, o):
        o = qw(o)
        a, b, c, d = self.a, self.b, o.a, o.b
        return QOmega(a * c - b * d, a * d + b * c - b * d)

    __rmul__ = __mul__

    def conj(self):
        return QOmega(self.a - self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(w)")
        c = self.conj()
        return QOmega(c.a / n, c.b / n)

    def __truediv__(self, o):
        return self * qw(o).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = QOmega(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def is_rational_integer(self):
        return self.b == 0 and self.a.denominator == 1

    def to_complex(self) -> complex:
        return complex(float(self.a) - float(self.b) / 2, float(self.b) * 3 ** 0.5 / 2)

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        return f"({self.a} + {self.b}w)"


def qw(x) -> QOmega:
    if isinstance(x, QOmega):
        return x
    return QOmega(Fraction(x))


W = QOmega(0, 1)
ZETA6 = QOmega(1, 1)  # exp(2 pi i / 6) = -w^2 = 1 + w


def zeta6_power(k: int) -> QOmega:
    return ZETA6 ** (k % 6)


@dataclass(frozen=True)
class Laurent:
    """sum_k coeffs[k] q^(val + k), known exactly up to (excluding) q^(val + len)."""

    val: int
    coeffs: tuple

    @property
    def precision(self) -> int:
        return self.val + len(self.coeffs)

    def coefficient(self, e: int) -> QOmega:
        if e < self.val:
            return QOmega(0)
        if e >= self.precision:
            raise ValueError(f"coefficient q^{e} is beyond the known precision")
        return self.coeffs[e - self.val]

    def normalized(self) -> "Laurent":
        k = 0
        while k < len(self.coeffs) and self.coeffs[k].is_zero():
            k += 1
        return Laurent(self.val + k, self.coeffs[k:])

    def valuation(self) -> int:
        s = self.normalized()
        if not s.coeffs:
            raise ValueError("series vanishes to the known precision")
        return s.val

    def leading(self) -> QOmega:
        s = self.normalized()
        if not s.coeffs:
            raise ValueError("series vanishes to the known precision")
        return s.coeffs[0]

    def _aligned(self, other):
        lo = min(self.val, other.val)
        hi = min(self.precision, other.precision)
        a = [self.coefficient(e) if e < self.precision else QOmega(0) for e in range(lo, hi)]
        b = [other.coefficient(e) if e < other.precision else QOmega(0) for e in range(lo, hi)]
        return lo, a, b

    def __add__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent(0, (qw(other),) + (QOmega(0),) * max(self.precision, 1))
        lo, a, b = self._aligned(other)
        return Laurent(lo, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.val, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Laurent":
        c = qw(c)
        return Laurent(self.val, tuple(c * x for x in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            return self.scale(other)
        s, t = self.normalized(), other.normalized()
        n = min(len(s.coeffs), len(t.coeffs))
        out = [QOmega(0)] * n
        for i in range(n):
            if s.coeffs[i].is_zero():
                continue
            for j in range(n - i):
                out[i + j] = out[i + j] + s.coeffs[i] * t.coeffs[j]
        return Laurent(s.val + t.val, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "Laurent":
        s = self.normalized()
        if not s.coeffs:
            raise ZeroDivisionError("series vanishes to the known precision")
        c0inv = s.coeffs[0].inverse()
        n = len(s.coeffs)
        out = [c0inv]
        for k in range(1, n):
            acc = QOmega(0)
            for j in range(1, k + 1):
                acc = acc + s.coeffs[j] * out[k - j]
            out.append(-acc * c0inv)
        return Laurent(-s.val, tuple(out))

    def __truediv__(self, other):
        if not isinstance(other, Laurent):
            return self.scale(qw(other).inverse())
        return self * other.inverse()

    def __pow__(self, k: int):
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def integer_coefficients(self) -> dict[int, int]:
        """Nonzero coefficients as integers (raises if any is not in Z)."""
        out = {}
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if not c.is_rational_integer():
                raise ValueError(f"coefficient of q^{self.val + k} is {c}, not an integer")
            out[self.val + k] = int(c.a)
        return out


def division_value_series(alpha: int, beta: int, nterms: int) -> Laurent:
    """Expansion of e^(6)_{alpha,beta}/(2 pi i)^2 in q = exp(2 pi i tau/6), through q^(nterms-1)."""
    N = 6
    alpha, beta = alpha % N, beta % N
    if alpha == 0 and beta == 0:
        raise ValueError("(alpha, beta) must be nonzero mod 6")
    coeffs = [QOmega(0) for _ in range(nterms)]
    coeffs[0] = QOmega(Fraction(1, 12))

    def add_geometric(base_exp: int, root: int):
        # sum_{m>=1} m zeta^(root*m) q^(base_exp*m)
        m = 1
        while base_exp * m < nterms:
            coeffs[base_exp * m] = coeffs[base_exp * m] + m * zeta6_power(root * m)
            m += 1

    if alpha == 0:
        z = zeta6_power(beta)
        coeffs[0] = coeffs[0] + z / ((QOmega(1) - z) ** 2)
    else:
        add_geometric(alpha, beta)
    k = 1
    while N * k - alpha < nterms:
        add_geometric(alpha + N * k, beta)
        add_geometric(N * k - alpha, -beta)
        m = 1
        while N * k * m < nterms:
            coeffs[N * k * m] = coeffs[N * k * m] - 2 * m
            m += 1
        k += 1
    return Laurent(0, tuple(coeffs))


def transport_index(alpha: int, beta: int, gamma, N: int = 6) -> tuple[int, int]:
    a, b, c, d = gamma
    return ((a * alpha + c * beta) % N, (b * alpha + d * beta) % N)


_W2 = W * W

# name -> list of (coefficient, (alpha, beta))
COMBINATIONS = {
    "A": [(QOmega(1), (2, 1)), (_W2, (2, 3)), (W, (2, 5))],
    "B": [(QOmega(1), (2, 1)), (W, (2, 3)), (_W2, (2, 5))],
    "C": [(QOmega(1), (0, 1)), (QOmega(-1), (0, 4))],
    "D": [(QOmega(1), (3, 1)), (QOmega(-1), (3, 4))],
}


def form_series(name: str, nterms: int, gamma=(1, 0, 0, 1)) -> Laurent:
    """Series of A, B, C or D transported by gamma (weight factor dropped)."""
    total = None
    for coef, (al, be) in COMBINATIONS[name]:
        s = division_value_series(*transport_index(al, be, gamma), nterms).scale(coef)
        total = s if total is None else total + s
    return total


def X_series(nterms: int = 48, gamma=(1, 0, 0, 1)) -> Laurent:
    extra = 8
    A = form_series("A", nterms + extra, gamma)
    B = form_series("B", nterms + extra, gamma)
    return (A / B).scale(-_W2)


def Y_series(nterms: int = 48, gamma=(1, 0, 0, 1)) -> Laurent:
    extra = 8
    C = form_series("C", nterms + extra, gamma)
    D = form_series("D", nterms + extra, gamma)
    return (C / D).scale(-3)


# ---------------------------------------------------------------- cusps

@dataclass(frozen=True, order=True)
class Cusp:
    """The cusp alpha/beta with gcd(alpha, beta) = 1; (1, 0) is infinity."""

    alpha: int
    beta: int

    def __post_init__(self):
        if gcd(self.alpha, self.beta) != 1:
            raise ValueError("cusp coordinates must be coprime")
        if self.beta < 0 or (self.beta == 0 and self.alpha < 0):
            object.__setattr__(self, "alpha", -self.alpha)
            object.__setattr__(self, "beta", -self.beta)

    @classmethod
    def parse(cls, s) -> "Cusp":
        if isinstance(s, Cusp):
            return s
        if s in ("inf", "oo", "infinity", "∞"):
            return cls(1, 0)
        f = Fraction(s)
        return cls(f.numerator, f.denominator)

    def matrix(self) -> tuple[int, int, int, int]:
        """gamma in SL2(Z) with gamma(infinity) = alpha/beta."""
        al, be = self.alpha, self.beta
        if be == 0:
            return (1, 0, 0, 1)
        # find x, y with al*y - be*x = 1
        g, u, v = _egcd(al, be)
        # al*u + be*v = 1  ->  y = u, x = -v
        return (al, -v, be, u)

    def __str__(self):
        if self.beta == 0:
            return "∞"
        if self.beta == 1:
            return str(self.alpha)
        return f"{self.alpha}/{self.beta}"


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _small_lift(ell: int, m: int, N: int) -> Cusp:
    best = None
    for i in range(-2, 3):
        for j in range(-2, 3):
            al, be = ell + i * N, m + j * N
            if gcd(al, be) != 1:
                continue
            key = (abs(al) + abs(be), abs(be), abs(al), -be, -al)
            if best is None or key < best[0]:
                best = (key, Cusp(al, be))
    if best is None:
        raise ArithmeticError(f"no coprime lift of {ell}/{m} mod {N}")
    return best[1]


def cusp_catalog(group: str, N: int) -> list[Cusp]:
    """Inequivalent cusps for Gamma(N) (group='Gamma') or Gamma_0(N) (group='Gamma0')."""
    if N < 1:
        raise ValueError("N must be positive")
    out = []
    if group == "Gamma":
        for ell in range(0, N // 2 + 1):
            if 0 < ell < N / 2:
                ms = range(1, N + 1)
            elif ell == 0 or 2 * ell == N:
                ms = range((N + 1) // 2, N + 1)
            else:
                continue
            for m in ms:
                if gcd(gcd(ell, m), N) != 1:
                    continue
                out.append(_small_lift(ell, m, N))
    elif group == "Gamma0":
        for m in range(1, N + 1):
            if N % m:
                continue
            g = gcd(m, N // m)
            for ell in range(g):
                if m == N:
                    out.append(Cusp(1, 0))
                    continue
                al = ell
                while gcd(al, m) != 1:
                    al += g
                out.append(Cusp(al, m))
    else:
        raise ValueError(f"unknown group {group!r}")
    return out


def gamma0_width(cusp: Cusp, N: int) -> int:
    if cusp.beta == 0:
        return 1
    return N // gcd(cusp.beta * cusp.beta, N)


# function id -> (base series name or callable, power, kind)
FUNCTIONS = {
    "A^3": ("A", 3),
    "B^3": ("B", 3),
    "C": ("C", 1),
    "D^2": ("D", 2),
    "X^3": ("X", 3),
    "Y^2": ("Y", 2),
    "X+1": ("X+1", 1),
}


def transported_series(fn_id: str, cusp, nterms: int = 24) -> Laurent:
    if fn_id not in FUNCTIONS:
        raise ValueError(f"unknown function id {fn_id!r}")
    cusp = Cusp.parse(cusp)
    gamma = cusp.matrix()
    base, power = FUNCTIONS[fn_id]
    if base == "X":
        s = X_series(nterms, gamma)
    elif base == "Y":
        s = Y_series(nterms, gamma)
    elif base == "X+1":
        s = X_series(nterms, gamma) + 1
    else:
        s = form_series(base, nterms, gamma)
    return s ** power if power > 1 else s


def order_at_cusp(fn_id: str, cusp) -> Fraction:
    """Order of a catalogued function at a cusp.

    A^3, B^3, C, D^2, X^3, Y^2 are measured on X_0(6) (local parameter of the
    Gamma_0(6) width); X+1 is measured on X(6) (width 6).
    """
    cusp = Cusp.parse(cusp)
    s = transported_series(fn_id, cusp)
    v = s.valuation()
    if fn_id == "X+1":
        return Fraction(v)
    return Fraction(v * gamma0_width(cusp, 6), 6)


def leading_coefficient(fn_id: str, cusp) -> QOmega:
    return transported_series(fn_id, cusp).leading()


def weight_of(fn_id: str) -> int:
    return {"A^3": 6, "B^3": 6, "C": 2, "D^2": 4, "X^3": 0, "Y^2": 0, "X+1": 0}[fn_id]
