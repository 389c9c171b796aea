"""Exact arithmetic in Z[w], w = exp(2*pi*i/3), and cubic residue characters.

Elements are stored as pairs (a, b) meaning a + b*w, with w^2 = -1 - w.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

from sympy import factorint


@dataclass(frozen=True, order=True)
class EisensteinInt:
    a: int
    b: int = 0

    def __add__(self, other):
        other = as_eis(other)
        return EisensteinInt(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_eis(other)
        return EisensteinInt(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return as_eis(other) - self

    def __neg__(self):
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other):
        other = as_eis(other)
        a, b, c, d = self.a, self.b, other.a, other.b
        # (a + bw)(c + dw) = ac + (ad + bc)w + bd w^2, and w^2 = -1 - w
        return EisensteinInt(a * c - b * d, a * d + b * c - b * d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined in Z[w]")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "EisensteinInt":
        # conj(w) = w^2 = -1 - w
        return EisensteinInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        return norm(self)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return norm(self) == 1

    def divides(self, other) -> bool:
        return exact_quotient(other, self) is not None

    def reduce_mod(self, m: int) -> "EisensteinInt":
        """Coordinates reduced into [0, m)."""
        return EisensteinInt(self.a % m, self.b % m)

    def congruent(self, other, m: int) -> bool:
        d = self - as_eis(other)
        return d.a % m == 0 and d.b % m == 0

    def to_complex(self) -> complex:
        return complex(self.a - self.b / 2, self.b * 3 ** 0.5 / 2)

    def __repr__(self):
        return f"EisensteinInt({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}w"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}w"


def as_eis(x) -> EisensteinInt:
    if isinstance(x, EisensteinInt):
        return x
    if isinstance(x, int):
        return EisensteinInt(x, 0)
    raise TypeError(f"cannot interpret {x!r} as an Eisenstein integer")


ZERO = EisensteinInt(0, 0)
ONE = EisensteinInt(1, 0)
OMEGA = EisensteinInt(0, 1)
OMEGA2 = EisensteinInt(-1, -1)
ROOTS_OF_UNITY = (ONE, OMEGA, OMEGA2)
UNITS = (ONE, -OMEGA2, OMEGA, -ONE, OMEGA2, -OMEGA)  # powers of -w^2 = 1 + w
RAMIFIED_PRIME = EisensteinInt(1, -1)  # 1 - w, norm 3


def norm(x: EisensteinInt) -> int:
    """a^2 - ab + b^2."""
    return x.a * x.a - x.a * x.b + x.b * x.b


def exact_quotient(x, y) -> EisensteinInt | None:
    """x / y if it lies in Z[w], else None."""
    x, y = as_eis(x), as_eis(y)
    if y.is_zero():
        raise ZeroDivisionError("division by zero in Z[w]")
    num = x * y.conj()
    m = norm(y)
    if num.a % m or num.b % m:
        return None
    return EisensteinInt(num.a // m, num.b // m)


def root_of_unity(k: int) -> EisensteinInt:
    return ROOTS_OF_UNITY[k % 3]


def root_exponent(z: EisensteinInt) -> int:
    """k with z = w^k for a cube root of unity z."""
    try:
        return ROOTS_OF_UNITY.index(z)
    except ValueError:
        raise ValueError(f"{z} is not a cube root of unity") from None


@lru_cache(maxsize=None)
def split_prime(p: int) -> EisensteinInt:
    """A prime pi = a + bw of norm p for a rational prime p = 1 mod 3.

    Exhaustive search in increasing a, then b; fine for the sizes used here.
    """
    if p % 3 != 1:
        raise ValueError(f"{p} does not split in Z[w]")
    a = 1
    while True:
        for b in range(0, a + 1):
            if a * a - a * b + b * b == p:
                return EisensteinInt(a, b)
        a += 1


def _valuation(x: EisensteinInt, pi: EisensteinInt) -> tuple[int, EisensteinInt]:
    e = 0
    while True:
        q = exact_quotient(x, pi)
        if q is None:
            return e, x
        x, e = q, e + 1


def factor(x: EisensteinInt) -> tuple[EisensteinInt, list[tuple[EisensteinInt, int]]]:
    """Return (unit, [(prime, exponent), ...]) with x = unit * prod prime^exponent.

    Primes are 1 - w above 3, the rational prime q for q = 2 mod 3, and
    split_prime(p) or its conjugate for p = 1 mod 3.
    """
    x = as_eis(x)
    if x.is_zero():
        raise ValueError("cannot factor zero")
    factors = []
    rest = x
    for p in sorted(factorint(norm(x))):
        if p == 3:
            candidates = [RAMIFIED_PRIME]
        elif p % 3 == 2:
            candidates = [EisensteinInt(p, 0)]
        else:
            pi = split_prime(p)
            candidates = [pi, pi.conj()]
        for pi in candidates:
            e, rest = _valuation(rest, pi)
            if e:
                factors.append((pi, e))
    if not rest.is_unit():
        raise ArithmeticError(f"factorisation of {x} left a non-unit {rest}")
    return rest, factors


def primary_associate(x: EisensteinInt) -> EisensteinInt:
    """The associate of x congruent to -1 (mod 3).

    Requires 3 not dividing norm(x). Under this convention cubic reciprocity
    reads (x/y) = (y/x) for primary primes of distinct norm.
    """
    if norm(x) % 3 == 0:
        raise ValueError("no primary associate for elements divisible by 1 - w")
    for u in UNITS:
        y = u * x
        if y.a % 3 == 2 and y.b % 3 == 0:
            return y
    raise ArithmeticError("unreachable: some associate is +-1 mod 3")


def _fp2_pow(x: EisensteinInt, e: int, p: int) -> EisensteinInt:
    result, base = ONE, x.reduce_mod(p)
    while e:
        if e & 1:
            result = (result * base).reduce_mod(p)
        base = (base * base).reduce_mod(p)
        e >>= 1
    return result


def _symbol_exponent(x: EisensteinInt, lam: EisensteinInt) -> int:
    """k with (x/lam)_3 = w^k."""
    N = norm(lam)
    if N % 3 == 0 or N <= 1:
        raise ValueError(f"{lam} is not a prime coprime to 3")
    unit, fac = factor(lam)
    if len(fac) != 1 or fac[0][1] != 1:
        raise ValueError(f"{lam} is not prime")
    if lam.divides(x):
        raise ValueError(f"{lam} divides {x}")
    p = N if factorint(N) == {N: 1} else None
    if p is not None:
        # residue field F_p, w maps to the root r of r^2 + r + 1 with lam -> 0
        r = (-lam.a * pow(lam.b, -1, p)) % p
        v = pow((x.a + x.b * r) % p, (p - 1) // 3, p)
        for k in range(3):
            if pow(r, k, p) == v:
                return k
        raise ArithmeticError("power residue is not a cube root of unity")
    q = abs(lam.a) if lam.b == 0 else None
    if q is None:
        # associates of a rational prime q = 2 mod 3 that are not real
        q = int(round(N ** 0.5))
    v = _fp2_pow(x, (q * q - 1) // 3, q)
    for k in range(3):
        if v == root_of_unity(k).reduce_mod(q):
            return k
    raise ArithmeticError("power residue is not a cube root of unity")


def cubic_residue_symbol(x, lam) -> EisensteinInt:
    """(x/lam)_3 as one of 1, w, w^2."""
    return root_of_unity(_symbol_exponent(as_eis(x), as_eis(lam)))


@dataclass(frozen=True)
class CubicCharacter:
    """x -> prod_i (x/lam_i)_3^{c_i} over a factorisation of n in Z[w].

    For a split p the two conjugate primes both occur with the exponent of p,
    so evaluation is done per rational prime.
    """

    n: int
    modulus_primes: tuple = field(default=())

    @classmethod
    def for_n(cls, n: int) -> "CubicCharacter":
        if n < 1 or n % 3 == 0:
            raise ValueError("n must be a positive integer prime to 3")
        primes = []
        for p, c in sorted(factorint(n).items()):
            if p % 3 == 2:
                primes.append((EisensteinInt(p, 0), c))
            else:
                pi = split_prime(p)
                primes.append((pi, c))
                primes.append((pi.conj(), c))
        return cls(n, tuple(primes))

    def exponent(self, x) -> int:
        x = as_eis(x)
        if gcd(norm(x), self.n) != 1:
            raise ValueError(f"{x} is not coprime to {self.n}")
        return sum(c * _symbol_exponent(x, lam) for lam, c in self.modulus_primes) % 3

    def __call__(self, x) -> EisensteinInt:
        return root_of_unity(self.exponent(x))


@lru_cache(maxsize=None)
def _character(n: int) -> CubicCharacter:
    return CubicCharacter.for_n(n)


def chi_exponent(x, n: int) -> int:
    """k with chi_n(x) = w^k."""
    return _character(n).exponent(x)


def chi_n(x, n: int) -> EisensteinInt:
    """The cubic character attached to n evaluated at x."""
    x = as_eis(x)
    if gcd(norm(x), 3 * n) != 1:
        raise ValueError(f"{x} is not coprime to 3*{n}")
    return _character(n)(x)


def legendre3(p: int) -> int:
    """(p/3) for p prime to 3."""
    r = p % 3
    if r == 0:
        raise ValueError("p must be prime to 3")
    return 1 if r == 1 else -1


def f_of_n(n: int) -> int:
    """n * prod_{p | n} (1 - (p/3)/p)."""
    if n < 1 or n % 3 == 0:
        raise ValueError("n must be a positive integer prime to 3")
    value = n
    for p in factorint(n):
        value = value // p * (p - legendre3(p))
    return value


def radical(n: int) -> int:
    r = 1
    for p in factorint(n):
        r *= p
    return r


def admissibility_reason(n: int) -> str | None:
    """None if n satisfies the hypotheses on n, else a short reason string."""
    if not isinstance(n, int) or n < 2:
        return "n must be an integer >= 2"
    if gcd(n, 6) != 1:
        return f"{n} is not coprime to 6"
    if n % 9 in (1, 8):
        return f"{n} = {'+' if n % 9 == 1 else '-'}1 (mod 9)"
    if any(e % 3 == 0 for e in factorint(n).values()):
        return f"{n} has a prime exponent divisible by 3"
    return None


def check_admissible(n: int) -> None:
    reason = admissibility_reason(n)
    if reason is not None:
        raise ValueError(reason)


def mod2_class(x: EisensteinInt) -> int | None:
    """i with x = w^i (mod 2), or None when 2 | x."""
    return {(1, 0): 0, (0, 1): 1, (1, 1): 2}.get((x.a % 2, x.b % 2))


def mod3_class(x: EisensteinInt) -> int | None:
    """j with x = w^j (mod 3), or None otherwise."""
    r = (x.a % 3, x.b % 3)
    for j in range(3):
        u = root_of_unity(j)
        if (u.a % 3, u.b % 3) == r:
            return j
    return None


def _units_mod(n: int) -> list[int]:
    return [k for k in range(1, max(n, 2)) if gcd(k, n) == 1]


@dataclass(frozen=True)
class ConjugateSet:
    """Representatives A_i of (O/n)^x / (Z/n)^x and the subsets B_i."""

    n: int
    A: tuple
    B: tuple

    def all_B(self) -> list[EisensteinInt]:
        return [x for Bi in self.B for x in Bi]


@lru_cache(maxsize=None)
def enumerate_conjugates(n: int, strict: bool = True) -> ConjugateSet:
    """Enumerate A_i and B_i in the box {a + bw : 0 <= a, b < 6n}.

    A_i holds one element per class of (O/n)^x modulo scalars, chosen with
    x = w^i (mod 2) and x = 1 (mod 3); the representative is the first hit in
    lexicographic (a, b) order. B_i keeps those with chi_n(x) = 1.

    With strict=False only gcd(n, 6) = 1 and cube-free exponents are required,
    which is all the counting lemmas need.
    """
    if strict:
        check_admissible(n)
    elif gcd(n, 6) != 1 or n < 2 or any(e % 3 == 0 for e in factorint(n).values()):
        raise ValueError(f"{n} must be >= 2, coprime to 6, with exponents prime to 3")
    scalars = _units_mod(n)
    seen = [dict(), dict(), dict()]
    for a in range(1, 6 * n, 3):
        for b in range(0, 6 * n, 3):
            x = EisensteinInt(a, b)
            i = mod2_class(x)
            if i is None or gcd(norm(x), n) != 1:
                continue
            key = min(((k * a) % n, (k * b) % n) for k in scalars)
            seen[i].setdefault(key, x)
    A = tuple(tuple(sorted(d.values())) for d in seen)
    B = tuple(tuple(x for x in Ai if chi_exponent(x, n) == 0) for Ai in A)
    fn = f_of_n(n)
    if any(len(Ai) != fn for Ai in A) or any(3 * len(Bi) != fn for Bi in B):
        raise ArithmeticError(f"conjugate enumeration for n={n} has the wrong size")
    return ConjugateSet(n, A, B)


@lru_cache(maxsize=None)
def galois_representatives(n: int) -> tuple[EisensteinInt, ...]:
    """Representatives of (O/n)^x modulo scalars and powers of w, each = 1 (mod 6).

    These index Gal(R_n/k); there are f(n)/3 of them.
    """
    check_admissible(n)
    scalars = _units_mod(n)
    reps = {}
    for a in range(1, 6 * n, 6):
        for b in range(0, 6 * n, 6):
            x = EisensteinInt(a, b)
            if gcd(norm(x), n) != 1:
                continue
            orbit = []
            for k in scalars:
                for u in ROOTS_OF_UNITY:
                    z = u * EisensteinInt(k * a, k * b)
                    orbit.append((z.a % n, z.b % n))
            reps.setdefault(min(orbit), x)
    out = tuple(sorted(reps.values()))
    if 3 * len(out) != f_of_n(n):
        raise ArithmeticError(f"Galois representatives for n={n} have the wrong count")
    return out
