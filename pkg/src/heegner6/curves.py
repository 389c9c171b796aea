"""Elliptic curves y^2 = x^3 + D, X^3 + Y^3 = N and A X^3 + B Y^3 = 1.

Points are projective triples over either exact rationals (``Fraction``) or
mpmath complex numbers.  Only the Weierstrass family carries its own
chord-tangent law; the two cubic families borrow it through the explicit
isomorphisms below, so there is a single group-law code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

NUMERIC_GUARD = 40


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def _is_zero(v) -> bool:
    return v == 0


def _tol():
    return mp.mpf(2) ** (-(mp.mp.prec - NUMERIC_GUARD))


def close(a, b) -> bool:
    """Equality for exact values, relative closeness at the working precision otherwise."""
    if _is_exact(a) and _is_exact(b):
        return a == b
    scale = max(mp.mpf(1), abs(mp.mpc(a)), abs(mp.mpc(b)))
    return abs(mp.mpc(a) - mp.mpc(b)) <= _tol() * scale


def _cbrt(v):
    """Real cube root for real input (exact when v is a rational cube)."""
    if _is_exact(v):
        f = Fraction(v)
        try:
            return Fraction(_icbrt(f.numerator), _icbrt(f.denominator))
        except ValueError:
            return mp.cbrt(mp.mpf(f.numerator) / f.denominator)
    return mp.cbrt(v)


def _icbrt(m: int) -> int:
    s = -1 if m < 0 else 1
    m = abs(m)
    r = round(m ** (1 / 3))
    for c in (r - 1, r, r + 1):
        if c ** 3 == m:
            return s * c
    raise ValueError("not a cube")


@dataclass(frozen=True)
class CurveId:
    """family 'E' (y^2 = x^3 + D), 'Et' (X^3 + Y^3 = N) or 'C' (A X^3 + B Y^3 = 1)."""

    family: str
    params: tuple

    def residual(self, X, Y, Z):
        if self.family == "E":
            (D,) = self.params
            return Y * Y * Z - X ** 3 - D * Z ** 3
        if self.family == "Et":
            (N,) = self.params
            return X ** 3 + Y ** 3 - N * Z ** 3
        if self.family == "C":
            A, B = self.params
            return A * X ** 3 + B * Y ** 3 - Z ** 3
        raise ValueError(f"unknown family {self.family}")

    def identity(self) -> "ProjPoint":
        if self.family == "E":
            return ProjPoint(0, 1, 0, self)
        if self.family == "Et":
            return ProjPoint(1, -1, 0, self)
        A, B = self.params
        return ProjPoint(1 / _cbrt(A), -1 / _cbrt(B), 0, self)

    def contains(self, P: "ProjPoint") -> bool:
        if P.curve != self:
            return False
        r = self.residual(P.X, P.Y, P.Z)
        if all(_is_exact(v) for v in (P.X, P.Y, P.Z)) and all(_is_exact(v) for v in self.params):
            return r == 0
        size = max(mp.mpf(1), *(abs(mp.mpc(v)) for v in (P.X, P.Y, P.Z)))
        return abs(mp.mpc(r)) <= _tol() * size ** 3 * max(mp.mpf(1), *(abs(mp.mpc(p)) for p in self.params))

    def __str__(self):
        if self.family == "E":
            return f"y^2 = x^3 + {self.params[0]}"
        if self.family == "Et":
            return f"X^3 + Y^3 = {self.params[0]}"
        return f"{self.params[0]} X^3 + {self.params[1]} Y^3 = 1"


def E(D) -> CurveId:
    return CurveId("E", (D,))


def Etilde(N) -> CurveId:
    return CurveId("Et", (N,))


def Ccurve(A, B) -> CurveId:
    return CurveId("C", (A, B))


@dataclass(frozen=True)
class ProjPoint:
    X: object
    Y: object
    Z: object
    curve: CurveId

    @classmethod
    def affine(cls, x, y, curve: CurveId) -> "ProjPoint":
        return cls(x, y, 1, curve)

    @classmethod
    def identity(cls, curve: CurveId) -> "ProjPoint":
        return curve.identity()

    @property
    def is_affine(self) -> bool:
        return not _is_zero(self.Z)

    @property
    def x(self):
        if not self.is_affine:
            raise ValueError("point at infinity has no affine coordinates")
        return self.X / self.Z if self.Z != 1 else self.X

    @property
    def y(self):
        if not self.is_affine:
            raise ValueError("point at infinity has no affine coordinates")
        return self.Y / self.Z if self.Z != 1 else self.Y

    def is_identity(self) -> bool:
        if self.is_affine:
            return False
        fam = self.curve.family
        if fam == "E":
            return True
        if fam == "Et":
            return close(self.X + self.Y, 0) if not _is_exact(self.X) else self.X + self.Y == 0
        ident = self.curve.identity()
        # compare ratios X/Y
        return close(self.X * ident.Y, self.Y * ident.X)

    def normalized(self) -> "ProjPoint":
        if self.is_affine:
            return ProjPoint(self.x, self.y, 1, self.curve)
        if self.is_identity():
            return self.curve.identity()
        if not _is_zero(self.X):
            return ProjPoint(1, self.Y / self.X, 0, self.curve)
        return ProjPoint(0, 1, 0, self.curve)

    def conjugate(self) -> "ProjPoint":
        c = lambda v: v if _is_exact(v) else mp.conj(v)
        return ProjPoint(c(self.X), c(self.Y), c(self.Z), self.curve)

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        return add(self, neg(other))

    def __rmul__(self, k: int):
        return mul(k, self)

    def equals(self, other: "ProjPoint") -> bool:
        if self.curve != other.curve:
            return False
        a, b = self.normalized(), other.normalized()
        return all(close(u, v) for u, v in ((a.X, b.X), (a.Y, b.Y), (a.Z, b.Z)))

    def __str__(self):
        if self.is_identity():
            return "O"
        if self.is_affine:
            return f"({self.x}, {self.y})"
        return f"[{self.X}:{self.Y}:{self.Z}]"


class CurveMismatch(ValueError):
    pass


# ------------------------------------------------------------ Weierstrass law

def _e_add(P: ProjPoint, Q: ProjPoint) -> ProjPoint:
    curve = P.curve
    if P.is_identity():
        return Q
    if Q.is_identity():
        return P
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if close(x1, x2):
        if close(y1, -y2):
            return curve.identity()
        lam = 3 * x1 * x1 / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    y3 = lam * (x1 - x3) - y1
    return ProjPoint(x3, y3, 1, curve)


def _e_neg(P: ProjPoint) -> ProjPoint:
    if P.is_identity():
        return P
    return ProjPoint(P.x, -P.y, 1, P.curve)


# ------------------------------------------------------------ transports

def phi_N(P: ProjPoint, N=None) -> ProjPoint:
    """E_{-27N^2} -> Et_{2N}: (x, y) -> ((9N + y)/3x, (9N - y)/3x)."""
    if P.curve.family != "E":
        raise CurveMismatch("phi_N expects a point on a Weierstrass curve")
    if N is None:
        N = _n_from_d(P.curve.params[0])
    X, Y, Z = P.X, P.Y, P.Z
    return ProjPoint(9 * N * Z + Y, 9 * N * Z - Y, 3 * X, Etilde(2 * N)).normalized()


def phi_N_inverse(P: ProjPoint, N=None) -> ProjPoint:
    """Et_{2N} -> E_{-27N^2}: (X, Y) -> (6N/(X + Y), 9N(X - Y)/(X + Y))."""
    if P.curve.family != "Et":
        raise CurveMismatch("phi_N_inverse expects a point on X^3 + Y^3 = 2N")
    if N is None:
        N = P.curve.params[0] / 2 if not _is_exact(P.curve.params[0]) else Fraction(P.curve.params[0], 2)
        if _is_exact(N) and N.denominator == 1:
            N = int(N)
    target = E(-27 * N * N)
    if P.is_identity():
        return target.identity()
    X, Y, Z = P.X, P.Y, P.Z
    return ProjPoint(6 * N * Z, 9 * N * (X - Y), X + Y, target).normalized()


def _n_from_d(D):
    # D = -27 N^2 with N > 0
    if _is_exact(D):
        q = Fraction(-D, 27)
        num, den = _isqrt_exact(q.numerator), _isqrt_exact(q.denominator)
        return Fraction(num, den) if den != 1 else num
    return mp.sqrt(-D / 27)


def _isqrt_exact(m: int) -> int:
    from math import isqrt

    r = isqrt(m)
    if r * r != m:
        raise ValueError("curve is not of the form E_{-27N^2}")
    return r


def _c_to_et2(P: ProjPoint) -> ProjPoint:
    A, B = P.curve.params
    a, b = _cbrt(2 * A), _cbrt(2 * B)
    return ProjPoint(a * P.X, b * P.Y, P.Z, Etilde(2))


def _et2_to_c(P: ProjPoint, curve: CurveId) -> ProjPoint:
    A, B = curve.params
    a, b = _cbrt(2 * A), _cbrt(2 * B)
    return ProjPoint(P.X / a, P.Y / b, P.Z, curve).normalized()


def add(P: ProjPoint, Q: ProjPoint) -> ProjPoint:
    if P.curve != Q.curve:
        raise CurveMismatch(f"cannot add points on {P.curve} and {Q.curve}")
    fam = P.curve.family
    if fam == "E":
        return _e_add(P, Q)
    if fam == "Et":
        R = _e_add(phi_N_inverse(P), phi_N_inverse(Q))
        return phi_N(R)
    R = add(_c_to_et2(P), _c_to_et2(Q))
    return _et2_to_c(R, P.curve)


def neg(P: ProjPoint) -> ProjPoint:
    fam = P.curve.family
    if fam == "E":
        return _e_neg(P)
    if fam == "Et":
        return phi_N(_e_neg(phi_N_inverse(P)))
    return _et2_to_c(neg(_c_to_et2(P)), P.curve)


def mul(k: int, P: ProjPoint) -> ProjPoint:
    if k < 0:
        return mul(-k, neg(P))
    result = P.curve.identity()
    base = P
    while k:
        if k & 1:
            result = add(result, base)
        k >>= 1
        if k:
            base = add(base, base)
    return result


# ------------------------------------------------------------ chain maps

def sextic_twist(P: ProjPoint, t, target_D=None) -> ProjPoint:
    """E_D -> E_{D t^6}, (x, y) -> (t^2 x, t^3 y)."""
    if P.curve.family != "E":
        raise CurveMismatch("sextic twist acts on Weierstrass curves")
    if _is_zero(t):
        raise ValueError("twist parameter must be nonzero")
    D = P.curve.params[0]
    newD = D * t ** 6
    if target_D is not None:
        if not close(newD, target_D):
            raise ValueError(f"twist by {t} does not map onto E_{target_D}")
        newD = target_D
    curve = E(newD)
    if P.is_identity():
        return curve.identity()
    return ProjPoint(t * t * P.x, t ** 3 * P.y, 1, curve)


def g_map(P: ProjPoint, n: int) -> ProjPoint:
    """Et_2 -> C_{n^2, 2}: (x, y) -> (x / cbrt(2 n^2), y / cbrt(4))."""
    if P.curve != Etilde(2):
        raise CurveMismatch("g_map expects a point on X^3 + Y^3 = 2")
    c1, c2 = _cbrt(2 * n * n), _cbrt(4)
    return ProjPoint(P.X / c1, P.Y / c2, P.Z, Ccurve(n * n, 2)).normalized()


def h_map(P: ProjPoint, n: int) -> ProjPoint:
    """Et_2 -> C_{1, 2 n^2}: (x, y) -> (x / cbrt(2), y / cbrt(4 n^2))."""
    if P.curve != Etilde(2):
        raise CurveMismatch("h_map expects a point on X^3 + Y^3 = 2")
    c1, c2 = _cbrt(2), _cbrt(4 * n * n)
    return ProjPoint(P.X / c1, P.Y / c2, P.Z, Ccurve(1, 2 * n * n)).normalized()


class DegenerateMap(ValueError):
    """The point lies on a locus excluded by a map's formula."""


def lambda_AB(P: ProjPoint) -> ProjPoint:
    """C_{A,B} -> X^3 + Y^3 = AB, via the classical U, V formulas."""
    if P.curve.family != "C":
        raise CurveMismatch("lambda_AB expects a point on A X^3 + B Y^3 = 1")
    A, B = P.curve.params
    target = Etilde(A * B)
    if P.is_identity():
        return target.identity()
    if not P.is_affine:
        raise DegenerateMap("point at infinity other than the identity")
    x, y = P.x, P.y
    if _is_zero(x) or _is_zero(y):
        raise DegenerateMap("lambda_AB is undefined where xy = 0")
    t = A * B * x ** 3 * y ** 3
    if close(t, 1):
        raise DegenerateMap("lambda_AB is undefined where AB x^3 y^3 = 1")
    U = 3 * A * B * x * x * y * y / (1 - t)
    V = (A * x ** 3 - B * y ** 3) * (2 + t) / (3 * x * y * (1 - t))
    return ProjPoint((U + V) / 2, (U - V) / 2, 1, target)


def on_curve(P: ProjPoint) -> bool:
    return P.curve.contains(P)


def membership_residual(P: ProjPoint):
    """|curve equation| at the normalized point (0 for the identity)."""
    Q = P.normalized()
    return abs(mp.mpc(Q.curve.residual(Q.X, Q.Y, Q.Z)))
