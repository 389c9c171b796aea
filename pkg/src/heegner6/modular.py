"""Numerical evaluation of level-6 division values and the parametrization phi = (X, Y).

Every evaluation reduces tau to the standard fundamental domain first and
transports the division-value indices along the reducing matrix, so the
Fourier series always run with |q| small.  Values are mpmath ``mpc`` numbers;
each public function takes the target precision in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .qseries import COMBINATIONS, Cusp

DEFAULT_GUARD = 16


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be certified at the requested precision."""


@dataclass(frozen=True)
class QuadPoint:
    """Exact point r + s*sqrt(-3) of the upper half plane (s > 0)."""

    r: Fraction
    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "s", Fraction(self.s))
        if self.s <= 0:
            raise ValueError("point must lie in the upper half plane")

    @classmethod
    def omega_multiple(cls, n) -> "QuadPoint":
        """n*w = n(-1 + sqrt(-3))/2."""
        return cls(Fraction(-n, 2), Fraction(n, 2))

    def abs2(self) -> Fraction:
        return self.r * self.r + 3 * self.s * self.s

    def to_mpc(self) -> mp.mpc:
        return mp.mpc(mp.mpf(self.r.numerator) / self.r.denominator,
                      mp.sqrt(3) * self.s.numerator / self.s.denominator)

    def mobius(self, m) -> "QuadPoint":
        """(A tau + B)/(C tau + D) for a rational matrix (A, B, C, D) of positive determinant."""
        A, B, C, D = (Fraction(v) for v in m)
        p1, p2 = A * self.r + B, A * self.s
        d1, d2 = C * self.r + D, C * self.s
        den = d1 * d1 + 3 * d2 * d2
        return QuadPoint((p1 * d1 + 3 * p2 * d2) / den, (p2 * d1 - p1 * d2) / den)

    def conj_reflect(self) -> "QuadPoint":
        """tau -> -conj(tau)."""
        return QuadPoint(-self.r, self.s)


@dataclass(frozen=True)
class UpperHalfPoint:
    """A point of the upper half plane, numeric or exact."""

    tau: object  # mp.mpc or QuadPoint

    def __post_init__(self):
        if isinstance(self.tau, QuadPoint):
            return
        t = mp.mpc(self.tau)
        if t.imag <= 0:
            raise ValueError("point must lie in the upper half plane")
        object.__setattr__(self, "tau", t)

    @property
    def exact(self) -> bool:
        return isinstance(self.tau, QuadPoint)

    def value(self) -> mp.mpc:
        return self.tau.to_mpc() if self.exact else self.tau


def as_point(tau) -> UpperHalfPoint:
    if isinstance(tau, UpperHalfPoint):
        return tau
    return UpperHalfPoint(tau)


@dataclass(frozen=True)
class ReductionResult:
    """tau = gamma * tau0 with tau0 in the standard fundamental domain."""

    tau0: UpperHalfPoint
    gamma: tuple[int, int, int, int]


def _mat_mul(g, h):
    a, b, c, d = g
    e, f, g2, h2 = h
    return (a * e + b * g2, a * f + b * h2, c * e + d * g2, c * f + d * h2)


def sl2_apply(g, tau: mp.mpc) -> mp.mpc:
    a, b, c, d = g
    return (a * tau + b) / (c * tau + d)


def _round_half_down(x: Fraction) -> int:
    # nearest integer, ties resolved towards -infinity so that re(tau0) lands in (-1/2, 1/2]
    k = math.floor(x)
    return k + 1 if x - k > Fraction(1, 2) else k


def reduce_to_fundamental_domain(tau) -> ReductionResult:
    """Find gamma in SL2(Z) and tau0 with |re tau0| <= 1/2, |tau0| >= 1 and tau = gamma tau0.

    Exact points are reduced in exact arithmetic; numeric points at the
    current mpmath precision.
    """
    pt = as_point(tau)
    g = (1, 0, 0, 1)
    if pt.exact:
        t = pt.tau
        while True:
            k = _round_half_down(t.r)
            t = QuadPoint(t.r - k, t.s)
            g = _mat_mul(g, (1, k, 0, 1))
            if t.abs2() < 1:
                t = QuadPoint(-t.r / t.abs2(), t.s / t.abs2())
                g = _mat_mul(g, (0, -1, 1, 0))
            else:
                break
        return ReductionResult(UpperHalfPoint(t), g)
    t = pt.tau
    while True:
        k = int(mp.floor(t.real + mp.mpf(1) / 2))
        t = t - k
        g = _mat_mul(g, (1, k, 0, 1))
        if abs(t) < 1:
            t = -1 / t
            g = _mat_mul(g, (0, -1, 1, 0))
        else:
            break
    return ReductionResult(UpperHalfPoint(t), g)


def transform_index(alpha: int, beta: int, gamma, N: int = 6):
    """Index permutation e_{alpha,beta}(gamma tau) = (c tau + d)^2 e_{a alpha + c beta, b alpha + d beta}(tau).

    Returns ((alpha', beta'), (c, d)); the second entry records the weight factor.
    """
    a, b, c, d = gamma
    return ((a * alpha + c * beta) % N, (b * alpha + d * beta) % N), (c, d)


def normalize_index(alpha: int, beta: int, N: int) -> tuple[int, int]:
    alpha, beta = alpha % N, beta % N
    if (alpha, beta) == (0, 0):
        raise ValueError("division value index must be nonzero mod N")
    if 2 * alpha > N or (2 * alpha == N and 2 * beta > N) or (alpha == 0 and 2 * beta > N):
        alpha, beta = (-alpha) % N, (-beta) % N
    return alpha, beta


def _extra_bits(im_tau0) -> int:
    # the forms A, B, C, D vanish to order <= 4 in q_6 at cusps; near a cusp the
    # combinations lose about 4*2*pi*im/6/log(2) bits to cancellation
    return int(6.1 * float(im_tau0)) + 8


def division_value(N: int, alpha: int, beta: int, tau0, prec: int, guard: int = DEFAULT_GUARD) -> mp.mpc:
    """e^(N)_{alpha,beta}(tau0)/(2 pi i)^2 from its Fourier expansion.

    tau0 must satisfy im(tau0) >= sqrt(3)/2 (reduce first).  The series is
    truncated once a geometric tail bound drops below 2^-(prec+guard).
    """
    pt = as_point(tau0)
    alpha, beta = normalize_index(alpha, beta, N)
    with mp.workprec(prec + guard + 8):
        t = pt.value()
        if t.imag < mp.sqrt(3) / 2 - mp.mpf(2) ** (-prec // 2):
            raise ValueError("division_value expects a reduced point (im >= sqrt(3)/2)")
        eps = mp.mpf(2) ** (-(prec + guard))
        q = mp.exp(2j * mp.pi * t / N)
        zeta = mp.expjpi(mp.mpf(2 * beta) / N)
        T = zeta * q ** alpha
        Xq = q ** N
        rX = abs(Xq)
        c = abs(q) ** (-alpha)
        val = mp.mpf(1) / 12 + T / (1 - T) ** 2
        Tinv = 1 / T
        Xm = mp.mpf(1)
        m = 0
        while True:
            m += 1
            Xm = Xm * Xq
            t1, t2 = T * Xm, Tinv * Xm
            val += t1 / (1 - t1) ** 2 + t2 / (1 - t2) ** 2 - 2 * Xm / (1 - Xm) ** 2
            rm = rX ** (m + 1)
            tail = 4 * c * rm / ((1 - rX) * (1 - c * rm) ** 2)
            if c * rm < mp.mpf(1) / 2 and tail < eps:
                break
        return +val


def _frac_mpf(x: Fraction):
    return mp.mpf(x.numerator) / x.denominator


def _transported_values(tau0: UpperHalfPoint, g, prec: int, guard: int, names) -> tuple[dict, int]:
    """Values of the named forms at g*tau0, with the weight factor dropped.

    Each entry is (value, largest |division value| used), the latter
    measuring cancellation inside the linear combination.
    """
    extra = _extra_bits(tau0.value().imag)
    wp = prec + guard + extra
    out, cache = {}, {}
    with mp.workprec(wp):
        w = mp.expjpi(mp.mpf(2) / 3)
        for name in names:
            total, scale = mp.mpc(0), mp.mpf(0)
            for coef, (al, be) in COMBINATIONS[name]:
                (a2, b2), _ = transform_index(al, be, g)
                key = normalize_index(a2, b2, 6)
                if key not in cache:
                    cache[key] = division_value(6, key[0], key[1], tau0, wp, guard)
                v = cache[key]
                total += (_frac_mpf(coef.a) + _frac_mpf(coef.b) * w) * v
                scale = max(scale, abs(v))
            out[name] = (total, scale)
    return out, wp


def _values_at(tau, prec: int, guard: int, names) -> tuple[dict, int]:
    pt = as_point(tau)
    if pt.exact:
        red = reduce_to_fundamental_domain(pt)
    else:
        with mp.workprec(prec + guard + 32):
            red = reduce_to_fundamental_domain(pt)
    return _transported_values(red.tau0, red.gamma, prec, guard, names)


def _ratio(num, den, wp, prec):
    (a, sa), (b, sb) = num, den
    # relative size of the combination compared to its terms measures the cancellation
    if b == 0 or abs(b) < sb * mp.mpf(2) ** (-(wp - prec - 4)):
        raise PrecisionError("denominator vanishes at working precision")
    return a / b


def _xy_from_values(vals, wp, prec, want=("X", "Y")):
    with mp.workprec(wp):
        w = mp.expjpi(mp.mpf(2) / 3)
        out = []
        if "X" in want:
            out.append(-w * w * _ratio(vals["A"], vals["B"], wp, prec))
        if "Y" in want:
            out.append(-3 * _ratio(vals["C"], vals["D"], wp, prec))
    with mp.workprec(prec):
        return tuple(+v for v in out)


def eval_XY(tau, prec: int, guard: int = DEFAULT_GUARD) -> tuple[mp.mpc, mp.mpc]:
    """(X(tau), Y(tau)) at the requested precision."""
    vals, wp = _values_at(tau, prec, guard, ("A", "B", "C", "D"))
    return _xy_from_values(vals, wp, prec)


def eval_X(tau, prec: int, guard: int = DEFAULT_GUARD) -> mp.mpc:
    vals, wp = _values_at(tau, prec, guard, ("A", "B"))
    return _xy_from_values(vals, wp, prec, ("X",))[0]


def eval_Y(tau, prec: int, guard: int = DEFAULT_GUARD) -> mp.mpc:
    vals, wp = _values_at(tau, prec, guard, ("C", "D"))
    return _xy_from_values(vals, wp, prec, ("Y",))[0]


def eval_phi(tau, prec: int, guard: int = DEFAULT_GUARD):
    """phi(tau) = (X(tau), Y(tau)) as a point of E_1: y^2 = x^3 + 1."""
    from .curves import E, ProjPoint

    X, Y = eval_XY(tau, prec, guard)
    return ProjPoint.affine(X, Y, E(1))


def sqrt_minus3(prec: int) -> mp.mpc:
    with mp.workprec(prec):
        return mp.mpc(0, mp.sqrt(3))


def eval_f_pm(tau, prec: int, guard: int = DEFAULT_GUARD) -> tuple[mp.mpc, mp.mpc]:
    """f_+- = (Y +- sqrt(-3)) / (X sqrt(-3))."""
    X, Y = eval_XY(tau, prec + 16, guard)
    with mp.workprec(prec + 16):
        if abs(X) < mp.mpf(2) ** (-(prec // 2)):
            raise PrecisionError("X vanishes at this point; f_+- undefined")
        s3 = mp.mpc(0, mp.sqrt(3))
        fp = (Y + s3) / (X * s3)
        fm = (Y - s3) / (X * s3)
    with mp.workprec(prec):
        return +fp, +fm


def phi_at_cusp(cusp, prec: int, guard: int = DEFAULT_GUARD):
    """phi at a cusp, as the limit of phi(gamma(i t)) for t -> infinity.

    gamma is kept symbolic (indices are transported) so no reduction of a
    point close to the real axis is needed.  Returns the identity of E_1
    where X has a pole.
    """
    from .curves import E, ProjPoint
    from .qseries import X_series

    cusp = Cusp.parse(cusp)
    g = cusp.matrix()
    if X_series(8, g).valuation() < 0:
        return ProjPoint.identity(E(1))
    # |q_6| = exp(-2 pi t / 6) must be far below 2^-(prec+guard)
    with mp.workprec(64):
        t = mp.mpf(prec + guard + 16) * mp.log(2) * 6 / (2 * mp.pi)
        t = mp.mpf(int(t) + 1)
    vals, wp = _transported_values(UpperHalfPoint(mp.mpc(0, t)), g, prec, guard, ("A", "B", "C", "D"))
    X, Y = _xy_from_values(vals, wp, prec)
    return ProjPoint.affine(X, Y, E(1))
