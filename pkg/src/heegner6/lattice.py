"""Small exact/numeric lattice tools: Hermite normal form over Z, LLL reduction
of a real basis with integer transform, and Fincke-Pohst enumeration.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp


# ------------------------------------------------------------------ Hermite normal form

def _xgcd(a: int, b: int):
    """(g, u, v) with u a + v b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class HNFBasis:
    """Row-style Hermite normal form of a sublattice of Z^m, built incrementally.

    Rows are kept upper triangular with positive pivots and entries above each
    pivot reduced to [0, pivot). Once the lattice has full rank with
    determinant D, incoming vectors are reduced modulo D.
    """

    def __init__(self, m: int):
        self.m = m
        self.rows: dict[int, list[int]] = {}  # pivot column -> row

    def copy(self) -> "HNFBasis":
        h = HNFBasis(self.m)
        h.rows = {k: list(v) for k, v in self.rows.items()}
        return h

    def rank(self) -> int:
        return len(self.rows)

    def full_rank(self) -> bool:
        return len(self.rows) == self.m

    def det(self) -> int:
        if not self.full_rank():
            return 0
        d = 1
        for k in range(self.m):
            d *= self.rows[k][k]
        return d

    def add(self, vec) -> bool:
        """Insert a vector; returns True if the lattice changed."""
        v = [int(x) for x in vec]
        if len(v) != self.m:
            raise ValueError("dimension mismatch")
        D = self.det()
        if D:
            v = [x % D for x in v]  # D Z^m lies in the lattice
        changed = False
        col = 0
        while col < self.m:
            if v[col] == 0:
                col += 1
                continue
            row = self.rows.get(col)
            if row is None:
                if v[col] < 0:
                    v = [-x for x in v]
                self.rows[col] = v
                changed = True
                break
            if v[col] % row[col] == 0:
                q = v[col] // row[col]
                v = [a - q * b for a, b in zip(v, row)]
            else:
                g, s, t = _xgcd(row[col], v[col])
                a1, b1 = row[col] // g, v[col] // g
                new_row = [s * a + t * b for a, b in zip(row, v)]
                v = [a1 * b - b1 * a for a, b in zip(row, v)]
                self.rows[col] = new_row
                changed = True
            col += 1
        if changed:
            self._reduce()
        return changed

    def _reduce(self):
        cols = sorted(self.rows)
        for c in cols:
            r = self.rows[c]
            for c2 in cols:
                if c2 > c:
                    q = r[c2] // self.rows[c2][c2]
                    if q:
                        r[:] = [a - q * b for a, b in zip(r, self.rows[c2])]

    def matrix(self) -> list[list[int]]:
        return [list(self.rows[k]) for k in sorted(self.rows)]

    def reduce_vector(self, vec) -> list[int]:
        """Canonical representative of vec modulo the lattice (full rank only)."""
        v = [int(x) for x in vec]
        for c in range(self.m):
            row = self.rows.get(c)
            if row is None:
                continue
            q = v[c] // row[c]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return v

    def contains(self, vec) -> bool:
        v = [int(x) for x in vec]
        for c in range(self.m):
            if v[c] == 0:
                continue
            row = self.rows.get(c)
            if row is None or v[c] % row[c]:
                return False
            q = v[c] // row[c]
            v = [a - q * b for a, b in zip(v, row)]
        return not any(v)


def hnf(rows, m: int) -> list[list[int]]:
    """Upper-triangular HNF of the lattice spanned by integer rows of length m."""
    h = HNFBasis(m)
    for r in rows:
        h.add(r)
    return h.matrix()


# ------------------------------------------------------------------ LLL and enumeration

def lll(basis, delta=Fraction(99, 100)):
    """LLL-reduce real row vectors (mpf entries). Returns (reduced, T) with reduced = T basis."""
    b = [list(map(mp.mpf, row)) for row in basis]
    k = len(b)
    T = [[int(i == j) for j in range(k)] for i in range(k)]
    delta = mp.mpf(delta.numerator) / delta.denominator

    def dot(u, v):
        return mp.fsum(x * y for x, y in zip(u, v))

    def gso():
        bs, mu = [], [[mp.mpf(0)] * k for _ in range(k)]
        for i in range(k):
            v = list(b[i])
            for j in range(i):
                mu[i][j] = dot(b[i], bs[j]) / dot(bs[j], bs[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    bs, mu = gso()
    i = 1
    guard = 0
    while i < k:
        guard += 1
        if guard > 100000:
            raise RuntimeError("LLL did not terminate")
        for j in range(i - 1, -1, -1):
            q = int(mp.nint(mu[i][j]))
            if q:
                b[i] = [x - q * y for x, y in zip(b[i], b[j])]
                T[i] = [x - q * y for x, y in zip(T[i], T[j])]
                bs, mu = gso()
        Bi = dot(bs[i], bs[i])
        Bim = dot(bs[i - 1], bs[i - 1])
        if Bi >= (delta - mu[i][i - 1] ** 2) * Bim:
            i += 1
        else:
            b[i], b[i - 1] = b[i - 1], b[i]
            T[i], T[i - 1] = T[i - 1], T[i]
            bs, mu = gso()
            i = max(i - 1, 1)
    return b, T


def fincke_pohst(basis, bound):
    """All integer coefficient vectors x != 0 with |sum x_i b_i|^2 <= bound (one of each +-x)."""
    k = len(basis)
    G = [[mp.fsum(x * y for x, y in zip(basis[i], basis[j])) for j in range(k)] for i in range(k)]
    # Cholesky-style decomposition: Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    q = [[mp.mpf(0)] * k for _ in range(k)]
    A = [row[:] for row in G]
    for i in range(k):
        q[i][i] = A[i][i]
        if q[i][i] <= 0:
            raise ValueError("basis is degenerate")
        for j in range(i + 1, k):
            q[i][j] = A[i][j] / q[i][i]
        for j in range(i + 1, k):
            for l in range(j, k):
                A[j][l] -= q[i][j] * q[i][l] * q[i][i]
                A[l][j] = A[j][l]
    bound = mp.mpf(bound)
    out = []
    x = [0] * k

    def rec(i, remaining):
        if i < 0:
            if any(x):
                out.append(tuple(x))
            return
        c = -mp.fsum(q[i][j] * x[j] for j in range(i + 1, k))
        r = mp.sqrt(max(remaining, 0) / q[i][i])
        lo, hi = int(mp.ceil(c - r)), int(mp.floor(c + r))
        for xi in range(lo, hi + 1):
            x[i] = xi
            rest = remaining - q[i][i] * (xi - c) ** 2
            if rest >= 0:
                rec(i - 1, rest)
        x[i] = 0

    rec(k - 1, bound)
    # keep one of each +-pair: first nonzero coordinate positive
    uniq = []
    for v in out:
        first = next(c for c in v if c)
        if first > 0:
            uniq.append(v)
    return uniq
