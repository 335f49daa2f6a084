"""Exact rational linear algebra: determinants, inertia, Smith normal form,
and lattice point enumeration for positive definite quadratic forms.

Everything here is exact; no floating point is used anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt


class Singular(ZeroDivisionError):
    """Matrix is not invertible."""


class NotPositiveDefinite(ValueError):
    """Quadratic form is not positive definite."""


Vec = tuple[Fraction, ...]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with Fraction entries."""

    rows: tuple[Vec, ...]

    @staticmethod
    def from_rows(rows) -> "Matrix":
        return Matrix(tuple(tuple(_frac(x) for x in row) for row in rows))

    @staticmethod
    def identity(n: int) -> "Matrix":
        one, zero = Fraction(1), Fraction(0)
        return Matrix(tuple(tuple(one if i == j else zero for j in range(n))
                            for i in range(n)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows[i][j]

    def is_symmetric(self) -> bool:
        n = self.nrows
        return self.ncols == n and all(
            self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i))

    def is_integer(self) -> bool:
        return all(x.denominator == 1 for row in self.rows for x in row)

    def transpose(self) -> "Matrix":
        return Matrix(tuple(zip(*self.rows))) if self.rows else Matrix(())

    def mul(self, other: "Matrix") -> "Matrix":
        cols = other.transpose().rows
        return Matrix(tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
            for row in self.rows))

    def matvec(self, v) -> Vec:
        return tuple(sum(a * _frac(b) for a, b in zip(row, v)) for row in self.rows)

    def submatrix(self, idx) -> "Matrix":
        idx = tuple(idx)
        return Matrix(tuple(tuple(self.rows[i][j] for j in idx) for i in idx))

    def scale(self, c) -> "Matrix":
        c = _frac(c)
        return Matrix(tuple(tuple(c * x for x in row) for row in self.rows))


def dot(u, v) -> Fraction:
    return sum((_frac(a) * _frac(b) for a, b in zip(u, v)), Fraction(0))


def quad_form(m: Matrix, v) -> Fraction:
    """(v, M v) exactly."""
    return dot(v, m.matvec(v))


def det(m: Matrix) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rational matrices are scaled column-wise to integers first.
    """
    n = m.nrows
    if n != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    work = [list(row) for row in m.rows]
    for j in range(n):
        col_den = 1
        for i in range(n):
            d = work[i][j].denominator
            col_den = col_den * d // gcd(col_den, d)
        if col_den != 1:
            for i in range(n):
                work[i][j] *= col_den
            scale /= col_den
    a = [[int(x) for x in row] for row in work]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * scale * a[n - 1][n - 1]


def inverse(m: Matrix) -> Matrix:
    """Exact inverse via Gauss-Jordan elimination; raises Singular."""
    n = m.nrows
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m.rows)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise Singular("matrix is singular")
        a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        a[k] = [x / p for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return Matrix(tuple(tuple(row[n:]) for row in a))


@dataclass(frozen=True)
class Inertia:
    n_pos: int
    n_zero: int
    n_neg: int

    @property
    def signature(self) -> int:
        return self.n_pos - self.n_neg


def inertia(m: Matrix) -> Inertia:
    """Exact inertia of a symmetric matrix.

    Symmetric elimination with 1x1 pivots, falling back to a 2x2 pivot
    [[0, b], [b, d]] when every remaining diagonal entry is zero; such a
    block has negative determinant and contributes one eigenvalue of each
    sign.
    """
    if not m.is_symmetric():
        raise ValueError("inertia requires a symmetric matrix")
    n = m.nrows
    a = [list(row) for row in m.rows]
    active = list(range(n))
    pos = neg = 0
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is not None:
            d = a[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            active.remove(piv)
            for i in active:
                f = a[i][piv] / d
                if f:
                    for j in active:
                        a[i][j] -= f * a[piv][j]
            continue
        pair = next(((i, j) for i in active for j in active
                     if j > i and a[i][j] != 0), None)
        if pair is None:
            break  # remaining block is zero
        i0, j0 = pair
        pos += 1
        neg += 1
        active.remove(i0)
        active.remove(j0)
        b = a[i0][j0]
        d2 = a[j0][j0]
        # B = [[0, b], [b, d2]]; B^{-1} = [[d2, -b], [-b, 0]] / (-b^2)
        det_b = -b * b
        for r in active:
            u0, u1 = a[r][i0], a[r][j0]
            c0 = (u0 * d2 - u1 * b) / det_b
            c1 = (-u0 * b) / det_b
            if c0 or c1:
                for j in active:
                    a[r][j] -= c0 * a[i0][j] + c1 * a[j0][j]
    return Inertia(pos, n - pos - neg, neg)


@dataclass(frozen=True)
class SNF:
    """Smith normal form data: U*M*V = D with U, V unimodular, D diagonal."""

    U: Matrix
    D: Matrix
    V: Matrix

    def diagonal(self) -> tuple[int, ...]:
        return tuple(int(self.D.rows[i][i]) for i in range(min(self.D.nrows, self.D.ncols)))


def smith_normal_form(m: Matrix) -> SNF:
    """Smith normal form of a square integer matrix, with divisibility chain."""
    if not m.is_integer():
        raise ValueError("Smith normal form requires integer entries")
    nr, nc = m.nrows, m.ncols
    a = [[int(x) for x in row] for row in m.rows]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_op(i, j, f):  # row_i -= f * row_j
        a[i] = [x - f * y for x, y in zip(a[i], a[j])]
        u[i] = [x - f * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, f):  # col_i -= f * col_j
        for r in a:
            r[i] -= f * r[j]
        for r in v:
            r[i] -= f * r[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def diagonalize():
        k = 0
        while k < min(nr, nc):
            piv = min(((abs(a[i][j]), i, j) for i in range(k, nr)
                       for j in range(k, nc) if a[i][j] != 0), default=None)
            if piv is None:
                break
            _, pi, pj = piv
            if pi != k:
                swap_rows(k, pi)
            if pj != k:
                swap_cols(k, pj)
            while True:
                # clear column k, re-pivoting on smaller remainders
                dirty = False
                for i in range(k + 1, nr):
                    if a[i][k]:
                        q = a[i][k] // a[k][k]
                        row_op(i, k, q)
                        if a[i][k]:
                            swap_rows(k, i)
                            dirty = True
                for j in range(k + 1, nc):
                    if a[k][j]:
                        q = a[k][j] // a[k][k]
                        col_op(j, k, q)
                        if a[k][j]:
                            swap_cols(k, j)
                            dirty = True
                if not dirty:
                    break
            k += 1

    diagonalize()
    # enforce the divisibility chain d_i | d_{i+1}
    nd = min(nr, nc)
    changed = True
    while changed:
        changed = False
        for i in range(nd - 1):
            d1, d2 = a[i][i], a[i + 1][i + 1]
            if d1 == 0 and d2 != 0:
                swap_rows(i, i + 1)
                swap_cols(i, i + 1)
                changed = True
            elif d1 != 0 and d2 % d1 != 0:
                col_op(i, i + 1, -1)  # col_i += col_{i+1}: puts d2 at (i+1, i)
                diagonalize_pair(a, u, v, i, row_op, col_op, swap_rows, swap_cols)
                changed = True
    for i in range(nd):
        if a[i][i] < 0:
            a[i] = [-x for x in a[i]]
            u[i] = [-x for x in u[i]]
    return SNF(Matrix.from_rows(u), Matrix.from_rows(a), Matrix.from_rows(v))


def diagonalize_pair(a, u, v, k, row_op, col_op, swap_rows, swap_cols):
    """Re-diagonalize the 2x2 block at k after a fill-in, by gcd reduction."""
    nr = len(a)
    while a[k + 1][k] != 0 or a[k][k + 1] != 0:
        if a[k][k] == 0 or (a[k + 1][k] != 0 and abs(a[k + 1][k]) < abs(a[k][k])):
            swap_rows(k, k + 1)
        if a[k + 1][k]:
            row_op(k + 1, k, a[k + 1][k] // a[k][k])
        if a[k][k + 1]:
            col_op(k + 1, k, a[k][k + 1] // a[k][k])
    _ = nr


def sublevel_points(q: Matrix, lin, c, bound) -> list[tuple[int, ...]]:
    """All integer vectors v with (v, Qv) + (L, v) + c <= bound.

    Q must be symmetric positive definite (raises NotPositiveDefinite).
    The square is completed exactly and coordinates are bounded one at a
    time (Fincke-Pohst); output is sorted lexicographically.
    """
    n = q.nrows
    c = _frac(c)
    bound = _frac(bound)
    lin = tuple(_frac(x) for x in lin)
    if n == 0:
        return [()] if c <= bound else []
    if not q.is_symmetric():
        raise NotPositiveDefinite("form matrix must be symmetric")
    if inertia(q).n_pos != n:
        raise NotPositiveDefinite("form is not positive definite")
    qinv = inverse(q)
    h = tuple(x / 2 for x in qinv.matvec(lin))  # f(v) = (v+h, Q(v+h)) + c0
    c0 = c - quad_form(q, h)
    # LDL^T: Q = R^T diag(d) R with R unit upper triangular
    a = [list(row) for row in q.rows]
    dvec = [Fraction(0)] * n
    r = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        dvec[k] = a[k][k]
        for j in range(k + 1, n):
            r[k][j] = a[k][j] / dvec[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] -= a[i][k] * a[k][j] / dvec[k]

    out: list[tuple[int, ...]] = []
    y = [Fraction(0)] * n  # y = v + h, filled from the last coordinate down

    def rec(level: int, budget: Fraction):
        if level < 0:
            out.append(tuple(int(yi - hi) for yi, hi in zip(y, h)))
            return
        tail = sum(r[level][j] * y[j] for j in range(level + 1, n))
        lo, hi = _centered_int_range(-h[level] - tail, budget / dvec[level])
        for vi in range(lo, hi + 1):
            y[level] = vi + h[level]
            t = y[level] + tail
            rec(level - 1, budget - dvec[level] * t * t)

    rec(n - 1, bound - c0)
    out.sort()
    return out


def _centered_int_range(center: Fraction, radius_sq: Fraction) -> tuple[int, int]:
    """Integers v with (v - center)^2 <= radius_sq, as an inclusive range
    (possibly empty, lo > hi)."""
    if radius_sq < 0:
        return (0, -1)
    num, den = radius_sq.numerator, radius_sq.denominator
    r_floor = isqrt(num * den) // den  # floor(sqrt(radius_sq))
    base = center.numerator // center.denominator
    hi = base + r_floor + 2
    lo = base - r_floor - 2
    while hi >= lo and (hi - center) * (hi - center) > radius_sq:
        hi -= 1
    while lo <= hi and (lo - center) * (lo - center) > radius_sq:
        lo += 1
    return (lo, hi)
