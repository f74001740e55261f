"""Exact linear algebra over the rationals (row echelon form, rank, kernels).

Matrices are lists of rows of :class:`Fraction`.  Sizes in this package stay
in the low hundreds, where plain Gauss-Jordan elimination is fast enough.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fractions(rows: Sequence[Sequence]) -> Matrix:
    return [[c if isinstance(c, Fraction) else Fraction(c) for c in row] for row in rows]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns.  Input is not modified."""
    m = to_fractions(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pr = m[r]
        inv = 1 / pr[c]
        if inv != 1:
            for k in range(c, ncols):
                if pr[k]:
                    pr[k] *= inv
        nz = [k for k in range(c, ncols) if pr[k]]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    row = m[i]
                    for k in nz:
                        row[k] -= f * pr[k]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Basis of {x : A x = 0}; one vector per free column, free entry = 1."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def left_nullspace(rows: Sequence[Sequence]) -> Matrix:
    """Basis of {y : y^T A = 0}."""
    if not rows:
        return []
    return nullspace(transpose(rows), len(rows))


def transpose(rows: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*rows)]


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One solution of A x = b, or None if inconsistent."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(to_fractions(rows), to_fractions([rhs])[0])]
    red, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return x


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


class EchelonBasis:
    """Incrementally maintained row space, used to track ranks as rows arrive."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence) -> list[Fraction]:
        v = [c if isinstance(c, Fraction) else Fraction(c) for c in v]
        for row, pc in zip(self.rows, self.pivots):
            f = v[pc]
            if f:
                for k in range(self.ncols):
                    if row[k]:
                        v[k] -= f * row[k]
        return v

    def add(self, v: Sequence) -> bool:
        """Insert ``v``; returns True if it enlarged the span."""
        v = self.reduce(v)
        pc = next((k for k, c in enumerate(v) if c), None)
        if pc is None:
            return False
        inv = 1 / v[pc]
        v = [c * inv for c in v]
        for row in self.rows:
            f = row[pc]
            if f:
                for k in range(self.ncols):
                    if v[k]:
                        row[k] -= f * v[k]
        self.rows.append(v)
        self.pivots.append(pc)
        return True

    def copy(self) -> EchelonBasis:
        out = EchelonBasis(self.ncols)
        out.rows = [list(r) for r in self.rows]
        out.pivots = list(self.pivots)
        return out
