"""Exact integer-lattice linear algebra.

Smith normal form over the integers with unimodular transforms, cokernel
orders, and integer kernels.  These are the primitives behind every lattice
index (wall multiplicities, gluing multiplicities, fibration indices).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

INFINITE = "infinite"


@dataclass(frozen=True)
class IntegerMatrix:
    """Dense integer matrix with arbitrary-precision entries."""

    rows: int
    cols: int
    entries: tuple[int, ...]  # row-major, length rows*cols

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry array length must equal rows*cols")
        if not all(isinstance(e, int) for e in self.entries):
            raise ValueError("entries must be integers")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntegerMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ValueError("ragged rows")
        return cls(r, c, tuple(int(x) for row in rows for x in row))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(1 if i == j else 0
                               for i in range(n) for j in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols])
                for i in range(self.rows)]

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)])

    def multiply(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a, b = self.to_rows(), other.to_rows()
        return IntegerMatrix.from_rows(
            [[sum(a[i][k] * b[k][j] for k in range(self.cols))
              for j in range(other.cols)] for i in range(self.rows)])

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        rows = self.to_rows()
        return tuple(sum(r[j] * v[j] for j in range(self.cols)) for r in rows)


@dataclass(frozen=True)
class SmithDecomposition:
    """U·M·V = D with U, V unimodular and D diagonal, d1 | d2 | ... ."""

    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        n = min(self.D.rows, self.D.cols)
        return tuple(self.D[i, i] for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _det_unimodular(rows: list[list[int]]) -> int:
    """Determinant of a small unimodular candidate (exact, fraction-free)."""
    from fractions import Fraction

    n = len(rows)
    m = [[Fraction(x) for x in r] for r in rows]
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        result *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return int(result)


def smith_normal_form(M: IntegerMatrix) -> SmithDecomposition:
    """Smith normal form by elementary row/column operations.

    Pivot selection: smallest nonzero absolute value in the remaining block
    (keeps intermediate entries small).  Deterministic.
    """
    a = M.to_rows()
    r, c = M.rows, M.cols
    u = IntegerMatrix.identity(r).to_rows()
    v = IntegerMatrix.identity(c).to_rows()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, mult):  # row dst += mult * row src
        a[dst] = [x + mult * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + mult * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, mult):
        for row in a:
            row[dst] += mult * row[src]
        for row in v:
            row[dst] += mult * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    n = min(r, c)
    while t < n:
        # locate smallest-|entry| nonzero pivot in the trailing block
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if a[i][j] != 0 and (best is None
                                     or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        # clear row and column t by gcd descent
        while True:
            dirty = False
            for i in range(t + 1, r):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, -q)
                    if a[i][t] != 0:  # remainder smaller than pivot: swap up
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, c):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                break
        if a[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if di != 0 and dj % di != 0:
                # fold d_{i+1} into position (i, i+1) and rediagonalize 2x2
                add_col(i + 1, i, 1)  # col i += col i+1 : puts dj at (i+1,i)
                g = gcd(di, dj)
                # Bezout: s*di + t*dj = g
                s, tt = _bezout(di, dj)
                # row i := s*row i + t*row (i+1)
                _combine_rows(a, u, i, i + 1, s, tt, di // g, dj // g)
                # now a[i][i] = g; clear the off entries
                q = a[i + 1][i] // g
                add_row(i, i + 1, -q)
                q = a[i][i + 1] // g
                add_col(i, i + 1, -q)
                if a[i][i] < 0:
                    negate_row(i)
                if a[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True

    D = IntegerMatrix.from_rows(a)
    Um = IntegerMatrix.from_rows(u)
    Vm = IntegerMatrix.from_rows(v)
    assert abs(_det_unimodular(u)) == 1 and abs(_det_unimodular(v)) == 1
    return SmithDecomposition(U=Um, D=D, V=Vm)


def _bezout(x: int, y: int) -> tuple[int, int]:
    """(s, t) with s*x + t*y = gcd(x, y)."""
    old_r, rr = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while rr:
        q = old_r // rr
        old_r, rr = rr, old_r - q * rr
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def _combine_rows(a, u, i, j, s, t, x, y):
    """Unimodularly replace (row_i, row_j) by (s·row_i + t·row_j, ...).

    The second output row is -y·row_i + x·row_j, where x = d_i/g, y = d_j/g,
    making the 2x2 transform [[s, t], [-y, x]] have determinant s·x + t·y = 1.
    """
    ai, aj = a[i][:], a[j][:]
    ui, uj = u[i][:], u[j][:]
    a[i] = [s * p + t * q for p, q in zip(ai, aj)]
    u[i] = [s * p + t * q for p, q in zip(ui, uj)]
    a[j] = [-y * p + x * q for p, q in zip(ai, aj)]
    u[j] = [-y * p + x * q for p, q in zip(ui, uj)]


def cokernel_order(M: IntegerMatrix, torsion_only: bool = False):
    """Order of coker(M: Z^cols -> Z^rows).

    With ``torsion_only`` the free part is ignored (product of the nonzero
    invariant factors).  Otherwise returns the full order: the product of
    invariant factors when M has full row rank over Q, else ``INFINITE``.
    """
    snf = smith_normal_form(M)
    diag = snf.diagonal
    torsion = 1
    for d in diag:
        if d != 0:
            torsion *= d
    if torsion_only:
        return torsion
    if snf.rank < M.rows:
        return INFINITE
    return torsion


def kernel_basis(M: IntegerMatrix) -> list[tuple[int, ...]]:
    """Basis of the saturated integer kernel of M (columns of V past rank)."""
    snf = smith_normal_form(M)
    v = snf.V.to_rows()
    basis = []
    for j in range(snf.rank, M.cols):
        basis.append(tuple(v[i][j] for i in range(M.cols)))
    return basis


def lattice_index(M: IntegerMatrix):
    """Index of the image lattice of M inside Z^rows (full cokernel order)."""
    return cokernel_order(M, torsion_only=False)
