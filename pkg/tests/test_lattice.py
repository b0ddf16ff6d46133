"""Lattice layer tests.

The oracle here is deliberately independent of the package implementation:
invariant factors are recomputed from determinantal divisors (the gcd of all
k-by-k minors), a textbook characterization sharing no code with the
elimination-based Smith normal form in the package.
"""

from __future__ import annotations

import random
from itertools import combinations
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wallcross.lattice import (
    INFINITE,
    IntegerMatrix,
    cokernel_order,
    kernel_basis,
    lattice_index,
    smith_normal_form,
)


# --- independent oracle -----------------------------------------------------

def _minor_det(rows, row_idx, col_idx):
    sub = [[rows[i][j] for j in col_idx] for i in row_idx]
    n = len(sub)
    if n == 1:
        return sub[0][0]
    total = 0
    for j in range(n):
        sign = -1 if j % 2 else 1
        total += sign * sub[0][j] * _minor_det(
            [r[:j] + r[j + 1:] for r in sub[1:]],
            range(n - 1), range(n - 1))
    return total


def oracle_invariant_factors(rows):
    """Invariant factors via gcds of k-by-k minors."""
    r = len(rows)
    c = len(rows[0]) if r else 0
    n = min(r, c)
    dets = [1]  # d_0 = 1
    for k in range(1, n + 1):
        g = 0
        for ri in combinations(range(r), k):
            for ci in combinations(range(c), k):
                g = gcd(g, abs(_minor_det(rows, ri, ci)))
        dets.append(g)
        if g == 0:
            break
    factors = []
    for k in range(1, len(dets)):
        if dets[k] == 0:
            break
        factors.append(dets[k] // dets[k - 1])
    factors += [0] * (n - len(factors))
    return factors


def check_decomposition(m, snf):
    umv = snf.U.multiply(m).multiply(snf.V)
    assert umv.entries == snf.D.entries
    # off-diagonal zero, nonnegative diagonal, divisibility chain
    for i in range(snf.D.rows):
        for j in range(snf.D.cols):
            if i != j:
                assert snf.D[i, j] == 0
    diag = snf.diagonal
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        if a == 0:
            assert b == 0
        elif b != 0:
            assert b % a == 0


# --- fixed examples ---------------------------------------------------------

def test_identity_is_fixed():
    m = IntegerMatrix.identity(2)
    snf = smith_normal_form(m)
    check_decomposition(m, snf)
    assert snf.diagonal == (1, 1)


def test_diag_2_3_gives_1_6():
    m = IntegerMatrix.from_rows([[2, 0], [0, 3]])
    snf = smith_normal_form(m)
    check_decomposition(m, snf)
    assert snf.diagonal == (1, 6)


def test_upper_triangular_2_4_0_4():
    m = IntegerMatrix.from_rows([[2, 4], [0, 4]])
    snf = smith_normal_form(m)
    check_decomposition(m, snf)
    assert list(snf.diagonal) == oracle_invariant_factors(m.to_rows()) == [2, 4]


def test_cokernel_x_to_2x_0_torsion():
    m = IntegerMatrix.from_rows([[2], [0]])  # Z -> Z^2, x -> (2x, 0)
    assert cokernel_order(m, torsion_only=True) == 2
    assert cokernel_order(m, torsion_only=False) == INFINITE


def test_cokernel_full_rank_square():
    m = IntegerMatrix.from_rows([[2, 0], [0, 3]])
    assert cokernel_order(m) == 6
    assert lattice_index(m) == 6


def test_cokernel_zero_1x1_infinite():
    m = IntegerMatrix.from_rows([[0]])
    assert cokernel_order(m) == INFINITE
    assert cokernel_order(m, torsion_only=True) == 1


def test_kernel_basis_saturated():
    m = IntegerMatrix.from_rows([[1, 2, 3]])
    basis = kernel_basis(m)
    assert len(basis) == 2
    for v in basis:
        assert m.apply(v) == (0,)


def test_zero_row_matrix_trivial_cokernel():
    m = IntegerMatrix(0, 3, ())
    assert cokernel_order(m) == 1


# --- randomized comparison against the oracle -------------------------------

def test_thousand_random_matrices_against_minor_oracle():
    rng = random.Random(20260824)
    for _ in range(1000):
        r = rng.randint(1, 4)
        c = rng.randint(1, 4)
        rows = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        m = IntegerMatrix.from_rows(rows)
        snf = smith_normal_form(m)
        check_decomposition(m, snf)
        assert list(snf.diagonal) == oracle_invariant_factors(rows)
        if r == c:
            d = _minor_det(rows, range(r), range(r))
            if d != 0:
                assert cokernel_order(m) == abs(d)


# --- property tests ---------------------------------------------------------

small_matrix = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-30, 30), min_size=c, max_size=c),
            min_size=r, max_size=r)))


@settings(max_examples=150, deadline=None)
@given(small_matrix)
def test_property_decomposition_valid(rows):
    m = IntegerMatrix.from_rows(rows)
    check_decomposition(m, smith_normal_form(m))


@settings(max_examples=100, deadline=None)
@given(small_matrix)
def test_property_cokernel_unimodular_invariance(rows):
    m = IntegerMatrix.from_rows(rows)
    # multiply by explicit unimodular matrices built from shears
    def shear(n, i, j, k):
        rows_ = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        if i != j:
            rows_[i][j] = k
        return IntegerMatrix.from_rows(rows_)

    left = shear(m.rows, 0, m.rows - 1, 3)
    right = shear(m.cols, m.cols - 1, 0, -2)
    m2 = left.multiply(m).multiply(right)
    for flag in (True, False):
        assert cokernel_order(m, torsion_only=flag) == \
            cokernel_order(m2, torsion_only=flag)


@settings(max_examples=60, deadline=None)
@given(small_matrix, small_matrix)
def test_property_block_diagonal_multiplicative(rows1, rows2):
    m1 = IntegerMatrix.from_rows(rows1)
    m2 = IntegerMatrix.from_rows(rows2)
    o1 = cokernel_order(m1)
    o2 = cokernel_order(m2)
    block = [row + [0] * m2.cols for row in rows1] + \
            [[0] * m1.cols + row for row in rows2]
    ob = cokernel_order(IntegerMatrix.from_rows(block))
    if o1 == INFINITE or o2 == INFINITE:
        assert ob == INFINITE
    else:
        assert ob == o1 * o2


@settings(max_examples=100, deadline=None)
@given(small_matrix)
def test_property_rank_matches_rational_rank(rows):
    from wallcross import linalg

    m = IntegerMatrix.from_rows(rows)
    assert smith_normal_form(m).rank == linalg.rank(rows)
