"""Exact linear algebra over Fractions and scalar expressions.

Rational matrices go through fraction-exact Gaussian elimination; symbolic
matrices use subset dynamic programming so no division is ever needed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from . import scalars as sc
from .errors import NotSkew, OddSize, ShapeMismatch
from .scalars import ScalarExpr


def _is_num(e) -> bool:
    return isinstance(e, (int, Fraction)) and not isinstance(e, bool)


def _entry_zero(e) -> bool:
    if _is_num(e):
        return e == 0
    return sc.is_zero(e)


def _square(M) -> tuple:
    rows = tuple(tuple(row) for row in M)
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ShapeMismatch("expected a square matrix, got rows %s" % ([len(r) for r in rows],))
    return rows


def transpose(M) -> list:
    rows = [tuple(row) for row in M]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ShapeMismatch("ragged matrix")
    return [list(col) for col in zip(*rows)] if rows else []


def mat_mul(A, B) -> list:
    A = [list(r) for r in A]
    B = [list(r) for r in B]
    if not A or not B or len(A[0]) != len(B):
        raise ShapeMismatch("inner dimensions disagree")
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = row[0] * B[0][j]
            for k in range(1, len(B)):
                acc = acc + row[k] * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def mat_vec(A, v) -> list:
    A = [list(r) for r in A]
    if not A or len(A[0]) != len(v):
        raise ShapeMismatch("matrix and vector sizes disagree")
    out = []
    for row in A:
        acc = row[0] * v[0]
        for k in range(1, len(v)):
            acc = acc + row[k] * v[k]
        out.append(acc)
    return out


def identity(n: int) -> list:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# Determinants.
# ---------------------------------------------------------------------------


def det(M):
    """Determinant; exact for Fraction entries, normalized for symbolic ones."""
    rows = _square(M)
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if all(_is_num(e) for row in rows for e in row):
        return _det_fraction([[Fraction(e) for e in row] for row in rows])
    return _det_subset(rows)


def _det_fraction(rows: List[List[Fraction]]) -> Fraction:
    n = len(rows)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            sign = -sign
        p = rows[col][col]
        result *= p
        for r in range(col + 1, n):
            factor = rows[r][col] / p
            if factor:
                for c in range(col, n):
                    rows[r][c] -= factor * rows[col][c]
    return sign * result


def _det_subset(rows) -> ScalarExpr:
    # dp[mask] sums signed products over column choices for the rows so far.
    n = len(rows)
    dp = {0: sc.ONE}
    for i in range(n):
        ndp: dict = {}
        for mask, val in dp.items():
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    continue
                e = rows[i][j]
                if _entry_zero(e):
                    continue
                term = val * e
                # new inversions = used columns above j
                if bin(mask >> (j + 1)).count("1") % 2:
                    term = -term
                key = mask | bit
                ndp[key] = ndp[key] + term if key in ndp else term
        dp = {k: sc.normalize(v) for k, v in ndp.items() if not sc.is_zero(v)}
        if not dp:
            return sc.ZERO
    return dp.get((1 << n) - 1, sc.ZERO)


# ---------------------------------------------------------------------------
# Pfaffian.
# ---------------------------------------------------------------------------


def check_skew(M) -> tuple:
    rows = _square(M)
    n = len(rows)
    for i in range(n):
        if not _entry_zero(rows[i][i]):
            raise NotSkew("diagonal entry (%d, %d) is nonzero" % (i, i))
        for j in range(i + 1, n):
            if not _entry_zero(rows[i][j] + rows[j][i]):
                raise NotSkew("entries (%d, %d) and (%d, %d) do not cancel" % (i, j, j, i))
    return rows


def pfaffian(M):
    """Pfaffian of an even-size skew matrix by recursive pairing."""
    rows = check_skew(M)
    n = len(rows)
    if n % 2:
        raise OddSize("pfaffian needs an even size, got %d" % (n,))
    if n == 0:
        return Fraction(1)
    numeric = all(_is_num(e) for row in rows for e in row)
    memo: dict = {}

    def pf(mask: int):
        if mask == 0:
            return Fraction(1) if numeric else sc.ONE
        if mask in memo:
            return memo[mask]
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        acc = None
        sign = 1
        j = rest
        while j:
            k = (j & -j).bit_length() - 1
            j &= j - 1
            e = rows[i][k]
            if not _entry_zero(e):
                sub = pf(rest & ~(1 << k))
                term = e * sub
                if sign < 0:
                    term = -term
                acc = term if acc is None else acc + term
            sign = -sign
        if acc is None:
            acc = Fraction(0) if numeric else sc.ZERO
        elif not numeric:
            acc = sc.normalize(acc)
        memo[mask] = acc
        return acc

    return pf((1 << n) - 1)


# ---------------------------------------------------------------------------
# Linear solves and inverses.
# ---------------------------------------------------------------------------


def solve(A, b) -> list:
    """Solve A x = b exactly over Fractions; raises on singular systems."""
    rows = _square(A)
    n = len(rows)
    if len(b) != n:
        raise ShapeMismatch("right-hand side length %d, matrix size %d" % (len(b), n))
    aug = [[Fraction(e) for e in row] + [Fraction(b[i])] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [e / p for e in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [e - f * aug[col][c] for c, e in enumerate(aug[r])]
    return [aug[i][n] for i in range(n)]


def inverse(A) -> list:
    """Exact inverse of a Fraction matrix."""
    rows = _square(A)
    n = len(rows)
    aug = [[Fraction(e) for e in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [e / p for e in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [e - f * aug[col][c] for c, e in enumerate(aug[r])]
    return [row[n:] for row in aug]


def minor(M, drop_row: int, drop_col: int) -> list:
    rows = _square(M)
    return [
        [e for j, e in enumerate(row) if j != drop_col]
        for i, row in enumerate(rows)
        if i != drop_row
    ]


def inverse_symbolic(M) -> list:
    """Adjugate inverse for symbolic matrices; entries carry a det factor."""
    rows = _square(M)
    n = len(rows)
    d = det(rows)
    if _entry_zero(d):
        raise ValueError("matrix is singular")
    if _is_num(d):
        inv_det: object = Fraction(1, 1) / d
    else:
        inv_det = sc.normalize(sc.Pow(d, -1))
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            cof = det(minor(rows, j, i))
            term = cof * inv_det
            if (i + j) % 2:
                term = -term
            row.append(sc.normalize(term) if isinstance(term, ScalarExpr) else term)
        out.append(row)
    return out
