"""Exact dense linear algebra over the rationals.

Systems are solved by fraction-free (Bareiss) elimination: every row is first
scaled to integers, elimination then runs on Python ints only, and fractions
appear only during back substitution.
"""

from fractions import Fraction
from math import lcm

from .errors import InvariantError


class SingularMatrixError(InvariantError):
    pass


def _integer_rows(A, B):
    rows = []
    for a_row, b_row in zip(A, B):
        entries = [Fraction(v) for v in a_row] + [Fraction(v) for v in b_row]
        scale = lcm(*(v.denominator for v in entries)) if entries else 1
        rows.append([int(v * scale) for v in entries])
    return rows


def _bareiss(rows, n):
    """In-place fraction-free forward elimination on an n x (n + r) int array.

    Returns the determinant of the leading n x n block (sign included).
    """
    sign = 1
    prev = 1
    for k in range(n):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        row_k = rows[k]
        for i in range(k + 1, n):
            row_i = rows[i]
            f = row_i[k]
            for j in range(k + 1, len(row_i)):
                row_i[j] = (row_i[j] * pivot - f * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1] if n else 1


def solve(A, B):
    """Solve ``A X = B`` exactly.

    ``A`` is n x n, ``B`` is n x r (a list of rows).  Returns X as a list of
    n rows of Fractions.  Raises SingularMatrixError if A is singular.
    """
    n = len(A)
    if n == 0:
        return []
    r = len(B[0])
    rows = _integer_rows(A, B)
    if _bareiss(rows, n) == 0:
        raise SingularMatrixError("matrix is singular")
    X = [[Fraction(0)] * r for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = rows[i]
        d = row[i]
        for c in range(r):
            acc = Fraction(row[n + c])
            for j in range(i + 1, n):
                if row[j]:
                    acc -= row[j] * X[j][c]
            X[i][c] = acc / d
    return X


def solve_vector(A, b):
    return [row[0] for row in solve(A, [[v] for v in b])]


def det(A):
    n = len(A)
    if n == 0:
        return Fraction(1)
    rows = []
    scale_total = Fraction(1)
    for a_row in A:
        entries = [Fraction(v) for v in a_row]
        scale = lcm(*(v.denominator for v in entries))
        scale_total *= scale
        rows.append([int(v * scale) for v in entries])
    return Fraction(_bareiss(rows, n)) / scale_total


def transpose(A):
    return [list(col) for col in zip(*A)]


def matvec(A, x):
    return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in A]


def dot(x, y):
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
