"""Smith normal form of integer matrices.

>>> D, U, V = smith_normal_form([[2, 0], [0, 3]])
>>> D
[[1, 0], [0, 6]]
"""

from __future__ import annotations

from . import _backend
from .errors import InputError


def _as_rows(A) -> tuple[list[list[int]], int, int]:
    if hasattr(A, "tolist"):
        A = A.tolist()
    rows = [[int(x) for x in row] for row in A]
    if not rows:
        return [], 0, 0
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise InputError("matrix rows have different lengths")
    return rows, len(rows), ncols


def smith_normal_form(A):
    """Return ``(D, U, V)`` with ``D == U A V``, ``U`` and ``V`` unimodular.

    ``D`` is diagonal with non-negative entries ``d_1 | d_2 | ...``; zero
    diagonal entries come last.
    """
    rows, m, n = _as_rows(A)
    if m == 0:
        return [], [], [[int(i == j) for j in range(n)] for i in range(n)]
    if n == 0:
        return [[] for _ in range(m)], \
            [[int(i == j) for j in range(m)] for i in range(m)], []
    return _backend.snf(rows, m, n)


def snf_diagonal(A) -> list[int]:
    """Diagonal of the Smith normal form, without transforms."""
    rows, m, n = _as_rows(A)
    if m == 0 or n == 0:
        return []
    return _backend.snf_diagonal(rows, m, n)


def matmul(A, B):
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def det(A) -> int:
    """Exact integer determinant (Bareiss)."""
    M = [list(r) for r in A]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def is_smith_form(D) -> bool:
    m = len(D)
    n = len(D[0]) if m else 0
    diag = []
    for i in range(m):
        for j in range(n):
            if i != j and D[i][j]:
                return False
    diag = [D[i][i] for i in range(min(m, n))]
    if any(d < 0 for d in diag):
        return False
    for a, b in zip(diag, diag[1:]):
        if a == 0 and b != 0:
            return False
        if a and b % a:
            return False
    return True
