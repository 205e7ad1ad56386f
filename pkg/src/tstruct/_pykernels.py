"""Pure-Python implementations of the hot kernels.

These are the reference versions.  The compiled module ``tstruct._kernels``
exports the same functions with the same signatures; ``tstruct._backend``
picks one at import time.
"""

from __future__ import annotations

BACKEND = "python"


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def snf(A, nrows, ncols):
    """Smith normal form with transforms, ``D == U @ A @ V``.

    ``A`` is a list of ``nrows`` lists of ``ncols`` Python ints.  Returns
    ``(D, U, V)`` as lists of lists; the diagonal of ``D`` is non-negative
    and each entry divides the next.
    """
    D = [list(row) for row in A]
    U = _identity(nrows)
    V = _identity(ncols)
    _reduce(D, U, V, nrows, ncols)
    return D, U, V


def snf_diagonal(A, nrows, ncols):
    """Diagonal of the Smith normal form (length ``min(nrows, ncols)``)."""
    D = [list(row) for row in A]
    _reduce(D, None, None, nrows, ncols)
    return [D[i][i] for i in range(min(nrows, ncols))]


def _reduce(D, U, V, m, n):
    for t in range(min(m, n)):
        while True:
            # smallest non-zero entry of the trailing block becomes the pivot
            best = 0
            bi = bj = -1
            for i in range(t, m):
                row = D[i]
                for j in range(t, n):
                    a = row[j]
                    if a:
                        a = -a if a < 0 else a
                        if best == 0 or a < best:
                            best, bi, bj = a, i, j
                            if best == 1:
                                break
                if best == 1:
                    break
            if best == 0:
                return
            if bi != t:
                D[t], D[bi] = D[bi], D[t]
                if U is not None:
                    U[t], U[bi] = U[bi], U[t]
            if bj != t:
                for row in D:
                    row[t], row[bj] = row[bj], row[t]
                if V is not None:
                    for row in V:
                        row[t], row[bj] = row[bj], row[t]
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                a = D[i][t]
                if a:
                    q = a // p
                    if q:
                        Di, Dt = D[i], D[t]
                        for j in range(t, n):
                            Di[j] -= q * Dt[j]
                        if U is not None:
                            Ui, Ut = U[i], U[t]
                            for j in range(m):
                                Ui[j] -= q * Ut[j]
                    if D[i][t]:
                        clean = False
            for j in range(t + 1, n):
                a = D[t][j]
                if a:
                    q = a // p
                    if q:
                        for row in D:
                            row[j] -= q * row[t]
                        if V is not None:
                            for row in V:
                                row[j] -= q * row[t]
                    if D[t][j]:
                        clean = False
            if not clean:
                continue
            # pivot must divide the whole trailing block
            bad = -1
            for i in range(t + 1, m):
                row = D[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            Dt, Db = D[t], D[bad]
            for j in range(t, n):
                Dt[j] += Db[j]
            if U is not None:
                Ut, Ub = U[t], U[bad]
                for j in range(m):
                    Ut[j] += Ub[j]
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            if U is not None:
                U[t] = [-a for a in U[t]]


def upset_masks(n, up, down):
    """All up-closed subsets of an ``n``-element poset, as bitmasks.

    ``up[i]`` (``down[i]``) is the mask of elements ``>= i`` (``<= i``).
    Output order is the include-first depth-first order.
    """
    out = []
    stack = [(0, 0, 0)]
    while stack:
        i, inn, outm = stack.pop()
        while i < n and ((inn >> i) & 1 or (outm >> i) & 1):
            i += 1
        if i == n:
            out.append(inn)
            continue
        # pushed in reverse so the include branch is expanded first
        stack.append((i + 1, inn, outm | down[i]))
        stack.append((i + 1, inn | up[i], outm))
    return out
