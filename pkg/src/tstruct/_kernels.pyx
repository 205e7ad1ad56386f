# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Smith normal form on int64 and up-set enumeration.

Same signatures and results as ``tstruct._pykernels``.  The SNF routines
raise ``OverflowError`` when an intermediate leaves the int64 range; the
dispatcher in ``tstruct._backend`` then retries in pure Python.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport INT64_MIN

BACKEND = "cython"

ctypedef long long i64

cdef extern from *:
    """
    static int tstruct_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static int tstruct_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    static int tstruct_add_ovf(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    """
    int tstruct_mul_ovf(i64 a, i64 b, i64 *r) nogil
    int tstruct_sub_ovf(i64 a, i64 b, i64 *r) nogil
    int tstruct_add_ovf(i64 a, i64 b, i64 *r) nogil


cdef inline i64 floordiv(i64 a, i64 b) nogil:
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline i64 floormod(i64 a, i64 b) nogil:
    cdef i64 r = a % b
    if r != 0 and ((r < 0) != (b < 0)):
        r += b
    return r


# row_a[k] -= q * row_b[k] for k in [lo, hi); returns nonzero on overflow
cdef inline int axpy(i64 *row_a, i64 *row_b, i64 q, int lo, int hi,
                     int stride) nogil:
    cdef int k
    cdef i64 prod, res
    for k in range(lo, hi):
        if tstruct_mul_ovf(q, row_b[k * stride], &prod):
            return 1
        if tstruct_sub_ovf(row_a[k * stride], prod, &res):
            return 1
        row_a[k * stride] = res
    return 0


cdef int reduce_snf(i64 *D, i64 *U, i64 *V, int m, int n) nogil:
    """In-place SNF; D is m x n row-major, U is m x m, V is n x n.

    U or V may be NULL.  Returns 1 on overflow, 0 on success.
    """
    cdef int t, i, j, bi, bj, bad, clean
    cdef i64 best, a, p, q, tmp
    for t in range(m if m < n else n):
        while True:
            best = 0
            bi = -1
            bj = -1
            for i in range(t, m):
                for j in range(t, n):
                    a = D[i * n + j]
                    if a != 0:
                        if a < 0:
                            if a == INT64_MIN:
                                return 1
                            a = -a
                        if best == 0 or a < best:
                            best = a
                            bi = i
                            bj = j
            if best == 0:
                return 0
            if bi != t:
                for j in range(n):
                    tmp = D[t * n + j]
                    D[t * n + j] = D[bi * n + j]
                    D[bi * n + j] = tmp
                if U != NULL:
                    for j in range(m):
                        tmp = U[t * m + j]
                        U[t * m + j] = U[bi * m + j]
                        U[bi * m + j] = tmp
            if bj != t:
                for i in range(m):
                    tmp = D[i * n + t]
                    D[i * n + t] = D[i * n + bj]
                    D[i * n + bj] = tmp
                if V != NULL:
                    for i in range(n):
                        tmp = V[i * n + t]
                        V[i * n + t] = V[i * n + bj]
                        V[i * n + bj] = tmp
            p = D[t * n + t]
            clean = 1
            for i in range(t + 1, m):
                a = D[i * n + t]
                if a != 0:
                    q = floordiv(a, p)
                    if q != 0:
                        if axpy(D + i * n, D + t * n, q, t, n, 1):
                            return 1
                        if U != NULL:
                            if axpy(U + i * m, U + t * m, q, 0, m, 1):
                                return 1
                    if D[i * n + t] != 0:
                        clean = 0
            for j in range(t + 1, n):
                a = D[t * n + j]
                if a != 0:
                    q = floordiv(a, p)
                    if q != 0:
                        # column op: col_j -= q * col_t
                        if axpy(D + j, D + t, q, 0, m, n):
                            return 1
                        if V != NULL:
                            if axpy(V + j, V + t, q, 0, n, n):
                                return 1
                    if D[t * n + j] != 0:
                        clean = 0
            if not clean:
                continue
            bad = -1
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if floormod(D[i * n + j], p) != 0:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            for j in range(t, n):
                if tstruct_add_ovf(D[t * n + j], D[bad * n + j], &tmp):
                    return 1
                D[t * n + j] = tmp
            if U != NULL:
                for j in range(m):
                    if tstruct_add_ovf(U[t * m + j], U[bad * m + j], &tmp):
                        return 1
                    U[t * m + j] = tmp
        if D[t * n + t] < 0:
            for j in range(n):
                D[t * n + j] = -D[t * n + j]
            if U != NULL:
                for j in range(m):
                    U[t * m + j] = -U[t * m + j]
    return 0


cdef i64 *to_buffer(A, int m, int n) except NULL:
    cdef i64 *buf = <i64 *> malloc(max(m * n, 1) * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    cdef int i, j
    try:
        for i in range(m):
            row = A[i]
            for j in range(n):
                buf[i * n + j] = row[j]
    except OverflowError:
        free(buf)
        raise
    return buf


cdef list from_buffer(i64 *buf, int m, int n):
    cdef int i, j
    return [[buf[i * n + j] for j in range(n)] for i in range(m)]


cdef i64 *identity_buffer(int k) except NULL:
    cdef i64 *buf = <i64 *> malloc(max(k * k, 1) * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    cdef int i
    for i in range(k * k):
        buf[i] = 0
    for i in range(k):
        buf[i * k + i] = 1
    return buf


def snf(A, int nrows, int ncols):
    cdef i64 *D = to_buffer(A, nrows, ncols)
    cdef i64 *U = NULL
    cdef i64 *V = NULL
    cdef int status
    try:
        U = identity_buffer(nrows)
        V = identity_buffer(ncols)
        with nogil:
            status = reduce_snf(D, U, V, nrows, ncols)
        if status:
            raise OverflowError("int64 overflow in SNF kernel")
        return from_buffer(D, nrows, ncols), from_buffer(U, nrows, nrows), \
            from_buffer(V, ncols, ncols)
    finally:
        free(D)
        if U != NULL:
            free(U)
        if V != NULL:
            free(V)


def snf_diagonal(A, int nrows, int ncols):
    cdef i64 *D = to_buffer(A, nrows, ncols)
    cdef int status, i
    try:
        with nogil:
            status = reduce_snf(D, NULL, NULL, nrows, ncols)
        if status:
            raise OverflowError("int64 overflow in SNF kernel")
        return [D[i * ncols + i] for i in range(min(nrows, ncols))]
    finally:
        free(D)


def upset_masks(int n, up, down):
    if n > 62:
        raise OverflowError("bitmask kernel limited to 62 elements")
    cdef unsigned long long upm[64]
    cdef unsigned long long downm[64]
    cdef int i
    for i in range(n):
        upm[i] = up[i]
        downm[i] = down[i]
    # explicit stack of (index, in, out); depth is at most n + 1 per level
    cdef int cap = 2 * n + 4
    cdef int *si = <int *> malloc(cap * sizeof(int))
    cdef unsigned long long *sin = <unsigned long long *> malloc(cap * sizeof(unsigned long long))
    cdef unsigned long long *sout = <unsigned long long *> malloc(cap * sizeof(unsigned long long))
    cdef int top = 0
    cdef unsigned long long inn, outm
    cdef list out = []
    if si == NULL or sin == NULL or sout == NULL:
        free(si); free(sin); free(sout)
        raise MemoryError()
    try:
        si[0] = 0; sin[0] = 0; sout[0] = 0
        top = 1
        while top > 0:
            top -= 1
            i = si[top]; inn = sin[top]; outm = sout[top]
            while i < n and (((inn >> i) & 1) or ((outm >> i) & 1)):
                i += 1
            if i == n:
                out.append(inn)
                continue
            si[top] = i + 1; sin[top] = inn; sout[top] = outm | downm[i]
            top += 1
            si[top] = i + 1; sin[top] = inn | upm[i]; sout[top] = outm
            top += 1
        return out
    finally:
        free(si); free(sin); free(sout)
