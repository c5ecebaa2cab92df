# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Basic feasible points of {x : A x <= b} in machine integers.

Same algorithm as ``_vertex_py.basic_feasible_points``: a depth-first walk
over row subsets with incremental fraction-free (Montante) elimination, so a
linearly dependent prefix prunes its whole subtree.  Every stored entry is a
minor of [A | b]; the caller guarantees those fit in 62 bits, and products are
formed in 128-bit arithmetic before the exact division.
"""

from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    typedef __int128 i128_t;
    """
    ctypedef long long i128_t


def basic_feasible_points(long long[:, ::1] A, long long[::1] b):
    """Return [(numerators, denominator), ...] for every feasible basic point.

    Denominators are positive.  Degenerate vertices appear once per basis.
    """
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t d = A.shape[1]
    cdef Py_ssize_t w = d + 1
    cdef Py_ssize_t t, j, c, r, cc
    out = []
    if d == 0 or m < d:
        return out

    # mats[t] holds the t reduced rows (width w) after t pivots
    cdef long long *mats = <long long *> malloc((d + 1) * d * w * sizeof(long long))
    cdef long long *piv = <long long *> malloc((d + 1) * sizeof(long long))
    cdef Py_ssize_t *pcol = <Py_ssize_t *> malloc(d * sizeof(Py_ssize_t))
    cdef Py_ssize_t *nxt = <Py_ssize_t *> malloc((d + 1) * sizeof(Py_ssize_t))
    cdef long long *row = <long long *> malloc(w * sizeof(long long))
    cdef long long *x = <long long *> malloc(d * sizeof(long long))
    if not (mats and piv and pcol and nxt and row and x):
        free(mats); free(piv); free(pcol); free(nxt); free(row); free(x)
        raise MemoryError()

    cdef long long *cur
    cdef long long *new
    cdef i128_t acc, lhs, rhs, p, D, mc
    cdef long long den
    cdef bint zero, ok
    cdef Py_ssize_t depth = 0

    try:
        piv[0] = 1
        nxt[0] = 0
        while True:
            if depth == d:
                cur = mats + d * d * w
                den = piv[d]
                for j in range(d):
                    x[pcol[j]] = cur[j * w + d]
                if den < 0:
                    den = -den
                    for j in range(d):
                        x[j] = -x[j]
                ok = True
                for r in range(m):
                    lhs = 0
                    for c in range(d):
                        lhs += (<i128_t> A[r, c]) * x[c]
                    rhs = (<i128_t> b[r]) * den
                    if lhs > rhs:
                        ok = False
                        break
                if ok:
                    out.append((tuple([x[j] for j in range(d)]), den))
                depth -= 1
                continue

            r = nxt[depth]
            if r > m - (d - depth):
                if depth == 0:
                    break
                depth -= 1
                continue
            nxt[depth] = r + 1

            cur = mats + depth * d * w
            p = piv[depth]
            # bordered minors of the candidate row against the current pivots
            for c in range(w):
                acc = p * A[r, c] if c < d else p * b[r]
                for j in range(depth):
                    acc -= (<i128_t> (A[r, pcol[j]])) * cur[j * w + c]
                row[c] = <long long> acc
            zero = True
            cc = -1
            for c in range(d):
                if row[c] != 0:
                    zero = False
                    cc = c
                    break
            if zero:
                continue

            D = row[cc]
            new = mats + (depth + 1) * d * w
            for j in range(depth):
                mc = cur[j * w + cc]
                for c in range(w):
                    new[j * w + c] = <long long> ((D * cur[j * w + c] - mc * row[c]) // p)
            for c in range(w):
                new[depth * w + c] = row[c]
            pcol[depth] = cc
            piv[depth + 1] = <long long> D
            depth += 1
            nxt[depth] = r + 1
    finally:
        free(mats); free(piv); free(pcol); free(nxt); free(row); free(x)
    return out
