# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled edit-distance kernels.

Must match ``_kernels_py`` exactly; the test suite cross-checks both
backends against an independent recursive oracle.
"""

from libc.stdlib cimport free, malloc


cdef inline Py_ssize_t _min3(Py_ssize_t x, Py_ssize_t y, Py_ssize_t z):
    if y < x:
        x = y
    if z < x:
        x = z
    return x


def distance_ids(a, b):
    """Unit-cost Levenshtein distance between two sequences of ints."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef long* xa = <long*> malloc(la * sizeof(long))
    cdef long* xb = <long*> malloc(lb * sizeof(long))
    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cur = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    if xa == NULL or xb == NULL or prev == NULL or cur == NULL:
        free(xa); free(xb); free(prev); free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j, cost, out
    cdef Py_ssize_t* tmp
    cdef long ai
    try:
        for i in range(la):
            xa[i] = a[i]
        for j in range(lb):
            xb[j] = b[j]
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            cur[0] = i
            ai = xa[i - 1]
            for j in range(1, lb + 1):
                cost = 0 if ai == xb[j - 1] else 1
                cur[j] = _min3(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
            tmp = prev; prev = cur; cur = tmp
        out = prev[lb]
    finally:
        free(xa); free(xb); free(prev); free(cur)
    return out


def distance_str(str a, str b):
    """Unit-cost Levenshtein distance between two strings (code points)."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cur = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(prev); free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j, cost, out
    cdef Py_ssize_t* tmp
    cdef Py_UCS4 ai
    try:
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            cur[0] = i
            ai = a[i - 1]
            for j in range(1, lb + 1):
                cost = 0 if ai == <Py_UCS4> b[j - 1] else 1
                cur[j] = _min3(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
            tmp = prev; prev = cur; cur = tmp
        out = prev[lb]
    finally:
        free(prev); free(cur)
    return out


def bounded_distance_str(str a, str b, limit):
    """Levenshtein distance between strings, capped at limit.

    Returns the exact distance when it is <= limit, otherwise limit + 1.
    """
    cdef Py_ssize_t lim = limit
    if lim < 0:
        raise ValueError("limit must be >= 0")
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef Py_ssize_t delta = la - lb if la >= lb else lb - la
    if delta > lim:
        return lim + 1
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef Py_ssize_t big = lim + 1
    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cur = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(prev); free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j, lo, hi, cost, best, row_min, out
    cdef Py_ssize_t* tmp
    cdef Py_UCS4 ai
    try:
        for j in range(lb + 1):
            prev[j] = j if j <= lim else big
        for j in range(lb + 1):
            cur[j] = big
        for i in range(1, la + 1):
            lo = i - lim
            if lo < 1:
                lo = 1
            hi = i + lim
            if hi > lb:
                hi = lb
            cur[lo - 1] = i if (lo - 1 == 0 and i <= lim) else big
            ai = a[i - 1]
            row_min = cur[lo - 1]
            for j in range(lo, hi + 1):
                cost = 0 if ai == <Py_UCS4> b[j - 1] else 1
                best = prev[j - 1] + cost
                if prev[j] + 1 < best:
                    best = prev[j] + 1
                if cur[j - 1] + 1 < best:
                    best = cur[j - 1] + 1
                if best > big:
                    best = big
                cur[j] = best
                if best < row_min:
                    row_min = best
            if row_min >= big:
                out = big
                return out
            tmp = prev; prev = cur; cur = tmp
            for j in range(lb + 1):
                cur[j] = big
        out = prev[lb] if prev[lb] <= lim else big
    finally:
        free(prev); free(cur)
    return out


def edit_counts_ids(a, b):
    """(distance, substitutions, insertions, deletions) between int sequences.

    a is the reference: deletions are reference units absent from b,
    insertions are extra units in b. Among equally-cheap moves the diagonal
    wins, then deletion, then insertion, matching the Python backend.
    """
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return (lb, 0, lb, 0)
    if lb == 0:
        return (la, 0, 0, la)
    cdef long* xa = <long*> malloc(la * sizeof(long))
    cdef long* xb = <long*> malloc(lb * sizeof(long))
    # four parallel rows: distance, substitutions, insertions, deletions
    cdef Py_ssize_t width = lb + 1
    cdef Py_ssize_t* pd = <Py_ssize_t*> malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t* ps = <Py_ssize_t*> malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t* pi = <Py_ssize_t*> malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t* pe = <Py_ssize_t*> malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cd = <Py_ssize_t*> malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cs = <Py_ssize_t*> malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t* ci = <Py_ssize_t*> malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t* ce = <Py_ssize_t*> malloc(width * sizeof(Py_ssize_t))
    if (xa == NULL or xb == NULL or pd == NULL or ps == NULL
            or pi == NULL or pe == NULL or cd == NULL or cs == NULL
            or ci == NULL or ce == NULL):
        free(xa); free(xb)
        free(pd); free(ps); free(pi); free(pe)
        free(cd); free(cs); free(ci); free(ce)
        raise MemoryError()
    cdef Py_ssize_t i, j, bd, bs, bi, be
    cdef Py_ssize_t* tmp
    cdef long ai
    try:
        for i in range(la):
            xa[i] = a[i]
        for j in range(lb):
            xb[j] = b[j]
        for j in range(width):
            pd[j] = j; ps[j] = 0; pi[j] = j; pe[j] = 0
        for i in range(1, la + 1):
            cd[0] = i; cs[0] = 0; ci[0] = 0; ce[0] = i
            ai = xa[i - 1]
            for j in range(1, width):
                if ai == xb[j - 1]:
                    bd = pd[j - 1]; bs = ps[j - 1]; bi = pi[j - 1]; be = pe[j - 1]
                else:
                    bd = pd[j - 1] + 1; bs = ps[j - 1] + 1; bi = pi[j - 1]; be = pe[j - 1]
                if pd[j] + 1 < bd:
                    bd = pd[j] + 1; bs = ps[j]; bi = pi[j]; be = pe[j] + 1
                if cd[j - 1] + 1 < bd:
                    bd = cd[j - 1] + 1; bs = cs[j - 1]; bi = ci[j - 1] + 1; be = ce[j - 1]
                cd[j] = bd; cs[j] = bs; ci[j] = bi; ce[j] = be
            tmp = pd; pd = cd; cd = tmp
            tmp = ps; ps = cs; cs = tmp
            tmp = pi; pi = ci; ci = tmp
            tmp = pe; pe = ce; ce = tmp
        return (pd[lb], ps[lb], pi[lb], pe[lb])
    finally:
        free(xa); free(xb)
        free(pd); free(ps); free(pi); free(pe)
        free(cd); free(cs); free(ci); free(ce)
