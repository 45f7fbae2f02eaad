"""Pure-Python edit-distance kernels.

Semantics must stay byte-for-byte identical to the compiled extension in
``_kernels.pyx``; the test suite cross-checks both backends against an
independent recursive oracle.
"""


def distance_ids(a, b):
    """Unit-cost Levenshtein distance between two sequences of ints."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    cur = [0] * (lb + 1)
    for i in range(1, la + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            cur[j] = min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
        prev, cur = cur, prev
    return prev[lb]


def distance_str(a, b):
    """Unit-cost Levenshtein distance between two strings (code points)."""
    return distance_ids([ord(c) for c in a], [ord(c) for c in b])


def bounded_distance_str(a, b, limit):
    """Levenshtein distance between strings, capped at limit.

    Returns the exact distance when it is <= limit, otherwise limit + 1.
    A banded dynamic programme keeps the work near O(limit * len).
    """
    if limit < 0:
        raise ValueError("limit must be >= 0")
    la, lb = len(a), len(b)
    if abs(la - lb) > limit:
        return limit + 1
    if la == 0:
        return lb
    if lb == 0:
        return la
    big = limit + 1
    prev = [j if j <= limit else big for j in range(lb + 1)]
    cur = [big] * (lb + 1)
    for i in range(1, la + 1):
        lo = max(1, i - limit)
        hi = min(lb, i + limit)
        cur[lo - 1] = i if (lo - 1 == 0 and i <= limit) else big
        ai = a[i - 1]
        row_min = cur[lo - 1]
        for j in range(lo, hi + 1):
            cost = 0 if ai == b[j - 1] else 1
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
            return big
        prev, cur = cur, prev
        for j in range(lb + 1):
            cur[j] = big
    return prev[lb] if prev[lb] <= limit else big


def edit_counts_ids(a, b):
    """(distance, substitutions, insertions, deletions) between int sequences.

    a is the reference: deletions are reference units absent from b,
    insertions are extra units in b. Among equally-cheap moves the diagonal
    wins, then deletion, then insertion, so both backends agree exactly.
    """
    la, lb = len(a), len(b)
    # per cell: distance, substitutions, insertions, deletions
    prev = [(j, 0, j, 0) for j in range(lb + 1)]
    for i in range(1, la + 1):
        cur = [(i, 0, 0, i)]
        ai = a[i - 1]
        for j in range(1, lb + 1):
            pd, ps, pi, pdel = prev[j - 1]
            if ai == b[j - 1]:
                best = (pd, ps, pi, pdel)
            else:
                best = (pd + 1, ps + 1, pi, pdel)
            ud, us, ui, udel = prev[j]
            if ud + 1 < best[0]:
                best = (ud + 1, us, ui, udel + 1)
            ld, ls, li, ldel = cur[j - 1]
            if ld + 1 < best[0]:
                best = (ld + 1, ls, li + 1, ldel)
            cur.append(best)
        prev = cur
    return prev[lb]
