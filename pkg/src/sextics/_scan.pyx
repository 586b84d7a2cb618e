# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel scans; same contract as ``_scan_py``."""


def scan_cyclic(weights, int p):
    cdef int c = len(weights)
    cdef long target = 2 * p * p
    cdef long[32] ns
    cdef int[32] a
    cdef int i, t, b, pos
    cdef long w, wt
    cdef bint ok
    if c > 32:
        raise ValueError("too many torsion coordinates")
    for i in range(c):
        ns[i] = weights[i]
        a[i] = 0
    out = []
    if c == 0:
        return out
    while True:
        # mixed-radix increment
        pos = 0
        while pos < c:
            a[pos] += 1
            if a[pos] < p:
                break
            a[pos] = 0
            pos += 1
        if pos == c:
            break
        w = 0
        for i in range(c):
            w += a[i] * (p - a[i]) * ns[i]
        if w % target:
            continue
        ok = True
        for t in range(1, (p + 1) // 2):
            wt = 0
            for i in range(c):
                b = (t * a[i]) % p
                wt += b * (p - b) * ns[i]
            if wt == target:
                ok = False
                break
        if ok:
            out.append(tuple([a[i] for i in range(c)]))
    out.sort()
    return out
