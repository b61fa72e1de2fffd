# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the bitmask kernels in ``_pykernels``.

Masks are ``uint64``; callers route posets with more than 62 elements to the
pure-Python fallback.
"""

from libc.stdint cimport uint64_t, int64_t

MAX_BITS = 62


def transitive_closure(int n, pairs):
    cdef list down = [1 << i for i in range(n)]
    cdef uint64_t[64] d
    cdef int i, j, k
    cdef uint64_t bk
    for i in range(n):
        d[i] = (<uint64_t>1) << i
    for p in pairs:
        i = p[0]
        j = p[1]
        d[j] |= (<uint64_t>1) << i
    for k in range(n):
        bk = (<uint64_t>1) << k
        for j in range(n):
            if d[j] & bk:
                d[j] |= d[k]
    for i in range(n):
        down[i] = d[i]
    return down


cdef int _topological(int n, uint64_t* d, int* order):
    cdef uint64_t done = 0
    cdef int filled = 0, i
    cdef bint found
    while filled < n:
        found = False
        for i in range(n):
            if not (done >> i) & 1 and (d[i] & ~((<uint64_t>1) << i) & ~done) == 0:
                order[filled] = i
                filled += 1
                done |= (<uint64_t>1) << i
                found = True
                break
        if not found:
            return -1
    return 0


def lower_ideals(down):
    cdef int n = len(down)
    cdef uint64_t[64] d
    cdef uint64_t[64] rd
    cdef int[64] order
    cdef int[64] pos
    cdef int i, j, k, depth
    cdef uint64_t mask, m
    cdef list out = []
    # explicit stack: (index, mask, state)
    cdef uint64_t[65] smask
    cdef int[65] sstate
    for i in range(n):
        d[i] = down[i]
    if _topological(n, d, order) < 0:
        raise ValueError("relation has a cycle")
    for k in range(n):
        pos[order[k]] = k
    for k in range(n):
        m = 0
        for j in range(n):
            if (d[order[k]] >> j) & 1:
                m |= (<uint64_t>1) << pos[j]
        rd[k] = m
    depth = 0
    smask[0] = 0
    sstate[0] = 0
    while depth >= 0:
        if depth == n:
            mask = smask[depth]
            m = 0
            for k in range(n):
                if (mask >> k) & 1:
                    m |= (<uint64_t>1) << order[k]
            out.append(m)
            depth -= 1
            continue
        if sstate[depth] == 0:
            sstate[depth] = 1
            smask[depth + 1] = smask[depth]
            sstate[depth + 1] = 0
            depth += 1
        elif sstate[depth] == 1:
            sstate[depth] = 2
            if (rd[depth] & ~((<uint64_t>1) << depth) & ~smask[depth]) == 0:
                smask[depth + 1] = smask[depth] | ((<uint64_t>1) << depth)
                sstate[depth + 1] = 0
                depth += 1
        else:
            depth -= 1
    return out


cdef void _linext(int n, uint64_t* d, uint64_t done, uint64_t full,
                  int* prefix, int plen, list out):
    cdef int i
    if done == full:
        out.append(tuple([prefix[k] for k in range(plen)]))
        return
    for i in range(n):
        if not (done >> i) & 1 and (d[i] & ~((<uint64_t>1) << i) & ~done) == 0:
            prefix[plen] = i
            _linext(n, d, done | ((<uint64_t>1) << i), full, prefix, plen + 1, out)


def linear_extensions(down):
    cdef int n = len(down)
    cdef uint64_t[64] d
    cdef int[64] prefix
    cdef list out = []
    cdef int i
    for i in range(n):
        d[i] = down[i]
    _linext(n, d, 0, ((<uint64_t>1) << n) - 1, prefix, 0, out)
    return out


def count_linear_extensions(down):
    cdef int n = len(down)
    cdef uint64_t[64] d
    cdef int i, size
    cdef uint64_t done, key
    for i in range(n):
        d[i] = down[i]
    counts = {0: 1}
    for size in range(n):
        nxt = {}
        for done_obj, c in counts.items():
            done = done_obj
            for i in range(n):
                if not (done >> i) & 1 and (d[i] & ~((<uint64_t>1) << i) & ~done) == 0:
                    key = done | ((<uint64_t>1) << i)
                    nxt[key] = nxt.get(key, 0) + c
        counts = nxt
    return sum(counts.values())


EMPTY_LO = 1 << 62
EMPTY_HI = -(1 << 62)


def aisle_signature(const int64_t[:] lows, const int64_t[:] highs,
                    const int64_t[:] thresholds, const int64_t[:] ms):
    cdef Py_ssize_t k = thresholds.shape[0]
    cdef Py_ssize_t n_obj = lows.shape[0] // k if k else 0
    cdef Py_ssize_t nm = ms.shape[0]
    cdef Py_ssize_t o, s, a, base, w = 0
    cdef int64_t t, m
    cdef bint le, ge
    out = bytearray(n_obj * nm * 2)
    cdef unsigned char[:] buf = out
    for o in range(n_obj):
        base = o * k
        for a in range(nm):
            m = ms[a]
            le = True
            ge = True
            for s in range(k):
                t = m + thresholds[s]
                if highs[base + s] > t:
                    le = False
                if lows[base + s] < t:
                    ge = False
            buf[w] = le
            buf[w + 1] = ge
            w += 2
    return bytes(out)
