"""Pure-Python versions of the hot kernels.

All kernels work on bitmasks: element ``i`` of a poset is bit ``1 << i``,
and ``down[i]`` is the mask of every ``j`` with ``j <= i`` (including ``i``).
The compiled module ``_ckernels`` exposes the same functions with the same
results; :mod:`declat.kernels` picks one at import.
"""

from __future__ import annotations


def transitive_closure(n, pairs):
    """Return ``down`` masks of the reflexive-transitive closure of ``pairs``.

    ``pairs`` is an iterable of ``(i, j)`` meaning ``i <= j``.
    """
    down = [1 << i for i in range(n)]
    for i, j in pairs:
        down[j] |= 1 << i
    # Warshall on rows: if k <= j then everything below k is below j.
    for k in range(n):
        bk = 1 << k
        dk = down[k]
        for j in range(n):
            if down[j] & bk:
                down[j] |= dk
    return down


def lower_ideals(down):
    """All lower ideals as masks, in no particular order."""
    n = len(down)
    out = []

    def rec(i, mask):
        if i == n:
            out.append(mask)
            return
        rec(i + 1, mask)
        # Include i only if its strict down-set is already chosen; elements
        # are visited in index order, so this needs a linear-extension indexing.
        if down[i] & ~(1 << i) & ~mask == 0:
            rec(i + 1, mask | (1 << i))

    order = _topological(down)
    if order == list(range(n)):
        rec(0, 0)
        return out
    # Re-index into a linear extension, enumerate, map back.
    pos = {e: k for k, e in enumerate(order)}
    rdown = []
    for e in order:
        m = 0
        for j in range(n):
            if down[e] >> j & 1:
                m |= 1 << pos[j]
        rdown.append(m)
    res = []
    for rm in lower_ideals(rdown):
        m = 0
        for k in range(n):
            if rm >> k & 1:
                m |= 1 << order[k]
        res.append(m)
    return res


def _topological(down):
    n = len(down)
    done = 0
    order = []
    while len(order) < n:
        for i in range(n):
            if not done >> i & 1 and down[i] & ~(1 << i) & ~done == 0:
                order.append(i)
                done |= 1 << i
                break
        else:  # pragma: no cover - closure is antisymmetric by construction
            raise ValueError("relation has a cycle")
    return order


def linear_extensions(down):
    """All linear extensions as index tuples, lexicographic by index."""
    n = len(down)
    full = (1 << n) - 1
    out = []
    prefix = []

    def rec(done):
        if done == full:
            out.append(tuple(prefix))
            return
        for i in range(n):
            if not done >> i & 1 and down[i] & ~(1 << i) & ~done == 0:
                prefix.append(i)
                rec(done | (1 << i))
                prefix.pop()

    rec(0)
    return out


def count_linear_extensions(down):
    """Number of linear extensions, by dynamic programming over ideals."""
    n = len(down)
    counts = {0: 1}
    for size in range(n):
        nxt = {}
        for done, c in counts.items():
            for i in range(n):
                if not done >> i & 1 and down[i] & ~(1 << i) & ~done == 0:
                    key = done | (1 << i)
                    nxt[key] = nxt.get(key, 0) + c
        counts = nxt
    return sum(counts.values())


EMPTY_LO = 1 << 62
EMPTY_HI = -(1 << 62)


def aisle_signature(lows, highs, thresholds, ms):
    """Membership bits of split objects against one glued t-structure.

    ``lows`` / ``highs`` are flat row-major ``objects x slots`` buffers holding
    the min / max degree of each component; a zero component is encoded as
    ``EMPTY_LO`` / ``EMPTY_HI`` so it never fails a test.  ``thresholds[s]``
    is the shift of slot ``s``.  For each object and each ``m`` in ``ms`` two
    bytes are produced: ``x in D^{<=m}`` and ``x in D^{>=m}``.
    """
    k = len(thresholds)
    n_obj = len(lows) // k if k else 0
    out = bytearray()
    for o in range(n_obj):
        base = o * k
        for m in ms:
            le = 1
            ge = 1
            for s in range(k):
                t = m + thresholds[s]
                if highs[base + s] > t:
                    le = 0
                if lows[base + s] < t:
                    ge = 0
            out.append(le)
            out.append(ge)
    return bytes(out)
