"""Brute-force reference implementations used only by the tests."""

from __future__ import annotations

import random
from itertools import combinations, permutations

from declat.poset import Poset, validate_poset


def naturally_labelled(n: int) -> list[Poset]:
    """Every poset on ``0..n-1`` in which ``i < j`` implies ``i`` precedes ``j``."""
    out = []

    def rec(k, down):
        if k == n:
            out.append(Poset(list(range(n)), down))
            return
        # the strict down-set of the new element is any lower ideal so far
        for s in range(1 << k):
            if all((down[i] & ~s) == 0 for i in range(k) if s >> i & 1):
                rec(k + 1, down + [s | (1 << k)])

    rec(0, [])
    return out


def labelled_posets(n: int) -> list[Poset]:
    """All posets on ``0..n-1`` (closed under relabelling), each once."""
    seen, out = set(), []
    for P in naturally_labelled(n):
        rel = P.relation()
        for perm in permutations(range(n)):
            Q = validate_poset(range(n), [(perm[a], perm[b]) for a, b in rel])
            if Q.down_masks not in seen:
                seen.add(Q.down_masks)
                out.append(Q)
    return out


def canonical(P: Poset) -> tuple:
    n = len(P)
    best = None
    for perm in permutations(range(n)):
        key = tuple(sorted((perm[P.index(a)], perm[P.index(b)]) for a, b in P.relation()))
        if best is None or key < best:
            best = key
    return best


def random_poset(rng: random.Random, n: int, density: float | None = None) -> Poset:
    if density is None:
        density = rng.random() * 0.6
    order = list(range(n))
    rng.shuffle(order)
    pairs = [(order[i], order[j]) for i, j in combinations(range(n), 2) if rng.random() < density]
    return validate_poset([f"x{i}" for i in range(n)], [(f"x{a}", f"x{b}") for a, b in pairs])


def brute_lower_ideals(P: Poset) -> set[frozenset]:
    out = set()
    els = P.elements
    for r in range(len(els) + 1):
        for S in combinations(els, r):
            S = set(S)
            if all(a in S for b in S for a in els if P.leq(a, b)):
                out.add(frozenset(S))
    return out


def brute_linear_extensions(P: Poset) -> list[tuple]:
    out = []
    for perm in permutations(P.elements):
        pos = {e: i for i, e in enumerate(perm)}
        if all(pos[a] <= pos[b] for a, b in P.relation()):
            out.append(perm)
    return sorted(out, key=lambda t: [P.index(x) for x in t])


def brute_interval_closed(P: Poset, S) -> bool:
    S = set(S)
    return all(
        y in S for x in S for z in S for y in P.elements if P.leq(x, y) and P.leq(y, z)
    )


def blowup_intersections(F) -> list[list[int]]:
    """Intersection numbers by replaying the blow-ups one point at a time.

    Each curve through the blown-up point loses one from its self-
    intersection, two such curves stop meeting there, and the new curve
    is a (-1)-curve meeting each of them once.
    """
    ids = F.ids
    k = {nid: i for i, nid in enumerate(ids)}
    n = len(ids)
    N = [[0] * n for _ in range(n)]
    for nid in ids:
        node = F.node(nid)
        through = ([node.parent] if node.parent else []) + list(node.proximate_to)
        for c in through:
            N[k[c]][k[c]] -= 1
        for a, b in combinations(through, 2):
            N[k[a]][k[b]] -= 1
            N[k[b]][k[a]] -= 1
        i = k[nid]
        N[i][i] = -1
        for c in through:
            N[i][k[c]] = N[k[c]][i] = 1
    return N


def contractible_sets(F) -> set[frozenset]:
    """Subsets closed under "blown up over": contracting E_p forces its descendants."""
    out = set()
    ids = F.ids
    for r in range(len(ids) + 1):
        for S in combinations(ids, r):
            S = set(S)
            if all(d in S for p in S for d in F.descendants(p)):
                out.add(frozenset(S))
    return out


def brute_ample_box(F, bound: int) -> list[tuple]:
    """Every strict coefficient vector in the box with positive pairings."""
    from itertools import product

    from declat.divisors import intersection_matrix

    N = intersection_matrix(F)
    n = len(F)
    out = []
    for a in product(range(-bound, bound + 1), repeat=n):
        if all(sum(N[i][j] * a[j] for j in range(n)) > 0 for i in range(n)):
            out.append(a)
    return out
