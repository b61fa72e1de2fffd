"""Finite distributive lattices stored through their Birkhoff poset.

A :class:`DistLattice` is the family of lower ideals of its ``base`` poset;
meet is intersection and join is union.  The canonical label of an element
is the tuple of base elements it contains, in base order.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Hashable, Iterable

from .errors import NonDistributiveError, NotComparableError, UnknownElementError
from .poset import (
    IDEAL_LIMIT,
    LowerIdeal,
    Poset,
    _bits,
    lower_ideal_masks,
    validate_poset,
)


class DistLattice:
    __slots__ = ("base", "masks", "_pos")

    def __init__(self, base: Poset, limit: int = IDEAL_LIMIT):
        self.base = base
        self.masks = tuple(lower_ideal_masks(base, limit))
        self._pos = {m: i for i, m in enumerate(self.masks)}

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self):
        return (LowerIdeal(self.base, m) for m in self.masks)

    def __repr__(self) -> str:
        return f"DistLattice({len(self)} elements over {self.base!r})"

    @property
    def ideals(self) -> list[LowerIdeal]:
        return list(self)

    @property
    def bottom(self) -> LowerIdeal:
        return LowerIdeal(self.base, 0)

    @property
    def top(self) -> LowerIdeal:
        return LowerIdeal(self.base, self.base.full_mask)

    def label(self, x) -> tuple:
        return self.base.labels_of(self._mask(x))

    def element(self, x) -> LowerIdeal:
        """Coerce a label collection / mask / ideal into a lattice element."""
        return LowerIdeal(self.base, self._mask(x))

    def index_of(self, x) -> int:
        return self._pos[self._mask(x)]

    def _mask(self, x) -> int:
        if isinstance(x, LowerIdeal):
            if x.poset != self.base:
                raise UnknownElementError("ideal belongs to a different poset")
            m = x.mask
        elif isinstance(x, int):
            m = x
        else:
            m = self.base.mask_of(x)
        if m not in self._pos:
            raise UnknownElementError(f"{list(self.base.labels_of(m))} is not an element")
        return m

    # -- lattice operations -------------------------------------------------
    def meet(self, x, y) -> LowerIdeal:
        return LowerIdeal(self.base, self._mask(x) & self._mask(y))

    def join(self, x, y) -> LowerIdeal:
        return LowerIdeal(self.base, self._mask(x) | self._mask(y))

    def leq(self, x, y) -> bool:
        return self._mask(x) & ~self._mask(y) == 0

    def covers(self) -> list[tuple[LowerIdeal, LowerIdeal]]:
        """Hasse edges: ``J`` covers ``I`` iff ``J = I + {s}``."""
        out = []
        for m in self.masks:
            for i in range(len(self.base)):
                bit = 1 << i
                if not m & bit and (m | bit) in self._pos:
                    out.append((LowerIdeal(self.base, m), LowerIdeal(self.base, m | bit)))
        return out

    def comparable_pairs(self) -> list[tuple[LowerIdeal, LowerIdeal]]:
        return [
            (LowerIdeal(self.base, a), LowerIdeal(self.base, b))
            for a in self.masks
            for b in self.masks
            if a & ~b == 0
        ]

    def lower_covers(self, x) -> list[LowerIdeal]:
        m = self._mask(x)
        return [
            LowerIdeal(self.base, m & ~(1 << i))
            for i in _bits(m)
            if (m & ~(1 << i)) in self._pos
        ]

    def as_poset(self) -> Poset:
        """The lattice itself as a poset on canonical labels."""
        labels = [self.base.labels_of(m) for m in self.masks]
        pairs = [
            (labels[i], labels[j])
            for i, a in enumerate(self.masks)
            for j, b in enumerate(self.masks)
            if i != j and a & ~b == 0
        ]
        return validate_poset(labels, pairs)

    # -- Birkhoff --------------------------------------------------------
    def join_prime_masks(self) -> list[int]:
        """Non-zero elements with exactly one lower cover, in lattice order."""
        return [m for m in self.masks if m and len(self.lower_covers(m)) == 1]

    def is_join_prime(self, x) -> bool:
        """Direct check of ``s <= J1 v J2  =>  s <= J1 or s <= J2``."""
        s = self._mask(x)
        if s == 0:
            return False
        for a, b in product(self.masks, repeat=2):
            if s & ~(a | b) == 0 and s & ~a and s & ~b:
                return False
        return True

    def join_primes(self) -> Poset:
        """Poset of join-prime elements, labelled by canonical labels."""
        jp = self.join_prime_masks()
        labels = [self.base.labels_of(m) for m in jp]
        pairs = [
            (labels[i], labels[j])
            for i, a in enumerate(jp)
            for j, b in enumerate(jp)
            if i != j and a & ~b == 0
        ]
        return validate_poset(labels, pairs)

    def principal_map(self) -> dict:
        """``s -> label of the principal ideal of s``: the iso base -> JP(L)."""
        return {s: self.base.labels_of(self.base.down_mask(s)) for s in self.base.elements}

    def interval(self, low, high) -> "DistLattice":
        """``[low, high]``, realised as the ideal lattice of ``high minus low``.

        An element ``J`` of the interval corresponds to the ideal ``J minus low``
        of the returned lattice; :meth:`interval_elements` lists the ``J``.
        """
        a, b = self._mask(low), self._mask(high)
        if a & ~b:
            raise NotComparableError(
                f"{list(self.base.labels_of(a))} is not below {list(self.base.labels_of(b))}"
            )
        return DistLattice(self.base.subposet(self.base.labels_of(b & ~a)))

    def interval_elements(self, low, high) -> list[LowerIdeal]:
        a, b = self._mask(low), self._mask(high)
        if a & ~b:
            raise NotComparableError("interval bounds are not comparable")
        return [LowerIdeal(self.base, m) for m in self.masks if a & ~m == 0 and m & ~b == 0]

    def opposite(self) -> "DistLattice":
        """Order-reversed lattice: ideals of the dual poset, ``x -> complement``."""
        return DistLattice(self.base.dual())

    def opposite_element(self, x) -> LowerIdeal:
        """Image of ``x`` in :meth:`opposite` (its complement, an ideal of the dual)."""
        return LowerIdeal(self.base.dual(), self.base.full_mask & ~self._mask(x))


def from_poset(P: Poset, limit: int = IDEAL_LIMIT) -> DistLattice:
    return DistLattice(P, limit)


def join_primes(L: DistLattice) -> Poset:
    return L.join_primes()


def meet(L: DistLattice, x, y) -> LowerIdeal:
    return L.meet(x, y)


def join(L: DistLattice, x, y) -> LowerIdeal:
    return L.join(x, y)


def interval(L: DistLattice, low, high) -> DistLattice:
    return L.interval(low, high)


def opposite(L: DistLattice) -> DistLattice:
    return L.opposite()


def from_order(elements: Iterable[Hashable], pairs: Iterable[tuple]) -> tuple[DistLattice, dict]:
    """Build a lattice from an abstract order relation.

    Checks that all meets and joins exist, extracts the join-irreducibles
    and rebuilds through Birkhoff; a finite lattice is distributive iff that
    rebuild has the same number of elements.
    Returns the lattice and the isomorphism ``original element -> ideal``.
    """
    P = validate_poset(elements, pairs)
    els = P.elements
    n = len(els)
    if n == 0:
        raise NonDistributiveError("a lattice has at least one element")

    def bound(i, j, up):
        common = (P._up[i] & P._up[j]) if up else (P._down[i] & P._down[j])
        for k in _bits(common):
            # the join is the common upper bound lying below all the others
            if common & ~(P._up[k] if up else P._down[k]) == 0:
                return k
        raise NonDistributiveError(f"{els[i]!r} and {els[j]!r} have no {'join' if up else 'meet'}")

    for i in range(n):
        for j in range(i):
            bound(i, j, True)
            bound(i, j, False)
    bottom = next(i for i in range(n) if P._down[i] == 1 << i)
    n_lower_covers = {e: 0 for e in els}
    for _, upper in P.covers():
        n_lower_covers[upper] += 1
    jp = [els[i] for i in range(n) if i != bottom and n_lower_covers[els[i]] == 1]
    S = P.subposet(jp)
    L = DistLattice(S)
    # x -> {join-irreducibles below x} is always an order embedding; the
    # lattice is distributive exactly when it is also onto the ideals
    if len(L) != n:
        raise NonDistributiveError(
            f"{n} elements but {len(L)} ideals of join-irreducibles: not distributive"
        )
    iso = {els[i]: L.element([s for s in jp if P.leq(s, els[i])]) for i in range(n)}
    return L, iso


def check_distributive(L: DistLattice) -> list[tuple]:
    """Triples violating ``x ^ (y v z) = (x ^ y) v (x ^ z)`` (empty when distributive)."""
    bad = []
    for x, y, z in product(L.masks, repeat=3):
        if x & (y | z) != (x & y) | (x & z):
            bad.append((x, y, z))
    return bad


def check_absorption(L: DistLattice) -> list[tuple]:
    return [(x, y) for x, y in combinations(L.masks, 2) if x & (x | y) != x or x | (x & y) != x]
