"""Finite posets, lower ideals, interval-closed subsets, linear extensions.

Subsets are stored as integer bitmasks keyed by element index, so
membership and downward-closure tests are single word operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Sequence

from . import kernels
from .errors import (
    CycleError,
    DuplicateLabelError,
    NotIntervalClosedError,
    NotLowerIdealError,
    SizeLimitError,
    UnknownElementError,
)

IDEAL_LIMIT = 20
EXTENSION_LIMIT = 9


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def subset_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Deterministic sort key: cardinality, then lexicographic on indices."""
    idx = tuple(_bits(mask))
    return (len(idx), idx)


class Poset:
    """An immutable finite poset.

    ``elements`` fixes the element order used by every deterministic listing.
    The stored relation is the reflexive-transitive closure of whatever pairs
    were supplied; ``covers`` is the derived Hasse relation.
    """

    __slots__ = ("elements", "_index", "_down", "_up", "_hash")

    def __init__(self, elements: Sequence[Hashable], down: Sequence[int]):
        self.elements = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        self._down = tuple(down)
        up = [0] * len(self._down)
        for j, d in enumerate(self._down):
            for i in _bits(d):
                up[i] |= 1 << j
        self._up = tuple(up)
        self._hash = None

    @classmethod
    def from_pairs(cls, elements: Iterable[Hashable], pairs: Iterable[tuple]) -> "Poset":
        return validate_poset(elements, pairs)

    @classmethod
    def chain(cls, elements: Sequence[Hashable]) -> "Poset":
        return validate_poset(elements, zip(elements, elements[1:]))

    @classmethod
    def antichain(cls, elements: Sequence[Hashable]) -> "Poset":
        return validate_poset(elements, ())

    # -- basic protocol -------------------------------------------------
    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, label) -> bool:
        return label in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and self._down == other._down

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.elements, self._down))
        return self._hash

    def __repr__(self) -> str:
        rel = ", ".join(f"{a}<{b}" for a, b in self.covers())
        return f"Poset({list(self.elements)!r}; {rel})"

    # -- indices and masks ----------------------------------------------
    @property
    def full_mask(self) -> int:
        return (1 << len(self.elements)) - 1

    @property
    def down_masks(self) -> tuple[int, ...]:
        return self._down

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownElementError(f"unknown element {label!r}") from None

    def mask_of(self, labels: Iterable[Hashable]) -> int:
        m = 0
        for x in labels:
            m |= 1 << self.index(x)
        return m

    def labels_of(self, mask: int) -> tuple:
        return tuple(self.elements[i] for i in _bits(mask))

    def down_mask(self, label) -> int:
        return self._down[self.index(label)]

    def up_mask(self, label) -> int:
        return self._up[self.index(label)]

    # -- order ------------------------------------------------------------
    def leq(self, a, b) -> bool:
        return bool(self._down[self.index(b)] >> self.index(a) & 1)

    def lt(self, a, b) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a, b) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def relation(self) -> list[tuple]:
        """All pairs ``(a, b)`` with ``a <= b``, in element order."""
        return [
            (self.elements[i], self.elements[j])
            for j in range(len(self))
            for i in _bits(self._down[j])
        ]

    def covers(self) -> list[tuple]:
        """Hasse diagram edges ``(a, b)``: ``a < b`` with nothing in between."""
        out = []
        n = len(self)
        for j in range(n):
            strict = self._down[j] & ~(1 << j)
            for i in _bits(strict):
                between = strict & self._up[i] & ~(1 << i)
                if not between:
                    out.append((self.elements[i], self.elements[j]))
        return sorted(out, key=lambda p: (self._index[p[0]], self._index[p[1]]))

    def maximal(self, mask: int | None = None) -> tuple:
        """Maximal elements of the subset ``mask`` (default: whole poset)."""
        if mask is None:
            mask = self.full_mask
        return tuple(
            self.elements[i] for i in _bits(mask) if not (self._up[i] & mask & ~(1 << i))
        )

    def minimal(self, mask: int | None = None) -> tuple:
        if mask is None:
            mask = self.full_mask
        return tuple(
            self.elements[i] for i in _bits(mask) if not (self._down[i] & mask & ~(1 << i))
        )

    # -- derived posets ---------------------------------------------------
    def subposet(self, labels: Iterable[Hashable]) -> "Poset":
        """Induced order on ``labels``, kept in this poset's element order."""
        mask = self.mask_of(labels)
        keep = list(_bits(mask))
        pos = {old: new for new, old in enumerate(keep)}
        down = []
        for old in keep:
            d = 0
            for i in _bits(self._down[old] & mask):
                d |= 1 << pos[i]
            down.append(d)
        return Poset([self.elements[i] for i in keep], down)

    def dual(self) -> "Poset":
        return Poset(self.elements, self._up)

    def relabel(self, mapping) -> "Poset":
        return Poset([mapping[e] for e in self.elements], self._down)

    # -- subsets ----------------------------------------------------------
    def is_lower_mask(self, mask: int) -> bool:
        for i in _bits(mask):
            if self._down[i] & ~mask:
                return False
        return True

    def is_interval_closed_mask(self, mask: int) -> bool:
        # s is between members iff it lies above some member and below some member
        above = 0
        below = 0
        for i in _bits(mask):
            above |= self._up[i]
            below |= self._down[i]
        return (above & below) & ~mask == 0


def validate_poset(elements: Iterable[Hashable], pairs: Iterable[tuple]) -> Poset:
    """Close ``pairs`` reflexively and transitively and check antisymmetry."""
    elements = list(elements)
    index = {}
    for e in elements:
        if e in index:
            raise DuplicateLabelError(f"duplicate element label {e!r}")
        index[e] = len(index)
    idx_pairs = []
    for a, b in pairs:
        for x in (a, b):
            if x not in index:
                raise UnknownElementError(f"unknown element {x!r} in relation")
        idx_pairs.append((index[a], index[b]))
    down = kernels.transitive_closure(len(elements), idx_pairs)
    for j, d in enumerate(down):
        for i in _bits(d & ~(1 << j)):
            if down[i] >> j & 1:
                raise CycleError(
                    f"relation is not antisymmetric: {elements[i]!r} and {elements[j]!r}"
                )
    return Poset(elements, down)


@dataclass(frozen=True)
class PosetSubset:
    poset: Poset
    mask: int

    @property
    def members(self) -> tuple:
        return self.poset.labels_of(self.mask)

    def __contains__(self, label) -> bool:
        return bool(self.mask >> self.poset.index(label) & 1)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __le__(self, other: "PosetSubset") -> bool:
        return self.mask & ~other.mask == 0

    def sort_key(self):
        return subset_key(self.mask)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({{{', '.join(map(str, self.members))}}})"


class LowerIdeal(PosetSubset):
    """A downward-closed subset; construct through :func:`lower_ideal`."""


class IntervalClosedSet(PosetSubset):
    """A convex subset; construct through :func:`interval_closed`."""


def _mask(P: Poset, S) -> int:
    if isinstance(S, PosetSubset):
        return S.mask
    return P.mask_of(S)


def is_lower_ideal(P: Poset, S) -> bool:
    return P.is_lower_mask(_mask(P, S))


def lower_ideal(P: Poset, S) -> LowerIdeal:
    m = _mask(P, S)
    if not P.is_lower_mask(m):
        raise NotLowerIdealError(f"{sorted(map(str, P.labels_of(m)))} is not a lower ideal")
    return LowerIdeal(P, m)


def enumerate_lower_ideals(P: Poset, limit: int = IDEAL_LIMIT) -> list[LowerIdeal]:
    """Every lower ideal once, sorted by size then lexicographically."""
    if len(P) > limit:
        raise SizeLimitError(f"poset has {len(P)} elements, limit is {limit}")
    masks = sorted(kernels.lower_ideals(list(P.down_masks)), key=subset_key)
    return [LowerIdeal(P, m) for m in masks]


def lower_ideal_masks(P: Poset, limit: int = IDEAL_LIMIT) -> list[int]:
    if len(P) > limit:
        raise SizeLimitError(f"poset has {len(P)} elements, limit is {limit}")
    return sorted(kernels.lower_ideals(list(P.down_masks)), key=subset_key)


def is_interval_closed(P: Poset, T) -> bool:
    return P.is_interval_closed_mask(_mask(P, T))


def interval_closed(P: Poset, T) -> IntervalClosedSet:
    m = _mask(P, T)
    if not P.is_interval_closed_mask(m):
        raise NotIntervalClosedError(f"{list(P.labels_of(m))} is not interval closed")
    return IntervalClosedSet(P, m)


def ideal_hull(P: Poset, T) -> tuple[LowerIdeal, LowerIdeal]:
    """Return ``(I_T, I_<T)``: the ideal generated by ``T`` and ``I_T minus T``."""
    m = _mask(P, T)
    if not P.is_interval_closed_mask(m):
        raise NotIntervalClosedError(f"{list(P.labels_of(m))} is not interval closed")
    hull = 0
    for i in _bits(m):
        hull |= P.down_masks[i]
    return LowerIdeal(P, hull), LowerIdeal(P, hull & ~m)


def principal_ideal(P: Poset, s) -> LowerIdeal:
    return LowerIdeal(P, P.down_mask(s))


def linear_extensions(P: Poset, limit: int = EXTENSION_LIMIT) -> list[tuple]:
    """All total orders refining ``P``, lexicographic in element order."""
    if len(P) > limit:
        raise SizeLimitError(f"poset has {len(P)} elements, limit is {limit}")
    return [tuple(P.elements[i] for i in ext) for ext in kernels.linear_extensions(list(P.down_masks))]


def count_linear_extensions(P: Poset) -> int:
    return kernels.count_linear_extensions(list(P.down_masks))


def is_order_isomorphism(P: Poset, Q: Poset, mapping: dict) -> bool:
    """True iff ``mapping`` is a bijection ``P -> Q`` preserving and reflecting order."""
    if len(P) != len(Q) or set(mapping) != set(P.elements):
        return False
    if set(mapping.values()) != set(Q.elements):
        return False
    for a, b in combinations(P.elements, 2):
        if P.leq(a, b) != Q.leq(mapping[a], mapping[b]):
            return False
        if P.leq(b, a) != Q.leq(mapping[b], mapping[a]):
            return False
    return True
