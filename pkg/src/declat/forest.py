"""Blow-up forests: contractions given as iterated point blow-ups.

Each node is a blow-up center.  A root lies on the base ``Y``; a child is a
point on the exceptional curve of its parent.  ``proximate_to`` carries at
most one extra (satellite) proximity.  Node order is the blow-up order.

Exceptional components are labelled by the id of the node that created
them.  In the order on components, a node sits *below* its ancestors:
descendants have to be contracted first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping

from .errors import (
    CycleError,
    DuplicateLabelError,
    ForestMismatchError,
    InvalidProximityError,
    NotLowerIdealError,
    SchemaError,
    UnknownElementError,
)
from .lattice import DistLattice
from .poset import IDEAL_LIMIT, LowerIdeal, Poset, validate_poset


@dataclass(frozen=True)
class Node:
    id: str
    parent: str | None = None
    proximate_to: tuple[str, ...] = ()


@dataclass(frozen=True)
class BlowupForest:
    nodes: tuple[Node, ...] = ()
    _index: Mapping[str, int] = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "_index", {n.id: i for i, n in enumerate(self.nodes)})
        _validate(self)

    # -- structure ----------------------------------------------------------
    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def index(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownElementError(f"unknown node {node_id!r}") from None

    def node(self, node_id: str) -> Node:
        return self.nodes[self.index(node_id)]

    def parent(self, node_id: str) -> str | None:
        return self.node(node_id).parent

    def children(self, node_id: str) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.parent == node_id)

    def proximate(self, node_id: str) -> tuple[str, ...]:
        """Every node this one is proximate to: its parent, then any satellite target."""
        n = self.node(node_id)
        return ((n.parent,) if n.parent is not None else ()) + n.proximate_to

    @property
    def roots(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.parent is None)

    def root_of(self, node_id: str) -> str:
        while (p := self.parent(node_id)) is not None:
            node_id = p
        return node_id

    def ancestors(self, node_id: str) -> tuple[str, ...]:
        """Strict ancestors, nearest first."""
        out = []
        while (p := self.parent(node_id)) is not None:
            out.append(p)
            node_id = p
        return tuple(out)

    def descendants(self, node_id: str) -> tuple[str, ...]:
        """``node_id`` and everything blown up over it, in node order."""
        return self.irr_poset.labels_of(self.irr_poset.down_mask(node_id))

    @cached_property
    def irr_poset(self) -> Poset:
        return validate_poset(self.ids, [(n.id, n.parent) for n in self.nodes if n.parent])

    def induced(self, ids: Iterable[str]) -> "BlowupForest":
        """Sub-forest on ``ids``; edges and proximities leaving the set are dropped."""
        keep = set(ids)
        nodes = []
        for n in self.nodes:
            if n.id in keep:
                parent = n.parent if n.parent in keep else None
                extra = tuple(p for p in n.proximate_to if p in keep) if parent else ()
                nodes.append(Node(n.id, parent, extra))
        return BlowupForest(tuple(nodes))

    # -- serialisation ----------------------------------------------------
    def to_document(self) -> dict:
        return {
            "nodes": [
                {"id": n.id, "parent": n.parent, "proximate_to": list(n.proximate_to)}
                for n in self.nodes
            ]
        }

    def canonical_code(self) -> str:
        """Isomorphism-invariant encoding (tree shape plus satellite distances)."""

        def code(nid):
            n = self.node(nid)
            sat = 0
            if n.proximate_to:
                sat = self.ancestors(nid).index(n.proximate_to[0]) + 1
            kids = sorted(code(c) for c in self.children(nid))
            return f"({sat}{''.join(kids)})"

        return "".join(sorted(code(r) for r in self.roots))


def _validate(F: BlowupForest) -> None:
    seen: dict[str, Node] = {}
    for n in F.nodes:
        if not isinstance(n.id, str) or not n.id:
            raise SchemaError(f"node id must be a non-empty string, got {n.id!r}")
        if n.id in seen:
            raise DuplicateLabelError(f"duplicate node id {n.id!r}")
        seen[n.id] = n
    for i, n in enumerate(F.nodes):
        if n.parent is None:
            continue
        if n.parent not in seen:
            raise SchemaError(f"node {n.id!r}: unknown parent {n.parent!r}")
        if F._index[n.parent] >= i:
            # distinguish a genuine cycle from a mere ordering problem
            cur, hops = n.parent, 0
            while cur is not None and hops <= len(F.nodes):
                if cur == n.id:
                    raise CycleError(f"parent links through {n.id!r} form a cycle")
                cur, hops = seen[cur].parent, hops + 1
            raise SchemaError(f"node {n.id!r} appears before its parent {n.parent!r}")
    satellite_points: dict[tuple[str, str], str] = {}
    for n in F.nodes:
        if len(n.proximate_to) > 1:
            raise InvalidProximityError(f"node {n.id!r} has more than one extra proximity")
        for p in n.proximate_to:
            if p not in seen:
                raise SchemaError(f"node {n.id!r}: unknown proximity target {p!r}")
            if p == n.parent:
                raise SchemaError(f"node {n.id!r}: parent {p!r} repeated in proximate_to")
            if n.parent is None:
                raise InvalidProximityError(f"root {n.id!r} cannot be a satellite point")
            r = seen[n.parent]
            if p != r.parent and p not in r.proximate_to:
                raise InvalidProximityError(
                    f"node {n.id!r}: parent {r.id!r} is not proximate to {p!r}"
                )
            # E_r meets the strict transform of E_p in a single point
            key = (r.id, p)
            if key in satellite_points:
                raise InvalidProximityError(
                    f"nodes {satellite_points[key]!r} and {n.id!r} are the same point "
                    f"(intersection of E[{r.id}] and E[{p}])"
                )
            satellite_points[key] = n.id


def parse_forest(document) -> BlowupForest:
    """Build a forest from a JSON string or an already-decoded mapping."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict) or not isinstance(document.get("nodes"), list):
        raise SchemaError('forest document must be an object with a "nodes" list')
    nodes = []
    for raw in document["nodes"]:
        if not isinstance(raw, dict) or "id" not in raw:
            raise SchemaError(f"bad node entry {raw!r}")
        unknown = set(raw) - {"id", "parent", "proximate_to"}
        if unknown:
            raise SchemaError(f"node {raw.get('id')!r}: unknown keys {sorted(unknown)}")
        parent = raw.get("parent")
        prox = raw.get("proximate_to", [])
        if parent is not None and not isinstance(parent, str):
            raise SchemaError(f"node {raw['id']!r}: parent must be a string or null")
        if not isinstance(prox, list) or not all(isinstance(p, str) for p in prox):
            raise SchemaError(f"node {raw['id']!r}: proximate_to must be a list of ids")
        nodes.append(Node(raw["id"], parent, tuple(prox)))
    return BlowupForest(tuple(nodes))


# -- contractions -----------------------------------------------------------


@dataclass(frozen=True)
class Contraction:
    """An element of Dec(f): the intermediate contraction X -> Z.

    Canonically identified with its set of contracted components, a lower
    ideal of :func:`irr_poset`.
    """

    forest: BlowupForest
    contracted: LowerIdeal

    @property
    def irr(self) -> tuple[str, ...]:
        return self.contracted.members

    @property
    def mask(self) -> int:
        return self.contracted.mask

    def __le__(self, other: "Contraction") -> bool:
        _same_forest(self, other)
        return self.mask & ~other.mask == 0

    def __repr__(self) -> str:
        return f"Contraction({{{', '.join(self.irr)}}})"


def contraction(F: BlowupForest, components: Iterable[str] | LowerIdeal) -> Contraction:
    P = F.irr_poset
    mask = components.mask if isinstance(components, LowerIdeal) else P.mask_of(components)
    if not P.is_lower_mask(mask):
        raise NotLowerIdealError(
            f"{list(P.labels_of(mask))} is not contractible first: "
            "every component blown up over a contracted one must be contracted too"
        )
    return Contraction(F, LowerIdeal(P, mask))


def identity(F: BlowupForest) -> Contraction:
    return Contraction(F, LowerIdeal(F.irr_poset, 0))


def full(F: BlowupForest) -> Contraction:
    return Contraction(F, LowerIdeal(F.irr_poset, F.irr_poset.full_mask))


def _same_forest(g1: Contraction, g2: Contraction) -> None:
    if g1.forest != g2.forest:
        raise ForestMismatchError("contractions live on different forests")


def irr_poset(F: BlowupForest) -> Poset:
    return F.irr_poset


def dec_lattice(F: BlowupForest, limit: int = IDEAL_LIMIT) -> DistLattice:
    return DistLattice(F.irr_poset, limit)


def dec_elements(F: BlowupForest, limit: int = IDEAL_LIMIT) -> list[Contraction]:
    return [Contraction(F, I) for I in dec_lattice(F, limit)]


def conn(F: BlowupForest) -> list[Contraction]:
    """Principal contractions, one per node, in node order."""
    P = F.irr_poset
    return [Contraction(F, LowerIdeal(P, P.down_mask(s))) for s in P.elements]


def conn_of(g: Contraction) -> list[Contraction]:
    """Members of Conn(f) lying below ``g``: principal ideals of its components."""
    P = g.forest.irr_poset
    return [Contraction(g.forest, LowerIdeal(P, P.down_mask(s))) for s in g.irr]


def generator(g: Contraction) -> str:
    """The node whose principal ideal is ``g`` (``g`` must be in Conn(f))."""
    mx = g.forest.irr_poset.maximal(g.mask)
    if len(mx) != 1:
        raise ValueError(f"{g!r} is not a principal contraction")
    return mx[0]


def union_contraction(g1: Contraction, g2: Contraction) -> Contraction:
    _same_forest(g1, g2)
    return Contraction(g1.forest, LowerIdeal(g1.forest.irr_poset, g1.mask | g2.mask))


def meet_contraction(g1: Contraction, g2: Contraction) -> Contraction:
    _same_forest(g1, g2)
    return Contraction(g1.forest, LowerIdeal(g1.forest.irr_poset, g1.mask & g2.mask))


def factor(F: BlowupForest, g: Contraction) -> tuple[BlowupForest, BlowupForest]:
    """Split ``f`` as ``X -> Z -> Y``: forests of ``g`` and of the residual ``h``."""
    g = _check(F, g)
    inside = set(g.irr)
    Fg = F.induced(inside)
    Fh = F.induced(i for i in F.ids if i not in inside)
    return Fg, Fh


def residual(F: BlowupForest, g: Contraction) -> BlowupForest:
    return factor(F, g)[1]


def gamma(F: BlowupForest, g: Contraction) -> dict[Contraction, Contraction]:
    """Relabel ``Conn(f) minus Conn(g)`` as ``Conn(h)`` on the residual forest."""
    g = _check(F, g)
    Fh = residual(F, g)
    Ph = Fh.irr_poset
    out = {}
    for gp in conn(F):
        s = generator(gp)
        if s in g.contracted:
            continue
        out[gp] = Contraction(Fh, LowerIdeal(Ph, Ph.down_mask(s)))
    return out


def danilov_center(F: BlowupForest) -> frozenset[str]:
    """Centers lying on ``Y``: the roots."""
    return frozenset(F.roots)


def _check(F: BlowupForest, g: Contraction) -> Contraction:
    if g.forest != F:
        raise ForestMismatchError("contraction belongs to a different forest")
    if not F.irr_poset.is_lower_mask(g.mask):
        raise NotLowerIdealError(f"{list(g.irr)} is not a lower ideal")
    return g


# -- generation of small forests ----------------------------------------------


def chain_forest(n: int = 2) -> BlowupForest:
    """``p1 <- p2 <- ... <- pn``, each point free on the previous curve."""
    return BlowupForest(
        tuple(Node(f"p{i}", f"p{i - 1}" if i > 1 else None) for i in range(1, n + 1))
    )


def satellite_forest() -> BlowupForest:
    """Three blow-ups, the last at the satellite point ``E2 cap E1``."""
    return BlowupForest(
        (Node("p1"), Node("p2", "p1"), Node("p3", "p2", ("p1",)))
    )


def _parent_arrays(n: int) -> Iterator[tuple]:
    choices = [[None] + list(range(i)) for i in range(n)]
    return product(*choices)


def enumerate_forests(n: int, *, dedupe: bool = True) -> list[BlowupForest]:
    """All forests on exactly ``n`` nodes with every legal satellite decoration.

    With ``dedupe`` each isomorphism class appears once (smallest blow-up
    order in generation order).
    """
    out, seen = [], set()
    for parents in _parent_arrays(n):
        # options per node: no satellite, or one target the parent is proximate to
        def options(i, extra):
            p = parents[i]
            if p is None or parents[p] is None:
                return [()]
            targets = [parents[p]] + list(extra[p])
            return [()] + [(t,) for t in targets]

        def rec(i, extra):
            if i == n:
                yield list(extra)
                return
            for opt in options(i, extra):
                extra.append(opt)
                yield from rec(i + 1, extra)
                extra.pop()

        for extra in rec(0, []):
            nodes = tuple(
                Node(
                    f"p{i + 1}",
                    None if parents[i] is None else f"p{parents[i] + 1}",
                    tuple(f"p{t + 1}" for t in extra[i]),
                )
                for i in range(n)
            )
            try:
                F = BlowupForest(nodes)
            except InvalidProximityError:
                continue
            if dedupe:
                code = F.canonical_code()
                if code in seen:
                    continue
                seen.add(code)
            out.append(F)
    return out


def all_forests(max_nodes: int, *, dedupe: bool = True) -> list[BlowupForest]:
    out = []
    for n in range(max_nodes + 1):
        out.extend(enumerate_forests(n, dedupe=dedupe))
    return out
