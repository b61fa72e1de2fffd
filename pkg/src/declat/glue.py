"""t-structures glued over a distributive-lattice filtration, on split objects.

Objects are modelled by their *graded shadow*: for every minimal subquotient
(slot = join-prime of the filtration lattice) the multiset of degrees in
which the object has cohomology.  On split objects the glued truncations act
slot by slot, so every statement checked here is exact at that level;
extension data is outside the model.

Shift convention: ``n(s) = 1`` is the standard t-structure shifted so that
its heart sits in degree 1.  ``x`` lies in ``D^{<=m}`` iff every degree on
slot ``s`` is ``<= m + n(s)``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import kernels
from .errors import (
    MissingSlotError,
    NotComparableError,
    ParseError,
    SizeLimitError,
    UnknownElementError,
)
from .forest import BlowupForest, Contraction, _check, dec_elements
from .lattice import DistLattice
from .poset import EXTENSION_LIMIT, Poset, linear_extensions, validate_poset

Y_SLOT = "Y"
ORIENTATIONS = ("standard", "left_dual", "right_dual")
DEGREES = tuple(range(-2, 3))
N_RANDOM = 100


# -- filtrations and specs ---------------------------------------------------------


@dataclass(frozen=True)
class FiltrationSpec:
    lattice: DistLattice
    orientation: str = "standard"
    extended: bool = False

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        if self.extended:
            P = self.lattice.base
            if Y_SLOT not in P or P.maximal() != (Y_SLOT,) or P.up_mask(Y_SLOT) != 1 << P.index(Y_SLOT):
                raise ValueError("extended filtration needs one top slot 'Y'")
            if any(not P.leq(s, Y_SLOT) for s in P.elements):
                raise ValueError("slot 'Y' must lie above every other slot")

    @property
    def slots(self) -> Poset:
        return self.lattice.base


def extend_with_top(P: Poset) -> Poset:
    """``P`` with a new slot ``Y`` above everything (Dec -> Dec+)."""
    if Y_SLOT in P:
        raise ValueError("slot label 'Y' is reserved for the top slot")
    return validate_poset(P.elements + (Y_SLOT,), P.relation() + [(s, Y_SLOT) for s in P.elements])


def dec_filtration(F: BlowupForest, extended: bool = True, orientation: str = "right_dual") -> FiltrationSpec:
    P = F.irr_poset
    if extended:
        P = extend_with_top(P)
    return FiltrationSpec(DistLattice(P), orientation, extended)


@dataclass(frozen=True)
class TStructureSpec:
    shifts: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "shifts", dict(sorted(self.shifts.items(), key=lambda kv: str(kv[0]))))

    def __hash__(self):
        return hash(tuple(self.shifts.items()))

    def __getitem__(self, slot) -> int:
        return self.shifts[slot]

    def vector(self, slots: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.shifts[s] for s in slots)


@dataclass(frozen=True)
class GradedObject:
    components: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        comps = {s: tuple(sorted(d)) for s, d in self.components.items() if len(d)}
        object.__setattr__(self, "components", dict(sorted(comps.items(), key=lambda kv: str(kv[0]))))

    def __hash__(self):
        return hash(tuple(self.components.items()))

    def restrict(self, slots: Iterable[str]) -> "GradedObject":
        keep = set(slots)
        return GradedObject({s: d for s, d in self.components.items() if s in keep})

    def __add__(self, other: "GradedObject") -> "GradedObject":
        out = dict(self.components)
        for s, d in other.components.items():
            out[s] = out.get(s, ()) + d
        return GradedObject(out)

    def is_zero(self) -> bool:
        return not self.components


def _slot_name(label: str) -> str:
    return label if label == Y_SLOT else f"E[{label}]"


def _parse_slot(tok: str) -> str:
    tok = tok.strip()
    if tok == Y_SLOT:
        return Y_SLOT
    m = re.fullmatch(r"E\[([^\]]+)\]", tok)
    if not m:
        raise ParseError(f"bad slot {tok!r}; expected E[label] or Y")
    return m.group(1)


def parse_tstructure(text: str) -> TStructureSpec:
    """``E[p1]=1,E[p2]=0,Y=0``."""
    shifts = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise ParseError(f"bad t-structure entry {part!r}")
        k, v = part.split("=", 1)
        slot = _parse_slot(k)
        if slot in shifts:
            raise ParseError(f"slot {k.strip()} given twice")
        try:
            shifts[slot] = int(v)
        except ValueError:
            raise ParseError(f"bad shift {v!r} for {k.strip()}") from None
    return TStructureSpec(shifts)


def format_tstructure(t: TStructureSpec, order: Sequence[str] | None = None) -> str:
    keys = order if order is not None else list(t.shifts)
    return ",".join(f"{_slot_name(s)}={t.shifts[s]}" for s in keys)


_OBJ = re.compile(r"\s*(E\[[^\]]+\]|Y)\s*=\s*\{([^}]*)\}\s*(,|$)")


def parse_object(text: str) -> GradedObject:
    """``E[p1]={0,2},Y={0}``; the empty string is the zero object."""
    comps: dict[str, tuple[int, ...]] = {}
    pos, s = 0, text.strip()
    while pos < len(s):
        m = _OBJ.match(s, pos)
        if not m:
            raise ParseError(f"cannot parse object {text!r} at position {pos}")
        slot = _parse_slot(m.group(1))
        try:
            degs = tuple(int(d) for d in m.group(2).split(",") if d.strip())
        except ValueError:
            raise ParseError(f"bad degrees in {m.group(0)!r}") from None
        comps[slot] = comps.get(slot, ()) + degs
        pos = m.end()
    return GradedObject(comps)


def format_object(x: GradedObject) -> str:
    return ",".join(
        f"{_slot_name(s)}={{{','.join(map(str, d))}}}" for s, d in x.components.items()
    )


# -- the gluing recursion ------------------------------------------------------------


@dataclass(frozen=True)
class GluedTStructure:
    """One recollement level: ``closed`` glued on a lower ideal, ``slot`` open.

    ``slot is None`` is the zero category.
    """

    slots: frozenset
    slot: str | None = None
    shift: int = 0
    closed: "GluedTStructure | None" = None

    def _check(self, x: GradedObject) -> None:
        extra = set(x.components) - self.slots
        if extra:
            raise UnknownElementError(f"object has components on unknown slots {sorted(extra)}")

    def le(self, x: GradedObject, m: int = 0) -> bool:
        """``x in D^{<=m}``: ``j^* x`` and ``i^* x`` in the aisles (BBD)."""
        self._check(x)
        return self._le(x, m)

    def _le(self, x, m):
        if self.slot is None:
            return True
        open_part = x.components.get(self.slot, ())
        if open_part and open_part[-1] > m + self.shift:
            return False
        return self.closed._le(x, m)

    def ge(self, x: GradedObject, m: int = 0) -> bool:
        """``x in D^{>=m}``: ``j^! x`` and ``i^! x`` in the co-aisles."""
        self._check(x)
        return self._ge(x, m)

    def _ge(self, x, m):
        if self.slot is None:
            return True
        open_part = x.components.get(self.slot, ())
        if open_part and open_part[0] < m + self.shift:
            return False
        return self.closed._ge(x, m)

    def in_heart(self, x: GradedObject) -> bool:
        return self.le(x, 0) and self.ge(x, 0)

    def truncate(self, x: GradedObject, m: int) -> tuple[GradedObject, GradedObject]:
        """``(tau^{<=m} x, tau^{>=m+1} x)``; on split objects the triangle splits."""
        self._check(x)
        low: dict[str, tuple[int, ...]] = {}
        high: dict[str, tuple[int, ...]] = {}
        level = self
        while level.slot is not None:
            cut = m + level.shift
            degs = x.components.get(level.slot, ())
            low[level.slot] = tuple(d for d in degs if d <= cut)
            high[level.slot] = tuple(d for d in degs if d > cut)
            level = level.closed
        return GradedObject(low), GradedObject(high)

    def thresholds(self) -> dict[str, int]:
        """Per-slot shift as seen by the recursion (the compiled predicate)."""
        out = {}
        level = self
        while level.slot is not None:
            out[level.slot] = level.shift
            level = level.closed
        return out

    def peel_order(self) -> tuple[str, ...]:
        out = []
        level = self
        while level.slot is not None:
            out.append(level.slot)
            level = level.closed
        return tuple(reversed(out))


def glue(
    filtration: FiltrationSpec, t: TStructureSpec, order: Sequence[str] | None = None
) -> GluedTStructure:
    """Glue the slot t-structures by recollement, peeling a maximal slot each step.

    Without ``order`` the maximal slot peeled is the last maximal one in
    slot order.  With ``order`` (a linear extension) its last element is
    peeled, which is maximal among what is left.
    """
    P = filtration.slots
    missing = [s for s in P.elements if s not in t.shifts]
    if missing:
        raise MissingSlotError(f"no shift given for slots {[_slot_name(s) for s in missing]}")
    if order is not None:
        order = list(order)
        if sorted(map(str, order)) != sorted(map(str, P.elements)):
            raise ValueError("order must list every slot once")
    return _glue(P, P.full_mask, t, order)


def _glue(P: Poset, mask: int, t: TStructureSpec, order) -> GluedTStructure:
    if mask == 0:
        return GluedTStructure(frozenset())
    if order is not None:
        s0 = order[-1]
        if s0 not in P.maximal(mask):
            raise ValueError(f"{s0!r} is not maximal: order is not a linear extension")
        rest = order[:-1]
    else:
        s0 = P.maximal(mask)[-1]
        rest = None
    lower = mask & ~(1 << P.index(s0))
    closed = _glue(P, lower, t, rest)
    return GluedTStructure(frozenset(P.labels_of(mask)), s0, t.shifts[s0], closed)


def aisle_formula(x: GradedObject, t: TStructureSpec, m: int = 0) -> tuple[bool, bool]:
    """Direct slotwise evaluation: ``(x in D^{<=m}, x in D^{>=m})``."""
    le = all(d[-1] <= m + t.shifts[s] for s, d in x.components.items())
    ge = all(d[0] >= m + t.shifts[s] for s, d in x.components.items())
    return le, ge


def truncate(x: GradedObject, glued: GluedTStructure, m: int) -> tuple[GradedObject, GradedObject]:
    return glued.truncate(x, m)


# -- generating family and batch evaluation ---------------------------------------


def generating_family(
    slots: Sequence[str], n_random: int = N_RANDOM, seed: int = 0, degrees: Sequence[int] = DEGREES
) -> list[GradedObject]:
    """Single-slot single-degree objects, then seeded random two-slot objects."""
    fam = [GradedObject({s: (d,)}) for s in slots for d in degrees]
    if len(slots) >= 2:
        rng = random.Random(seed)
        lo, hi = min(degrees), max(degrees)
        for _ in range(n_random):
            a, b = rng.sample(list(slots), 2)
            fam.append(
                GradedObject(
                    {
                        a: tuple(rng.randint(lo, hi) for _ in range(rng.randint(1, 2))),
                        b: tuple(rng.randint(lo, hi) for _ in range(rng.randint(1, 2))),
                    }
                )
            )
    return fam


@dataclass(frozen=True)
class _Packed:
    slots: tuple
    lows: tuple
    highs: tuple


def pack(family: Sequence[GradedObject], slots: Sequence[str]) -> _Packed:
    lows, highs = [], []
    for x in family:
        for s in slots:
            d = x.components.get(s, ())
            lows.append(d[0] if d else kernels.EMPTY_LO)
            highs.append(d[-1] if d else kernels.EMPTY_HI)
    return _Packed(tuple(slots), tuple(lows), tuple(highs))


@lru_cache(maxsize=256)
def _packed_family(slots: tuple) -> _Packed:
    return pack(generating_family(slots), slots)


def signature(glued: GluedTStructure, packed: _Packed, ms: Sequence[int] = (-1, 0, 1)) -> bytes:
    th = glued.thresholds()
    return kernels.aisle_signature(
        packed.lows, packed.highs, [th[s] for s in packed.slots], list(ms)
    )


def verify_linear_extension_independence(
    filtration: FiltrationSpec, t: TStructureSpec, limit: int = EXTENSION_LIMIT
) -> bool:
    """Glue along every linear extension; all aisle predicates must coincide."""
    P = filtration.slots
    if len(P) > limit:
        raise SizeLimitError(f"{len(P)} join-primes, limit is {limit}")
    packed = _packed_family(P.elements)
    ref = signature(glue(filtration, t), packed)
    for ext in linear_extensions(P, limit):
        if signature(glue(filtration, t, ext), packed) != ref:
            return False
    return True


# -- duality --------------------------------------------------------------------


def dual_tstructure(t: TStructureSpec) -> TStructureSpec:
    return TStructureSpec({s: -n for s, n in t.shifts.items()})


def apply_duality(x: GradedObject) -> GradedObject:
    return GradedObject({s: tuple(-d for d in degs) for s, degs in x.components.items()})


def check_duality(filtration: FiltrationSpec, t: TStructureSpec) -> list[tuple]:
    """Objects breaking ``x in D^{>=0}(t)  <=>  Dx in D^{<=0}(t*)`` (or its mirror)."""
    glued = glue(filtration, t)
    dual = glue(filtration, dual_tstructure(t))
    bad = []
    for x in generating_family(filtration.slots.elements):
        dx = apply_duality(x)
        if apply_duality(dx) != x:
            bad.append(("involution", format_object(x)))
        if glued.ge(x, 0) != dual.le(dx, 0) or glued.le(x, 0) != dual.ge(dx, 0):
            bad.append(("contract", format_object(x)))
    if dual_tstructure(dual_tstructure(t)) != t:
        bad.append(("involution", format_tstructure(t)))
    return bad


# -- the t-structure system on Dec(f) -------------------------------------------


def tstructure_for_element(F: BlowupForest, g: Contraction) -> TStructureSpec:
    """Shift vector for ``g``: heart in degree 1 on the slots ``g`` contracts, 0 elsewhere."""
    g = _check(F, g)
    shifts = {s: (1 if s in g.contracted else 0) for s in F.ids}
    shifts[Y_SLOT] = 0
    return TStructureSpec(shifts)


def tstructure_for_edge(F: BlowupForest, g0: Contraction, g1: Contraction) -> TStructureSpec:
    g0, g1 = _check(F, g0), _check(F, g1)
    if not g0 <= g1:
        raise NotComparableError(f"{g0!r} is not below {g1!r}")
    shifts = {s: (1 if s in g0.contracted else 0) for s in F.ids}
    shifts[Y_SLOT] = 0
    return TStructureSpec(shifts)


def componentwise_min(a: TStructureSpec, b: TStructureSpec) -> TStructureSpec:
    return TStructureSpec({s: min(a[s], b[s]) for s in a.shifts})


@dataclass
class TiltReport:
    checked: int
    failures: list[tuple]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_tilt_relations(F: BlowupForest, limit: int = 8) -> TiltReport:
    """Nesting and naive intersection for every morphism ``g0 -> g1`` of Dec(f).

    ``D_phi^{<=0} <= D_gi^{<=0} <= D_phi^{<=1}`` and
    ``D_phi^{<=0} = D_g0^{<=0} & D_g1^{<=0}`` (plus the mirrored co-aisle
    statements), tested on the generating family; then the null-category
    nesting of the standard and the all-shifted t-structures.
    """
    if len(F) > limit:
        raise SizeLimitError(f"forest has {len(F)} nodes, limit is {limit}")
    filt = dec_filtration(F)
    slots = filt.slots.elements
    packed = _packed_family(slots)
    failures: list[tuple] = []
    checked = 0
    # ms = (0, 1): bytes per object are le0, ge0, le1, ge1
    sig_cache: dict[Contraction, bytes] = {}

    def sig(t):
        return signature(glue(filt, t), packed, (0, 1))

    elements = dec_elements(F)
    for g in elements:
        sig_cache[g] = sig(tstructure_for_element(F, g))
    for g0 in elements:
        for g1 in elements:
            if not g0 <= g1:
                continue
            checked += 1
            t_phi = tstructure_for_edge(F, g0, g1)
            if t_phi != componentwise_min(tstructure_for_element(F, g0), tstructure_for_element(F, g1)):
                failures.append(("min", g0.irr, g1.irr))
            s_phi = sig(t_phi)
            failures.extend(_nesting_failures(s_phi, sig_cache[g0], ("nest", g0.irr, g1.irr, "g0")))
            failures.extend(_nesting_failures(s_phi, sig_cache[g1], ("nest", g0.irr, g1.irr, "g1")))
            le_phi = s_phi[0::4]
            ge1_phi = s_phi[3::4]
            both = bytes(a & b for a, b in zip(sig_cache[g0][0::4], sig_cache[g1][0::4]))
            either = bytes(a | b for a, b in zip(sig_cache[g0][3::4], sig_cache[g1][3::4]))
            if le_phi != both:
                failures.append(("naive-intersection", g0.irr, g1.irr))
            if ge1_phi != either:
                failures.append(("naive-intersection-co", g0.irr, g1.irr))
    # null category: standard vs all slots shifted
    if len(F):
        null = FiltrationSpec(DistLattice(F.irr_poset), "right_dual", False)
        npacked = _packed_family(null.slots.elements)
        std = signature(glue(null, TStructureSpec({s: 0 for s in F.ids})), npacked, (0, 1))
        pro = signature(glue(null, TStructureSpec({s: 1 for s in F.ids})), npacked, (0, 1))
        checked += 1
        failures.extend(_nesting_failures(std, pro, ("null-nest",)))
    return TiltReport(checked, failures)


def _nesting_failures(small: bytes, big: bytes, tag: tuple) -> list[tuple]:
    """``small^{<=0} <= big^{<=0} <= small^{<=1}`` and mirrored for co-aisles."""
    le0_s, ge0_s, le1_s, ge1_s = (small[i::4] for i in range(4))
    le0_b, ge0_b, le1_b, ge1_b = (big[i::4] for i in range(4))
    out = []
    for k in range(len(le0_s)):
        if le0_s[k] and not le0_b[k]:
            out.append(tag + ("aisle-lower", k))
        if le0_b[k] and not le1_s[k]:
            out.append(tag + ("aisle-upper", k))
        # co-aisles reverse: small^{>=1} >= big^{>=1} >= small^{>=2}; with ms=(0,1)
        # the available statements are small^{>=1} contains big^{>=1}
        if ge1_b[k] and not ge1_s[k]:
            out.append(tag + ("coaisle", k))
    return out


# -- simple objects -------------------------------------------------------------


@dataclass(frozen=True)
class SimpleClass:
    name: str
    slot: str
    shadow: GradedObject
    embedding: str
    quotient_of_structure_sheaf: bool
    witness: str


_EMBEDDINGS = {
    "standard": ("j_*", "i_*"),
    "left_dual": ("Lg^*", "iota_*"),
    "right_dual": ("g^!", "iota_*"),
}


def structure_sheaf_shadow() -> GradedObject:
    return GradedObject({Y_SLOT: (0,)})


def heart_simples(F: BlowupForest, g: Contraction, orientation: str = "right_dual") -> list[SimpleClass]:
    """Simple objects of the heart for ``g`` and which are quotients of ``O_X``.

    Only the Y-slot family can receive a map from ``O_X``: ``O_X`` is seen
    through ``Rf_*`` and that kills every null-category slot.
    """
    g = _check(F, g)
    filt = dec_filtration(F, orientation=orientation)
    t = tstructure_for_element(F, g)
    glued = glue(filt, t)
    fam_emb, null_emb = _EMBEDDINGS[orientation]
    ox = structure_sheaf_shadow()
    candidates = [("g^!O_z, z in Z", Y_SLOT, GradedObject({Y_SLOT: (t[Y_SLOT],)}), fam_emb)]
    for s in g.irr:
        candidates.append((f"null-category simple at E[{s}]", s, GradedObject({s: (t[s],)}), null_emb))
    out = []
    for name, slot, shadow, emb in candidates:
        if not glued.in_heart(shadow):
            raise AssertionError(f"{name} is not in the heart")  # pragma: no cover
        shared = set(ox.components.get(Y_SLOT, ())) & set(shadow.components.get(Y_SLOT, ()))
        quotient = bool(shared)
        witness = (
            "O_X -> g^!O_z is adjoint to O_Z -> O_z, non-zero onto a simple"
            if quotient
            else f"Y-slot pairing with O_X is empty: Rg_* kills the E[{slot}] component"
        )
        out.append(SimpleClass(name, slot, shadow, emb, quotient, witness))
    return out
