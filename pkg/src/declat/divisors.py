"""Exact intersection theory on the exceptional lattice of a blow-up forest.

Two bases are used.  The *total* basis ``e_i`` (pull-back of the i-th
exceptional curve) is orthogonal with ``e_i . e_j = -delta_ij``.  The
*strict* basis ``E_i`` (strict transforms) is related to it by the
proximity matrix ``P``: column ``j`` of ``P`` writes ``E_j`` in the
``e``-basis, so ``E_j = e_j - sum(e_i for i proximate to j)``.

All arithmetic is on Python integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import (
    NotAmpleError,
    NotEffectiveError,
    NotMinimalError,
    ParseError,
    SizeLimitError,
    UnknownElementError,
    UnknownRootError,
)
from .forest import (
    BlowupForest,
    Contraction,
    _check,
    conn,
    conn_of,
    contraction,
    dec_elements,
    full,
    gamma,
    generator,
    identity,
    meet_contraction,
    residual,
    union_contraction,
)

Matrix = tuple[tuple[int, ...], ...]
BASES = ("strict", "total")
VERIFY_LIMIT = 8


# -- matrices -----------------------------------------------------------------


@lru_cache(maxsize=1024)
def proximity_matrix(F: BlowupForest) -> Matrix:
    """``P[i][i] = 1``, ``P[i][j] = -1`` iff node ``i`` is proximate to node ``j``."""
    n = len(F)
    rows = [[0] * n for _ in range(n)]
    for i, node in enumerate(F.nodes):
        rows[i][i] = 1
        for p in F.proximate(node.id):
            rows[i][F.index(p)] = -1
    return tuple(map(tuple, rows))


@lru_cache(maxsize=1024)
def _inverse_proximity(F: BlowupForest) -> Matrix:
    # P is unitriangular (proximity targets precede in blow-up order)
    P = proximity_matrix(F)
    n = len(P)
    inv = [[0] * n for _ in range(n)]
    for c in range(n):
        for i in range(n):
            acc = 1 if i == c else 0
            for j in range(i):
                acc -= P[i][j] * inv[j][c]
            inv[i][c] = acc
    return tuple(map(tuple, inv))


@lru_cache(maxsize=1024)
def intersection_matrix(F: BlowupForest) -> Matrix:
    """Pairing of strict transforms: ``N = -P^T P``."""
    P = proximity_matrix(F)
    n = len(P)
    return tuple(
        tuple(-sum(P[k][i] * P[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


@lru_cache(maxsize=1024)
def inverse_intersection_matrix(F: BlowupForest) -> Matrix:
    """``N^{-1} = -P^{-1} P^{-T}``; integral because ``det P = 1``."""
    Q = _inverse_proximity(F)
    n = len(Q)
    return tuple(
        tuple(-sum(Q[i][k] * Q[j][k] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _matvec(M: Matrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in M)


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in M]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def leading_minors(M: Sequence[Sequence[int]]) -> list[int]:
    return [determinant([row[:k] for row in M[:k]]) for k in range(1, len(M) + 1)]


def is_negative_definite(M: Sequence[Sequence[int]]) -> bool:
    """Sylvester: the k-th leading minor has sign ``(-1)^k``."""
    return all((m < 0) if k % 2 else (m > 0) for k, m in enumerate(leading_minors(M), 1))


# -- divisor classes ---------------------------------------------------------


@dataclass(frozen=True)
class DivisorClass:
    forest: BlowupForest
    coeffs: tuple[int, ...]
    basis: str = "strict"

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != len(self.forest):
            raise ValueError(
                f"{len(self.coeffs)} coefficients for a forest with {len(self.forest)} nodes"
            )

    @classmethod
    def zero(cls, F: BlowupForest, basis: str = "strict") -> "DivisorClass":
        return cls(F, (0,) * len(F), basis)

    @classmethod
    def from_mapping(cls, F: BlowupForest, coeffs: dict, basis: str = "strict"):
        v = [0] * len(F)
        for k, c in coeffs.items():
            v[F.index(k)] += c
        return cls(F, tuple(v), basis)

    # -- bases ----------------------------------------------------------
    def to_total(self) -> "DivisorClass":
        if self.basis == "total":
            return self
        return DivisorClass(self.forest, _matvec(proximity_matrix(self.forest), self.coeffs), "total")

    def to_strict(self) -> "DivisorClass":
        if self.basis == "strict":
            return self
        inv = _inverse_proximity(self.forest)
        return DivisorClass(self.forest, _matvec(inv, self.coeffs), "strict")

    def in_basis(self, basis: str) -> "DivisorClass":
        return self.to_total() if basis == "total" else self.to_strict()

    # -- arithmetic -------------------------------------------------------
    def _other(self, other: "DivisorClass") -> tuple[int, ...]:
        if other.forest != self.forest:
            raise ValueError("divisor classes on different forests")
        return other.in_basis(self.basis).coeffs

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(
            self.forest, tuple(a + b for a, b in zip(self.coeffs, self._other(other))), self.basis
        )

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.forest, tuple(-a for a in self.coeffs), self.basis)

    def __mul__(self, k: int) -> "DivisorClass":
        return DivisorClass(self.forest, tuple(k * a for a in self.coeffs), self.basis)

    __rmul__ = __mul__

    def same_class(self, other: "DivisorClass") -> bool:
        return self.forest == other.forest and self.to_strict().coeffs == other.to_strict().coeffs

    def dot(self, other: "DivisorClass") -> int:
        self._other(other)
        a, b = self.to_total().coeffs, other.to_total().coeffs
        return -sum(x * y for x, y in zip(a, b))

    def pairings(self) -> dict[str, int]:
        """``D . E_i`` for every strict component."""
        N = intersection_matrix(self.forest)
        return dict(zip(self.forest.ids, _matvec(N, self.to_strict().coeffs)))

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.to_strict().coeffs)

    def support(self) -> tuple[str, ...]:
        return tuple(i for i, c in zip(self.forest.ids, self.to_strict().coeffs) if c)

    def coefficient(self, node_id: str) -> int:
        return self.coeffs[self.forest.index(node_id)]

    def __str__(self) -> str:
        return format_divisor(self)


def component(F: BlowupForest, node_id: str) -> DivisorClass:
    """Strict transform ``E_i`` of one exceptional curve."""
    v = [0] * len(F)
    v[F.index(node_id)] = 1
    return DivisorClass(F, tuple(v), "strict")


def total_component(F: BlowupForest, node_id: str) -> DivisorClass:
    v = [0] * len(F)
    v[F.index(node_id)] = 1
    return DivisorClass(F, tuple(v), "total")


def to_total(D: DivisorClass) -> DivisorClass:
    return D.to_total()


def to_strict(D: DivisorClass) -> DivisorClass:
    return D.to_strict()


_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*(\*)?\s*(E\[([^\]]+)\])?\s*")


def parse_divisor(F: BlowupForest, text: str, basis: str = "strict") -> DivisorClass:
    """Parse ``-2*E[p1]-3*E[p2]``; ``0`` is the zero class."""
    if basis not in BASES:
        raise ParseError(f"unknown basis {basis!r}")
    s = text.strip()
    if s in ("", "0"):
        return DivisorClass.zero(F, basis)
    v = [0] * len(F)
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, star, comp, label = m.groups() if m else (None,) * 5
        if not m or m.end() == pos or comp is None or (sign is None and not first):
            raise ParseError(f"cannot parse divisor {text!r} at position {pos}")
        if star and num is None:
            raise ParseError(f"dangling '*' in divisor {text!r}")
        try:
            idx = F.index(label)
        except UnknownElementError:
            raise ParseError(f"unknown component E[{label}] in {text!r}") from None
        c = int(num) if num is not None else 1
        v[idx] += -c if sign == "-" else c
        pos = m.end()
        first = False
    return DivisorClass(F, tuple(v), basis)


def format_divisor(D: DivisorClass) -> str:
    parts = []
    for nid, c in zip(D.forest.ids, D.coeffs):
        if c == 0:
            continue
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        parts.append(("-" if c < 0 else "+") + f"{mag}E[{nid}]")
    if not parts:
        return "0"
    out = "".join(parts)
    return out[1:] if out.startswith("+") else out


# -- pushforward / pullback -------------------------------------------------


def pushforward(D: DivisorClass, target: BlowupForest) -> DivisorClass:
    """Push a class to a residual forest: drop contracted total coordinates."""
    t = D.to_total()
    coeffs = tuple(t.coeffs[D.forest.index(i)] for i in target.ids)
    return DivisorClass(target, coeffs, "total").to_strict()


def pullback(D: DivisorClass, source: BlowupForest) -> DivisorClass:
    """Pull a class on a residual forest back to ``source`` (total transforms)."""
    t = D.to_total()
    v = [0] * len(source)
    for nid, c in zip(D.forest.ids, t.coeffs):
        v[source.index(nid)] = c
    return DivisorClass(source, tuple(v), "total").to_strict()


# -- canonical classes and ampleness -----------------------------------------


def relative_canonical(F: BlowupForest, g: Contraction) -> DivisorClass:
    """Discrepancy divisor ``D_g``: one total transform per contracted center."""
    g = _check(F, g)
    v = [0] * len(F)
    for nid in g.irr:
        v[F.index(nid)] = 1
    return DivisorClass(F, tuple(v), "total").to_strict()


def canonical_class(F: BlowupForest) -> DivisorClass:
    """``omega_X`` relative to the whole contraction (``omega_f``)."""
    return relative_canonical(F, full(F))


def is_relatively_ample(F: BlowupForest, g: Contraction, D: DivisorClass) -> bool:
    """Numerical criterion: positive on every curve contracted by ``g``."""
    g = _check(F, g)
    pair = D.pairings()
    return all(pair[i] > 0 for i in g.irr)


def multiplicity(F: BlowupForest, root: str, D: DivisorClass) -> int:
    """Multiplicity at the image of ``root`` of the base ideal of ``O(-D)``.

    ``D`` is the effective divisor ``sum a_i E_i`` (strict basis); the value
    is the sum of ``a_j`` over the tree above ``root``.
    """
    if root not in F.roots:
        raise UnknownRootError(f"{root!r} is not a root of the forest")
    s = D.to_strict()
    if not s.is_effective():
        raise NotEffectiveError(f"{format_divisor(s)} is not effective")
    return sum(s.coefficient(i) for i in F.descendants(root))


@dataclass(frozen=True)
class DescentStep:
    leaf: str
    k: int
    lifted: DivisorClass  # D + k E_leaf on the current forest
    result: DivisorClass  # pushed to the residual forest
    remaining: Contraction  # what is still to be contracted, on the residual forest


def descend_ample(F: BlowupForest, g: Contraction, D: DivisorClass, leaf: str) -> DescentStep:
    """Contract one (-1)-curve and carry an ample class down.

    ``L' = L + k E`` with ``k = L . E`` is trivial on ``E`` and so descends.
    """
    g = _check(F, g)
    if not is_relatively_ample(F, g, D):
        raise NotAmpleError(f"{format_divisor(D)} is not ample relative to {g!r}")
    if leaf not in g.contracted or F.children(leaf):
        raise NotMinimalError(f"E[{leaf}] is not a minimal contracted component")
    E = component(F, leaf)
    k = D.dot(E)
    lifted = D.to_strict() + E * k
    Fr = F.induced(i for i in F.ids if i != leaf)
    result = pushforward(lifted, Fr)
    remaining = contraction(Fr, [i for i in g.irr if i != leaf])
    return DescentStep(leaf, k, lifted, result, remaining)


def danilov_factorize(F: BlowupForest, D: DivisorClass) -> list[DescentStep]:
    """Blow ``f`` down one curve at a time, ties broken by node order."""
    g = full(F)
    if not is_relatively_ample(F, g, D):
        raise NotAmpleError(f"{format_divisor(D)} is not relatively ample")
    steps = []
    cur_F, cur_g, cur_D = F, g, D
    while len(cur_F):
        leaf = next(i for i in cur_F.ids if not cur_F.children(i))
        step = descend_ample(cur_F, cur_g, cur_D, leaf)
        steps.append(step)
        cur_F, cur_g, cur_D = step.result.forest, step.remaining, step.result
    return steps


# -- ample seeds ----------------------------------------------------------------


def ample_from_pairings(F: BlowupForest, b: Sequence[int]) -> DivisorClass:
    """The unique class with ``D . E_i = b_i``."""
    return DivisorClass(F, _matvec(inverse_intersection_matrix(F), b), "strict")


def ample_seeds(
    F: BlowupForest, bound: int | None = None, max_pairing: int | None = None
) -> Iterator[DivisorClass]:
    """Every f-ample class with strict coefficients in ``[-bound, bound]``.

    Default ``bound = 4 n``.  ``max_pairing`` caps every pairing ``D.E_i``,
    which keeps the search small on larger forests.  Enumerated through the
    pairings ``b = N a > 0``:
    ``N^{-1}`` is non-positive, so raising any ``b_j`` only lowers the
    coefficients and the search can prune as soon as one leaves the box.
    Order: lexicographic in ``b``.
    """
    n = len(F)
    if bound is None:
        bound = 4 * n
    M = inverse_intersection_matrix(F)
    if n == 0:
        yield DivisorClass.zero(F)
        return
    b = [1] * n

    def rec(j):
        if j == n:
            a = _matvec(M, b)
            if all(-bound <= x <= bound for x in a):
                yield DivisorClass(F, a, "strict")
            return
        while True:
            # b_{j+1..} sit at their minimum 1 here, so this is the largest a can get
            if any(x < -bound for x in _matvec(M, b)):
                break
            if max_pairing is not None and b[j] > max_pairing:
                break
            yield from rec(j + 1)
            b[j] += 1
        b[j] = 1

    yield from rec(0)


def search_ample_seeds(F: BlowupForest, bound: int | None = None, max_pairing: int = 2) -> list[DivisorClass]:
    """The seeds used by batch checks: pairings in ``[1, max_pairing]``, inside the box.

    The full box holds millions of classes once ``n = 5``; pairings in
    ``{1, 2}`` still reach every face of the ample cone.  When the box holds
    no ample class at all (long satellite chains) the minimal seed, every
    pairing 1, is returned instead.
    """
    return list(ample_seeds(F, bound, max_pairing)) or [first_ample_seed(F)]


def first_ample_seed(F: BlowupForest) -> DivisorClass:
    return ample_from_pairings(F, [1] * len(F))


def ample_with_dominant_root(F: BlowupForest, root: str) -> DivisorClass:
    """An ample class whose base-ideal multiplicity at ``root`` beats every other root.

    Trees are orthogonal, so scaling the pairings on the tree over ``root``
    by ``s`` scales its multiplicity by ``s`` and fixes the others; take the
    least ``s`` that wins.
    """
    if root not in F.roots:
        raise UnknownRootError(f"{root!r} is not a root of the forest")
    base = first_ample_seed(F)
    mult = {r: multiplicity(F, r, -base) for r in F.roots}
    rivals = [v for r, v in mult.items() if r != root]
    scale = max(rivals) // mult[root] + 1 if rivals else 1
    tree = set(F.descendants(root))
    D = ample_from_pairings(F, [scale if i in tree else 1 for i in F.ids])
    if not is_relatively_ample(F, full(F), D):  # pragma: no cover
        raise NotAmpleError("scaled class is not ample")
    return D


# -- tilting generators ---------------------------------------------------------


@dataclass(frozen=True)
class Summand:
    """One sheaf ``O(twist)|_support [-shift]``; ``support None`` means all of X.

    ``key`` is the generating node of the principal contraction the summand
    belongs to (``None`` for the whole-X summand).
    """

    key: str | None
    twist: DivisorClass
    support: DivisorClass | None
    shift: int

    def same_class(self, other: "Summand") -> bool:
        if self.key != other.key or self.shift != other.shift:
            return False
        if not self.twist.same_class(other.twist):
            return False
        if (self.support is None) != (other.support is None):
            return False
        return self.support is None or self.support.same_class(other.support)


@dataclass(frozen=True)
class FormalGenerator:
    forest: BlowupForest
    variant: str
    summands: tuple[Summand, ...]

    def __post_init__(self):
        for s in self.summands:
            if s.support is not None and not s.support.is_effective():
                raise NotEffectiveError(f"support {format_divisor(s.support)} is not effective")

    def summand(self, key: str | None) -> Summand:
        for s in self.summands:
            if s.key == key:
                return s
        raise KeyError(key)

    def exceptional_supports(self) -> list[DivisorClass]:
        return [s.support for s in self.summands if s.support is not None]

    def same_class(self, other: "FormalGenerator") -> bool:
        if self.forest != other.forest or len(self.summands) != len(other.summands):
            return False
        mine = {s.key: s for s in self.summands}
        return all(k.key in mine and mine[k.key].same_class(k) for k in other.summands)


def tilting_generator(F: BlowupForest, g: Contraction, variant: str = "T") -> FormalGenerator:
    """``T``: omega_X plus the discrepancy sheaves ``omega_X|D_g'``.

    ``S``: its dual, ``O_X`` plus ``omega_g'|D_g' [-1]``; ``g'`` runs over the
    principal contractions below ``g``.
    """
    g = _check(F, g)
    if variant not in ("T", "S"):
        raise ValueError("variant must be 'T' or 'S'")
    omega = canonical_class(F)
    if variant == "T":
        summands = [Summand(None, omega, None, 0)]
    else:
        summands = [Summand(None, DivisorClass.zero(F), None, 0)]
    for gp in conn_of(g):
        D = relative_canonical(F, gp)
        if variant == "T":
            summands.append(Summand(generator(gp), omega, D, 0))
        else:
            summands.append(Summand(generator(gp), D, D, -1))
    return FormalGenerator(F, variant, tuple(summands))


def pushforward_generator(
    F: BlowupForest, g: Contraction, gen: FormalGenerator | None = None
) -> FormalGenerator:
    """Push the full generator along ``g``: summands over Conn(g) die, the rest relabel by gamma."""
    g = _check(F, g)
    if gen is None:
        gen = tilting_generator(F, full(F), "T")
    Fh = residual(F, g)
    relabel = {generator(a): generator(b) for a, b in gamma(F, g).items()}
    out = []
    for s in gen.summands:
        if s.key is not None and s.key in g.contracted:
            continue
        out.append(
            Summand(
                None if s.key is None else relabel[s.key],
                pushforward(s.twist, Fh),
                None if s.support is None else pushforward(s.support, Fh),
                s.shift,
            )
        )
    return FormalGenerator(Fh, gen.variant, tuple(out))


# -- identities ------------------------------------------------------------------


@dataclass
class IdentityReport:
    checked: int
    failures: list[tuple]

    @property
    def ok(self) -> bool:
        return not self.failures


def _D(F: BlowupForest, g: Contraction) -> DivisorClass:
    return relative_canonical(F, g)


def verify_generator_identities(F: BlowupForest, limit: int = VERIFY_LIMIT) -> IdentityReport:
    """Divisor-class shadows of the exact sequences relating discrepancy sheaves.

    (a) nested ``g' <= g``:  ``D_g = D_g' + g'^* D_h'`` with ``D_g - D_g'`` effective.
    (b) ``g`` and principal ``g'' not <= g``, ``g v g'' = phi o g``:
        ``D_g'' = g^* D_phi + D_{g ^ g''}`` with ``phi`` principal on ``Z``.
    (c) the same sequence read through the generators: the pulled-back
        residual generator's summand plus ``D_{g ^ g''}`` is the full one, and the
        twists agree: ``g^* omega_Z + D_g = omega_X``.
    """
    if len(F) > limit:
        raise SizeLimitError(f"forest has {len(F)} nodes, limit is {limit}")
    failures: list[tuple] = []
    checked = 0
    elements = dec_elements(F)
    gen_full = tilting_generator(F, full(F), "T")
    omega_X = canonical_class(F)
    for g in elements:
        Fh = residual(F, g)
        D_g = _D(F, g)
        # (a)
        for gp in elements:
            if not gp <= g:
                continue
            checked += 1
            Fhp = residual(F, gp)
            hp = contraction(Fhp, [i for i in g.irr if i not in gp.contracted])
            rhs = _D(F, gp) + pullback(relative_canonical(Fhp, hp), F)
            if not D_g.same_class(rhs) or not (D_g - _D(F, gp)).is_effective():
                failures.append(("a", g.irr, gp.irr, str(D_g), str(rhs)))
        # (b) and (c)
        gen_res = tilting_generator(Fh, full(Fh), "T")
        for gpp in conn(F):
            if gpp <= g:
                continue
            checked += 1
            key = generator(gpp)
            cap = meet_contraction(g, gpp)
            D_cap = _D(F, cap)
            cup = union_contraction(g, gpp)
            phi = contraction(Fh, [i for i in cup.irr if i not in g.contracted])
            principal = len(Fh.irr_poset.maximal(phi.mask)) == 1
            rhs = pullback(relative_canonical(Fh, phi), F) + D_cap
            if not principal or not _D(F, gpp).same_class(rhs):
                failures.append(("b", g.irr, gpp.irr, str(_D(F, gpp)), str(rhs)))
            checked += 1
            th = gen_res.summand(key)
            tf = gen_full.summand(key)
            rhs_c = pullback(th.support, F) + D_cap
            twist_c = pullback(th.twist, F) + D_g
            if not tf.support.same_class(rhs_c) or not twist_c.same_class(omega_X):
                failures.append(("c", g.irr, gpp.irr, str(tf.support), str(rhs_c)))
    return IdentityReport(checked, failures)


def verify_pushforward(F: BlowupForest) -> IdentityReport:
    """``Rg_* T_{X,f}`` equals the residual forest's generator, for every ``g``."""
    failures = []
    elements = dec_elements(F)
    for g in elements:
        pushed = pushforward_generator(F, g)
        Fh = residual(F, g)
        if not pushed.same_class(tilting_generator(Fh, full(Fh), "T")):
            failures.append(("pushforward", g.irr))
    return IdentityReport(len(elements), failures)


__all__ = [
    "DescentStep",
    "DivisorClass",
    "FormalGenerator",
    "IdentityReport",
    "Summand",
    "ample_from_pairings",
    "ample_seeds",
    "ample_with_dominant_root",
    "first_ample_seed",
    "canonical_class",
    "component",
    "danilov_factorize",
    "descend_ample",
    "determinant",
    "format_divisor",
    "identity",
    "intersection_matrix",
    "inverse_intersection_matrix",
    "is_negative_definite",
    "is_relatively_ample",
    "leading_minors",
    "multiplicity",
    "parse_divisor",
    "proximity_matrix",
    "pullback",
    "pushforward",
    "pushforward_generator",
    "relative_canonical",
    "search_ample_seeds",
    "tilting_generator",
    "to_strict",
    "to_total",
    "total_component",
    "verify_generator_identities",
    "verify_pushforward",
]
