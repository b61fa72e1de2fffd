import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from declat.errors import NonDistributiveError, NotComparableError, UnknownElementError
from declat.lattice import DistLattice, check_absorption, check_distributive, from_order
from declat.poset import Poset, is_order_isomorphism, validate_poset
from oracles import naturally_labelled, random_poset


def diamond():
    return validate_poset("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


def test_meet_join_leq():
    L = DistLattice(Poset.antichain(["x", "y"]))
    assert L.join(["x"], ["y"]).members == ("x", "y")
    assert L.meet(["x"], ["y"]).members == ()
    assert L.leq([], ["x"])
    with pytest.raises(UnknownElementError):
        L.element(["z"])


def test_join_primes_of_boolean_lattice_are_atoms():
    L = DistLattice(Poset.antichain(["x", "y", "z"]))
    assert L.join_primes().elements == (("x",), ("y",), ("z",))


def test_join_primes_of_chain_lattice_are_nonzero():
    L = DistLattice(Poset.chain([1, 2, 3]))
    assert len(L) == 4
    assert len(L.join_primes()) == 3


def test_principal_map_is_iso_onto_join_primes():
    P = diamond()
    L = DistLattice(P)
    assert is_order_isomorphism(P, L.join_primes(), L.principal_map())


def test_join_prime_detection_matches_definition():
    rng = random.Random(3)
    for _ in range(40):
        L = DistLattice(random_poset(rng, rng.randint(0, 5)))
        fast = set(L.join_prime_masks())
        slow = {m for m in L.masks if L.is_join_prime(m)}
        assert fast == slow


def test_interval():
    P = diamond()
    L = DistLattice(P)
    sub = L.interval(["a"], ["a", "b", "c"])
    assert len(sub) == 4
    assert len(L.interval_elements(["a"], ["a", "b", "c"])) == 4
    with pytest.raises(NotComparableError):
        L.interval(["a", "b"], ["a", "c"])


def test_opposite_reverses_order():
    L = DistLattice(diamond())
    Lop = L.opposite()
    assert len(Lop) == len(L)
    for a in L.masks:
        for b in L.masks:
            assert L.leq(a, b) == Lop.leq(L.opposite_element(b), L.opposite_element(a))


@pytest.mark.parametrize(
    "els, pairs",
    [
        ("0abc1", [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")]),
        ("0abc1", [("0", x) for x in "abc"] + [(x, "1") for x in "abc"]),
    ],
    ids=["pentagon", "diamond-m3"],
)
def test_from_order_rejects_non_distributive(els, pairs):
    with pytest.raises(NonDistributiveError):
        from_order(els, pairs)
    P = validate_poset(els, pairs)
    # the triple check agrees on the abstract lattice
    assert _triple_violations(P)


def test_from_order_rejects_non_lattice():
    with pytest.raises(NonDistributiveError):
        from_order("0ab", [("0", "a"), ("0", "b")])


def _triple_violations(P):
    def bound(x, y, up):
        cands = [z for z in P.elements if (P.leq(x, z) and P.leq(y, z) if up else P.leq(z, x) and P.leq(z, y))]
        for z in cands:
            if all((P.leq(z, w) if up else P.leq(w, z)) for w in cands):
                return z

    els = P.elements
    return [
        (x, y, z)
        for x in els
        for y in els
        for z in els
        if bound(x, bound(y, z, True), False) != bound(bound(x, y, False), bound(x, z, False), True)
    ]


@pytest.mark.parametrize("n", range(5))
def test_ideal_lattices_pass_the_triple_check(n):
    for P in naturally_labelled(n):
        L = DistLattice(P)
        assert check_distributive(L) == []
        assert check_absorption(L) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(0, 10_000))
def test_from_order_round_trip(n, seed):
    P = random_poset(random.Random(seed), n)
    L = DistLattice(P)
    LP = L.as_poset()
    L2, iso = from_order(LP.elements, LP.relation())
    assert len(L2) == len(L)
    for a in LP.elements:
        for b in LP.elements:
            assert LP.leq(a, b) == L2.leq(iso[a], iso[b])
