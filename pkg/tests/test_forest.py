import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from declat.errors import (
    CycleError,
    DuplicateLabelError,
    ForestMismatchError,
    InvalidProximityError,
    NotLowerIdealError,
    SchemaError,
)
from declat.forest import (
    BlowupForest,
    Node,
    all_forests,
    chain_forest,
    conn,
    conn_of,
    contraction,
    danilov_center,
    dec_elements,
    dec_lattice,
    enumerate_forests,
    factor,
    full,
    gamma,
    generator,
    identity,
    meet_contraction,
    parse_forest,
    residual,
    union_contraction,
)
from oracles import contractible_sets


def test_chain_irr_and_dec(chain):
    P = chain.irr_poset
    assert P.covers() == [("p2", "p1")]
    assert [g.irr for g in dec_elements(chain)] == [(), ("p2",), ("p1", "p2")]
    assert [generator(g) for g in conn(chain)] == ["p1", "p2"]


def test_satellite_conn(sat):
    assert [g.irr for g in conn(sat)] == [("p1", "p2", "p3"), ("p2", "p3"), ("p3",)]


def test_parse_round_trip(sat):
    doc = json.dumps(sat.to_document())
    assert parse_forest(doc) == sat
    assert parse_forest(json.loads(doc)) == sat


@pytest.mark.parametrize(
    "doc, err",
    [
        ("not json", SchemaError),
        ('{"nodes": 3}', SchemaError),
        ('{"nodes": [{"id": "a", "colour": 1}]}', SchemaError),
        ('{"nodes": [{"id": "a"}, {"id": "a"}]}', DuplicateLabelError),
        ('{"nodes": [{"id": "a", "parent": "z"}]}', SchemaError),
        ('{"nodes": [{"id": "a", "parent": "b"}, {"id": "b", "parent": "a"}]}', CycleError),
        ('{"nodes": [{"id": "a", "parent": "b"}, {"id": "b"}]}', SchemaError),
        ('{"nodes": [{"id": "a", "proximate_to": ["a"]}]}', InvalidProximityError),
        (
            '{"nodes": [{"id": "a"}, {"id": "b", "parent": "a"}, {"id": "c", "parent": "b"},'
            ' {"id": "d", "parent": "c", "proximate_to": ["a"]}]}',
            InvalidProximityError,
        ),
    ],
    ids=["bad-json", "nodes-not-list", "unknown-key", "dup", "unknown-parent", "cycle",
         "order", "root-satellite", "not-proximate"],
)
def test_parse_errors(doc, err):
    with pytest.raises(err):
        parse_forest(doc)


def test_two_children_cannot_share_the_satellite_point():
    nodes = (Node("a"), Node("b", "a"), Node("c", "b", ("a",)), Node("d", "b", ("a",)))
    with pytest.raises(InvalidProximityError):
        BlowupForest(nodes)


def test_contraction_must_be_lower_ideal(chain):
    with pytest.raises(NotLowerIdealError):
        contraction(chain, ["p1"])
    with pytest.raises(ForestMismatchError):
        union_contraction(full(chain), full(chain_forest(3)))


def test_factor_and_gamma(sat):
    g = contraction(sat, ["p3"])
    Fg, Fh = factor(sat, g)
    assert Fg.ids == ("p3",) and Fh.ids == ("p1", "p2")
    relabel = {a.irr: b.irr for a, b in gamma(sat, g).items()}
    assert relabel == {("p1", "p2", "p3"): ("p1", "p2"), ("p2", "p3"): ("p2",)}
    assert danilov_center(sat) == {"p1"}


def test_plain_forest_counts():
    # unlabelled rooted forests on n nodes = rooted trees on n + 1 nodes
    plain = [sum(1 for F in enumerate_forests(n) if not any(x.proximate_to for x in F.nodes)) for n in range(7)]
    assert plain == [1, 1, 2, 4, 9, 20, 48]


def test_decorated_forest_counts():
    assert [len(enumerate_forests(n)) for n in range(6)] == [1, 1, 2, 5, 16, 60]


def test_dedupe_keeps_every_class():
    for n in range(5):
        codes = {F.canonical_code() for F in enumerate_forests(n, dedupe=False)}
        assert len(codes) == len(enumerate_forests(n))


def test_dec_is_contractible_sets(forests5):
    for F in forests5:
        got = {frozenset(g.irr) for g in dec_elements(F)}
        assert got == contractible_sets(F)


def test_union_meet_irr(forests5):
    for F in forests5[:40]:
        els = dec_elements(F)
        for a in els:
            for b in els:
                assert set(union_contraction(a, b).irr) == set(a.irr) | set(b.irr)
                assert set(meet_contraction(a, b).irr) == set(a.irr) & set(b.irr)


def test_conn_of_and_residual(forests5):
    for F in forests5:
        for g in dec_elements(F):
            assert {generator(c) for c in conn_of(g)} == set(g.irr)
            assert set(residual(F, g).ids) == set(F.ids) - set(g.irr)
        assert conn_of(identity(F)) == []


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 5), st.data())
def test_join_primes_of_dec_are_principal(n, data):
    forests = enumerate_forests(n)
    F = data.draw(st.sampled_from(forests))
    L = dec_lattice(F)
    assert {m for m in L.join_prime_masks()} == {g.mask for g in conn(F)}


def test_all_forests_is_cumulative():
    assert len(all_forests(5)) == 85
