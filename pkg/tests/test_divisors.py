import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from declat.divisors import (
    DivisorClass,
    ample_from_pairings,
    ample_seeds,
    ample_with_dominant_root,
    canonical_class,
    component,
    danilov_factorize,
    descend_ample,
    determinant,
    first_ample_seed,
    format_divisor,
    intersection_matrix,
    inverse_intersection_matrix,
    is_negative_definite,
    is_relatively_ample,
    leading_minors,
    multiplicity,
    parse_divisor,
    proximity_matrix,
    pullback,
    pushforward,
    pushforward_generator,
    relative_canonical,
    search_ample_seeds,
    tilting_generator,
    total_component,
    verify_generator_identities,
    verify_pushforward,
)
from declat.errors import (
    NotAmpleError,
    NotEffectiveError,
    NotMinimalError,
    ParseError,
    SizeLimitError,
    UnknownRootError,
)
from declat.forest import (
    BlowupForest,
    Node,
    chain_forest,
    contraction,
    dec_elements,
    enumerate_forests,
    full,
    identity,
    residual,
)
from oracles import blowup_intersections, brute_ample_box


def random_forest(rng, n):
    return rng.choice(enumerate_forests(n))


def test_chain_matrices(chain):
    assert proximity_matrix(chain) == ((1, 0), (-1, 1))
    assert intersection_matrix(chain) == ((-2, 1), (1, -1))


def test_satellite_matrix(sat):
    assert intersection_matrix(sat) == ((-3, 0, 1), (0, -2, 1), (1, 1, -1))


def test_one_node():
    F = chain_forest(1)
    assert intersection_matrix(F) == ((-1,),)
    assert str(canonical_class(F)) == "E[p1]"


def test_matrix_matches_blowup_replay(forests5):
    for F in forests5:
        assert [list(r) for r in intersection_matrix(F)] == blowup_intersections(F)


def test_negative_definite_and_unimodular(forests5):
    for F in forests5:
        N = intersection_matrix(F)
        n = len(F)
        assert all(N[i][j] == N[j][i] for i in range(n) for j in range(n))
        assert is_negative_definite(N)
        assert abs(determinant(N)) == 1
        M = inverse_intersection_matrix(F)
        for i in range(n):
            for j in range(n):
                assert sum(N[i][k] * M[k][j] for k in range(n)) == (i == j)
                assert M[i][j] <= 0


def test_random_larger_forests_negative_definite():
    rng = random.Random(11)
    for n in range(6, 11):
        for _ in range(4):
            F = _random_forest_any(rng, n)
            minors = leading_minors(intersection_matrix(F))
            assert all((m < 0) if k % 2 == 0 else (m > 0) for k, m in enumerate(minors))


def _random_forest_any(rng, n):
    nodes = []
    for i in range(n):
        parent = None if i == 0 or rng.random() < 0.2 else rng.randrange(i)
        nodes.append(Node(f"p{i + 1}", None if parent is None else f"p{parent + 1}"))
    return BlowupForest(tuple(nodes))


def test_determinant_small():
    assert determinant([[2, 1], [1, 1]]) == 1
    assert determinant([]) == 1


def test_parse_and_format(chain):
    D = parse_divisor(chain, "-2*E[p1]-3*E[p2]")
    assert D.coeffs == (-2, -3)
    assert format_divisor(D) == "-2*E[p1]-3*E[p2]"
    assert parse_divisor(chain, "0").is_zero()
    assert parse_divisor(chain, "E[p1] + E[p2] - E[p2]").coeffs == (1, 0)
    T = parse_divisor(chain, "E[p2]", basis="total")
    assert T.to_strict().coeffs == (0, 1)
    for bad in ("E[p9]", "2*", "E[p1]**2", "x"):
        with pytest.raises(ParseError):
            parse_divisor(chain, bad)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.data())
def test_basis_round_trip_and_format(n, data):
    F = data.draw(st.sampled_from(enumerate_forests(n)))
    a = data.draw(st.lists(st.integers(-9, 9), min_size=n, max_size=n))
    D = DivisorClass(F, tuple(a), "strict")
    assert D.to_total().to_strict().coeffs == tuple(a)
    assert parse_divisor(F, format_divisor(D)).same_class(D)


def test_total_transforms_are_orthogonal(forests5):
    for F in forests5:
        for i in F.ids:
            for j in F.ids:
                e = total_component(F, i).dot(total_component(F, j))
                assert e == (-1 if i == j else 0)


def test_canonical_class_satisfies_adjunction(forests5):
    # each exceptional curve is rational: K.E = -2 - E.E
    for F in forests5:
        K = canonical_class(F)
        for i in F.ids:
            E = component(F, i)
            assert K.dot(E) == -2 - E.dot(E)


def test_discrepancy_examples(chain, sat):
    assert str(canonical_class(chain)) == "E[p1]+2*E[p2]"
    assert str(relative_canonical(chain, contraction(chain, ["p2"]))) == "E[p2]"
    assert str(canonical_class(sat)) == "E[p1]+2*E[p2]+4*E[p3]"


def test_projection_formula(forests5):
    for F in forests5[:50]:
        for g in dec_elements(F):
            Fh = residual(F, g)
            for i in Fh.ids:
                for j in Fh.ids:
                    A, B = component(Fh, i), component(Fh, j)
                    assert pullback(A, F).dot(pullback(B, F)) == A.dot(B)
                for c in g.irr:
                    assert pullback(component(Fh, i), F).dot(component(F, c)) == 0
                assert pushforward(pullback(component(Fh, i), F), Fh).same_class(component(Fh, i))


def test_ample_check(chain):
    D = parse_divisor(chain, "-2*E[p1]-3*E[p2]")
    assert D.pairings() == {"p1": 1, "p2": 1}
    assert is_relatively_ample(chain, full(chain), D)
    assert is_relatively_ample(chain, identity(chain), DivisorClass.zero(chain))
    assert not is_relatively_ample(chain, full(chain), component(chain, "p1"))


def test_descend_chain(chain):
    D = parse_divisor(chain, "-2*E[p1]-3*E[p2]")
    step = descend_ample(chain, full(chain), D, "p2")
    assert step.k == 1
    assert str(step.lifted) == "-2*E[p1]-2*E[p2]"
    assert str(step.result) == "-2*E[p1]"
    assert step.lifted.dot(component(chain, "p2")) == 0
    with pytest.raises(NotMinimalError):
        descend_ample(chain, full(chain), D, "p1")
    with pytest.raises(NotAmpleError):
        descend_ample(chain, full(chain), component(chain, "p1"), "p2")


def test_danilov_chain(chain):
    steps = danilov_factorize(chain, parse_divisor(chain, "-2*E[p1]-3*E[p2]"))
    assert [s.leaf for s in steps] == ["p2", "p1"]


def test_ample_seeds_match_box_oracle():
    for n in range(4):
        for F in enumerate_forests(n):
            bound = 4 * n if n < 3 else 6
            got = sorted(D.coeffs for D in ample_seeds(F, bound))
            assert got == sorted(brute_ample_box(F, bound))


def test_chain_seed_count(chain):
    assert len(list(ample_seeds(chain))) == 12


def test_search_seeds_are_ample_and_never_empty(forests5):
    for F in forests5:
        seeds = search_ample_seeds(F)
        assert seeds
        for D in seeds:
            assert is_relatively_ample(F, full(F), D)
            assert all(1 <= b <= 2 for b in D.pairings().values()) or D == first_ample_seed(F)


def test_danilov_on_all_seeds(forests5):
    for F in forests5:
        for D in search_ample_seeds(F):
            steps = danilov_factorize(F, D)
            assert len(steps) == len(F)
            for s in steps:
                assert is_relatively_ample(s.result.forest, s.remaining, s.result)


def test_multiplicity(chain):
    D = parse_divisor(chain, "2*E[p1]+3*E[p2]")
    assert multiplicity(chain, "p1", D) == 5
    with pytest.raises(UnknownRootError):
        multiplicity(chain, "p2", D)
    with pytest.raises(NotEffectiveError):
        multiplicity(chain, "p1", -D)


def test_dominant_root_exists(forests5):
    for F in forests5:
        for r in F.roots:
            D = ample_with_dominant_root(F, r)
            assert is_relatively_ample(F, full(F), D)
            m = {x: multiplicity(F, x, -D) for x in F.roots}
            assert all(m[r] > v for x, v in m.items() if x != r)


def test_ample_from_pairings(sat):
    D = ample_from_pairings(sat, [1, 2, 3])
    assert D.pairings() == {"p1": 1, "p2": 2, "p3": 3}


def test_chain_generators(chain):
    T = tilting_generator(chain, full(chain), "T")
    assert {str(s) for s in T.exceptional_supports()} == {"E[p2]", "E[p1]+2*E[p2]"}
    assert all(str(s.twist) == "E[p1]+2*E[p2]" for s in T.summands)
    S = tilting_generator(chain, full(chain), "S")
    assert [s.shift for s in S.summands] == [0, -1, -1]
    assert len(tilting_generator(chain, identity(chain), "T").summands) == 1
    with pytest.raises(ValueError):
        tilting_generator(chain, full(chain), "Q")


def test_pushforward_generator(chain):
    g = contraction(chain, ["p2"])
    pushed = pushforward_generator(chain, g)
    assert [str(s.support) for s in pushed.summands if s.support] == ["E[p1]"]
    only = pushforward_generator(chain, full(chain))
    assert len(only.summands) == 1


def test_identities_all_forests(forests5):
    for F in forests5:
        assert verify_generator_identities(F).failures == []
        assert verify_pushforward(F).failures == []


def test_pushforward_generator_six_nodes():
    for F in enumerate_forests(6)[::7]:
        assert verify_pushforward(F).failures == []


def test_identity_limit():
    with pytest.raises(SizeLimitError):
        verify_generator_identities(chain_forest(9))
