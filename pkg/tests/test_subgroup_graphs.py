import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import NaiveGraph, brute_conj_into, products
from scs.errors import InvalidInput
from scs.subgroup_graphs import (
    SubgroupGraph,
    canonical,
    conj_into,
    conjugate_witness,
    conjugates_into,
    contains,
    fold_generators,
    saturate,
    star_involution,
)
from scs.words import format_word, inverse, multiply, parse_word, parse_word_list, random_word, reduced_words

RANK = 2


def gens(text):
    return parse_word_list(text, RANK)


def random_gens(rng, k=3, max_len=4):
    return [random_word(rng, RANK, max_len, 1) for _ in range(rng.randint(1, k))]


gen_lists = st.lists(
    st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=5), min_size=1, max_size=3
)


def to_words(raw):
    from scs.words import reduce

    return [w for w in (reduce(r, RANK) for r in raw) if w.letters]


@pytest.mark.parametrize(
    "text,vertices,betti",
    [("", 1, 0), ("a", 1, 1), ("a,b", 1, 2), ("aa", 2, 1), ("ab", 2, 1), ("baB", 2, 1), ("aba", 3, 1)],
)
def test_fold_small(text, vertices, betti):
    g = fold_generators(gens(text), RANK)
    assert g.num_vertices == vertices
    assert g.betti_number() == betti


@given(gen_lists)
@settings(max_examples=80, deadline=None)
def test_fold_matches_naive_folding(raw):
    ws = to_words(raw)
    g = fold_generators(ws, RANK)
    naive = NaiveGraph(ws, RANK)
    # folding never removes the basepoint hair; compare membership and rank
    assert g.betti_number() == naive.betti()
    for w in reduced_words(RANK, 5):
        assert contains(g, w) == naive.contains(w), format_word(w)


@given(gen_lists)
@settings(max_examples=40, deadline=None)
def test_products_are_members(raw):
    ws = to_words(raw)
    g = fold_generators(ws, RANK)
    for p in products(ws, 3):
        assert contains(g, p)


def test_basis_generates_same_subgroup():
    rng = random.Random(11)
    for _ in range(30):
        ws = random_gens(rng)
        g = fold_generators(ws, RANK)
        h = fold_generators(g.basis(), RANK)
        assert canonical(g) == canonical(h)


def test_json_round_trip():
    g = fold_generators(gens("aab,bA"), RANK)
    assert SubgroupGraph.from_json(g.to_json()) == g


def test_unfolded_graph_rejected():
    with pytest.raises(InvalidInput):
        SubgroupGraph(2, 2, ((0, 1, 1), (0, 0, 1)), 0)


@pytest.mark.parametrize("text", ["", "a", "aa", "ab", "aa,bab", "abAB"])
def test_saturation(text):
    g = saturate(fold_generators(gens(text), RANK))
    assert g.is_saturated()
    for v in g.vertices:
        assert g.valency(v) in (1, 2 * RANK)
    for w in gens(text):
        assert contains(g, w)


def test_star_involution_is_an_involution():
    rng = random.Random(3)
    for _ in range(30):
        g = saturate(fold_generators(random_gens(rng), RANK))
        inv = star_involution(g)
        for e in inv.pairing:
            assert inv.sigma(inv.sigma(e)) == e
            assert inv.star(e)[1] == e[1]


@pytest.mark.parametrize(
    "h2,h1,expect",
    [("baB", "a", "b"), ("a", "baB", "B"), ("aa", "a", ""), ("a", "aa", None), ("b", "a", None)],
)
def test_conj_into_examples(h2, h1, expect):
    f2, f1 = fold_generators(gens(h2), RANK), fold_generators(gens(h1), RANK)
    g = conj_into(f2, f1)
    if expect is None:
        assert g is None
    else:
        assert g is not None and conjugates_into(f2, f1, g)


def test_conj_into_agrees_with_brute_force():
    rng = random.Random(2024)
    for _ in range(150):
        h1, h2 = random_gens(rng, 2, 3), random_gens(rng, 2, 3)
        f1, f2 = fold_generators(h1, RANK), fold_generators(h2, RANK)
        g = conj_into(f2, f1)
        brute = brute_conj_into(h2, h1, RANK, 4)
        if g is not None:
            assert all(NaiveGraph(h1, RANK).contains(multiply(inverse(g), h, g)) for h in h2)
        if brute is not None:
            assert g is not None


def test_conjugate_witness():
    a = fold_generators(gens("a"), RANK)
    b = fold_generators(gens("baB"), RANK)
    g = conjugate_witness(a, b)
    assert g is not None
    assert conjugates_into(a, b, g) and conjugates_into(b, a, inverse(g))
    assert conjugate_witness(a, fold_generators(gens("aa"), RANK)) is None


def test_conjugate_witness_on_conjugated_subgroups():
    rng = random.Random(7)
    for _ in range(60):
        h = random_gens(rng, 2, 3)
        c = random_word(rng, RANK, 3)
        hc = [multiply(inverse(c), w, c) for w in h]
        g = conjugate_witness(fold_generators(h, RANK), fold_generators(hc, RANK))
        assert g is not None


def test_contains_examples():
    g = fold_generators(gens("aa,bab"), RANK)
    assert contains(g, parse_word("aaaa", RANK))
    assert contains(g, parse_word("aabab", RANK))
    assert not contains(g, parse_word("a", RANK))
