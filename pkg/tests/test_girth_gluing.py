import itertools
import math

import networkx as nx
import pytest

from scs.errors import InvalidInput
from scs.girth_gluing import (
    StarGluing,
    bipartite_girth,
    degrees_ok,
    glue_stars,
    glued_girth,
    is_connected,
    verify_gluing,
)


def glued_graph(g):
    """Explicit glued graph: centers plus one degree-2 vertex per identified leaf."""
    G = nx.Graph()
    for k, (a, b) in enumerate(g.center_edges()):
        leaf = ("leaf", k)
        G.add_edge(("r", a), leaf)
        G.add_edge(leaf, ("s", b))
    return G


def oracle_girth(g):
    value = nx.girth(glued_graph(g))
    return None if value == math.inf else int(value)


def test_single_edge_is_a_tree():
    g = glue_stars(1, 1, 10)
    assert (g.num_r, g.num_s) == (1, 1)
    assert glued_girth(g, cap=10) is None
    assert bipartite_girth(g) == math.inf


def test_double_edge_has_girth_four():
    g = StarGluing(2, 2, 1, 1, 1, ((0, 0), (1, 1)))
    assert glued_girth(g) == 4
    assert glued_girth(g, cap=3) is None


def test_two_two_is_one_long_cycle():
    g = glue_stars(2, 2, 8, seed=1)
    G = glued_graph(g)
    assert nx.is_connected(G)
    assert all(d == 2 for _, d in G.degree())
    assert G.number_of_edges() == G.number_of_nodes()
    assert glued_girth(g) >= 8
    assert glued_girth(g) == G.number_of_nodes()


def test_three_two_six():
    g = glue_stars(3, 2, 6, seed=7)
    assert g.num_r * 3 == g.num_s * 2
    assert g.num_r % 2 == 0
    assert verify_gluing(g) == (True, "ok")
    assert oracle_girth(g) >= 6


@pytest.mark.parametrize("r,s,t", [(1, 4, 5), (2, 3, 4), (3, 3, 6), (4, 2, 6), (2, 5, 8), (3, 4, 6)])
def test_glued_girth_matches_graph_oracle(r, s, t):
    g = glue_stars(r, s, t, seed=3)
    assert degrees_ok(g) and is_connected(g)
    want = oracle_girth(g)
    assert glued_girth(g) == want
    if want is not None:
        assert want >= t


def test_degree_contract_on_glued_graph():
    g = glue_stars(3, 4, 6, seed=2)
    G = glued_graph(g)
    for node, d in G.degree():
        assert d == {"r": 3, "s": 4, "leaf": 2}[node[0]]


def test_deterministic():
    a = glue_stars(3, 2, 8, seed=11)
    b = glue_stars(3, 2, 8, seed=11)
    assert a == b


def test_mirror_is_consistent():
    g = glue_stars(5, 2, 6, seed=0)
    assert (g.r, g.s) == (5, 2)
    assert verify_gluing(g)[0]


def test_json_round_trip():
    g = glue_stars(2, 3, 6, seed=4)
    assert StarGluing.from_json(g.to_json()) == g


@pytest.mark.parametrize("args", [(0, 2, 3), (2, 0, 3), (2, 2, 0)])
def test_rejects_nonpositive(args):
    with pytest.raises(InvalidInput):
        glue_stars(*args)


def test_rejects_non_bijection():
    with pytest.raises(InvalidInput):
        StarGluing(2, 2, 1, 1, 1, ((0, 0), (1, 0)))
    with pytest.raises(InvalidInput):
        StarGluing(2, 3, 1, 1, 1, ((0, 0), (1, 1)))


def test_verifier_rejects_short_cycles():
    g = StarGluing(2, 2, 6, 1, 1, ((0, 0), (1, 1)))
    assert verify_gluing(g) == (False, "short_cycle")


def test_verifier_rejects_disconnected():
    # two separate double edges
    g = StarGluing(2, 2, 1, 2, 2, ((0, 0), (1, 1), (2, 2), (3, 3)))
    assert verify_gluing(g) == (False, "disconnected")


def test_bipartite_girth_brute_force_small():
    # enumerate every matching of 4 r-slots (r=2) to 4 s-slots (s=2) and compare with networkx
    for perm in itertools.permutations(range(4)):
        g = StarGluing(2, 2, 1, 2, 2, tuple(zip(range(4), perm)))
        want = oracle_girth(g)
        assert glued_girth(g) == want
