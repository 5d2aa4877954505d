import copy
import json
import random

import numpy as np
import pytest

from oracles import brute_conj_into, perm_group
from scs.errors import ConjugateInto, InvalidInput
from scs.finite_covers import PermCover, build_K
from scs.scs_free import (
    Conjugate,
    Witness,
    WitnessCertificate,
    build_delta,
    common_fixed_sheets,
    exhaustive_nonconjugacy,
    quotient_witness,
    scs_witness,
    separation_constant,
    sics_witness,
    verify_certificate,
)
from scs.subgroup_graphs import conj_into, fold_generators, saturate, star_involution
from scs.words import format_word, inverse, multiply, parse_word_list, random_word, reduced_words

RANK = 2


def gens(text):
    return parse_word_list(text, RANK)


def z3_squared():
    idx = np.arange(9)
    a = (idx // 3) * 3 + (idx % 3 + 1) % 3
    b = ((idx // 3 + 1) % 3) * 3 + idx % 3
    return PermCover(2, np.array([a, b]))


def test_separation_constant():
    assert separation_constant(gens("ab,a")) == 4
    with pytest.raises(InvalidInput):
        separation_constant([])


def test_delta_of_rose_is_rose():
    h1 = saturate(fold_generators(gens("a,b"), RANK))
    delta = build_delta(h1, z3_squared())
    assert delta.degree == 1


def test_delta_vertex_count_for_a_squared():
    h1 = saturate(fold_generators(gens("aa"), RANK))
    orbits = star_involution(h1).orbits()
    delta = build_delta(h1, z3_squared())
    assert delta.degree == h1.num_vertices + len(orbits) * (9 - 2)
    assert delta.trace(gens("aa")[0]) == 0


def test_delta_is_a_connected_cover_containing_h1():
    rng = random.Random(99)
    K, _ = build_K(RANK, 4)
    for _ in range(40):
        h = [random_word(rng, RANK, 4, 1) for _ in range(rng.randint(1, 3))]
        delta = build_delta(saturate(fold_generators(h, RANK)), K)
        assert delta.is_connected()
        assert all(delta.trace(w) == 0 for w in h)


def test_delta_requires_saturation():
    with pytest.raises(InvalidInput):
        build_delta(fold_generators(gens("aa"), RANK), z3_squared())


@pytest.mark.parametrize("h1,h2", [("a", "b"), ("ab", "a"), ("aa,bab", "ab")])
def test_witness_examples_verify(h1, h2):
    cert = sics_witness(gens(h1), gens(h2), rank=RANK)
    assert cert.checks == {"h1_contained": True, "h2_no_fixed_point": True}
    assert verify_certificate(cert) == (True, "ok")
    assert verify_certificate(json.loads(json.dumps(cert.to_json()))) == (True, "ok")


def test_witness_refuses_conjugate_into():
    with pytest.raises(ConjugateInto) as info:
        sics_witness(gens("a"), gens("aa"), rank=RANK)
    assert format_word(info.value.conjugator) == ""


def test_ab_vs_a_brute_force_over_the_cover():
    cert = sics_witness(gens("ab"), gens("a"), rank=RANK)
    D = cert.D
    for g in reduced_words(RANK, 6):
        # if a^g were in D it would fix sheet 0
        assert D.trace(multiply(inverse(g), gens("a")[0], g)) != 0


def test_certificates_are_deterministic():
    a = sics_witness(gens("ab"), gens("a"), rank=RANK).to_json()
    b = sics_witness(gens("ab"), gens("a"), rank=RANK).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_fixed_point_test_matches_conj_into_on_delta():
    rng = random.Random(5)
    K, _ = build_K(RANK, 4)
    for _ in range(25):
        h1 = [random_word(rng, RANK, 3, 1) for _ in range(2)]
        h2 = [random_word(rng, RANK, 2, 1)]
        delta = build_delta(saturate(fold_generators(h1, RANK)), K)
        d_graph = _cover_as_graph(delta)
        has_fixed = common_fixed_sheets(delta, h2).size > 0
        assert has_fixed == (conj_into(fold_generators(h2, RANK), d_graph) is not None)


def _cover_as_graph(cover):
    from scs.subgroup_graphs import SubgroupGraph

    edges = tuple((u, int(cover.perms[i][u]), i + 1) for i in range(cover.rank) for u in range(cover.degree))
    return SubgroupGraph(cover.rank, cover.degree, edges, 0)


def test_quotient_witness_pattern_and_exhaustive():
    cert = sics_witness(gens("a"), gens("b"), rank=RANK)
    q = quotient_witness(cert)
    assert q.fixed_point_pattern()
    res = q.exhaustive_check()
    assert res in (True, None)


def test_exhaustive_check_small_group():
    # S3 acting on 3 points: <(0 1)> vs <(0 1 2)> are not conjugate into each other
    t = np.array([1, 0, 2])
    r = np.array([1, 2, 0])
    assert exhaustive_nonconjugacy([t, r], [t], [r]) is True
    # <(1 2)> is conjugate into <(0 1)>
    assert exhaustive_nonconjugacy([t, r], [t], [np.array([0, 2, 1])]) is False
    assert len(perm_group([t, r])) == 6


@pytest.mark.parametrize(
    "h1,h2,kind,direction",
    [("a", "baB", "conjugate", None), ("a", "b", "witness", "H2->H1"), ("aa", "a", "witness", "H2->H1"), ("a", "aa", "witness", "H1->H2")],
)
def test_scs_witness_examples(h1, h2, kind, direction):
    res = scs_witness(gens(h1), gens(h2), rank=RANK)
    if kind == "conjugate":
        assert isinstance(res, Conjugate)
    else:
        assert isinstance(res, Witness) and res.direction == direction
        assert verify_certificate(res.certificate)[0]


def test_brute_force_soundness_small_corpus():
    rng = random.Random(17)
    done = 0
    while done < 25:
        h1 = [random_word(rng, RANK, 3, 1) for _ in range(rng.randint(1, 2))]
        h2 = [random_word(rng, RANK, 3, 1) for _ in range(rng.randint(1, 2))]
        if brute_conj_into(h2, h1, RANK, 5) is not None:
            continue
        cert = sics_witness(h1, h2, rank=RANK)
        assert verify_certificate(cert) == (True, "ok")
        done += 1


@pytest.fixture(scope="module")
def cert_json():
    return sics_witness(gens("a"), gens("b"), rank=RANK).to_json()


def free_mutations():
    def perm_dup(d):
        d["D"]["perms"]["a"][0] = d["D"]["perms"]["a"][1]

    def identity_perms(d):
        n = d["D"]["degree"]
        d["D"]["perms"] = {"a": list(range(n)), "b": list(range(n))}

    def short_girth(d):
        d["girth_part"]["cover"] = {"rank": 2, "degree": 1, "perms": {"a": [0], "b": [0]}}

    return {
        "index": lambda d: d.__setitem__("index", d["index"] + 1),
        "C": lambda d: d.__setitem__("C", d["C"] + 1),
        "version": lambda d: d.__setitem__("v", 2),
        "check_flag": lambda d: d["checks"].__setitem__("h1_contained", False),
        "rank": lambda d: d.__setitem__("rank", 3),
        "perm_entry": perm_dup,
        "h2_is_h1": lambda d: d.__setitem__("h2_generators", list(d["h1_generators"])),
        "h1_is_h2": lambda d: d.__setitem__("h1_generators", list(d["h2_generators"])),
        "girth_bound": lambda d: d["girth_part"].__setitem__("bound", d["C"] - 1),
        "girth_cover": short_girth,
        "claimed_cycle": lambda d: d["girth_part"].__setitem__("shortest_cycle_found", 3),
        "D_identity": identity_perms,
    }


@pytest.mark.parametrize("name", sorted(free_mutations()))
def test_free_tamper_detected(cert_json, name):
    data = copy.deepcopy(cert_json)
    free_mutations()[name](data)
    ok, reason = verify_certificate(data)
    assert not ok, reason


def test_round_trip_object():
    cert = sics_witness(gens("a"), gens("b"), rank=RANK)
    again = WitnessCertificate.from_json(cert.to_json())
    assert again.index == cert.index
    assert np.array_equal(again.D.perms, cert.D.perms)
