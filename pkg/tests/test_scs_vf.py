import copy
import json
import random

import numpy as np
import pytest

from oracles import brute_vf_conj_into, finite_subgroup_closure
from scs.catalog import c4_c2_c6, psl2z, s3_c2_s3
from scs.errors import ConjugateIntoDetected, InvalidInput, NormalizerConditionFails
from scs.gog_core import (
    GPath,
    inverse,
    multiply,
    normal_form,
    parse_path,
    parse_path_list,
    vertex_element,
)
from scs.gog_coverings import TrivialHandleOrder, complete_cover, fold_subgroup, lifts_to_loop
from scs.scs_vf import (
    ConjInto,
    MembershipOracle,
    NotConjInto,
    VfWitnessCertificate,
    coset_table,
    group_generators,
    round_report,
    vf_conj_into_decide,
    vf_constant,
    vf_quotient_witness,
    vf_sics_witness,
    vf_verify,
)

PSL_H1 = "1@0"
PSL_H2 = "0@0 : 0 : 1@1 : 0 : 0@0"
S3_H1 = "0@1 : 0 : 1@0 : 0 : 0@1; 0@1 : 0 : 3@0 : 0 : 0@1"
S3_H2 = "3@1"


@pytest.fixture(scope="module")
def psl_cert():
    gog = psl2z()
    return vf_sics_witness(gog, parse_path_list(gog, PSL_H1), parse_path_list(gog, PSL_H2), seed=0)


@pytest.fixture(scope="module")
def s3_cert():
    gog = s3_c2_s3(1)
    return vf_sics_witness(gog, parse_path_list(gog, S3_H1), parse_path_list(gog, S3_H2), seed=0)


# --- the constant -------------------------------------------------------------

def test_constant_length_two():
    gog = psl2z()
    assert vf_constant(gog, parse_path_list(gog, PSL_H2)) == 7


def test_constant_uses_the_longest_generator():
    gog = psl2z()
    gens = parse_path_list(gog, "1@0; " + PSL_H2 + "; 1@0 : 0 : 1@1 : 0 : 1@0 : 0 : 2@1 : 0 : 0@0")
    assert vf_constant(gog, gens) == 2 * 4 + 3


def test_constant_counts_reduced_length():
    gog = psl2z()
    # the backtrack through the trivial element of C3 reduces away
    assert vf_constant(gog, parse_path_list(gog, "1@0 : 0 : 0@1 : 0 : 0@0; " + PSL_H2)) == 7


def test_constant_for_vertex_group_generator():
    gog = s3_c2_s3(1)
    assert vf_constant(gog, parse_path_list(gog, S3_H2)) == 3


@pytest.mark.parametrize("text", ["", "0@0", "1@0 : 0 : 0@1 : 0 : 1@0"])
def test_constant_rejects_trivial_generators(text):
    gog = psl2z()
    with pytest.raises(InvalidInput):
        vf_constant(gog, parse_path_list(gog, text))


def test_constant_rejects_open_paths():
    gog = psl2z()
    with pytest.raises(InvalidInput):
        vf_constant(gog, [parse_path(gog, "1@0 : 0 : 1@1")])


# --- completion ------------------------------------------------------------------

def test_first_round_on_the_bare_core():
    gog = psl2z()
    y1 = fold_subgroup(gog, parse_path_list(gog, PSL_H1))
    pc, log = complete_cover(y1, TrivialHandleOrder.of(gog), 7, seed=0)
    assert (log[0].edge, log[0].r, log[0].s) == (0, 1, 3)
    assert pc.is_complete


def test_complete_cover_unchanged_without_free_handles(psl_cert):
    pc = psl_cert.cover
    again, log = complete_cover(pc, None, psl_cert.C)
    assert log == [] and again is pc


# --- witnesses -----------------------------------------------------------------

def test_psl_witness(psl_cert):
    assert psl_cert.checks == {"h1_fixes_base": True, "h2_no_common_fixed_point": True}
    assert psl_cert.C == 7
    assert vf_verify(psl_cert) == (True, "ok")
    rep = round_report(psl_cert)
    assert rep["strictly_decreasing"] and rep["rounds"] <= rep["directed_edges"]
    assert psl_cert.sheets == psl_cert.cover.num_points(0) == psl_cert.cover.num_points(1)


def test_s3_witness(s3_cert):
    assert s3_cert.C == 3
    assert vf_verify(s3_cert) == (True, "ok")
    assert round_report(s3_cert)["strictly_decreasing"]


def test_witness_json_round_trip(s3_cert):
    data = json.loads(s3_cert.dumps())
    assert vf_verify(data) == (True, "ok")
    again = VfWitnessCertificate.from_json(data)
    assert again.dumps() == s3_cert.dumps()


def test_witness_is_deterministic():
    gog = s3_c2_s3(1)
    h1, h2 = parse_path_list(gog, S3_H1), parse_path_list(gog, S3_H2)
    assert vf_sics_witness(gog, h1, h2, seed=5).dumps() == vf_sics_witness(gog, h1, h2, seed=5).dumps()


def test_coset_tables_are_an_action(psl_cert):
    pc = psl_cert.cover
    gog = pc.gog
    a, b = parse_path_list(gog, PSL_H1 + "; " + PSL_H2)
    ta, tb = coset_table(pc, a), coset_table(pc, b)
    assert np.array_equal(ta[ta], np.arange(pc.sheets))
    assert np.array_equal(tb[tb][tb], np.arange(pc.sheets))
    assert np.array_equal(coset_table(pc, multiply(gog, a, b)), tb[ta])


def test_h1_lifts_to_loops(psl_cert, s3_cert):
    for cert in (psl_cert, s3_cert):
        assert all(lifts_to_loop(cert.cover, h) for h in cert.h1_gens)


@pytest.mark.parametrize(
    "gog,h1,h2",
    [(psl2z(), PSL_H1, PSL_H2), (s3_c2_s3(1), S3_H1, S3_H2)],
)
def test_no_conjugator_up_to_six(gog, h1, h2):
    h1p, h2p = parse_path_list(gog, h1), parse_path_list(gog, h2)
    members = finite_subgroup_closure(gog, h1p)
    assert brute_vf_conj_into(gog, members, h2p, 6) == []


def test_equal_subgroups_detected():
    gog = psl2z()
    h = parse_path_list(gog, PSL_H1)
    with pytest.raises(ConjugateIntoDetected) as info:
        vf_sics_witness(gog, h, h)
    pc = fold_subgroup(gog, h)
    assert info.value.fixed_sheet == pc.base


def test_failing_normalizer_condition_is_refused():
    gog = c4_c2_c6()
    with pytest.raises(NormalizerConditionFails):
        vf_sics_witness(gog, parse_path_list(gog, "1@0"), parse_path_list(gog, "0@0 : 0 : 1@1 : 0 : 0@0"))


# --- quotient ------------------------------------------------------------------

def test_group_generators_generate_vertex_groups():
    gog = s3_c2_s3(1)
    gens = group_generators(gog)
    # S3 needs two generators at each vertex
    assert len(gens) == 4
    assert all(g.start == gog.base and g.end(gog) == gog.base for g in gens)


@pytest.mark.parametrize("which", ["psl", "s3"])
def test_quotient_witness(which, psl_cert, s3_cert):
    cert = psl_cert if which == "psl" else s3_cert
    q = vf_quotient_witness(cert)
    assert q.fixed_point_pattern()
    for t in q.h1_images:
        assert int(t[0]) == 0
    assert q.exhaustive_check() in (True, None)


def test_quotient_refuses_bad_certificate(s3_cert):
    data = copy.deepcopy(s3_cert.to_json())
    data["sheets"] += 1
    with pytest.raises(InvalidInput):
        vf_quotient_witness(VfWitnessCertificate.from_json(data))


# --- deciding ------------------------------------------------------------------

def test_decide_equal_subgroups_gives_identity():
    gog = s3_c2_s3(1)
    h = parse_path_list(gog, S3_H1)
    res = vf_conj_into_decide(gog, h, h)
    assert isinstance(res, ConjInto)
    assert res.conjugator.edges == () and res.conjugator.elements == (0,)


def test_decide_psl_orders_two_and_three():
    gog = psl2z()
    res = vf_conj_into_decide(gog, parse_path_list(gog, PSL_H1), parse_path_list(gog, PSL_H2))
    assert isinstance(res, NotConjInto)
    assert vf_verify(res.certificate) == (True, "ok")


def test_decide_finds_planted_conjugator():
    gog = psl2z()
    h1 = parse_path_list(gog, PSL_H2)
    g = parse_path(gog, "1@0 : 0 : 2@1 : 0 : 1@0")
    h2 = [multiply(gog, inverse(gog, g), h1[0], g)]
    res = vf_conj_into_decide(gog, h1, h2)
    assert isinstance(res, ConjInto)
    members = finite_subgroup_closure(gog, h1)
    c = res.conjugator
    assert normal_form(gog, multiply(gog, inverse(gog, c), h2[0], c)) in members


def test_membership_oracle_matches_closure():
    gog = s3_c2_s3(1)
    h1 = parse_path_list(gog, S3_H1)
    oracle = MembershipOracle(gog, h1)
    members = finite_subgroup_closure(gog, h1)
    from scs.gog_core import normal_forms

    for p in normal_forms(gog, 4):
        assert oracle.contains(p) == (p in members)


def random_finite_subgroup(gog, rng, max_depth):
    """g P g^-1 for a vertex-group subgroup P and a short random g."""
    v = rng.randrange(gog.num_vertices)
    P = sorted(rng.choice(gog.vertex_groups[v].subgroups))
    path = []
    u = gog.base
    els = [rng.randrange(gog.vertex_groups[u].order)]
    for _ in range(rng.randint(0, max_depth)):
        d = rng.choice(gog.out_edges(u))
        path.append(d)
        u = gog.terminus(d)
        els.append(rng.randrange(gog.vertex_groups[u].order))
    for d in gog.tree_path(u, v):
        path.append(d)
        u = gog.terminus(d)
        els.append(rng.randrange(gog.vertex_groups[u].order))
    g = GPath(gog.base, tuple(els), tuple(path))
    return [multiply(gog, g, vertex_element(gog, p, v), inverse(gog, g)) for p in P if p]


@pytest.mark.parametrize("gog", [psl2z(), s3_c2_s3(1)], ids=["psl2z", "s3c2s3"])
def test_decide_agrees_with_brute_force(gog):
    rng = random.Random(31)
    checked = 0
    while checked < 12:
        h1 = random_finite_subgroup(gog, rng, 3)
        # H2 inside a vertex group at the base keeps the separation constant small
        P = sorted(rng.choice(gog.vertex_groups[gog.base].subgroups))
        h2 = [vertex_element(gog, p) for p in P if p]
        if not h2:
            continue
        members = finite_subgroup_closure(gog, h1) if h1 else {normal_form(gog, GPath(gog.base, (0,)))}
        brute = brute_vf_conj_into(gog, members, h2, 6)
        res = vf_conj_into_decide(gog, h1, h2, max_len=8)
        if brute:
            assert isinstance(res, ConjInto)
        if isinstance(res, ConjInto):
            c = res.conjugator
            for h in h2:
                assert normal_form(gog, multiply(gog, inverse(gog, c), h, c)) in members
        else:
            assert not brute
            assert vf_verify(res.certificate)[0]
        checked += 1


# --- tampering -------------------------------------------------------------------

def vf_mutations():
    def coset_entry(d):
        t = d["coset_tables"]["h2"][0]
        t[0], t[1] = t[1], t[0]

    def cross_free(d):
        d["cover"]["cross"][0]["map"][0] = -1

    def act_entry(d):
        row = d["cover"]["act"]["0"][1]
        row[0] = row[1]

    def swap_cross(d):
        m = d["cover"]["cross"][0]["map"]
        m[0], m[1] = m[1], m[0]

    def edge_rho(d):
        d["gog"]["edges"][0]["rho_src"] = [0, 2]

    return {
        "version": lambda d: d.__setitem__("v", 99),
        "C": lambda d: d.__setitem__("C", d["C"] + 2),
        "sheets": lambda d: d.__setitem__("sheets", d["sheets"] + 1),
        "coset_entry": coset_entry,
        "checks_flag": lambda d: d["checks"].__setitem__("h2_no_common_fixed_point", False),
        "cross_free": cross_free,
        "act_entry": act_entry,
        "h2_is_h1": lambda d: d.__setitem__("h2_gens", list(d["h1_gens"])),
        "cross_swapped": swap_cross,
        "edge_rho": edge_rho,
    }


@pytest.mark.parametrize("name", sorted(vf_mutations()))
def test_vf_tamper_detected(s3_cert, name):
    data = copy.deepcopy(s3_cert.to_json())
    vf_mutations()[name](data)
    ok, reason = vf_verify(data)
    assert not ok, reason
