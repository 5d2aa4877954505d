import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_girth
from scs.errors import InvalidInput
from scs.finite_covers import (
    GirthCertificate,
    KStrategy,
    PermCover,
    build_K,
    coset_action,
    contains_word,
    exclude_word_cover,
    girth,
    is_regular,
    product_kernel,
    verify_girth_certificate,
)
from scs.words import cyclic_relator_classes, multiply, parse_word, reduce, ReducedWord


def z3_squared():
    # a, b act on Z/3 x Z/3 by translation
    idx = np.arange(9)
    a = (idx // 3) * 3 + (idx % 3 + 1) % 3
    b = ((idx // 3 + 1) % 3) * 3 + idx % 3
    return PermCover(2, np.array([a, b]))


def swap_cover():
    return PermCover(2, np.array([[1, 0], [1, 0]]))


def test_z3_squared_girth_and_regularity():
    K = z3_squared()
    assert K.is_connected()
    assert is_regular(K)
    assert girth(K) == 3
    assert brute_girth(list(K.perms), 6) == 3


def test_swap_cover_girth():
    assert girth(swap_cover()) == 2


def test_coset_action_examples():
    K = z3_squared()
    ident = coset_action(K, reduce([], 2))
    assert np.array_equal(ident, np.arange(9))
    a = coset_action(K, parse_word("a", 2))
    assert set(_cycle_lengths(a)) == {3}


def _cycle_lengths(p):
    seen, out = set(), []
    for s in range(len(p)):
        if s in seen:
            continue
        n, t = 0, s
        while t not in seen:
            seen.add(t)
            t = int(p[t])
            n += 1
        out.append(n)
    return out


raw = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8)


@given(raw, raw)
@settings(max_examples=60)
def test_coset_action_is_a_homomorphism(x, y):
    K = z3_squared()
    u, v = reduce(x, 2), reduce(y, 2)
    # right action: first u then v
    assert np.array_equal(coset_action(K, multiply(u, v)), coset_action(K, v)[coset_action(K, u)])


@pytest.mark.parametrize("w", ["a", "ab", "aab", "abAB", "abab"])
def test_exclude_word_cover(w):
    word = parse_word(w, 2)
    cover = exclude_word_cover(word)
    assert cover.trace(word) != 0


@pytest.mark.parametrize("C", range(1, 7))
def test_build_K_girth_two_ways(C):
    K, cert = build_K(2, C)
    assert is_regular(K)
    assert girth(K, C) is None
    # exhaustive: no relator class of length <= C lies in K
    for cls in cyclic_relator_classes(2, C):
        assert not contains_word(K, ReducedWord(cls, 2))
    assert verify_girth_certificate(cert) == (True, "ok")


def test_build_K_deterministic():
    K1, _ = build_K(2, 7, "random:3:7")
    K2, _ = build_K(2, 7, "random:3:7")
    assert np.array_equal(K1.perms, K2.perms)


def test_product_kernel_is_regular():
    covers = [exclude_word_cover(parse_word(w, 2)) for w in ("a", "b", "ab")]
    K = product_kernel(covers)
    assert is_regular(K)
    for w in ("a", "b", "ab"):
        assert not contains_word(K, parse_word(w, 2))


def test_girth_invariant_under_relabelling():
    K, _ = build_K(2, 4)
    rng = np.random.default_rng(0)
    sigma = rng.permutation(K.degree)
    inv = np.argsort(sigma)
    relabelled = PermCover(2, np.array([sigma[p[inv]] for p in K.perms]))
    assert girth(relabelled) == girth(K)


def test_girth_certificate_tamper():
    K, cert = build_K(2, 3)
    data = cert.to_json()
    data["bound"] = 9
    ok, _ = verify_girth_certificate(GirthCertificate.from_json(data))
    assert not ok


@pytest.mark.parametrize("text", ["exact", "auto", "random:1:5", "random"])
def test_strategy_parse(text):
    assert KStrategy.parse(text).kind in ("exact", "auto", "random")


@pytest.mark.parametrize("text", ["bogus", "random:x", "random:0:1"])
def test_strategy_parse_rejects(text):
    with pytest.raises(InvalidInput):
        KStrategy.parse(text)


def test_permcover_validation():
    with pytest.raises(InvalidInput):
        PermCover(2, np.array([[0, 0], [1, 0]]))
    cover = z3_squared()
    assert PermCover.from_json(cover.to_json()).perms.tolist() == cover.perms.tolist()
