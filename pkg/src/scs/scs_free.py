"""Finite-index witnesses for non-conjugacy of subgroups of a free group.

Given H1 and H2 with H2 not conjugate into H1, we build a finite cover
Delta of the rose whose subgroup D at sheet 0 contains H1 while no
conjugate of H2 lies in D.  Delta is the saturated core of H1 with one
copy of a large-girth regular cover K (minus an edge) plugged into each
pair of outer edges matched by the star involution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import SCHEMA_VERSION
from .errors import ConjugateInto, InvalidInput, ResourceError, VerificationFailed
from .finite_covers import (
    GirthCertificate,
    KStrategy,
    PermCover,
    build_K,
    coset_action,
    verify_girth_certificate,
)
from .subgroup_graphs import (
    SubgroupGraph,
    conj_into,
    conjugate_witness,
    fold_generators,
    saturate,
    star_involution,
)
from .words import ReducedWord, format_word, parse_word


def separation_constant(h2_gens: Sequence[ReducedWord]) -> int:
    """C = 2 max |h| over the H2 generators."""
    lengths = [len(h) for h in h2_gens]
    if not lengths or max(lengths) == 0:
        raise InvalidInput("H2 must have a nontrivial generator")
    return max(1, 2 * max(lengths))


def build_delta(h1: SubgroupGraph, K: PermCover) -> PermCover:
    """Plug copies of K minus one edge into the outer edges of a saturated core.

    One copy per sigma-orbit {e, reverse(e*)}: i(e) is identified with the
    source of the removed edge and t(e*) with its target.  Sheet 0 is the
    basepoint of h1.
    """
    if not h1.is_saturated():
        raise InvalidInput("build_delta needs a saturated subgroup graph")
    if K.rank != h1.rank:
        raise InvalidInput("K and h1 have different ranks")
    rank = h1.rank
    m = K.degree
    for i in range(rank):
        if K.perms[i][0] == 0:
            raise InvalidInput("K has a loop at sheet 0; its girth is too small")
    star = star_involution(h1)
    orbits = star.orbits()

    nv = h1.num_vertices
    # core vertices keep their ids after moving the basepoint to 0
    core_ids = np.arange(nv)
    core_ids[[0, h1.basepoint]] = core_ids[[h1.basepoint, 0]]
    total = nv + len(orbits) * (m - 2)
    perms = np.full((rank, total), -1, dtype=np.int64)
    for u, v, x in h1.edges:
        perms[x - 1][core_ids[u]] = core_ids[v]

    k_sheets = np.arange(m)
    next_id = nv
    for e, _partner in orbits:
        u, x = e
        w = star.targets[star.pairing[e]]
        i = abs(x) - 1
        # the removed edge of K is a --x_i--> b, oriented so that a carries label x
        if x > 0:
            src, dst = 0, int(K.perms[i][0])
            ends = (src, dst)
        else:
            src, dst = int(K.inverse_perms[i][0]), 0
            ends = (dst, src)
        # ends = (start of e-hat, end of e-hat) in the direction of label x
        mapping = np.full(m, -1, dtype=np.int64)
        rest = np.setdiff1d(k_sheets, ends)
        mapping[rest] = np.arange(next_id, next_id + m - 2)
        mapping[ends[0]] = core_ids[u]
        mapping[ends[1]] = core_ids[w]
        next_id += m - 2
        for j in range(rank):
            srcs = k_sheets
            if j == i:
                srcs = k_sheets[k_sheets != src]
            tgt = mapping[K.perms[j][srcs]]
            slots = mapping[srcs]
            if (perms[j][slots] != -1).any():
                raise VerificationFailed("star gluing fills a slot twice")
            perms[j][slots] = tgt
    if (perms < 0).any():
        raise VerificationFailed("star gluing left an empty slot; Delta is not a cover")
    try:
        delta = PermCover(rank, perms)
    except InvalidInput as exc:
        raise VerificationFailed(f"Delta is not a cover: {exc}") from exc
    if not delta.is_connected():
        raise VerificationFailed("Delta is disconnected")
    return delta


def common_fixed_sheets(cover: PermCover, words: Sequence[ReducedWord]) -> np.ndarray:
    fixed = np.ones(cover.degree, dtype=bool)
    idx = np.arange(cover.degree)
    for w in words:
        fixed &= coset_action(cover, w) == idx
    return np.flatnonzero(fixed)


@dataclass(frozen=True, eq=False)
class WitnessCertificate:
    rank: int
    h1_generators: tuple[ReducedWord, ...]
    h2_generators: tuple[ReducedWord, ...]
    D: PermCover
    index: int
    girth_part: GirthCertificate
    C: int
    checks: dict = field(default_factory=dict)
    version: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        return {
            "v": self.version,
            "kind": "free_witness",
            "rank": self.rank,
            "h1_generators": [format_word(w) for w in self.h1_generators],
            "h2_generators": [format_word(w) for w in self.h2_generators],
            "C": self.C,
            "index": self.index,
            "D": self.D.to_json(),
            "girth_part": self.girth_part.to_json(),
            "checks": dict(self.checks),
        }

    @classmethod
    def from_json(cls, data: dict) -> "WitnessCertificate":
        rank = int(data["rank"])
        return cls(
            rank=rank,
            h1_generators=tuple(parse_word(s, rank) for s in data["h1_generators"]),
            h2_generators=tuple(parse_word(s, rank) for s in data["h2_generators"]),
            D=PermCover.from_json(data["D"]),
            index=int(data["index"]),
            girth_part=GirthCertificate.from_json(data["girth_part"]),
            C=int(data["C"]),
            checks=dict(data["checks"]),
            version=int(data["v"]),
        )


def sics_witness(h1_gens: Sequence[ReducedWord], h2_gens: Sequence[ReducedWord],
                 k_strategy: str | KStrategy | None = None, rank: int | None = None) -> WitnessCertificate:
    """Certificate that H2 is not conjugate into H1."""
    h1_gens, h2_gens = list(h1_gens), list(h2_gens)
    if rank is None:
        if not (h1_gens or h2_gens):
            raise InvalidInput("rank is required when no generators are given")
        rank = (h1_gens or h2_gens)[0].rank
    C = separation_constant(h2_gens)
    h1 = fold_generators(h1_gens, rank)
    h2 = fold_generators(h2_gens, rank)
    g = conj_into(h2, h1)
    if g is not None:
        raise ConjugateInto(g)
    K, gcert = build_K(rank, C, k_strategy)
    delta = build_delta(saturate(h1), K)
    h1_ok = all(delta.trace(w) == 0 for w in h1_gens)
    fixed = common_fixed_sheets(delta, h2_gens)
    if not h1_ok:
        raise VerificationFailed("an H1 generator does not close up at the basepoint of Delta")
    if fixed.size:
        raise VerificationFailed(f"H2 generators share fixed sheet {int(fixed[0])} in Delta")
    return WitnessCertificate(
        rank=rank,
        h1_generators=tuple(h1_gens),
        h2_generators=tuple(h2_gens),
        D=delta,
        index=delta.degree,
        girth_part=gcert,
        C=C,
        checks={"h1_contained": True, "h2_no_fixed_point": True},
    )


def verify_certificate(cert: WitnessCertificate | dict) -> tuple[bool, str]:
    """Independent re-check of a witness; returns (ok, reason code)."""
    try:
        if isinstance(cert, dict):
            cert = WitnessCertificate.from_json(cert)
    except (KeyError, TypeError, ValueError) as exc:
        return False, f"malformed:{type(exc).__name__}"
    if cert.version != SCHEMA_VERSION:
        return False, "unsupported_version"
    D = cert.D
    if D.rank != cert.rank or cert.girth_part.cover.rank != cert.rank:
        return False, "rank_mismatch"
    if any(w.rank != cert.rank for w in cert.h1_generators + cert.h2_generators):
        return False, "rank_mismatch"
    if cert.index != D.degree:
        return False, "index_mismatch"
    if not D.is_connected():
        return False, "D_disconnected"
    try:
        C = separation_constant(cert.h2_generators)
    except InvalidInput:
        return False, "h2_trivial"
    if cert.C != C or cert.girth_part.bound < C:
        return False, "bound_mismatch"
    ok, why = verify_girth_certificate(cert.girth_part)
    if not ok:
        return False, f"girth:{why}"
    if not all(D.trace(w) == 0 for w in cert.h1_generators):
        return False, "h1_not_contained"
    if common_fixed_sheets(D, cert.h2_generators).size:
        return False, "h2_has_fixed_sheet"
    if cert.checks != {"h1_contained": True, "h2_no_fixed_point": True}:
        return False, "recorded_checks_mismatch"
    return True, "ok"


@dataclass(frozen=True, eq=False)
class FiniteQuotient:
    """phi: F -> Sym(index) given by the generator permutations of D."""

    generator_images: np.ndarray
    h1_images: tuple[np.ndarray, ...]
    h2_images: tuple[np.ndarray, ...]

    @property
    def degree(self) -> int:
        return int(self.generator_images.shape[1])

    def fixed_point_pattern(self) -> bool:
        idx = np.arange(self.degree)
        h1_fix = all(int(p[0]) == 0 for p in self.h1_images)
        common = np.ones(self.degree, dtype=bool)
        for p in self.h2_images:
            common &= p == idx
        return h1_fix and not common.any()

    def exhaustive_check(self, max_order: int = 100_000) -> bool | None:
        """Brute force over the image group; None when it is (or may be) too large."""
        return exhaustive_nonconjugacy(self.generator_images, self.h1_images, self.h2_images, max_order)


def quotient_witness(cert: WitnessCertificate) -> FiniteQuotient:
    ok, why = verify_certificate(cert)
    if not ok:
        raise InvalidInput(f"invalid certificate: {why}")
    D = cert.D
    return FiniteQuotient(
        np.array(D.perms),
        tuple(coset_action(D, w) for w in cert.h1_generators),
        tuple(coset_action(D, w) for w in cert.h2_generators),
    )


def _perm_order(p: np.ndarray) -> int:
    seen = np.zeros(p.size, dtype=bool)
    order = 1
    for s in range(p.size):
        if seen[s]:
            continue
        n, t = 0, s
        while not seen[t]:
            seen[t] = True
            t = int(p[t])
            n += 1
        order = order * n // math.gcd(order, n)
    return order


def _closure(gens: Sequence[np.ndarray], degree: int, limit: int) -> dict[bytes, np.ndarray] | None:
    ident = np.arange(degree)
    elems = {ident.tobytes(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = s[g]
                key = h.tobytes()
                if key not in elems:
                    if len(elems) >= limit:
                        return None
                    elems[key] = h
                    nxt.append(h)
        frontier = nxt
    return elems


def _tuple_orbit_exceeds(gens: Sequence[np.ndarray], points: tuple[int, ...], limit: int) -> bool:
    lists = [g.tolist() for g in gens]
    seen = {points}
    frontier = [points]
    while frontier:
        nxt = []
        for t in frontier:
            for s in lists:
                q = tuple(s[a] for a in t)
                if q not in seen:
                    seen.add(q)
                    if len(seen) > limit:
                        return True
                    nxt.append(q)
        frontier = nxt
    return False


def group_order_exceeds(gens: Sequence[np.ndarray], limit: int) -> bool:
    """Cheap proof that the generated group has more than limit elements.

    Uses element orders and orbit sizes on short tuples of points; each is
    a lower bound for the group order.  False means "not proven".
    """
    degree = gens[0].size
    probes = list(gens)
    if len(gens) > 1:
        probes.append(gens[1][gens[0]])
    bound = 1
    for p in probes:
        o = _perm_order(p)
        bound = bound * o // math.gcd(bound, o)
        if bound > limit:
            return True
    if degree > limit:
        return True
    for k in (2, 3, 4):
        if k > degree:
            break
        for pts in (tuple(range(k)), tuple(i * degree // k for i in range(k))):
            if _tuple_orbit_exceeds(gens, pts, limit):
                return True
    return False


# rough bound on the memory used when enumerating a group of permutations
_ENUM_BUDGET = 200_000_000


def exhaustive_nonconjugacy(gen_images: Sequence[np.ndarray], h1_images: Sequence[np.ndarray],
                            h2_images: Sequence[np.ndarray], max_order: int = 100_000) -> bool | None:
    """True iff no conjugate of <h2 images> lies in <h1 images> inside the image group.

    Returns None when the image group has more than max_order elements.
    """
    gens = [np.asarray(g) for g in gen_images]
    degree = gens[0].size
    if group_order_exceeds(gens, max_order):
        return None
    if degree * max_order * 8 > _ENUM_BUDGET:
        raise ResourceError(f"cannot bound the image group of degree {degree}; enumeration too large")
    G = _closure(gens, degree, max_order)
    if G is None:
        return None
    H1 = _closure([np.asarray(h) for h in h1_images], degree, max_order) if h1_images else {
        np.arange(degree).tobytes(): np.arange(degree)}
    inv = {}
    for key, g in G.items():
        gi = np.empty_like(g)
        gi[g] = np.arange(degree)
        inv[key] = gi
    for key, g in G.items():
        gi = inv[key]
        # h^g = g^-1 h g, acting on the right: first g^-1, then h, then g
        if all(g[np.asarray(h)[gi]].tobytes() in H1 for h in h2_images):
            return False
    return True


@dataclass(frozen=True)
class Conjugate:
    g: ReducedWord


@dataclass(frozen=True, eq=False)
class Witness:
    certificate: WitnessCertificate
    direction: str  # "H2->H1": H2 not conjugate into H1; "H1->H2": roles swapped


def scs_witness(h1_gens: Sequence[ReducedWord], h2_gens: Sequence[ReducedWord],
                k_strategy: str | KStrategy | None = None, rank: int | None = None) -> Conjugate | Witness:
    """Either a conjugator with H1^g = H2 or a separating certificate."""
    h1_gens, h2_gens = list(h1_gens), list(h2_gens)
    if rank is None:
        if not (h1_gens or h2_gens):
            raise InvalidInput("rank is required when no generators are given")
        rank = (h1_gens or h2_gens)[0].rank
    f1 = fold_generators(h1_gens, rank)
    f2 = fold_generators(h2_gens, rank)
    g = conjugate_witness(f1, f2)
    if g is not None:
        return Conjugate(g)
    if conj_into(f2, f1) is None:
        return Witness(sics_witness(h1_gens, h2_gens, k_strategy, rank), "H2->H1")
    return Witness(sics_witness(h2_gens, h1_gens, k_strategy, rank), "H1->H2")


__all__ = [
    "separation_constant",
    "build_delta",
    "common_fixed_sheets",
    "WitnessCertificate",
    "sics_witness",
    "verify_certificate",
    "FiniteQuotient",
    "quotient_witness",
    "exhaustive_nonconjugacy",
    "Conjugate",
    "Witness",
    "scs_witness",
]
