"""Finite-index separation for fundamental groups of finite trees of finite groups.

Given H1 and H2 (generated by closed paths at the base vertex) with H2 not
conjugate into H1, build a finite cover whose base-sheet stabilizer H3
contains H1 while H2 fixes no sheet.  A sheet s is fixed by H2 exactly when
H2 is conjugate into H3 by a path ending at s, so the fixed-point test on the
finished cover certifies the separation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ConjugateIntoDetected,
    InternalInconsistency,
    InvalidInput,
    NormalizerConditionFails,
    NormalizerConditionUnverified,
    ResourceError,
)
from .gog_core import (
    GPath,
    GraphOfGroups,
    check_normalizer_condition,
    edge_order,
    format_path,
    inverse,
    is_trivial,
    multiply,
    normal_form,
    normal_forms,
    parse_path,
    reduce_path,
    validate_path,
)
from .gog_coverings import (
    PreCovering,
    RoundLog,
    TrivialHandleOrder,
    close_nontrivial_faces,
    complete_cover,
    fold_subgroup,
    lift_all,
    lifts_to_loop,
    thicken,
    validate,
)
from .scs_free import FiniteQuotient

SCHEMA_VERSION = 1
CHECKS = {"h1_fixes_base": True, "h2_no_common_fixed_point": True}


def _closed_at_base(gog: GraphOfGroups, paths: Sequence[GPath]) -> list[GPath]:
    out = []
    for p in paths:
        validate_path(gog, p)
        if p.start != gog.base or p.end(gog) != gog.base:
            raise InvalidInput("generators must be closed paths at the base vertex")
        out.append(p)
    return out


def vf_constant(gog: GraphOfGroups, h2_gens: Sequence[GPath]) -> int:
    """2 max |h| + 3 over the generators of H2."""
    gens = _closed_at_base(gog, h2_gens)
    if not gens or all(is_trivial(gog, h) for h in gens):
        raise InvalidInput("H2 needs a nontrivial generator")
    return 2 * max(len(reduce_path(gog, h).edges) for h in gens) + 3


def coset_table(pc: PreCovering, path: GPath) -> np.ndarray:
    perm = lift_all(pc, path)
    if (perm < 0).any():
        raise InvalidInput("path does not lift from every sheet")
    return perm


def _fixed_common(tables: Sequence[np.ndarray], n: int) -> np.ndarray:
    fixed = np.ones(n, dtype=bool)
    for t in tables:
        fixed &= t == np.arange(n)
    return np.flatnonzero(fixed)


@dataclass(frozen=True, eq=False)
class VfWitnessCertificate:
    gog: GraphOfGroups
    h1_gens: tuple[GPath, ...]
    h2_gens: tuple[GPath, ...]
    cover: PreCovering
    sheets: int
    h1_tables: tuple[np.ndarray, ...]
    h2_tables: tuple[np.ndarray, ...]
    C: int
    seed: int
    build_log: tuple[RoundLog, ...]
    checks: dict = field(default_factory=dict)
    bodies: dict = field(default_factory=dict)
    version: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        gog = self.gog
        return {
            "v": self.version,
            "kind": "vf_witness",
            "gog": gog.to_json(),
            "h1_gens": [format_path(gog, p) for p in self.h1_gens],
            "h2_gens": [format_path(gog, p) for p in self.h2_gens],
            "C": self.C,
            "seed": self.seed,
            "sheets": self.sheets,
            "cover": {k: v for k, v in self.cover.to_json().items() if k != "gog"},
            "coset_tables": {"h1": [t.tolist() for t in self.h1_tables],
                             "h2": [t.tolist() for t in self.h2_tables]},
            "checks": dict(self.checks),
            "build_log": [r.to_json() for r in self.build_log],
            "bodies": {str(k): v for k, v in self.bodies.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "VfWitnessCertificate":
        gog = GraphOfGroups.from_json(data["gog"])
        return cls(
            gog=gog,
            h1_gens=tuple(parse_path(gog, s) for s in data["h1_gens"]),
            h2_gens=tuple(parse_path(gog, s) for s in data["h2_gens"]),
            cover=PreCovering.from_json(data["cover"], gog),
            sheets=int(data["sheets"]),
            h1_tables=tuple(np.asarray(t, dtype=np.int64) for t in data["coset_tables"]["h1"]),
            h2_tables=tuple(np.asarray(t, dtype=np.int64) for t in data["coset_tables"]["h2"]),
            C=int(data["C"]),
            seed=int(data["seed"]),
            build_log=tuple(RoundLog(**{k: int(v) for k, v in r.items()}) for r in data["build_log"]),
            checks=dict(data["checks"]),
            bodies={int(k): int(v) for k, v in data.get("bodies", {}).items()},
            version=int(data["v"]),
        )


def require_normalizer_condition(gog: GraphOfGroups, assume: bool = False) -> None:
    verdict = check_normalizer_condition(gog)
    if verdict.status == "fails":
        raise NormalizerConditionFails(
            f"edge {gog.edge_ids[verdict.edge]} has subgroup {list(verdict.subgroup)} "
            "normalized by a hyperbolic element", list(verdict.cycle))
    if verdict.status == "unknown" and not assume:
        raise NormalizerConditionUnverified("normalizer condition check ran out of budget")


def separating_cover(gog: GraphOfGroups, h1_gens: Sequence[GPath], C: int,
                     seed: int = 0) -> tuple[PreCovering, list[RoundLog]]:
    """fold -> close nontrivial faces -> thicken(C) -> complete."""
    y0 = fold_subgroup(gog, h1_gens)
    y1 = thicken(close_nontrivial_faces(y0), C)
    return complete_cover(y1, TrivialHandleOrder.of(gog), C, seed)


def _attempt(gog: GraphOfGroups, h1: list[GPath], h2: list[GPath],
             seed: int) -> tuple[VfWitnessCertificate | None, PreCovering, int]:
    """Build the cover; return (certificate or None, cover, a common fixed sheet or -1)."""
    C = vf_constant(gog, h2)
    cover, log = separating_cover(gog, h1, C, seed)
    n = cover.sheets
    t1 = tuple(coset_table(cover, p) for p in h1)
    t2 = tuple(coset_table(cover, p) for p in h2)
    if any(int(t[cover.base]) != cover.base for t in t1):
        raise InternalInconsistency("an H1 generator moves the base sheet")
    fixed = _fixed_common(t2, n)
    if fixed.size:
        lead = cover.base if cover.base in fixed else int(fixed[0])
        return None, cover, lead
    cert = VfWitnessCertificate(
        gog=gog, h1_gens=tuple(h1), h2_gens=tuple(h2), cover=cover, sheets=n,
        h1_tables=t1, h2_tables=t2, C=C, seed=seed, build_log=tuple(log),
        checks=dict(CHECKS), bodies=cover.body_counts(),
    )
    return cert, cover, -1


def vf_sics_witness(gog: GraphOfGroups, h1_gens: Sequence[GPath], h2_gens: Sequence[GPath],
                    seed: int = 0, assume_normalizer_condition: bool = False) -> VfWitnessCertificate:
    """Certificate that H2 is not conjugate into H1, or ConjugateIntoDetected."""
    h1 = _closed_at_base(gog, h1_gens)
    h2 = _closed_at_base(gog, h2_gens)
    vf_constant(gog, h2)
    require_normalizer_condition(gog, assume_normalizer_condition)
    cert, _cover, fixed = _attempt(gog, h1, h2, seed)
    if cert is None:
        raise ConjugateIntoDetected(fixed)
    return cert


def vf_verify(cert: VfWitnessCertificate | dict) -> tuple[bool, str]:
    """Re-derive everything from the cover; returns (ok, reason code)."""
    try:
        if isinstance(cert, dict):
            cert = VfWitnessCertificate.from_json(cert)
    except (KeyError, TypeError, ValueError) as exc:
        return False, f"malformed:{type(exc).__name__}"
    if cert.version != SCHEMA_VERSION:
        return False, "unsupported_version"
    gog, pc = cert.gog, cert.cover
    try:
        h1 = _closed_at_base(gog, cert.h1_gens)
        h2 = _closed_at_base(gog, cert.h2_gens)
        C = vf_constant(gog, h2)
    except InvalidInput:
        return False, "bad_generators"
    if C != cert.C:
        return False, "C_mismatch"
    ok, why = validate(pc, require_complete=True)
    if not ok:
        return False, f"cover:{why}"
    if pc.sheets != cert.sheets:
        return False, "sheets_mismatch"
    t1 = [coset_table(pc, p) for p in h1]
    t2 = [coset_table(pc, p) for p in h2]
    if len(t1) != len(cert.h1_tables) or len(t2) != len(cert.h2_tables):
        return False, "coset_tables_mismatch"
    for a, b in zip(t1 + t2, cert.h1_tables + cert.h2_tables):
        if a.shape != b.shape or not np.array_equal(a, b):
            return False, "coset_tables_mismatch"
    if any(int(t[pc.base]) != pc.base for t in t1):
        return False, "h1_moves_base"
    if _fixed_common(t2, pc.sheets).size:
        return False, "h2_has_fixed_sheet"
    if cert.checks != CHECKS:
        return False, "recorded_checks_mismatch"
    return True, "ok"


def round_report(cert: VfWitnessCertificate) -> dict:
    """Round count and edge-order monotonicity of the recorded build log."""
    order = edge_order(cert.gog)
    keys = [order.key(r.edge) for r in cert.build_log]
    return {
        "rounds": len(keys),
        "directed_edges": 2 * len(cert.gog.edges),
        "strictly_decreasing": all(a > b for a, b in zip(keys, keys[1:])),
    }


# --- quotient --------------------------------------------------------------

def _tree_paths(gog: GraphOfGroups) -> dict[int, GPath]:
    out = {}
    for v in range(gog.num_vertices):
        eds = tuple(gog.tree_path(gog.base, v))
        out[v] = GPath(gog.base, (0,) * (len(eds) + 1), eds)
    return out


def _vertex_generators(gog: GraphOfGroups, v: int) -> list[int]:
    G = gog.vertex_groups[v]
    gens: list[int] = []
    span = G.closure(())
    for g in range(1, G.order):
        if g not in span:
            gens.append(g)
            span = G.closure(gens)
    return gens


def group_generators(gog: GraphOfGroups) -> list[GPath]:
    """p_v g p_v^-1 for generators g of each vertex group; these generate the fundamental group."""
    paths = _tree_paths(gog)
    out = []
    for v in range(gog.num_vertices):
        p = paths[v]
        for g in _vertex_generators(gog, v):
            out.append(multiply(gog, p, GPath(v, (g,)), inverse(gog, p)))
    return out


def _base_first(perm: np.ndarray, base: int) -> np.ndarray:
    """Relabel sheets so that the base sheet becomes 0."""
    n = perm.size
    relabel = np.arange(n)
    relabel[[0, base]] = relabel[[base, 0]]
    out = np.empty_like(perm)
    out[relabel] = relabel[perm]
    return out


def vf_quotient_witness(cert: VfWitnessCertificate) -> FiniteQuotient:
    ok, why = vf_verify(cert)
    if not ok:
        raise InvalidInput(f"invalid certificate: {why}")
    pc = cert.cover
    gens = [coset_table(pc, p) for p in group_generators(cert.gog)]
    b = pc.base
    return FiniteQuotient(
        np.array([_base_first(p, b) for p in gens]).reshape(len(gens), pc.sheets),
        tuple(_base_first(p, b) for p in cert.h1_tables),
        tuple(_base_first(p, b) for p in cert.h2_tables),
    )


# --- deciding conjugacy into -------------------------------------------------

class MembershipOracle:
    """Exact membership in H by lifting into a thickened core pre-covering."""

    def __init__(self, gog: GraphOfGroups, gens: Sequence[GPath]):
        self.gog = gog
        self.core = close_nontrivial_faces(fold_subgroup(gog, gens))
        self._cache: dict[int, PreCovering] = {}

    def _at_depth(self, depth: int) -> PreCovering:
        if depth not in self._cache:
            self._cache[depth] = thicken(self.core, depth)
        return self._cache[depth]

    def contains(self, path: GPath) -> bool:
        p = reduce_path(self.gog, path)
        if p.start != self.gog.base or p.end(self.gog) != self.gog.base:
            raise InvalidInput("membership is defined for closed paths at the base vertex")
        return lifts_to_loop(self._at_depth(len(p.edges)), p)


def conjugates_into(gog: GraphOfGroups, oracle: MembershipOracle, h2_gens: Sequence[GPath], g: GPath) -> bool:
    """All g^-1 h g lie in the oracle's subgroup."""
    gi = inverse(gog, g)
    return all(oracle.contains(multiply(gog, gi, h, g)) for h in h2_gens)


def _path_to_sheet(pc: PreCovering, target: int) -> GPath:
    """A path from the base point to another point over the base vertex, found by BFS."""
    gog = pc.gog
    start = (gog.base, pc.base)
    prev: dict[tuple[int, int], tuple | None] = {start: None}
    queue = [start]
    goal = (gog.base, target)
    while queue and goal not in prev:
        nxt = []
        for v, x in queue:
            for g in range(gog.vertex_groups[v].order):
                y = int(pc.act[v][g, x])
                for d in gog.out_edges(v):
                    z = int(pc.cross[d][y])
                    node = (gog.terminus(d), z)
                    if z >= 0 and node not in prev:
                        prev[node] = ((v, x), g, d)
                        nxt.append(node)
                if v == gog.base and (v, y) not in prev:
                    prev[(v, y)] = ((v, x), g, None)
                    nxt.append((v, y))
        queue = nxt
    if goal not in prev:
        raise InternalInconsistency("sheet unreachable in a connected cover")
    steps = []
    node = goal
    while prev[node] is not None:
        parent, g, d = prev[node]
        steps.append((g, d))
        node = parent
    steps.reverse()
    path = GPath(gog.base, (0,))
    for g, d in steps:
        if d is None:
            path = multiply(gog, path, GPath(gog.base, (g,)))
        else:
            v = gog.origin(d)
            path = multiply(gog, path, GPath(v, (g, 0), (d,)))
    return reduce_path(gog, path)


@dataclass(frozen=True)
class ConjInto:
    conjugator: GPath  # g with g^-1 h g in H1 for every H2 generator h


@dataclass(frozen=True, eq=False)
class NotConjInto:
    certificate: VfWitnessCertificate


def vf_conj_into_decide(gog: GraphOfGroups, h1_gens: Sequence[GPath], h2_gens: Sequence[GPath],
                        seed: int = 0, max_len: int = 12, witness_attempts: int = 3,
                        assume_normalizer_condition: bool = False) -> ConjInto | NotConjInto:
    """Alternate a bounded conjugator search with separation attempts."""
    h1 = _closed_at_base(gog, h1_gens)
    h2 = _closed_at_base(gog, h2_gens)
    require_normalizer_condition(gog, assume_normalizer_condition)
    oracle = MembershipOracle(gog, h1)
    if all(is_trivial(gog, h) for h in h2):
        return ConjInto(GPath(gog.base, (0,)))
    searched = -1
    attempts = 0
    # separating covers grow quickly with C, so short conjugators are tried first
    first_attempt = max(len(reduce_path(gog, h).edges) for h in h2) + 2
    for bound in range(max_len + 1):
        for g in normal_forms(gog, bound):
            if len(g.edges) <= searched:
                continue
            if conjugates_into(gog, oracle, h2, g):
                return ConjInto(g)
        searched = bound
        if attempts < witness_attempts and bound >= first_attempt and (bound - first_attempt) % 2 == 0:
            cert, cover, fixed = _attempt(gog, h1, h2, seed + attempts)
            if cert is not None:
                return NotConjInto(cert)
            # H2 fixes the sheet reached by p, so p h p^-1 lies in H3; test it against H1
            g = inverse(gog, _path_to_sheet(cover, fixed))
            if conjugates_into(gog, oracle, h2, g):
                return ConjInto(normal_form(gog, g))
            attempts += 1
    raise ResourceError(f"no conjugator up to length {max_len} and no separating cover found")


__all__ = [
    "vf_constant",
    "coset_table",
    "VfWitnessCertificate",
    "require_normalizer_condition",
    "separating_cover",
    "vf_sics_witness",
    "vf_verify",
    "round_report",
    "group_generators",
    "vf_quotient_witness",
    "MembershipOracle",
    "conjugates_into",
    "ConjInto",
    "NotConjInto",
    "vf_conj_into_decide",
]
