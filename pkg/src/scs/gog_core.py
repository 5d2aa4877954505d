"""Finite trees of finite groups and their fundamental groups.

Groups are multiplication tables over element ids ``0..k-1`` with 0 the
identity.  A geometric edge with index ``e`` has two directed versions:
``2e`` runs src -> dst and ``2e+1`` runs dst -> src.  For a directed edge d,
``rho_i(d)`` maps G_e into the group at the origin of d and ``rho_t(d)`` into
the group at its terminus.

Elements of the fundamental group at the base vertex are closed paths
``g1 d1 g2 d2 ... dk g(k+1)`` modulo the moves ``rho_i(d)(h) d = d rho_t(d)(h)``
and ``d 1 rev(d) = 1``.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidInput

Subgroup = frozenset  # of element ids


# --- finite groups -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteGroupTable:
    mul: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self) -> None:
        k = len(self.mul)
        if k < 1 or any(len(row) != k for row in self.mul):
            raise InvalidInput("multiplication table must be square and nonempty")
        M = np.array(self.mul, dtype=np.int64)
        if M.min() < 0 or M.max() >= k:
            raise InvalidInput("table entry out of range")
        idx = np.arange(k)
        if not (np.array_equal(M[0], idx) and np.array_equal(M[:, 0], idx)):
            raise InvalidInput("element 0 must be the identity")
        for row in M:
            if np.unique(row).size != k:
                raise InvalidInput("table rows must be permutations (not a group)")
        if not np.array_equal(M[M], M[idx[:, None, None], M[None, :, :]]):
            raise InvalidInput("multiplication is not associative")

    @property
    def order(self) -> int:
        return len(self.mul)

    @cached_property
    def inv(self) -> tuple[int, ...]:
        out = [0] * self.order
        for a, row in enumerate(self.mul):
            out[a] = row.index(0)
        return tuple(out)

    def m(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def prod(self, *xs: int) -> int:
        r = 0
        for x in xs:
            r = self.mul[r][x]
        return r

    def conj(self, a: int, g: int) -> int:
        """a^g = g^-1 a g."""
        return self.prod(self.inv[g], a, g)

    def closure(self, gens: Iterable[int]) -> Subgroup:
        elems = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.mul[a][g]
                    if b not in elems:
                        elems.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(elems)

    @cached_property
    def subgroups(self) -> tuple[Subgroup, ...]:
        """All subgroups, by closing known subgroups under one more element."""
        found = {frozenset({0})}
        queue = deque(found)
        while queue:
            S = queue.popleft()
            for x in range(self.order):
                if x in S:
                    continue
                T = self.closure(set(S) | {x})
                if T not in found:
                    found.add(T)
                    queue.append(T)
        return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))

    def conjugate_subgroup(self, S: Iterable[int], g: int) -> Subgroup:
        return frozenset(self.conj(a, g) for a in S)

    def left_coset(self, g: int, S: Iterable[int]) -> frozenset[int]:
        return frozenset(self.mul[g][s] for s in S)

    def left_transversal(self, S: Subgroup) -> tuple[int, ...]:
        """Minimal element of each left coset gS, sorted."""
        seen: set[int] = set()
        reps = []
        for g in range(self.order):
            if g in seen:
                continue
            c = self.left_coset(g, S)
            seen |= c
            reps.append(min(c))
        return tuple(sorted(reps))

    def to_json(self) -> dict:
        return {"order": self.order, "mul": [list(r) for r in self.mul]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroupTable":
        mul = tuple(tuple(int(x) for x in row) for row in data["mul"])
        if int(data.get("order", len(mul))) != len(mul):
            raise InvalidInput("group order disagrees with table size")
        return cls(mul, str(data.get("name", "")))


def cyclic_group(n: int) -> FiniteGroupTable:
    return FiniteGroupTable(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"C{n}")


def permutation_group_table(elements: Sequence[Sequence[int]], name: str = "") -> FiniteGroupTable:
    """Table of a list of permutations closed under composition; first must be the identity.

    Product a*b means "apply a, then b".
    """
    perms = [tuple(p) for p in elements]
    index = {p: i for i, p in enumerate(perms)}
    mul = tuple(tuple(index[tuple(b[x] for x in a)] for b in perms) for a in perms)
    return FiniteGroupTable(mul, name)


def symmetric_group(n: int) -> FiniteGroupTable:
    elems = sorted(itertools.permutations(range(n)))
    return permutation_group_table(elems, f"S{n}")


def is_monomorphism(src: FiniteGroupTable, dst: FiniteGroupTable, rho: Sequence[int]) -> bool:
    if len(rho) != src.order or len(set(rho)) != src.order:
        return False
    if any(not 0 <= x < dst.order for x in rho):
        return False
    return all(rho[src.mul[a][b]] == dst.mul[rho[a]][rho[b]] for a in range(src.order) for b in range(src.order))


# --- trees of groups -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class GogEdge:
    src: int
    dst: int
    group: FiniteGroupTable
    rho_src: tuple[int, ...]
    rho_dst: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class GraphOfGroups:
    vertex_groups: tuple[FiniteGroupTable, ...]
    edges: tuple[GogEdge, ...]
    base: int = 0
    vertex_ids: tuple = ()
    edge_ids: tuple = ()

    def __post_init__(self) -> None:
        n = len(self.vertex_groups)
        if n < 1:
            raise InvalidInput("a tree of groups needs a vertex")
        if not self.vertex_ids:
            object.__setattr__(self, "vertex_ids", tuple(range(n)))
        if not self.edge_ids:
            object.__setattr__(self, "edge_ids", tuple(range(len(self.edges))))
        if len(set(self.vertex_ids)) != n or len(set(self.edge_ids)) != len(self.edges):
            raise InvalidInput("duplicate vertex or edge ids")
        if not 0 <= self.base < n:
            raise InvalidInput("base vertex out of range")
        if len(self.edges) != n - 1:
            raise InvalidInput("the underlying graph must be a tree (|E| = |V| - 1)")
        for k, e in enumerate(self.edges):
            if not (0 <= e.src < n and 0 <= e.dst < n) or e.src == e.dst:
                raise InvalidInput(f"edge {self.edge_ids[k]} has bad endpoints")
            if not is_monomorphism(e.group, self.vertex_groups[e.src], e.rho_src):
                raise InvalidInput(f"rho_src of edge {self.edge_ids[k]} is not an injective homomorphism")
            if not is_monomorphism(e.group, self.vertex_groups[e.dst], e.rho_dst):
                raise InvalidInput(f"rho_dst of edge {self.edge_ids[k]} is not an injective homomorphism")
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for d in self.out_edges(v):
                w = self.terminus(d)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n:
            raise InvalidInput("the underlying graph is disconnected")

    # directed edge helpers
    @property
    def num_vertices(self) -> int:
        return len(self.vertex_groups)

    @property
    def directed_edges(self) -> range:
        return range(2 * len(self.edges))

    @staticmethod
    def rev(d: int) -> int:
        return d ^ 1

    def origin(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.dst if d & 1 else e.src

    def terminus(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.src if d & 1 else e.dst

    def edge_group(self, d: int) -> FiniteGroupTable:
        return self.edges[d >> 1].group

    def rho_i(self, d: int) -> tuple[int, ...]:
        e = self.edges[d >> 1]
        return e.rho_dst if d & 1 else e.rho_src

    def rho_t(self, d: int) -> tuple[int, ...]:
        e = self.edges[d >> 1]
        return e.rho_src if d & 1 else e.rho_dst

    @cached_property
    def _out(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for d in self.directed_edges:
            out[self.origin(d)].append(d)
        return tuple(tuple(x) for x in out)

    def out_edges(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    @cached_property
    def _images(self) -> tuple[tuple[frozenset[int], frozenset[int]], ...]:
        return tuple((frozenset(self.rho_i(d)), frozenset(self.rho_t(d))) for d in self.directed_edges)

    def image_i(self, d: int) -> frozenset[int]:
        return self._images[d][0]

    def image_t(self, d: int) -> frozenset[int]:
        return self._images[d][1]

    @cached_property
    def _pre_t(self) -> tuple[dict[int, int], ...]:
        return tuple({x: h for h, x in enumerate(self.rho_t(d))} for d in self.directed_edges)

    def pre_t(self, d: int, x: int) -> int:
        """The h in G_e with rho_t(d)(h) = x."""
        return self._pre_t[d][x]

    def pre_i(self, d: int, x: int) -> int:
        return self._pre_t[d ^ 1][x]

    @cached_property
    def transversals(self) -> tuple[tuple[int, ...], ...]:
        """Left transversal of rho_i(d)(G_e) in G_origin(d), per directed edge."""
        return tuple(self.vertex_groups[self.origin(d)].left_transversal(self.image_i(d))
                     for d in self.directed_edges)

    def vertex_index(self, vid) -> int:
        try:
            return self.vertex_ids.index(vid)
        except ValueError as exc:
            raise InvalidInput(f"unknown vertex id {vid!r}") from exc

    def edge_index(self, eid) -> int:
        try:
            return self.edge_ids.index(eid)
        except ValueError as exc:
            raise InvalidInput(f"unknown edge id {eid!r}") from exc

    def with_base(self, base: int) -> "GraphOfGroups":
        return GraphOfGroups(self.vertex_groups, self.edges, base, self.vertex_ids, self.edge_ids)

    def tree_path(self, v: int, w: int) -> list[int]:
        """Directed edges of the tree geodesic from v to w."""
        prev: dict[int, int | None] = {v: None}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for d in self.out_edges(u):
                x = self.terminus(d)
                if x not in prev:
                    prev[x] = d
                    queue.append(x)
        path = []
        u = w
        while prev[u] is not None:
            d = prev[u]
            path.append(d)
            u = self.origin(d)
        return path[::-1]

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": vid, "group": g.to_json()} for vid, g in zip(self.vertex_ids, self.vertex_groups)],
            "edges": [
                {
                    "id": eid,
                    "src": self.vertex_ids[e.src],
                    "dst": self.vertex_ids[e.dst],
                    "group": e.group.to_json(),
                    "rho_src": list(e.rho_src),
                    "rho_dst": list(e.rho_dst),
                }
                for eid, e in zip(self.edge_ids, self.edges)
            ],
            "base": self.vertex_ids[self.base],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GraphOfGroups":
        try:
            vids = tuple(v["id"] for v in data["vertices"])
            groups = tuple(FiniteGroupTable.from_json(v["group"]) for v in data["vertices"])
            pos = {vid: i for i, vid in enumerate(vids)}
            edges = []
            eids = []
            for e in data["edges"]:
                eids.append(e["id"])
                edges.append(GogEdge(pos[e["src"]], pos[e["dst"]], FiniteGroupTable.from_json(e["group"]),
                                     tuple(int(x) for x in e["rho_src"]), tuple(int(x) for x in e["rho_dst"])))
            base = pos[data["base"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed graph-of-groups JSON: {exc!r}") from exc
        return cls(groups, tuple(edges), base, vids, tuple(eids))


# --- paths ---------------------------------------------------------------

@dataclass(frozen=True)
class GPath:
    """g1 d1 g2 ... dk g(k+1), starting at vertex ``start``."""

    start: int
    elements: tuple[int, ...]
    edges: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(self.elements) != len(self.edges) + 1:
            raise InvalidInput("a path needs one more element than edges")

    def vertices(self, gog: GraphOfGroups) -> list[int]:
        out = [self.start]
        for d in self.edges:
            out.append(gog.terminus(d))
        return out

    def end(self, gog: GraphOfGroups) -> int:
        return gog.terminus(self.edges[-1]) if self.edges else self.start

    def __len__(self) -> int:
        return len(self.edges)


def validate_path(gog: GraphOfGroups, p: GPath) -> None:
    v = p.start
    if not 0 <= v < gog.num_vertices:
        raise InvalidInput("path starts at an unknown vertex")
    for s, d in enumerate(p.edges):
        if not 0 <= d < 2 * len(gog.edges):
            raise InvalidInput(f"unknown directed edge {d}")
        if gog.origin(d) != v:
            raise InvalidInput(f"edge {d} does not start at vertex {v}")
        if not 0 <= p.elements[s] < gog.vertex_groups[v].order:
            raise InvalidInput(f"element {p.elements[s]} not in the group at vertex {v}")
        v = gog.terminus(d)
    if not 0 <= p.elements[-1] < gog.vertex_groups[v].order:
        raise InvalidInput(f"element {p.elements[-1]} not in the group at vertex {v}")


def vertex_element(gog: GraphOfGroups, g: int, v: int | None = None) -> GPath:
    return GPath(gog.base if v is None else v, (g,))


def identity_path(gog: GraphOfGroups) -> GPath:
    return GPath(gog.base, (0,))


def multiply(gog: GraphOfGroups, *paths: GPath) -> GPath:
    if not paths:
        raise InvalidInput("multiply needs at least one path")
    out = paths[0]
    for q in paths[1:]:
        end = out.end(gog)
        if end != q.start:
            raise InvalidInput("paths do not concatenate")
        G = gog.vertex_groups[end]
        out = GPath(out.start, out.elements[:-1] + (G.m(out.elements[-1], q.elements[0]),) + q.elements[1:],
                    out.edges + q.edges)
    return out


def inverse(gog: GraphOfGroups, p: GPath) -> GPath:
    verts = p.vertices(gog)
    elems = tuple(gog.vertex_groups[v].inv[g] for g, v in zip(reversed(p.elements), reversed(verts)))
    return GPath(verts[-1], elems, tuple(d ^ 1 for d in reversed(p.edges)))


def conjugate(gog: GraphOfGroups, h: GPath, g: GPath) -> GPath:
    """h^g = g^-1 h g."""
    return multiply(gog, inverse(gog, g), h, g)


def reduce_path(gog: GraphOfGroups, p: GPath) -> GPath:
    """Exhaust moves a d c rev(d) b -> a rho_i(d)(rho_t(d)^-1(c)) b with c in the image of rho_t(d)."""
    validate_path(gog, p)
    els = [p.elements[0]]
    eds: list[int] = []
    for d, g in zip(p.edges, p.elements[1:]):
        if eds and eds[-1] == d ^ 1 and els[-1] in gog.image_t(eds[-1]):
            d0 = eds.pop()
            c = els.pop()
            a = els.pop()
            h = gog.pre_t(d0, c)
            G = gog.vertex_groups[gog.origin(d0)]
            els.append(G.prod(a, gog.rho_i(d0)[h], g))
        else:
            eds.append(d)
            els.append(g)
    return GPath(p.start, tuple(els), tuple(eds))


def reducible_positions(gog: GraphOfGroups, p: GPath) -> list[int]:
    """Indices s such that edges s, s+1 form a removable backtrack."""
    out = []
    for s in range(len(p.edges) - 1):
        d = p.edges[s]
        if p.edges[s + 1] == d ^ 1 and p.elements[s + 1] in gog.image_t(d):
            out.append(s)
    return out


def reduce_at(gog: GraphOfGroups, p: GPath, s: int) -> GPath:
    d = p.edges[s]
    c = p.elements[s + 1]
    if p.edges[s + 1] != d ^ 1 or c not in gog.image_t(d):
        raise InvalidInput("no reduction at this position")
    G = gog.vertex_groups[gog.origin(d)]
    merged = G.prod(p.elements[s], gog.rho_i(d)[gog.pre_t(d, c)], p.elements[s + 2])
    return GPath(p.start, p.elements[:s] + (merged,) + p.elements[s + 3:], p.edges[:s] + p.edges[s + 2:])


def normal_form(gog: GraphOfGroups, p: GPath) -> GPath:
    """Reduced path with every g_s (s <= k) a minimal left-coset representative."""
    q = reduce_path(gog, p)
    els = list(q.elements)
    for s, d in enumerate(q.edges):
        v = gog.origin(d)
        G = gog.vertex_groups[v]
        coset = G.left_coset(els[s], gog.image_i(d))
        r = min(coset)
        a = G.m(G.inv[r], els[s])  # els[s] = r * a, a in the image of rho_i(d)
        h = gog.pre_i(d, a)
        W = gog.vertex_groups[gog.terminus(d)]
        els[s] = r
        els[s + 1] = W.m(gog.rho_t(d)[h], els[s + 1])
    return GPath(q.start, tuple(els), q.edges)


def is_closed(gog: GraphOfGroups, p: GPath) -> bool:
    return p.start == gog.base and p.end(gog) == gog.base


def length(gog: GraphOfGroups, p: GPath) -> int:
    if not is_closed(gog, p):
        raise InvalidInput("length is defined for closed paths at the base vertex")
    return len(reduce_path(gog, p).edges)


def equal(gog: GraphOfGroups, p: GPath, q: GPath) -> bool:
    return normal_form(gog, p) == normal_form(gog, q)


def is_trivial(gog: GraphOfGroups, p: GPath) -> bool:
    nf = normal_form(gog, p)
    return not nf.edges and nf.elements == (0,)


def normal_forms(gog: GraphOfGroups, max_len: int, start: int | None = None,
                 closed: bool = True) -> Iterator[GPath]:
    """All normal forms of length <= max_len starting at ``start`` (closed at it if asked)."""
    v0 = gog.base if start is None else start

    def rec(v: int, els: tuple[int, ...], eds: tuple[int, ...]) -> Iterator[GPath]:
        if not closed or v == v0:
            for g in range(gog.vertex_groups[v].order):
                yield GPath(v0, els + (g,), eds)
        if len(eds) == max_len:
            return
        for d in gog.out_edges(v):
            for r in gog.transversals[d]:
                # after arriving along eds[-1], going straight back needs r outside its image
                if eds and d == eds[-1] ^ 1 and r in gog.image_t(eds[-1]):
                    continue
                yield from rec(gog.terminus(d), els + (r,), eds + (d,))

    yield from rec(v0, (), ())


# --- path text ----------------------------------------------------------

_ELEM = re.compile(r"^\s*(\d+)\s*@\s*([^\s:]+)\s*$")


def _parse_id(text: str, ids: tuple):
    for vid in ids:
        if str(vid) == text:
            return vid
    raise InvalidInput(f"unknown id {text!r}")


def parse_path(gog: GraphOfGroups, text: str) -> GPath:
    """Parse ``g@v : e : g@v : ...`` (element ids, vertex ids and geometric edge ids)."""
    tokens = [t.strip() for t in text.split(":")]
    if len(tokens) % 2 == 0:
        raise InvalidInput("path text must alternate elements and edges")
    els, verts, eds = [], [], []
    for k, tok in enumerate(tokens):
        if k % 2 == 0:
            m = _ELEM.match(tok)
            if not m:
                raise InvalidInput(f"bad element token {tok!r}; expected g@v")
            els.append(int(m.group(1)))
            verts.append(gog.vertex_index(_parse_id(m.group(2), gog.vertex_ids)))
        else:
            eds.append(gog.edge_index(_parse_id(tok.lstrip("e"), gog.edge_ids)))
    directed = []
    for s, e in enumerate(eds):
        edge = gog.edges[e]
        u, w = verts[s], verts[s + 1]
        if (edge.src, edge.dst) == (u, w):
            directed.append(2 * e)
        elif (edge.dst, edge.src) == (u, w):
            directed.append(2 * e + 1)
        else:
            raise InvalidInput(f"edge {gog.edge_ids[e]} does not join the given vertices")
    p = GPath(verts[0], tuple(els), tuple(directed))
    validate_path(gog, p)
    return p


def format_path(gog: GraphOfGroups, p: GPath) -> str:
    verts = p.vertices(gog)
    parts = [f"{p.elements[0]}@{gog.vertex_ids[verts[0]]}"]
    for s, d in enumerate(p.edges):
        parts.append(str(gog.edge_ids[d >> 1]))
        parts.append(f"{p.elements[s + 1]}@{gog.vertex_ids[verts[s + 1]]}")
    return " : ".join(parts)


def parse_path_list(gog: GraphOfGroups, text: str) -> list[GPath]:
    """Semicolon separated paths; empty text is the empty list."""
    return [parse_path(gog, t) for t in text.split(";") if t.strip()]


# --- edge order ----------------------------------------------------------

@dataclass(frozen=True)
class EdgeOrder:
    """Directed edges ranked by (m, index) where m counts geometric edges beyond the edge."""

    m: tuple[int, ...]

    def key(self, d: int) -> tuple[int, int]:
        return (self.m[d], d)

    def less(self, d: int, f: int) -> bool:
        return self.key(d) < self.key(f)

    def maximum(self, ds: Iterable[int]) -> int:
        return max(ds, key=self.key)

    def sorted(self) -> list[int]:
        return sorted(range(len(self.m)), key=self.key)


def edge_order(gog: GraphOfGroups) -> EdgeOrder:
    ms = []
    for d in gog.directed_edges:
        banned = d >> 1
        start = gog.terminus(d)
        seen = {start}
        stack = [start]
        count = 0
        while stack:
            u = stack.pop()
            for f in gog.out_edges(u):
                if f >> 1 == banned:
                    continue
                w = gog.terminus(f)
                if w not in seen:
                    seen.add(w)
                    count += 1
                    stack.append(w)
        ms.append(count)
    return EdgeOrder(tuple(ms))


# --- normalizer condition ------------------------------------------------

@dataclass(frozen=True)
class NormalizerVerdict:
    status: str  # "holds", "fails" or "unknown"
    edge: int | None = None
    subgroup: tuple[int, ...] | None = None
    cycle: tuple[tuple[int, tuple[int, ...]], ...] = field(default=())

    def to_json(self, gog: GraphOfGroups | None = None) -> dict:
        return {
            "status": self.status,
            "edge": self.edge,
            "subgroup": list(self.subgroup) if self.subgroup is not None else None,
            "cycle": [[d, list(E)] for d, E in self.cycle],
        }


def face_transitions(gog: GraphOfGroups, d: int, E: Subgroup) -> list[tuple[int, Subgroup, int]]:
    """Edges of the fixed subtree of E one step beyond a fixed edge of type d.

    Returns (next directed edge f, local subgroup in G_f, coset representative).
    The coset of the edge we arrived along is skipped.
    """
    w = gog.terminus(d)
    W = gog.vertex_groups[w]
    image = frozenset(gog.rho_t(d)[h] for h in E)
    out = []
    for f in gog.out_edges(w):
        target = gog.image_i(f)
        for g in gog.transversals[f]:
            if f == d ^ 1 and g in target:
                continue
            conj = W.conjugate_subgroup(image, g)
            if conj <= target:
                out.append((f, frozenset(gog.pre_i(f, x) for x in conj), g))
    return out


def check_normalizer_condition(gog: GraphOfGroups, budget: int = 1_000_000) -> NormalizerVerdict:
    """Decide whether some nontrivial subgroup of an edge group is normalized by a hyperbolic element.

    States (d, E) say that E (a subgroup of G_d) fixes a tree edge of type d.
    Every transition carries the same subgroup of the fundamental group to a
    farther edge of its fixed subtree, so a cycle of states yields a
    hyperbolic element conjugating E to itself (fails), while an acyclic
    state graph means every such subtree is finite (holds).
    """
    states = [(d, E) for d in gog.directed_edges for E in gog.edge_group(d).subgroups if len(E) > 1]
    succ: dict[tuple[int, Subgroup], list[tuple[int, Subgroup]]] = {}
    work = 0
    for st in states:
        nxt = [(f, F) for f, F, _ in face_transitions(gog, *st)]
        work += len(nxt) + 1
        if work > budget:
            return NormalizerVerdict("unknown")
        succ[st] = nxt
    color: dict[tuple[int, Subgroup], int] = {}
    for root in states:
        if root in color:
            continue
        stack = [(root, iter(succ[root]))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            child = next(it, None)
            if child is None:
                color[node] = 2
                stack.pop()
                path.pop()
                continue
            c = color.get(child, 0)
            if c == 1:
                cyc = path[path.index(child):]
                d, E = child
                return NormalizerVerdict("fails", d >> 1, tuple(sorted(E)),
                                         tuple((x, tuple(sorted(S))) for x, S in cyc))
            if c == 0:
                color[child] = 1
                path.append(child)
                stack.append((child, iter(succ[child])))
    return NormalizerVerdict("holds")


__all__ = [
    "FiniteGroupTable",
    "cyclic_group",
    "symmetric_group",
    "permutation_group_table",
    "is_monomorphism",
    "GogEdge",
    "GraphOfGroups",
    "GPath",
    "validate_path",
    "vertex_element",
    "identity_path",
    "multiply",
    "inverse",
    "conjugate",
    "reduce_path",
    "reducible_positions",
    "reduce_at",
    "normal_form",
    "is_closed",
    "length",
    "equal",
    "is_trivial",
    "normal_forms",
    "parse_path",
    "format_path",
    "parse_path_list",
    "EdgeOrder",
    "edge_order",
    "NormalizerVerdict",
    "face_transitions",
    "check_normalizer_condition",
]
