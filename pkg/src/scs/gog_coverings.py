"""Covering pieces and pre-coverings over a tree of finite groups.

A pre-covering is stored as a partial G-set.  Over each vertex v there is a
finite set of points with a right action of G_v; a G_v-orbit is a covering
piece, whose body subgroup is the stabilizer of a point.  For each directed
edge d there is a partial map ``cross[d]`` from points over o(d) to points
over t(d) satisfying

    cross[d](x . rho_i(d)(h)) = cross[d](x) . rho_t(d)(h)      (h in G_e),

defined on whole rho_i(d)(G_e)-orbits.  Such an orbit is a handle; it is
free when ``cross[d]`` is undefined on it, and its face group is the
stabilizer of a point in G_e.  A complete pre-covering (no free handles) is
exactly a finite transitive action of the fundamental group, read by lifting
paths: multiply by vertex elements and cross along edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InternalInconsistency,
    InvalidInput,
    NormalizerConditionFails,
    ResourceError,
)
from .finite_covers import max_sheets
from .girth_gluing import glue_stars
from .gog_core import (
    EdgeOrder,
    FiniteGroupTable,
    GPath,
    GraphOfGroups,
    Subgroup,
    edge_order,
    reduce_path,
    validate_path,
)

SCHEMA_VERSION = 1


# --- pieces --------------------------------------------------------------

@dataclass(frozen=True)
class HandleCoset:
    """One double coset P g rho(G_e) of a piece over a directed edge."""

    edge: int
    rep: int
    elements: frozenset[int]
    face: Subgroup

    @property
    def trivial(self) -> bool:
        return len(self.face) == 1


@dataclass(frozen=True)
class CoveringPiece:
    vertex: int
    body: Subgroup
    degree: int
    handles: dict[int, tuple[HandleCoset, ...]] = field(hash=False, compare=False)


def _right_cosets(G: FiniteGroupTable, P: Iterable[int]) -> tuple[list[int], list[int]]:
    """Representatives of the right cosets Pg and the coset index of every element."""
    P = sorted(P)
    index = [-1] * G.order
    reps: list[int] = []
    for g in range(G.order):
        if index[g] >= 0:
            continue
        for p in P:
            index[G.m(p, g)] = len(reps)
        reps.append(g)
    return reps, index


def piece_handles(gog: GraphOfGroups, v: int, P: Subgroup) -> dict[int, tuple[HandleCoset, ...]]:
    G = gog.vertex_groups[v]
    out = {}
    for d in gog.out_edges(v):
        image = gog.image_i(d)
        seen: set[int] = set()
        hs = []
        for g in range(G.order):
            if g in seen:
                continue
            dc = frozenset(G.prod(p, g, x) for p in P for x in image)
            seen |= dc
            conj = G.conjugate_subgroup(P, g)
            face = frozenset(gog.pre_i(d, x) for x in image & conj)
            hs.append(HandleCoset(d, g, dc, face))
        out[d] = tuple(hs)
    return out


def enumerate_pieces(gog: GraphOfGroups, v: int) -> list[CoveringPiece]:
    """One piece per subgroup of G_v, with its handles and face groups."""
    G = gog.vertex_groups[v]
    return [CoveringPiece(v, P, G.order // len(P), piece_handles(gog, v, P)) for P in G.subgroups]


# --- frozen pre-coverings ------------------------------------------------

@dataclass(frozen=True)
class Handle:
    edge: int
    vertex: int
    rep: int  # minimal point of the handle orbit
    face: Subgroup


@dataclass(frozen=True, eq=False)
class PreCovering:
    gog: GraphOfGroups
    act: tuple[np.ndarray, ...]  # per vertex, shape (|G_v|, n_v)
    cross: tuple[np.ndarray, ...]  # per directed edge, shape (n_origin,), -1 = free
    base: int  # point index over gog.base

    def __post_init__(self) -> None:
        gog = self.gog
        if len(self.act) != gog.num_vertices or len(self.cross) != 2 * len(gog.edges):
            raise InvalidInput("pre-covering arrays do not match the tree of groups")
        for v, a in enumerate(self.act):
            if a.ndim != 2 or a.shape[0] != gog.vertex_groups[v].order:
                raise InvalidInput(f"action array at vertex {v} has the wrong shape")
        for d, c in enumerate(self.cross):
            if c.shape != (self.act[gog.origin(d)].shape[1],):
                raise InvalidInput(f"crossing array for edge {d} has the wrong shape")
        if not 0 <= self.base < self.num_points(gog.base):
            raise InvalidInput("base point out of range")

    def num_points(self, v: int) -> int:
        return int(self.act[v].shape[1])

    @property
    def total_points(self) -> int:
        return sum(self.num_points(v) for v in range(self.gog.num_vertices))

    def handle_reps(self, d: int) -> np.ndarray:
        """For each point over o(d), the minimal point of its handle over d."""
        a = self.act[self.gog.origin(d)]
        return a[list(self.gog.rho_i(d))].min(axis=0)

    def face_size(self, d: int) -> np.ndarray:
        a = self.act[self.gog.origin(d)]
        n = a.shape[1]
        return (a[list(self.gog.rho_i(d))] == np.arange(n)).sum(axis=0)

    def face_group(self, d: int, x: int) -> Subgroup:
        a = self.act[self.gog.origin(d)]
        rho = self.gog.rho_i(d)
        return frozenset(h for h in range(len(rho)) if a[rho[h], x] == x)

    def free_handles(self, d: int | None = None) -> list[Handle]:
        ds = self.gog.directed_edges if d is None else [d]
        out = []
        for f in ds:
            free = self.cross[f] < 0
            if not free.any():
                continue
            reps = np.unique(self.handle_reps(f)[free])
            v = self.gog.origin(f)
            out.extend(Handle(f, v, int(x), self.face_group(f, int(x))) for x in reps)
        return out

    @property
    def is_complete(self) -> bool:
        return all(bool((c >= 0).all()) for c in self.cross)

    @property
    def sheets(self) -> int:
        """Number of points over each vertex; only meaningful when uniform."""
        counts = {self.num_points(v) for v in range(self.gog.num_vertices)}
        if len(counts) != 1:
            raise InvalidInput("point counts differ between vertices")
        return counts.pop()

    def orbit_reps(self, v: int) -> np.ndarray:
        return self.act[v].min(axis=0)

    def pieces(self) -> list[tuple[int, int, CoveringPiece]]:
        """(vertex, representative point, piece) for every G_v-orbit."""
        out = []
        for v in range(self.gog.num_vertices):
            a = self.act[v]
            for x in np.unique(self.orbit_reps(v)):
                x = int(x)
                P = frozenset(int(g) for g in np.flatnonzero(a[:, x] == x))
                G = self.gog.vertex_groups[v]
                out.append((v, x, CoveringPiece(v, P, G.order // len(P), piece_handles(self.gog, v, P))))
        return out

    def body_counts(self) -> dict[int, int]:
        return {v: int(np.unique(self.orbit_reps(v)).size) for v in range(self.gog.num_vertices)}

    def to_json(self) -> dict:
        gog = self.gog
        return {
            "v": SCHEMA_VERSION,
            "kind": "precovering",
            "gog": gog.to_json(),
            "base": self.base,
            "act": {str(gog.vertex_ids[v]): self.act[v].tolist() for v in range(gog.num_vertices)},
            "cross": [
                {"edge": gog.edge_ids[d >> 1], "reverse": bool(d & 1), "map": self.cross[d].tolist()}
                for d in gog.directed_edges
            ],
        }

    @classmethod
    def from_json(cls, data: dict, gog: GraphOfGroups | None = None) -> "PreCovering":
        try:
            if int(data.get("v", SCHEMA_VERSION)) != SCHEMA_VERSION:
                raise InvalidInput("unsupported pre-covering version")
            gog = gog or GraphOfGroups.from_json(data["gog"])
            act = tuple(np.asarray(data["act"][str(vid)], dtype=np.int64).reshape(gog.vertex_groups[v].order, -1)
                        for v, vid in enumerate(gog.vertex_ids))
            cross: list[np.ndarray | None] = [None] * (2 * len(gog.edges))
            for entry in data["cross"]:
                d = 2 * gog.edge_index(entry["edge"]) + (1 if entry["reverse"] else 0)
                cross[d] = np.asarray(entry["map"], dtype=np.int64).reshape(-1)
            if any(c is None for c in cross):
                raise InvalidInput("missing crossing map")
            return cls(gog, act, tuple(cross), int(data["base"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"malformed pre-covering JSON: {exc!r}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def validate(pc: PreCovering, require_complete: bool = False) -> tuple[bool, str]:
    """Independent structural check; returns (ok, reason)."""
    gog = pc.gog
    for v in range(gog.num_vertices):
        G = gog.vertex_groups[v]
        a = pc.act[v]
        n = a.shape[1]
        if n == 0:
            continue
        if a.min() < 0 or a.max() >= n:
            return False, f"action_out_of_range:{v}"
        if not np.array_equal(a[0], np.arange(n)):
            return False, f"identity_not_trivial:{v}"
        for g in range(G.order):
            if np.unique(a[g]).size != n:
                return False, f"not_a_permutation:{v}"
        mul = np.asarray(G.mul)
        # x.(gh) = (x.g).h, indexed [g, h, x]
        lhs = a[mul]
        rhs = a[np.arange(G.order)[None, :, None], a[:, None, :]]
        if not np.array_equal(lhs, rhs):
            return False, f"not_an_action:{v}"
    for d in gog.directed_edges:
        o, t = gog.origin(d), gog.terminus(d)
        c = pc.cross[d]
        back = pc.cross[d ^ 1]
        nt = pc.num_points(t)
        if c.size and (c.max() >= nt or c.min() < -1):
            return False, f"cross_out_of_range:{d}"
        defined = c >= 0
        if require_complete and not defined.all():
            return False, f"free_handle:{d}"
        idx = np.flatnonzero(defined)
        if idx.size and not np.array_equal(back[c[idx]], idx):
            return False, f"cross_not_inverse:{d}"
        if int(defined.sum()) != int((back >= 0).sum()):
            return False, f"cross_not_inverse:{d}"
        ri, rt = gog.rho_i(d), gog.rho_t(d)
        ao, at = pc.act[o], pc.act[t]
        for h in range(len(ri)):
            moved = ao[ri[h], idx]
            if not (c[moved] >= 0).all():
                return False, f"handle_partially_glued:{d}"
            if not np.array_equal(c[moved], at[rt[h], c[idx]]):
                return False, f"cross_not_equivariant:{d}"
    if not _connected(pc):
        return False, "disconnected"
    if require_complete:
        try:
            pc.sheets
        except InvalidInput:
            return False, "sheet_counts_differ"
    return True, "ok"


def _connected(pc: PreCovering) -> bool:
    gog = pc.gog
    offs = np.cumsum([0] + [pc.num_points(v) for v in range(gog.num_vertices)])
    n = int(offs[-1])
    pairs = []
    for v in range(gog.num_vertices):
        a = pc.act[v]
        for g in range(a.shape[0]):
            pairs.append((offs[v] + np.arange(a.shape[1]), offs[v] + a[g]))
    for d in gog.directed_edges:
        c = pc.cross[d]
        idx = np.flatnonzero(c >= 0)
        pairs.append((offs[gog.origin(d)] + idx, offs[gog.terminus(d)] + c[idx]))
    # label propagation to a fixed point
    label = np.arange(n)
    changed = True
    while changed:
        changed = False
        for u, w in pairs:
            m = np.minimum(label[u], label[w])
            if (m < label[u]).any() or (m < label[w]).any():
                np.minimum.at(label, u, m)
                np.minimum.at(label, w, m)
                changed = True
        label = label[label]
    return n == 0 or bool((label == label[0]).all())


# --- lifting -------------------------------------------------------------

def lift(pc: PreCovering, path: GPath, start: int | None = None) -> list[tuple[int, int]] | None:
    """Points visited by the lift of a path from a point over its start vertex; None if it falls off."""
    gog = pc.gog
    validate_path(gog, path)
    v = path.start
    x = pc.base if start is None else start
    if start is None and v != gog.base:
        raise InvalidInput("default start point lies over the base vertex")
    if not 0 <= x < pc.num_points(v):
        raise InvalidInput("start point out of range")
    x = int(pc.act[v][path.elements[0], x])
    out = [(v, x)]
    for d, g in zip(path.edges, path.elements[1:]):
        y = int(pc.cross[d][x])
        if y < 0:
            return None
        v = gog.terminus(d)
        x = int(pc.act[v][g, y])
        out.append((v, x))
    return out


def lift_all(pc: PreCovering, path: GPath) -> np.ndarray:
    """Endpoint of the lift from every point over the start vertex (-1 where it falls off)."""
    gog = pc.gog
    validate_path(gog, path)
    v = path.start
    x = pc.act[v][path.elements[0]].copy()
    for d, g in zip(path.edges, path.elements[1:]):
        y = np.where(x >= 0, pc.cross[d][np.maximum(x, 0)], -1)
        v = gog.terminus(d)
        a = pc.act[v][g]
        if a.size == 0:
            return np.full_like(x, -1)
        x = np.where(y >= 0, a[np.maximum(y, 0)], -1)
    return x


def e_length(pc: PreCovering, path: GPath, start: int | None = None) -> int:
    """Handles crossed by the lift, halved: one per geometric edge traversed."""
    pts = lift(pc, path, start)
    if pts is None:
        raise InvalidInput("path does not lift")
    return len(pts) - 1


def lifts_to_loop(pc: PreCovering, path: GPath, start: int | None = None) -> bool:
    pts = lift(pc, path, start)
    return pts is not None and pts[-1] == (path.start, pc.base if start is None else start)


# --- mutable builder -----------------------------------------------------

class _Builder:
    """Points with union-find coincidence handling, used while folding and extending."""

    def __init__(self, gog: GraphOfGroups):
        self.gog = gog
        self.vertex: list[int] = []
        self.act: list[list[int]] = []
        self.cross: list[dict[int, int]] = []
        self.parent: list[int] = []
        self.chain: list[tuple] = []
        self.pending: list[tuple[int, int]] = []
        self.base = -1

    # points
    def new_piece(self, v: int, P: Iterable[int] | None = None, chain: tuple = ()) -> int:
        G = self.gog.vertex_groups[v]
        reps, index = _right_cosets(G, P if P is not None else (0,))
        p0 = len(self.vertex)
        for r in reps:
            self.vertex.append(v)
            self.act.append([p0 + index[G.m(r, g)] for g in range(G.order)])
            self.cross.append({})
            self.parent.append(len(self.parent))
            self.chain.append(chain)
        if len(self.vertex) > max_sheets() * max(1, self.gog.num_vertices):
            raise ResourceError(f"pre-covering exceeds {len(self.vertex)} points")
        return p0

    def find(self, p: int) -> int:
        root = p
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[p] != root:
            self.parent[p], p = root, self.parent[p]
        return root

    def mul(self, p: int, g: int) -> int:
        return self.find(self.act[self.find(p)][g])

    def across(self, p: int, d: int) -> int | None:
        y = self.cross[self.find(p)].get(d)
        return None if y is None else self.find(y)

    def _set(self, a: int, b: int, d: int) -> None:
        a, b = self.find(a), self.find(b)
        cur = self.cross[a].get(d)
        if cur is None:
            self.cross[a][d] = b
        else:
            self.pending.append((cur, b))
        cur = self.cross[b].get(d ^ 1)
        if cur is None:
            self.cross[b][d ^ 1] = a
        else:
            self.pending.append((cur, a))

    def glue(self, x: int, y: int, d: int) -> None:
        """Glue the handle of x over d to the handle of y over rev(d), matching x with y."""
        ri, rt = self.gog.rho_i(d), self.gog.rho_t(d)
        for h in range(len(ri)):
            self._set(self.mul(x, ri[h]), self.mul(y, rt[h]), d)
        self._process()

    def merge(self, p: int, q: int) -> None:
        self.pending.append((p, q))
        self._process()

    def _process(self) -> None:
        while self.pending:
            p, q = self.pending.pop()
            p, q = self.find(p), self.find(q)
            if p == q:
                continue
            if self.vertex[p] != self.vertex[q]:
                raise InternalInconsistency("attempted to identify points over different vertices")
            if q < p:
                p, q = q, p
            self.parent[q] = p
            if len(self.chain[q]) < len(self.chain[p]):
                self.chain[p] = self.chain[q]
            for g, (x, y) in enumerate(zip(self.act[p], self.act[q])):
                if g:
                    self.pending.append((x, y))
            for d, y in self.cross[q].items():
                cur = self.cross[p].get(d)
                if cur is None:
                    self.cross[p][d] = y
                else:
                    self.pending.append((cur, y))
            self.cross[q] = {}

    def alive(self) -> list[int]:
        return [p for p in range(len(self.parent)) if self.parent[p] == p]

    def handle_rep(self, x: int, d: int) -> int:
        return min(self.mul(x, g) for g in self.gog.rho_i(d))

    def face(self, x: int, d: int) -> Subgroup:
        ri = self.gog.rho_i(d)
        return frozenset(h for h in range(len(ri)) if self.mul(x, ri[h]) == x)

    def free_handles(self) -> list[tuple[int, int]]:
        out = set()
        for p in self.alive():
            for d in self.gog.out_edges(self.vertex[p]):
                if d not in self.cross[p]:
                    out.add((self.handle_rep(p, d), d))
        return sorted(out)

    @classmethod
    def thaw(cls, pc: PreCovering) -> "_Builder":
        b = cls(pc.gog)
        gog = pc.gog
        offs = np.cumsum([0] + [pc.num_points(v) for v in range(gog.num_vertices)]).tolist()
        for v in range(gog.num_vertices):
            a = pc.act[v]
            for x in range(a.shape[1]):
                b.vertex.append(v)
                b.act.append((offs[v] + a[:, x]).tolist())
                b.cross.append({})
                b.parent.append(len(b.parent))
                b.chain.append(())
        for d in gog.directed_edges:
            o, t = offs[gog.origin(d)], offs[gog.terminus(d)]
            for x, y in enumerate(pc.cross[d].tolist()):
                if y >= 0:
                    b.cross[o + x][d] = t + y
        b.base = offs[gog.base] + pc.base
        return b

    def freeze(self) -> PreCovering:
        gog = self.gog
        alive = self.alive()
        local: dict[int, int] = {}
        per_vertex: list[list[int]] = [[] for _ in range(gog.num_vertices)]
        for p in alive:
            local[p] = len(per_vertex[self.vertex[p]])
            per_vertex[self.vertex[p]].append(p)
        act = []
        for v, pts in enumerate(per_vertex):
            k = gog.vertex_groups[v].order
            a = np.empty((k, len(pts)), dtype=np.int64)
            for i, p in enumerate(pts):
                a[:, i] = [local[self.find(y)] for y in self.act[p]]
            act.append(a)
        cross = []
        for d in gog.directed_edges:
            pts = per_vertex[gog.origin(d)]
            c = np.full(len(pts), -1, dtype=np.int64)
            for i, p in enumerate(pts):
                y = self.cross[p].get(d)
                if y is not None:
                    c[i] = local[self.find(y)]
            cross.append(c)
        return PreCovering(gog, tuple(act), tuple(cross), local[self.find(self.base)])


# --- construction steps --------------------------------------------------

def fold_subgroup(gog: GraphOfGroups, gens: Sequence[GPath]) -> PreCovering:
    """Fold the lifts of the generators at a universal base piece."""
    gens = [reduce_path(gog, g) for g in gens]
    for g in gens:
        if g.start != gog.base or g.end(gog) != gog.base:
            raise InvalidInput("subgroup generators must be closed paths at the base vertex")
    b = _Builder(gog)
    b.base = b.new_piece(gog.base)
    for g in gens:
        x = b.mul(b.base, g.elements[0])
        for d, el in zip(g.edges, g.elements[1:]):
            y = b.across(x, d)
            if y is None:
                y = b.new_piece(gog.terminus(d))
                b.glue(x, y, d)
                y = b.across(x, d)
            x = b.mul(y, el)
        b.merge(x, b.base)
    pc = b.freeze()
    for g in gens:
        if not lifts_to_loop(pc, g):
            raise InternalInconsistency("a generator does not lift to a loop after folding")
    return pc


def close_cap(gog: GraphOfGroups) -> int:
    states = sum(len(gog.edge_group(d).subgroups) - 1 for d in gog.directed_edges)
    max_order = max(G.order for G in gog.vertex_groups)
    return gog.num_vertices * max_order * max(1, states) + states + 1


def close_nontrivial_faces(pc: PreCovering, cap: int | None = None) -> PreCovering:
    """Extend through free handles with nontrivial face groups until none remain.

    The deepest such handle is extended first, so that a non-terminating
    propagation is detected after linearly many pieces.
    """
    gog = pc.gog
    cap = close_cap(gog) if cap is None else cap
    b = _Builder.thaw(pc)
    stack = [(x, d) for x, d in b.free_handles() if len(b.face(x, d)) > 1]
    while stack:
        x, d = stack.pop()
        x = b.find(x)
        if b.across(x, d) is not None:
            continue
        E = b.face(x, d)
        if len(E) == 1:
            continue
        chain = b.chain[x] + ((d, tuple(sorted(E))),)
        if len(chain) > cap:
            raise NormalizerConditionFails(
                f"face propagation exceeded {cap} steps; an edge subgroup is normalized by a hyperbolic element",
                list(chain),
            )
        w = gog.terminus(d)
        rt = gog.rho_t(d)
        y = b.new_piece(w, gog.vertex_groups[w].closure(rt[h] for h in E), chain)
        b.glue(x, y, d)
        y = b.find(y)
        for f in gog.out_edges(w):
            for z in sorted({b.handle_rep(b.mul(y, g), f) for g in range(gog.vertex_groups[w].order)}):
                if b.across(z, f) is None and len(b.face(z, f)) > 1:
                    stack.append((z, f))
    return b.freeze()


def thicken(pc: PreCovering, depth: int) -> PreCovering:
    """Attach depth layers of universal pieces through the (trivial) free handles."""
    if depth <= 0:
        return pc
    gog = pc.gog
    b = _Builder.thaw(pc)
    frontier = b.free_handles()
    for x, d in frontier:
        if len(b.face(x, d)) > 1:
            raise InvalidInput("thicken needs all free faces trivial")
    for _layer in range(depth):
        nxt = []
        for x, d in frontier:
            if b.across(x, d) is not None:
                continue
            w = gog.terminus(d)
            y = b.new_piece(w)
            b.glue(x, y, d)
            y = b.find(y)
            for f in gog.out_edges(w):
                reps = sorted({b.handle_rep(b.mul(y, g), f) for g in range(gog.vertex_groups[w].order)})
                nxt.extend((z, f) for z in reps if b.across(z, f) is None)
        frontier = nxt
    return b.freeze()


@dataclass(frozen=True)
class TrivialHandleOrder:
    """Orders trivial handles by the edge order of their underlying directed edges."""

    edges: EdgeOrder

    @classmethod
    def of(cls, gog: GraphOfGroups) -> "TrivialHandleOrder":
        return cls(edge_order(gog))

    def key(self, handle: Handle) -> tuple[int, int]:
        return self.edges.key(handle.edge)

    def less(self, a: Handle, b: Handle) -> bool:
        return self.key(a) < self.key(b)

    def maximal(self, handles: Sequence[Handle]) -> list[Handle]:
        if not handles:
            return []
        top = max(self.key(h) for h in handles)
        return [h for h in handles if self.key(h) == top]


@dataclass(frozen=True)
class AssociatedTuple:
    edge: int  # the directed edge of the handle A
    vertex: int  # w = t(edge), carrying the universal piece
    b_handles: tuple[int, ...]  # representatives in G_w of the handles over rev(edge)
    other_handles: tuple[tuple[int, int], ...]  # (directed edge, representative) of the rest

    @property
    def s(self) -> int:
        return len(self.b_handles)


def associated_tuple(gog: GraphOfGroups, d: int, face: Subgroup = frozenset({0})) -> AssociatedTuple:
    """Universal piece at t(d) and its handles over rev(d) (the B's)."""
    if len(face) != 1:
        raise InvalidInput("the associated tuple is defined for trivial handles only")
    w = gog.terminus(d)
    H = piece_handles(gog, w, frozenset({0}))
    bs = tuple(hc.rep for hc in H[d ^ 1])
    others = tuple((f, hc.rep) for f in gog.out_edges(w) if f != d ^ 1 for hc in H[f])
    return AssociatedTuple(d, w, bs, others)


@dataclass(frozen=True)
class RoundLog:
    round: int
    edge: int
    r: int
    s: int
    num_r: int
    num_s: int
    seed: int
    points: int

    def to_json(self) -> dict:
        return {"round": self.round, "edge": self.edge, "r": self.r, "s": self.s,
                "num_r": self.num_r, "num_s": self.num_s, "seed": self.seed, "points": self.points}


def complete_cover(y1: PreCovering, order: TrivialHandleOrder | None, C: int,
                   seed: int = 0) -> tuple[PreCovering, list[RoundLog]]:
    """Close off all free handles round by round using star gluings of girth C."""
    gog = y1.gog
    order = order or TrivialHandleOrder.of(gog)
    pc = y1
    log: list[RoundLog] = []
    previous = None
    rnd = 0
    cap = max_sheets()
    while True:
        free = pc.free_handles()
        if not free:
            break
        if any(not h.face or len(h.face) != 1 for h in free):
            raise InvalidInput("complete_cover needs all free handles trivial")
        top = order.maximal(free)
        d = top[0].edge
        if any(h.edge != d for h in top):
            raise InternalInconsistency("maximal free handles lie over different edges")
        if previous is not None and not order.edges.less(d, previous):
            raise InternalInconsistency("the maximal free handle did not decrease")
        previous = d
        tup = associated_tuple(gog, d)
        r, s = len(top), tup.s
        round_seed = seed + 7919 * rnd
        schema = glue_stars(r, s, C, round_seed)
        v, w = gog.origin(d), tup.vertex
        Gw = gog.vertex_groups[w]
        n = [pc.num_points(u) for u in range(gog.num_vertices)]
        new_n = [schema.num_r * n[u] + (schema.num_s * Gw.order if u == w else 0)
                 for u in range(gog.num_vertices)]
        if max(new_n) > cap:
            raise ResourceError(f"completion would need {max(new_n)} points (cap {cap})")
        # copies of the current space, then the universal pieces at w
        act = []
        for u in range(gog.num_vertices):
            k = gog.vertex_groups[u].order
            blocks = [pc.act[u] + c * n[u] for c in range(schema.num_r)]
            if u == w:
                base = schema.num_r * n[u]
                uni = np.asarray(Gw.mul, dtype=np.int64).T  # [g, k] = k.g
                blocks += [uni + base + q * Gw.order for q in range(schema.num_s)]
            act.append(np.concatenate(blocks, axis=1) if blocks else np.empty((k, 0), dtype=np.int64))
        cross = []
        for f in gog.directed_edges:
            o, t = gog.origin(f), gog.terminus(f)
            c = pc.cross[f]
            blocks = [np.where(c >= 0, c + i * n[t], -1) for i in range(schema.num_r)]
            if o == w:
                blocks.append(np.full(schema.num_s * Gw.order, -1, dtype=np.int64))
            cross.append(np.concatenate(blocks))
        reps = np.array([h.rep for h in top], dtype=np.int64)
        bs = np.array(tup.b_handles, dtype=np.int64)
        m = np.array(schema.matching, dtype=np.int64)
        X = (m[:, 0] // r) * n[v] + reps[m[:, 0] % r]
        Y = schema.num_r * n[w] + (m[:, 1] // s) * Gw.order + bs[m[:, 1] % s]
        ri, rt = gog.rho_i(d), gog.rho_t(d)
        for h in range(len(ri)):
            xs = act[v][ri[h]][X]
            ys = act[w][rt[h]][Y]
            if (cross[d][xs] >= 0).any() or (cross[d ^ 1][ys] >= 0).any():
                raise InternalInconsistency("star gluing hit an already glued face")
            cross[d][xs] = ys
            cross[d ^ 1][ys] = xs
        pc = PreCovering(gog, tuple(act), tuple(cross), pc.base)
        log.append(RoundLog(rnd, d, r, s, schema.num_r, schema.num_s, round_seed, pc.total_points))
        rnd += 1
    ok, reason = validate(pc, require_complete=True)
    if not ok:
        raise InternalInconsistency(f"completed cover failed validation: {reason}")
    return pc, log


__all__ = [
    "HandleCoset",
    "CoveringPiece",
    "piece_handles",
    "enumerate_pieces",
    "Handle",
    "PreCovering",
    "validate",
    "lift",
    "lift_all",
    "e_length",
    "lifts_to_loop",
    "fold_subgroup",
    "close_cap",
    "close_nontrivial_faces",
    "thicken",
    "TrivialHandleOrder",
    "AssociatedTuple",
    "associated_tuple",
    "RoundLog",
    "complete_cover",
]
