"""Stallings graphs of finitely generated subgroups of a free group.

A graph stores geometric edges ``(src, dst, label)`` with ``label > 0``.  A
directed edge is addressed by ``(vertex, signed label)``: in a folded graph
that pair determines the edge, and ``(v, -x)`` is the inverse of the edge
``u --x--> v``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InternalInconsistency, InvalidInput
from .words import Alphabet, ReducedWord, identity, inverse, multiply, reduce

DirectedEdge = tuple[int, int]  # (source vertex, signed label)


@dataclass(frozen=True)
class SubgroupGraph:
    rank: int
    num_vertices: int
    edges: tuple[tuple[int, int, int], ...]
    basepoint: int = 0

    def __post_init__(self) -> None:
        Alphabet(self.rank)
        if not 0 <= self.basepoint < max(self.num_vertices, 1):
            raise InvalidInput("basepoint out of range")
        seen: set[DirectedEdge] = set()
        for u, v, x in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise InvalidInput(f"edge ({u},{v}) has an endpoint out of range")
            if not 1 <= x <= self.rank:
                raise InvalidInput(f"edge label {x} out of range")
            for key in ((u, x), (v, -x)):
                if key in seen:
                    raise InvalidInput(f"graph is not folded at vertex {key[0]} label {key[1]}")
                seen.add(key)

    @cached_property
    def out(self) -> list[dict[int, int]]:
        adj: list[dict[int, int]] = [dict() for _ in range(self.num_vertices)]
        for u, v, x in self.edges:
            adj[u][x] = v
            adj[v][-x] = u
        return adj

    def valency(self, v: int) -> int:
        return len(self.out[v])

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    @property
    def core_vertices(self) -> frozenset[int]:
        # Folding keeps exactly the part spanned by generator loops, so the
        # whole graph is the core (with the basepoint added).
        return frozenset(self.vertices)

    @property
    def outer_vertices(self) -> frozenset[int]:
        return frozenset(v for v in self.vertices if self.valency(v) == 1)

    @property
    def outer_edges(self) -> list[DirectedEdge]:
        """Directed edges starting at an outer vertex (the set the involution acts on)."""
        return sorted((v, x) for v in self.outer_vertices for x in self.out[v])

    def target(self, e: DirectedEdge) -> int:
        return self.out[e[0]][e[1]]

    def betti_number(self) -> int:
        return len(self.edges) - self.num_vertices + 1

    def is_saturated(self) -> bool:
        full = 2 * self.rank
        return all(self.valency(v) in (1, full) for v in self.vertices)

    def trace(self, w: ReducedWord | Sequence[int], start: int | None = None) -> int | None:
        v = self.basepoint if start is None else start
        letters = w.letters if isinstance(w, ReducedWord) else w
        for x in letters:
            nxt = self.out[v].get(x)
            if nxt is None:
                return None
            v = nxt
        return v

    def tree_words(self, root: int | None = None) -> dict[int, tuple[int, ...]]:
        """Label sequence of a BFS spanning-tree path from root to each vertex."""
        root = self.basepoint if root is None else root
        words = {root: ()}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for x in _slot_order(self.rank):
                v = self.out[u].get(x)
                if v is not None and v not in words:
                    words[v] = words[u] + (x,)
                    queue.append(v)
        return words

    def basis(self, root: int | None = None) -> list[ReducedWord]:
        """Free basis of the fundamental group at root, one word per non-tree edge."""
        root = self.basepoint if root is None else root
        tw = self.tree_words(root)
        tree_edges = set()
        for v, w in tw.items():
            if w:
                tree_edges.add((self.trace(w[:-1], root), w[-1]))
        out = []
        for u, v, x in self.edges:
            if (u, x) in tree_edges or (v, -x) in tree_edges:
                continue
            out.append(reduce(tw[u] + (x,) + tuple(-y for y in reversed(tw[v])), self.rank))
        return out

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "vertices": list(self.vertices),
            "edges": [{"src": u, "dst": v, "label": x} for u, v, x in self.edges],
            "basepoint": self.basepoint,
            "core": sorted(self.core_vertices),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SubgroupGraph":
        edges = tuple((int(e["src"]), int(e["dst"]), int(e["label"])) for e in data["edges"])
        return cls(int(data["rank"]), len(data["vertices"]), edges, int(data["basepoint"]))


def _slot_order(rank: int) -> tuple[int, ...]:
    return Alphabet(rank).letters()


class _Folder:
    """Union-find over vertices with per-root adjacency; folds eagerly."""

    def __init__(self, rank: int):
        self.rank = rank
        self.parent: list[int] = []
        self.adj: list[dict[int, int] | None] = []

    def new(self) -> int:
        self.parent.append(len(self.parent))
        self.adj.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def _merge_all(self, pending: list[tuple[int, int]]) -> None:
        while pending:
            a, b = pending.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if len(self.adj[a]) < len(self.adj[b]):
                a, b = b, a
            self.parent[b] = a
            adj_a = self.adj[a]
            for x, t in self.adj[b].items():
                if x in adj_a:
                    pending.append((adj_a[x], t))
                else:
                    adj_a[x] = t
            self.adj[b] = None

    def add_edge(self, u: int, x: int, v: int) -> None:
        u, v = self.find(u), self.find(v)
        pending: list[tuple[int, int]] = []
        for a, lab, b in ((u, x, v), (v, -x, u)):
            adj = self.adj[self.find(a)]
            if lab in adj:
                pending.append((adj[lab], b))
            else:
                adj[lab] = b
        self._merge_all(pending)

    def next_vertex(self, u: int, x: int) -> int | None:
        t = self.adj[self.find(u)].get(x)
        return None if t is None else self.find(t)


def _canonical_from_adjacency(rank: int, base: int, adj: dict[int, dict[int, int]]) -> SubgroupGraph:
    """Relabel vertices in BFS order from the base, following slot order."""
    order = {base: 0}
    queue = deque([base])
    slots = _slot_order(rank)
    while queue:
        u = queue.popleft()
        for x in slots:
            v = adj[u].get(x)
            if v is not None and v not in order:
                order[v] = len(order)
                queue.append(v)
    edges = []
    for u, nbrs in adj.items():
        if u not in order:
            continue
        for x, v in nbrs.items():
            if x > 0:
                edges.append((order[u], order[v], x))
    return SubgroupGraph(rank, len(order), tuple(sorted(edges)), 0)


def _prune(base: int, adj: dict[int, dict[int, int]], keep_base: bool = True) -> dict[int, dict[int, int]]:
    """Strip hanging trees: repeatedly drop valency-1 vertices (except the base)."""
    adj = {u: dict(n) for u, n in adj.items()}
    stack = [u for u, n in adj.items() if len(n) <= 1 and not (keep_base and u == base)]
    while stack:
        u = stack.pop()
        if u not in adj or (keep_base and u == base) or len(adj[u]) > 1:
            continue
        for x, v in list(adj[u].items()):
            del adj[v][-x]
            if len(adj[v]) <= 1 and v != u:
                stack.append(v)
        del adj[u]
    return adj


def fold_generators(gens: Iterable[ReducedWord], rank: int | None = None) -> SubgroupGraph:
    """Folded based core graph of the subgroup generated by gens."""
    gens = list(gens)
    if rank is None:
        if not gens:
            raise InvalidInput("rank is required when there are no generators")
        rank = gens[0].rank
    if any(g.rank != rank for g in gens):
        raise InvalidInput("generators over different alphabets")
    f = _Folder(rank)
    base = f.new()
    for w in gens:
        cur = base
        n = len(w.letters)
        for i, x in enumerate(w.letters):
            if i == n - 1:
                nxt = base
            else:
                nxt = f.next_vertex(cur, x)
                if nxt is None:
                    nxt = f.new()
            f.add_edge(cur, x, nxt)
            cur = f.find(nxt)
    root = f.find(base)
    adj = {}
    for v in range(len(f.parent)):
        if f.find(v) == v:
            adj[v] = {x: f.find(t) for x, t in f.adj[v].items()}
    adj = _prune(root, adj)
    return _canonical_from_adjacency(rank, root, adj)


def canonical(g: SubgroupGraph) -> SubgroupGraph:
    """Canonical relabeling; two based folded graphs are isomorphic iff canonical forms match."""
    adj = {v: dict(g.out[v]) for v in g.vertices}
    return _canonical_from_adjacency(g.rank, g.basepoint, adj)


def saturate(g: SubgroupGraph) -> SubgroupGraph:
    """Fill missing slots at every vertex of valency strictly between 1 and 2n.

    The one-vertex graph of the trivial subgroup gets a single x1 edge.
    """
    full = 2 * g.rank
    edges = list(g.edges)
    n = g.num_vertices
    if n == 1 and not edges:
        return SubgroupGraph(g.rank, 2, ((0, 1, 1),), g.basepoint)
    for v in g.vertices:
        val = g.valency(v)
        if 1 < val < full:
            for x in _slot_order(g.rank):
                if x in g.out[v]:
                    continue
                edges.append((v, n, x) if x > 0 else (n, v, -x))
                n += 1
    return SubgroupGraph(g.rank, n, tuple(edges), g.basepoint)


@dataclass(frozen=True)
class StarInvolution:
    pairing: dict[DirectedEdge, DirectedEdge]
    lines: dict[DirectedEdge, tuple[DirectedEdge, ...]]
    targets: dict[DirectedEdge, int]

    def star(self, e: DirectedEdge) -> DirectedEdge:
        return self.pairing[e]

    def sigma(self, e: DirectedEdge) -> DirectedEdge:
        """Reverse of e*; an involution on the outer edges."""
        u, x = self.pairing[e]
        return (self.targets[(u, x)], -x)

    def orbits(self) -> list[tuple[DirectedEdge, DirectedEdge]]:
        """Sigma orbits as (representative, partner), representatives in sorted order."""
        done: set[DirectedEdge] = set()
        out = []
        for e in sorted(self.pairing):
            if e in done:
                continue
            f = self.sigma(e)
            done.update((e, f))
            out.append((e, f))
        return out


def star_involution(g: SubgroupGraph) -> StarInvolution:
    if not g.is_saturated():
        raise InvalidInput("star involution needs a saturated graph")
    outer = g.outer_vertices
    pairing: dict[DirectedEdge, DirectedEdge] = {}
    lines: dict[DirectedEdge, tuple[DirectedEdge, ...]] = {}
    targets: dict[DirectedEdge, int] = {}
    for e in g.outer_edges:
        u, x = e
        line = [e]
        v = g.target(e)
        targets[e] = v
        while v not in outer:
            nxt = g.out[v].get(x)
            if nxt is None:
                raise InvalidInput(f"inner vertex {v} has no continuation with label {x}")
            line.append((v, x))
            targets[(v, x)] = nxt
            v = nxt
            if len(line) > len(g.edges) + 1:
                raise InternalInconsistency("label line does not terminate")
        pairing[e] = line[-1]
        lines[e] = tuple(line)
    return StarInvolution(pairing, lines, targets)


def contains(g: SubgroupGraph, w: ReducedWord) -> bool:
    return g.trace(w) == g.basepoint


def _cyclic_core_vertex(g: SubgroupGraph) -> int | None:
    adj = {v: dict(g.out[v]) for v in g.vertices}
    core = _prune(g.basepoint, adj, keep_base=False)
    if not core:
        return None
    tw = g.tree_words()
    return min(core, key=lambda v: (len(tw[v]), v))


def conj_into(h2: SubgroupGraph, h1: SubgroupGraph) -> ReducedWord | None:
    """Some g with h2^g inside h1, or None.

    The cyclic core of h2 (its generators conjugated by the stem word q) must
    embed at some vertex u of h1.  Reduced loops never enter hanging trees,
    so scanning the vertices of h1 is complete.
    """
    if h1.rank != h2.rank:
        raise InvalidInput("subgroups over different alphabets")
    rank = h1.rank
    c = _cyclic_core_vertex(h2)
    if c is None:
        return identity(rank)
    q = reduce(h2.tree_words()[c], rank)
    loops = h2.basis(c)
    paths = h1.tree_words()
    for u in sorted(paths, key=lambda v: (len(paths[v]), v)):
        if all(h1.trace(w, u) == u for w in loops):
            p = reduce(paths[u], rank)
            return multiply(q, inverse(p))
    return None


def conjugates_into(h2: SubgroupGraph, h1: SubgroupGraph, g: ReducedWord) -> bool:
    """Check h2^g inside h1 on a free basis of h2."""
    return all(contains(h1, multiply(inverse(g), w, g)) for w in h2.basis())


def conjugate_witness(h1: SubgroupGraph, h2: SubgroupGraph) -> ReducedWord | None:
    """g with h1^g = h2 if the subgroups are conjugate, else None.

    Mutual conjugacy-into forces conjugacy for finitely generated subgroups
    of a free group, and the first conjugator already gives equality.  A
    failure of that equality is reported loudly.
    """
    g1 = conj_into(h1, h2)
    if g1 is None:
        return None
    if conj_into(h2, h1) is None:
        return None
    if not (conjugates_into(h1, h2, g1) and conjugates_into(h2, h1, inverse(g1))):
        raise InternalInconsistency(f"mutual conjugacy-into holds but h1^g != h2 for g = {g1}")
    return g1


__all__ = [
    "SubgroupGraph",
    "StarInvolution",
    "DirectedEdge",
    "fold_generators",
    "canonical",
    "saturate",
    "star_involution",
    "contains",
    "conj_into",
    "conjugates_into",
    "conjugate_witness",
]
