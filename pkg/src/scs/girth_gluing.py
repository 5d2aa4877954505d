"""Gluing r-stars to s-stars along their leaves without short cycles.

A gluing is recorded on the bipartite multigraph of centers: r-center i owns
slots ``i*r .. i*r + r-1``, s-center j owns ``j*s .. j*s + s-1``, and each
matched pair of slots is one identified leaf, i.e. one bipartite edge.  A
cycle through 2l bipartite edges has length 4l in the glued graph, so the
glued girth is twice the bipartite girth.  We require bipartite girth >= t.

Construction: progressive edge growth.  Slots are filled round-robin, each
new edge going to an s-center as far as possible from the r-center in the
current graph; the result is then checked independently.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, ResourceError

MAX_EDGES = 200_000


@dataclass(frozen=True)
class StarGluing:
    r: int
    s: int
    t: int
    num_r: int
    num_s: int
    matching: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.num_r * self.r != self.num_s * self.s:
            raise InvalidInput("slot counts of the two sides differ")
        if len(self.matching) != self.num_r * self.r:
            raise InvalidInput("matching is not total")
        left = sorted(i for i, _ in self.matching)
        right = sorted(j for _, j in self.matching)
        if left != list(range(self.num_r * self.r)) or right != list(range(self.num_s * self.s)):
            raise InvalidInput("matching is not a bijection of slots")

    def center_edges(self) -> list[tuple[int, int]]:
        """Bipartite edges as (r-center, s-center)."""
        return [(i // self.r, j // self.s) for i, j in self.matching]

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "t": self.t,
            "num_r": self.num_r,
            "num_s": self.num_s,
            "matching": [[i, j] for i, j in self.matching],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StarGluing":
        return cls(int(data["r"]), int(data["s"]), int(data["t"]), int(data["num_r"]),
                   int(data["num_s"]), tuple((int(i), int(j)) for i, j in data["matching"]))


def _adjacency(g: StarGluing) -> list[list[tuple[int, int]]]:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.num_r + g.num_s)]
    for eid, (a, b) in enumerate(g.center_edges()):
        adj[a].append((g.num_r + b, eid))
        adj[g.num_r + b].append((a, eid))
    return adj


def bipartite_girth(g: StarGluing) -> float:
    """Shortest cycle of the center multigraph (inf for a forest)."""
    adj = _adjacency(g)
    best = math.inf
    for root in range(len(adj)):
        dist = {root: 0}
        pedge = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for v, eid in adj[u]:
                if eid == pedge[u]:
                    continue
                if v in dist:
                    best = min(best, dist[u] + dist[v] + 1)
                else:
                    dist[v] = dist[u] + 1
                    pedge[v] = eid
                    queue.append(v)
    return best


def glued_girth(g: StarGluing, cap: int | None = None) -> int | None:
    """Girth of the glued graph, or None when it is larger than cap (or infinite)."""
    b = bipartite_girth(g)
    if b == math.inf:
        return None
    value = 2 * int(b)
    if cap is not None and value > cap:
        return None
    return value


def is_connected(g: StarGluing) -> bool:
    adj = _adjacency(g)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(adj)


def degrees_ok(g: StarGluing) -> bool:
    deg_r = [0] * g.num_r
    deg_s = [0] * g.num_s
    for a, b in g.center_edges():
        deg_r[a] += 1
        deg_s[b] += 1
    return all(d == g.r for d in deg_r) and all(d == g.s for d in deg_s)


def verify_gluing(g: StarGluing) -> tuple[bool, str]:
    if not degrees_ok(g):
        return False, "degree"
    if not is_connected(g):
        return False, "disconnected"
    if bipartite_girth(g) < g.t:
        return False, "short_cycle"
    return True, "ok"


def _peg(r: int, s: int, t: int, nr: int, ns: int, rng: random.Random) -> StarGluing | None:
    n = nr + ns
    adj: list[list[int]] = [[] for _ in range(n)]
    cap = np.full(ns, s, dtype=np.int64)
    slot_r = [0] * nr
    slot_s = [0] * ns
    matching: list[tuple[int, int]] = []
    order = list(range(nr))
    # stamp[v] == tick marks v as within distance t-2 of the current r-center
    stamp = [0] * n
    tick = 0
    depth_limit = t - 2
    for _round in range(r):
        rng.shuffle(order)
        for c in order:
            tick += 1
            stamp[c] = tick
            frontier = [c]
            reached: list[int] = []
            depth = 0
            while frontier and depth < depth_limit:
                nxt = []
                for u in frontier:
                    for v in adj[u]:
                        if stamp[v] != tick:
                            stamp[v] = tick
                            nxt.append(v)
                if depth % 2 == 0:
                    reached.extend(nxt)
                frontier = nxt
                depth += 1
            avail = cap.copy()
            if reached:
                avail[np.asarray(reached, dtype=np.int64) - nr] = 0
            top = int(avail.max())
            if top == 0:
                return None
            choices = np.flatnonzero(avail == top)
            j = int(choices[rng.randrange(len(choices))])
            cap[j] -= 1
            adj[c].append(nr + j)
            adj[nr + j].append(c)
            matching.append((c * r + slot_r[c], j * s + slot_s[j]))
            slot_r[c] += 1
            slot_s[j] += 1
    return StarGluing(r, s, t, nr, ns, tuple(sorted(matching)))


def glue_stars(r: int, s: int, t: int, seed: int = 0, retries: int = 4) -> StarGluing:
    """Verified gluing with connected center graph and bipartite girth >= t."""
    if min(r, s, t) < 1:
        raise InvalidInput("r, s and t must be positive")
    L = r * s // math.gcd(r, s)
    if r == 1 or s == 1:
        # a single star glued to leaves: a tree
        nr, ns = L // r, L // s
        g = StarGluing(r, s, t, nr, ns, tuple((i, i) for i in range(L)))
        assert verify_gluing(g)[0]
        return g
    if r > s:
        # growing from the low-degree side packs better; build the mirror image
        g = glue_stars(s, r, t, seed, retries)
        return StarGluing(r, s, t, g.num_s, g.num_r, tuple(sorted((j, i) for i, j in g.matching)))
    k = 0
    largest = 0
    while True:
        nr, ns = (L // r) << k, (L // s) << k
        edges = nr * r
        if edges > MAX_EDGES:
            raise ResourceError(f"star gluing for (r={r}, s={s}, t={t}) failed up to {largest} edges")
        largest = edges
        for attempt in range(retries):
            rng = random.Random(f"glue:{seed}:{r}:{s}:{t}:{k}:{attempt}")
            g = _peg(r, s, t, nr, ns, rng)
            if g is not None and verify_gluing(g)[0]:
                return g
        k += 1


__all__ = [
    "StarGluing",
    "glue_stars",
    "glued_girth",
    "bipartite_girth",
    "verify_gluing",
    "is_connected",
    "degrees_ok",
]
