"""Finite covers of the rose given by permutations.

A cover of degree m is an array ``perms`` of shape (rank, m); row i-1 is the
action of x_i on sheets.  Actions are on the right: tracing ``u v`` from a
sheet first follows u, then v.  ``coset_action`` returns the induced
permutation as an array ``p`` with ``p[s]`` the endpoint of the trace from s.
"""

from __future__ import annotations

import os
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidInput, ResourceError, VerificationFailed
from .words import ReducedWord, cyclic_relator_classes, format_word

DEFAULT_MAX_SHEETS = 1_000_000


def max_sheets() -> int:
    """Sheet cap, overridable through SCS_MAX_SHEETS."""
    raw = os.environ.get("SCS_MAX_SHEETS")
    if raw is None:
        return DEFAULT_MAX_SHEETS
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidInput(f"SCS_MAX_SHEETS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InvalidInput("SCS_MAX_SHEETS must be positive")
    return value


@dataclass(frozen=True, eq=False)
class PermCover:
    rank: int
    perms: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.perms, dtype=np.int64, copy=True)
        if p.ndim != 2 or p.shape[0] != self.rank or p.shape[1] < 1:
            raise InvalidInput(f"perms must have shape (rank, degree), got {p.shape}")
        m = p.shape[1]
        for row in p:
            if row.min() < 0 or row.max() >= m or np.bincount(row, minlength=m).max() != 1:
                raise InvalidInput("generator action is not a permutation")
        p.setflags(write=False)
        object.__setattr__(self, "perms", p)

    @property
    def degree(self) -> int:
        return int(self.perms.shape[1])

    @cached_property
    def inverse_perms(self) -> np.ndarray:
        inv = np.empty_like(self.perms)
        idx = np.arange(self.degree)
        for i, row in enumerate(self.perms):
            inv[i, row] = idx
        inv.setflags(write=False)
        return inv

    def step(self, x: int) -> np.ndarray:
        """Permutation array for a signed letter."""
        return self.perms[x - 1] if x > 0 else self.inverse_perms[-x - 1]

    def trace(self, w: ReducedWord | Sequence[int], start: int = 0) -> int:
        s = start
        for x in (w.letters if isinstance(w, ReducedWord) else w):
            s = int(self.step(x)[s])
        return s

    def is_connected(self) -> bool:
        return bool(_component(self, 0).all())

    def to_json(self) -> dict:
        names = [format_word(ReducedWord((i,), self.rank)) for i in range(1, self.rank + 1)]
        return {
            "rank": self.rank,
            "degree": self.degree,
            "perms": {name: [int(v) for v in row] for name, row in zip(names, self.perms)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "PermCover":
        rank = int(data["rank"])
        names = [format_word(ReducedWord((i,), rank)) for i in range(1, rank + 1)]
        perms = data["perms"]
        if set(perms) != set(names):
            raise InvalidInput("perms keys do not match the alphabet")
        rows = [perms[n] for n in names]
        cover = cls(rank, np.array(rows, dtype=np.int64))
        if cover.degree != int(data["degree"]):
            raise InvalidInput("degree field disagrees with permutation length")
        return cover


def _component(cover: PermCover, start: int) -> np.ndarray:
    seen = np.zeros(cover.degree, dtype=bool)
    seen[start] = True
    frontier = np.array([start])
    both = np.concatenate([cover.perms, cover.inverse_perms])
    while frontier.size:
        nbrs = np.unique(both[:, frontier])
        frontier = nbrs[~seen[nbrs]]
        seen[frontier] = True
    return seen


def coset_action(cover: PermCover, w: ReducedWord | Sequence[int]) -> np.ndarray:
    arr = np.arange(cover.degree)
    for x in (w.letters if isinstance(w, ReducedWord) else w):
        arr = cover.step(x)[arr]
    return arr


def contains_word(cover: PermCover, w: ReducedWord) -> bool:
    """Membership in the subgroup at sheet 0."""
    return cover.trace(w) == 0


# --- word-excluding covers -------------------------------------------------

def exclude_word_cover(w: ReducedWord) -> PermCover:
    """Cover of degree |w|+1 where w does not close up at sheet 0.

    The path 0 -> 1 -> ... -> |w| spelled by w gives partial injections for
    each generator; every maximal chain is closed into a cycle.
    """
    if not w.letters:
        raise InvalidInput("cannot exclude the trivial word")
    m = len(w.letters) + 1
    fwd = [dict() for _ in range(w.rank)]
    for k, x in enumerate(w.letters):
        if x > 0:
            fwd[x - 1][k] = k + 1
        else:
            fwd[-x - 1][k + 1] = k
    rows = []
    for f in fwd:
        rows.append(_close_chains(f, m))
    return PermCover(w.rank, np.array(rows, dtype=np.int64))


def _close_chains(f: dict[int, int], m: int) -> list[int]:
    has_pre = set(f.values())
    perm = [-1] * m
    for a, b in f.items():
        perm[a] = b
    for start in range(m):
        if start in has_pre:
            continue
        end = start
        while end in f:
            end = f[end]
        perm[end] = start
    return perm


# --- product kernels -------------------------------------------------------

def product_kernel(covers: Sequence[PermCover], cap: int | None = None) -> PermCover:
    """Cayley graph of the group generated by the tuple-of-permutations generators.

    The element at index 0 is the identity; edges are right multiplication.
    """
    if not covers:
        raise InvalidInput("product_kernel needs at least one cover")
    rank = covers[0].rank
    if any(c.rank != rank for c in covers):
        raise InvalidInput("covers over different alphabets")
    cap = max_sheets() if cap is None else cap
    gens = np.concatenate([_offset(c, off) for c, off in zip(covers, _offsets(covers))], axis=1)
    return _cayley(rank, gens, cap)


def _offsets(covers: Sequence[PermCover]) -> list[int]:
    out, acc = [], 0
    for c in covers:
        out.append(acc)
        acc += c.degree
    return out


def _offset(cover: PermCover, off: int) -> np.ndarray:
    return cover.perms + off


def _cayley(rank: int, gens: np.ndarray, cap: int) -> PermCover:
    width = gens.shape[1]
    dtype = np.int16 if width < 2**15 else np.int64
    gens = gens.astype(dtype)
    ident = np.arange(width, dtype=dtype)
    index = {ident.tobytes(): 0}
    elems = [ident]
    table = [[] for _ in range(rank)]
    frontier = [0]
    while frontier:
        block = np.stack([elems[i] for i in frontier])
        nxt = []
        for x in range(rank):
            prods = gens[x][block]
            col = table[x]
            for row in prods:
                key = row.tobytes()
                j = index.get(key)
                if j is None:
                    j = len(elems)
                    if j >= cap:
                        raise ResourceError(f"product kernel exceeds {cap} sheets")
                    index[key] = j
                    elems.append(row)
                    nxt.append(j)
                col.append(j)
        frontier = nxt
    # table rows were filled in BFS order of the source element
    order = len(elems)
    perms = np.array([t[:order] for t in table], dtype=np.int64)
    return PermCover(rank, perms)


# --- girth -----------------------------------------------------------------

def _bfs_tree(cover: PermCover) -> tuple[list[int], np.ndarray, np.ndarray]:
    """BFS order from sheet 0 with parent sheet and signed label of the tree edge."""
    m = cover.degree
    parent = np.full(m, -1, dtype=np.int64)
    label = np.zeros(m, dtype=np.int64)
    seen = np.zeros(m, dtype=bool)
    seen[0] = True
    order = [0]
    layer = np.array([0])
    letters = list(range(1, cover.rank + 1)) + [-i for i in range(1, cover.rank + 1)]
    while layer.size:
        nxt_parts = []
        for x in letters:
            tgt = cover.step(x)[layer]
            fresh = ~seen[tgt]
            tgt_f, src_f = tgt[fresh], layer[fresh]
            # keep the first occurrence of each new target
            tgt_f, first = np.unique(tgt_f, return_index=True)
            src_f = src_f[first]
            seen[tgt_f] = True
            parent[tgt_f] = src_f
            label[tgt_f] = x
            nxt_parts.append(tgt_f)
        layer = np.concatenate(nxt_parts) if nxt_parts else np.array([], dtype=np.int64)
        order.extend(int(v) for v in layer)
    return order, parent, label


def is_regular(cover: PermCover) -> bool:
    """True iff the cover is normal (vertex-transitive as a labeled graph).

    For each generator x we try to build the label-preserving automorphism
    sending 0 to 0.x; these exist for all x exactly when the automorphism
    group is transitive.
    """
    if not cover.is_connected():
        return False
    order, parent, label = _bfs_tree(cover)
    layers = _layers(order, parent)
    for x in range(1, cover.rank + 1):
        phi = np.full(cover.degree, -1, dtype=np.int64)
        phi[0] = cover.perms[x - 1][0]
        for layer in layers[1:]:
            for lab in np.unique(label[layer]):
                sel = layer[label[layer] == lab]
                phi[sel] = cover.step(int(lab))[phi[parent[sel]]]
        if np.unique(phi).size != cover.degree:
            return False
        for y in range(cover.rank):
            if not np.array_equal(phi[cover.perms[y]], cover.perms[y][phi]):
                return False
    return True


def _layers(order: list[int], parent: np.ndarray) -> list[np.ndarray]:
    depth = {0: 0}
    layers: list[list[int]] = [[0]]
    for v in order[1:]:
        d = depth[int(parent[v])] + 1
        depth[v] = d
        if d == len(layers):
            layers.append([])
        layers[d].append(v)
    return [np.array(l, dtype=np.int64) for l in layers]


def girth_from(cover: PermCover, root: int, cap: int | None = None, best: float = float("inf")) -> float:
    """Shortest cycle through the BFS ball of root (exact for cycles through root)."""
    m = cover.degree
    rank = cover.rank
    perms = cover.perms.tolist()
    inv = cover.inverse_perms.tolist()
    dist = {root: 0}
    pedge = {root: -1}
    queue = deque([root])
    limit = best if cap is None else min(best, cap + 1)
    while queue:
        u = queue.popleft()
        du = dist[u]
        if 2 * du + 1 >= limit:
            break
        for x in range(rank):
            for v, eid in ((perms[x][u], x * m + u), (inv[x][u], x * m + inv[x][u])):
                if v == u:
                    return 1
                if eid == pedge[u]:
                    continue
                if v in dist:
                    limit = min(limit, du + dist[v] + 1)
                else:
                    dist[v] = du + 1
                    pedge[v] = eid
                    queue.append(v)
    return limit


def girth(cover: PermCover, cap: int | None = None, assume_regular: bool | None = None) -> int | None:
    """Length of the shortest closed reduced edge path, or None if it exceeds cap.

    Loops count as cycles of length 1 and a pair of parallel edges as a
    cycle of length 2.  Normal covers need a single BFS from sheet 0.
    """
    regular = is_regular(cover) if assume_regular is None else assume_regular
    roots = [0] if regular else range(cover.degree)
    best: float = float("inf")
    for r in roots:
        best = min(best, girth_from(cover, r, cap, best))
        if best == 1:
            break
    if best == float("inf") or (cap is not None and best > cap):
        return None
    return int(best)


# --- the girth-bounded normal subgroup K -----------------------------------

@dataclass(frozen=True)
class KStrategy:
    kind: str  # "exact", "random" or "auto"
    seed: int = 0
    degree: int = 7

    @classmethod
    def parse(cls, text: str | "KStrategy" | None) -> "KStrategy":
        if text is None:
            return cls("auto")
        if isinstance(text, KStrategy):
            return text
        parts = text.strip().split(":")
        if parts[0] in ("exact", "auto") and len(parts) == 1:
            return cls(parts[0])
        if parts[0] == "random" and len(parts) in (1, 2, 3):
            try:
                seed = int(parts[1]) if len(parts) > 1 else 0
                degree = int(parts[2]) if len(parts) > 2 else 7
            except ValueError as exc:
                raise InvalidInput(f"bad K strategy {text!r}") from exc
            if degree < 2:
                raise InvalidInput("random strategy needs degree >= 2")
            return cls("random", seed, degree)
        raise InvalidInput(f"unknown K strategy {text!r}; use exact, auto or random:seed:deg")

    def __str__(self) -> str:
        if self.kind == "random":
            return f"random:{self.seed}:{self.degree}"
        return self.kind


# largest C for which the auto strategy uses exact word exclusion
AUTO_EXACT_MAX_C = 5


@dataclass(frozen=True, eq=False)
class GirthCertificate:
    cover: PermCover
    bound: int
    shortest_cycle_found: int | None = None  # None means no cycle of length <= bound
    strategy: str = field(default="auto")

    def to_json(self) -> dict:
        return {
            "cover": self.cover.to_json(),
            "bound": self.bound,
            "shortest_cycle_found": self.shortest_cycle_found,
            "strategy": self.strategy,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GirthCertificate":
        return cls(
            PermCover.from_json(data["cover"]),
            int(data["bound"]),
            None if data.get("shortest_cycle_found") is None else int(data["shortest_cycle_found"]),
            str(data.get("strategy", "auto")),
        )


def verify_girth_certificate(cert: GirthCertificate) -> tuple[bool, str]:
    cover = cert.cover
    if cert.bound < 1:
        return False, "bound_not_positive"
    if not cover.is_connected():
        return False, "cover_disconnected"
    g = girth(cover, cert.bound)
    if g is not None:
        return False, f"short_cycle_{g}"
    if cert.shortest_cycle_found is not None:
        return False, "claimed_short_cycle"
    return True, "ok"


def _exact_K(rank: int, C: int, cap: int) -> PermCover:
    """Exclude every short cyclic relator class not yet excluded, then take the kernel."""
    covers: list[PermCover] = []
    for canon in cyclic_relator_classes(rank, C):
        w = ReducedWord(canon, rank)
        # w lies in the running kernel iff it acts trivially on every sheet
        if covers and _acts_nontrivially(covers, w):
            continue
        covers.append(exclude_word_cover(w))
    return product_kernel(covers, cap)


def _acts_nontrivially(covers: list[PermCover], w: ReducedWord) -> bool:
    for c in covers:
        if not np.array_equal(coset_action(c, w), np.arange(c.degree)):
            return True
    return False


def _short_relator(perms: list[tuple[int, ...]], C: int) -> int | None:
    """Length of some nontrivial reduced word of length <= C acting trivially, else None."""
    d = len(perms[0])
    ident = tuple(range(d))
    letters = []
    for i, p in enumerate(perms):
        inv = [0] * d
        for a, b in enumerate(p):
            inv[b] = a
        letters.append((i + 1, p))
        letters.append((-(i + 1), tuple(inv)))
    stack = [(ident, 0, 0)]
    while stack:
        g, last, n = stack.pop()
        if n >= C:
            continue
        for lab, p in letters:
            if lab == -last:
                continue
            h = tuple(p[i] for i in g)
            if h == ident:
                return n + 1
            stack.append((h, lab, n + 1))
    return None


def _random_K(rank: int, C: int, seed: int, degree: int, retries: int, cap: int) -> PermCover:
    rng = random.Random(seed)
    d = degree
    tried = []
    while True:
        for _ in range(retries):
            perms = []
            for _ in range(rank):
                p = list(range(d))
                rng.shuffle(p)
                perms.append(tuple(p))
            if _short_relator(perms, C) is not None:
                continue
            try:
                K = product_kernel([PermCover(rank, np.array(perms))], cap)
            except ResourceError:
                continue
            if girth(K, C, assume_regular=True) is None:
                return K
        tried.append(d)
        d *= 2
        if d > cap:
            raise ResourceError(f"random K strategy failed at degrees {tried} (retries {retries} each)")


RANDOM_RETRIES = 20000


@lru_cache(maxsize=64)
def _build_K_cached(rank: int, C: int, strategy: KStrategy, cap: int, retries: int) -> PermCover:
    kind = strategy.kind
    if kind == "auto":
        if C <= AUTO_EXACT_MAX_C:
            kind = "exact"
        else:
            strategy = KStrategy("random", 0, 7 if C <= 8 else 9)
            kind = "random"
    if kind == "exact":
        return _exact_K(rank, C, cap)
    return _random_K(rank, C, strategy.seed, strategy.degree, retries, cap)


def build_K(rank: int, C: int, strategy: str | KStrategy | None = None,
            cap: int | None = None, retries: int = RANDOM_RETRIES) -> tuple[PermCover, GirthCertificate]:
    """Regular cover of the rose with girth at least C+1, plus its certificate."""
    if C < 1:
        raise InvalidInput("C must be at least 1")
    strat = KStrategy.parse(strategy)
    cap = max_sheets() if cap is None else cap
    K = _build_K_cached(rank, C, strat, cap, retries)
    if not is_regular(K):
        raise VerificationFailed("K is not a regular cover")
    g = girth(K, C, assume_regular=True)
    cert = GirthCertificate(K, C, g, str(strat))
    if g is not None:
        raise VerificationFailed(f"K has a cycle of length {g} <= {C}")
    return K, cert


__all__ = [
    "PermCover",
    "GirthCertificate",
    "KStrategy",
    "max_sheets",
    "coset_action",
    "contains_word",
    "exclude_word_cover",
    "product_kernel",
    "girth",
    "girth_from",
    "is_regular",
    "build_K",
    "verify_girth_certificate",
]
