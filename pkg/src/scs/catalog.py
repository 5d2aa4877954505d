"""Standard small trees of finite groups used by tests, docs and the CLI."""

from __future__ import annotations

from typing import Sequence

from .errors import InvalidInput
from .gog_core import FiniteGroupTable, GogEdge, GraphOfGroups, cyclic_group, symmetric_group

TRIVIAL = cyclic_group(1)


def amalgam(A: FiniteGroupTable, B: FiniteGroupTable, C: FiniteGroupTable,
            rho_a: Sequence[int], rho_b: Sequence[int], base: int = 0) -> GraphOfGroups:
    """A *_C B as a one-edge tree; vertex 0 carries A, vertex 1 carries B."""
    edge = GogEdge(0, 1, C, tuple(rho_a), tuple(rho_b))
    return GraphOfGroups((A, B), (edge,), base)


def psl2z(base: int = 0) -> GraphOfGroups:
    """C2 * C3; vertex 0 is C2 = <a>, vertex 1 is C3 = <b>."""
    return amalgam(cyclic_group(2), cyclic_group(3), TRIVIAL, (0,), (0,), base)


def c4_c2_c6(base: int = 0) -> GraphOfGroups:
    """C4 *_C2 C6 with the central subgroup of order 2 amalgamated."""
    return amalgam(cyclic_group(4), cyclic_group(6), cyclic_group(2), (0, 2), (0, 3), base)


# element ids of S3 (permutations in lexicographic order); 1 is the transposition (1 2)
S3 = symmetric_group(3)
S3_TRANSPOSITION = 1
S3_ROTATIONS = (0, 3, 4)


def s3_c2_s3(base: int = 0) -> GraphOfGroups:
    """S3 *_C2 S3 amalgamating a transposition subgroup on both sides."""
    rho = (0, S3_TRANSPOSITION)
    return amalgam(S3, S3, cyclic_group(2), rho, rho, base)


def path_of_groups(groups: Sequence[FiniteGroupTable], base: int = 0) -> GraphOfGroups:
    """Vertices 0..n-1 in a line with trivial edge groups (a free product)."""
    edges = tuple(GogEdge(i, i + 1, TRIVIAL, (0,), (0,)) for i in range(len(groups) - 1))
    return GraphOfGroups(tuple(groups), edges, base)


EXAMPLES = {
    "psl2z": psl2z,
    "c4c2c6": c4_c2_c6,
    "s3c2s3": s3_c2_s3,
}


def example(name: str, base: int = 0) -> GraphOfGroups:
    try:
        return EXAMPLES[name](base)
    except KeyError as exc:
        raise InvalidInput(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from exc
