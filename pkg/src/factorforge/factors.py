"""Finding a (g,f)-factor and choosing the matching the connected extension removes."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, InvalidInputError, PreconditionError
from .graph import (
    DegreeBounds,
    EdgeSubset,
    MultiGraph,
    connected_components,
    cut_vertices,
    degree_profile,
    spanning_tree_of_component,
)

DEFAULT_EDGE_CAP = 24


def edge_cap(override: int | None = None) -> int:
    """Exhaustive-search edge cap: explicit override, then ``FACTORFORGE_CAP_EDGES``, then 24."""
    if override is not None:
        return int(override)
    env = os.environ.get("FACTORFORGE_CAP_EDGES")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InvalidInputError(f"FACTORFORGE_CAP_EDGES={env!r} is not an integer") from None
    return DEFAULT_EDGE_CAP


@dataclass(frozen=True)
class MatchingSelection:
    """One edge per non-trivial component of F; ``designated[e] = (x, y)`` with x non-cut."""

    edges: frozenset[int]
    designated: dict[int, tuple[int, int]]

    def pairs(self) -> list[tuple[int, int, int]]:
        """``(edge, x, y)`` triples in edge id order."""
        return [(e, *self.designated[e]) for e in sorted(self.edges)]

    def validate(self, f_subset: EdgeSubset) -> None:
        """Raise :class:`PreconditionError` if this is not a valid selection for ``f_subset``."""
        host = f_subset.host
        if set(self.designated) != set(self.edges):
            raise PreconditionError("every matching edge needs exactly one designation")
        used: set[int] = set()
        for e in sorted(self.edges):
            if e not in f_subset:
                raise PreconditionError(f"matching edge {e} is not in the factor")
            u, v = host.edges[e]
            if u in used or v in used:
                raise PreconditionError(f"matching edge {e} shares a vertex with another matching edge")
            used.update((u, v))
            x, y = self.designated[e]
            if {x, y} != {u, v}:
                raise PreconditionError(f"designation {(x, y)} does not match the endpoints of edge {e}")
        cuts = cut_vertices(f_subset)
        for comp in connected_components(f_subset):
            if len(comp) == 1:
                continue
            comp_set = set(comp)
            inside = [e for e in self.edges if host.edges[e][0] in comp_set]
            if len(inside) != 1:
                raise PreconditionError(
                    f"component {comp} holds {len(inside)} matching edges, expected exactly one"
                )
            x = self.designated[inside[0]][0]
            if x in cuts:
                raise PreconditionError(f"designated endpoint {x} is a cut vertex of the factor")


def verify_factor_bounds(f_subset: EdgeSubset, lower: Sequence[int], upper: Sequence[int]) -> bool:
    n = f_subset.host.n
    if len(lower) != n or len(upper) != n:
        raise InvalidInputError(f"bound vectors must have length {n}")
    deg = degree_profile(f_subset)
    return bool(np.all(np.asarray(lower) <= deg) and np.all(deg <= np.asarray(upper)))


def find_gf_factor(host: MultiGraph, bounds: DegreeBounds, cap: int | None = None) -> EdgeSubset | None:
    """Exact backtracking search for a (g,f)-factor.

    Edges are decided in id order, inclusion first, so the answer is the
    lexicographically first solution. Exponential in the worst case; hosts
    above the edge cap raise :class:`CapacityError`.
    """
    n, ne = host.n, host.edge_count
    if bounds.n != n:
        raise InvalidInputError(f"degree bounds have length {bounds.n}, host has {n} vertices")
    limit = edge_cap(cap)
    if ne > limit:
        raise CapacityError(f"host has {ne} edges, above the exhaustive-search cap of {limit}")
    g, f = bounds.g, bounds.f
    deg = [0] * n
    rem = [len(host.incident[v]) for v in range(n)]
    if any(rem[v] < g[v] for v in range(n)):
        return None
    chosen: list[int] = []

    def step(e: int) -> bool:
        if e == ne:
            return True
        u, v = host.edges[e]
        rem[u] -= 1
        rem[v] -= 1
        if deg[u] < f[u] and deg[v] < f[v]:
            deg[u] += 1
            deg[v] += 1
            chosen.append(e)
            if step(e + 1):
                return True
            chosen.pop()
            deg[u] -= 1
            deg[v] -= 1
        if deg[u] + rem[u] >= g[u] and deg[v] + rem[v] >= g[v] and step(e + 1):
            return True
        rem[u] += 1
        rem[v] += 1
        return False

    if step(0):
        return EdgeSubset(host, frozenset(chosen))
    return None


def select_extension_matching(f_subset: EdgeSubset) -> MatchingSelection:
    """Pick, in every non-trivial component, the lowest edge at the lowest leaf of its greedy tree."""
    host = f_subset.host
    edges = []
    designated = {}
    for comp in connected_components(f_subset):
        if len(comp) == 1:
            continue
        tree = spanning_tree_of_component(f_subset, comp)
        tdeg = degree_profile(tree)
        leaf = min(v for v in comp if tdeg[v] == 1)
        e = f_subset.incident(leaf)[0]
        edges.append(e)
        designated[e] = (leaf, host.other(e, leaf))
    return MatchingSelection(frozenset(edges), designated)


def designate_matching(f_subset: EdgeSubset, edge_ids: Iterable[int]) -> MatchingSelection:
    """Wrap explicit matching edges, designating a non-cut endpoint (lowest id) as x."""
    host = f_subset.host
    cuts = cut_vertices(f_subset)
    designated = {}
    for e in edge_ids:
        u, v = sorted(host.edges[e])
        x = u if u not in cuts else v
        designated[e] = (x, host.other(e, x))
    sel = MatchingSelection(frozenset(designated), designated)
    sel.validate(f_subset)
    return sel
