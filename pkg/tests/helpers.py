"""Brute-force reference routines for the tests.

Deliberately naive: they recompute everything from the raw edge list and
share no code with the package beyond the MultiGraph container.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from hypothesis import strategies as st

from factorforge.graph import EdgeSubset, MultiGraph


def components_of(n: int, pairs) -> list[set[int]]:
    seen = [False] * n
    adj = [[] for _ in range(n)]
    for u, v in pairs:
        adj[u].append(v)
        adj[v].append(u)
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp, stack = set(), [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.add(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        out.append(comp)
    return out


def pairs_of(subset: EdgeSubset) -> list[tuple[int, int]]:
    return [subset.host.edges[e] for e in sorted(subset.members)]


def brute_connected(subset: EdgeSubset) -> bool:
    return len(components_of(subset.host.n, pairs_of(subset))) == 1


def brute_cut_vertices(subset: EdgeSubset) -> set[int]:
    """Delete each vertex and count the pieces its component falls into."""
    n = subset.host.n
    pairs = pairs_of(subset)
    cuts = set()
    for comp in components_of(n, pairs):
        if len(comp) < 3:
            continue
        for v in comp:
            rest = [(a, b) for a, b in pairs if v not in (a, b) and a in comp]
            pieces = [c for c in components_of(n, rest) if c <= comp - {v}]
            if len(pieces) > 1:
                cuts.add(v)
    return cuts


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def brute_tree_connected(n: int, pairs, m: int) -> bool:
    """Tutte / Nash-Williams condition checked over every partition."""
    for part in set_partitions(range(n)):
        label = {v: k for k, cls in enumerate(part) for v in cls}
        cross = sum(1 for u, v in pairs if label[u] != label[v])
        if cross < m * (len(part) - 1):
            return False
    return True


def brute_subset_window(host: MultiGraph, lower, upper):
    """Every edge subset (as a sorted tuple) with degrees in [lower, upper]."""
    out = []
    ne = host.edge_count
    for mask in range(1 << ne):
        deg = np.zeros(host.n, dtype=int)
        ids = [e for e in range(ne) if mask >> e & 1]
        for e in ids:
            u, v = host.edges[e]
            deg[u] += 1
            deg[v] += 1
        if np.all(deg >= lower) and np.all(deg <= upper):
            out.append(tuple(ids))
    return out


def brute_extensions(host, f, t, m, containment, caps_upper):
    """All H with containment ⊆ H, d_F <= d_H <= caps_upper, m-tree-connected."""
    d_f = np.zeros(host.n, dtype=int)
    for e in f.members:
        for x in host.edges[e]:
            d_f[x] += 1
    found = []
    for ids in brute_subset_window(host, d_f, caps_upper):
        if not set(containment) <= set(ids):
            continue
        if brute_tree_connected(host.n, [host.edges[e] for e in ids], m):
            found.append(ids)
    return found


@st.composite
def multigraphs(draw, min_n=1, max_n=7, max_edges=14, max_mult=2):
    n = draw(st.integers(min_n, max_n))
    if n < 2:
        return MultiGraph(n, [])
    all_pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(all_pairs), max_size=max_edges))
    count: dict = {}
    edges = []
    for p in chosen:
        if count.get(p, 0) < max_mult:
            count[p] = count.get(p, 0) + 1
            edges.append(p if draw(st.booleans()) else (p[1], p[0]))
    return MultiGraph(n, edges)


def random_multigraph(rng: np.random.Generator, n: int, ne: int, max_mult: int = 3) -> MultiGraph:
    edges = []
    count: dict = {}
    if n >= 2:
        while len(edges) < ne:
            u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
            k = (min(u, v), max(u, v))
            if count.get(k, 0) >= max_mult:
                if all(count.get(p, 0) >= max_mult for p in combinations(range(n), 2)):
                    break
                continue
            count[k] = count.get(k, 0) + 1
            edges.append((u, v))
    return MultiGraph(n, edges)


def random_tree_connected(rng: np.random.Generator, n: int, m: int, extra: int) -> MultiGraph:
    """Host whose full edge set is m-tree-connected: m random trees plus extra edges."""
    edges = []
    for _ in range(m):
        order = rng.permutation(n)
        edges += [(int(order[rng.integers(0, i)]), int(order[i])) for i in range(1, n)]
    for _ in range(extra):
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        edges.append((u, v))
    perm = rng.permutation(len(edges))
    return MultiGraph(n, [edges[i] for i in perm])
