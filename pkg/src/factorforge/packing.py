"""Packing edge-disjoint spanning trees and the exchange primitive built on it.

The packer grows ``m`` disjoint forests one edge at a time, moving edges
between forests along a shortest augmenting chain (matroid partition). When
the forests cannot reach ``m(n-1)`` edges, the set of edges reachable by the
chain search gives an exact violating partition.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import ExchangeNotFoundError, InvalidInputError, PreconditionError
from .graph import EdgeSubset, MultiGraph, connected_components


@dataclass(frozen=True)
class TreePacking:
    m: int
    trees: tuple[tuple[int, ...], ...]

    def validate(self, host: MultiGraph) -> None:
        """Raise ``AssertionError`` unless the trees are disjoint spanning trees."""
        assert len(self.trees) == self.m
        seen: set[int] = set()
        for tree in self.trees:
            assert not seen.intersection(tree), "trees share an edge"
            seen.update(tree)
            sub = EdgeSubset(host, frozenset(tree))
            assert len(tree) == host.n - 1, "tree has the wrong edge count"
            assert len(connected_components(sub)) == 1, "tree is not spanning"

    def union(self) -> list[int]:
        return sorted(e for t in self.trees for e in t)


@dataclass(frozen=True)
class PartitionCertificate:
    """Vertex partition crossed by fewer than ``m(|P|-1)`` edges."""

    partition: tuple[tuple[int, ...], ...]
    cross_edge_count: int

    def validate(self, subset: EdgeSubset, m: int) -> None:
        host = subset.host
        label = [-1] * host.n
        for k, cls in enumerate(self.partition):
            for v in cls:
                assert label[v] == -1, f"vertex {v} in two classes"
                label[v] = k
        assert -1 not in label, "partition does not cover every vertex"
        cross = sum(1 for e in subset.members if label[host.edges[e][0]] != label[host.edges[e][1]])
        assert cross == self.cross_edge_count
        assert cross < m * (len(self.partition) - 1), "partition does not refute"


def _check_m(m: int) -> None:
    if int(m) != m or m < 1:
        raise InvalidInputError(f"m must be a positive integer, got {m!r}")


class _ForestFamily:
    """``m`` disjoint forests over a fixed edge list, with chain augmentation."""

    def __init__(self, n: int, edges: list[tuple[int, int]], m: int):
        self.n = n
        self.edges = edges
        self.m = m
        self.owner = [-1] * len(edges)
        self.adj = [[[] for _ in range(n)] for _ in range(m)]
        self.size = [0] * m

    def _path(self, i: int, s: int, t: int) -> list[int] | None:
        """Edge ids of the ``s``-``t`` path in forest ``i``, or None if none."""
        adj = self.adj[i]
        prev = {s: -1}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            if v == t:
                out = []
                while v != s:
                    e = prev[v]
                    out.append(e)
                    a, b = self.edges[e]
                    v = a if b == v else b
                return out
            for e in adj[v]:
                a, b = self.edges[e]
                w = b if a == v else a
                if w not in prev:
                    prev[w] = e
                    queue.append(w)
        return None

    def _move(self, e: int, target: int) -> None:
        src = self.owner[e]
        a, b = self.edges[e]
        if src != -1:
            self.adj[src][a].remove(e)
            self.adj[src][b].remove(e)
            self.size[src] -= 1
        self.adj[target][a].append(e)
        self.adj[target][b].append(e)
        self.size[target] += 1
        self.owner[e] = target

    def search(self, sources: Iterable[int], augment: bool = True) -> tuple[bool, set[int]]:
        """BFS over exchange chains from ``sources`` (all unowned).

        Returns ``(True, labelled)`` after augmenting, or ``(False, labelled)``
        where ``labelled`` is closed: every forest spans it.
        """
        label: dict[int, tuple[int, int] | None] = {}
        queue: deque[int] = deque()
        for s in sources:
            label[s] = None
            queue.append(s)
        while queue:
            x = queue.popleft()
            a, b = self.edges[x]
            for i in range(self.m):
                if self.owner[x] == i:
                    continue
                path = self._path(i, a, b)
                if path is None:
                    if augment:
                        cur, target = x, i
                        while True:
                            lab = label[cur]
                            self._move(cur, target)
                            if lab is None:
                                break
                            cur, target = lab
                    return True, set(label)
                for y in sorted(path):
                    if y not in label:
                        label[y] = (x, i)
                        queue.append(y)
        return False, set(label)


def _pack_edges(n: int, edges: list[tuple[int, int]], m: int, decision_only: bool):
    """Core packer on a plain edge list. Returns (forests or None, closure or None)."""
    need = m * (n - 1)
    if len(edges) < need:
        return None, None
    fam = _ForestFamily(n, edges, m)
    total = 0
    for e in range(len(edges)):
        ok, _ = fam.search([e])
        if ok:
            total += 1
            if total == need:
                break
        elif decision_only and total + (len(edges) - e - 1) < need:
            return None, None
    if total == need:
        trees = [[] for _ in range(m)]
        for e, i in enumerate(fam.owner):
            if i != -1:
                trees[i].append(e)
        return trees, None
    free = [e for e in range(len(edges)) if fam.owner[e] == -1]
    ok, closure = fam.search(free, augment=False)
    assert not ok, "forest family was not maximal"
    return None, closure


def pack_spanning_trees(subset: EdgeSubset, m: int) -> TreePacking | PartitionCertificate:
    """Find ``m`` edge-disjoint spanning trees in ``subset`` or refute it."""
    _check_m(m)
    host = subset.host
    n = host.n
    if n == 0:
        raise InvalidInputError("cannot pack spanning trees of the empty graph")
    ids = sorted(subset.members)
    local = [host.edges[e] for e in ids]
    trees, closure = _pack_edges(n, local, m, decision_only=False)
    if trees is not None:
        return TreePacking(m, tuple(tuple(ids[e] for e in t) for t in trees))

    # components of the closure are the partition; without a closure every
    # vertex stands alone and every edge crosses
    closed = EdgeSubset(host, frozenset(ids[e] for e in closure or ()))
    classes = connected_components(closed)
    label = [0] * n
    for k, cls in enumerate(classes):
        for v in cls:
            label[v] = k
    cross = sum(1 for u, v in local if label[u] != label[v])
    return PartitionCertificate(tuple(tuple(c) for c in classes), cross)


def is_m_tree_connected(subset: EdgeSubset, m: int) -> bool:
    _check_m(m)
    n = subset.host.n
    if n == 0:
        raise InvalidInputError("cannot pack spanning trees of the empty graph")
    host = subset.host
    local = [host.edges[e] for e in sorted(subset.members)]
    trees, _ = _pack_edges(n, local, m, decision_only=True)
    return trees is not None


def tree_connected_on(host: MultiGraph, vertices: Iterable[int], edge_ids: Iterable[int], m: int) -> bool:
    """Whether the subgraph with the given vertices and edges is m-tree-connected.

    Edges with an endpoint outside ``vertices`` are ignored.
    """
    verts = sorted(set(vertices))
    index = {v: k for k, v in enumerate(verts)}
    local = []
    for e in sorted(edge_ids):
        u, v = host.edges[e]
        if u in index and v in index:
            local.append((index[u], index[v]))
    trees, _ = _pack_edges(len(verts), local, m, decision_only=True)
    return trees is not None


def _largest_tc_subgraph(host: MultiGraph, vertices: set[int], edges: set[int], x: int, y: int, m: int):
    """Maximal m-tree-connected subgraph of (vertices, edges) containing x and y."""
    # a vertex of degree < m cannot sit in a non-trivial m-tree-connected subgraph
    verts = set(vertices)
    while True:
        deg = {v: 0 for v in verts}
        for e in edges:
            u, v = host.edges[e]
            if u in verts and v in verts:
                deg[u] += 1
                deg[v] += 1
        low = {v for v, d in deg.items() if d < m}
        if not low:
            break
        if x in low or y in low:
            return None
        verts -= low
    rest = sorted(verts - {x, y})
    for size in range(len(rest), -1, -1):
        for extra in combinations(rest, size):
            w = {x, y, *extra}
            if tree_connected_on(host, w, edges, m):
                kept = {e for e in edges if host.edges[e][0] in w and host.edges[e][1] in w}
                return w, kept
    return None


def minimal_tree_connected_subgraph(h: EdgeSubset, m: int, x: int, y: int) -> tuple[frozenset[int], EdgeSubset]:
    """Inclusion-minimal m-tree-connected subgraph of ``h`` containing ``x`` and ``y``.

    Greedy shrinking that tries to drop the highest edge ids first, so the
    survivors are the lowest-id choice. Exhaustive over vertex subsets; meant
    for small graphs.
    """
    _check_m(m)
    host = h.host
    if x == y:
        raise InvalidInputError("x and y must differ")
    if not is_m_tree_connected(h, m):
        raise PreconditionError(f"subset is not {m}-tree-connected")
    q_vertices = set(range(host.n))
    q_edges = set(h.members)
    changed = True
    while changed:
        changed = False
        for e in sorted(q_edges, reverse=True):
            found = _largest_tc_subgraph(host, q_vertices, q_edges - {e}, x, y, m)
            if found is not None:
                q_vertices, q_edges = found
                changed = True
                break
    return frozenset(q_vertices), EdgeSubset(host, frozenset(q_edges))


def find_exchange_edge(h: EdgeSubset, m: int, pivot: int, forbidden: Iterable[int], new_edge: int) -> int:
    """Lowest-id edge ``e`` of ``h`` at ``pivot`` with ``h - e + new_edge`` m-tree-connected."""
    _check_m(m)
    host = h.host
    if new_edge in h:
        raise PreconditionError(f"edge {new_edge} is already in the subset")
    if not 0 <= new_edge < host.edge_count:
        raise InvalidInputError(f"edge id {new_edge} is not valid in the host")
    if not is_m_tree_connected(h, m):
        raise PreconditionError(f"subset is not {m}-tree-connected")
    banned = set(forbidden)
    for e in h.incident(pivot):
        if e in banned:
            continue
        if is_m_tree_connected(EdgeSubset(host, (h.members - {e}) | {new_edge}), m):
            return e
    raise ExchangeNotFoundError(f"no exchange edge at vertex {pivot} for edge {new_edge}")
