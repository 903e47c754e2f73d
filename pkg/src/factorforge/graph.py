"""Host multigraph and edge-id subsets of it.

Every graph the algorithms touch (a factor, a tree, a matching, the union
``T + F`` ...) is an :class:`EdgeSubset` of one shared :class:`MultiGraph`.
Parallel edges are distinct ids, so unions and differences identify shared
edges exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidInputError, PreconditionError


class MultiGraph:
    """Loopless undirected multigraph on vertices ``0..n-1``.

    Edge ids are positions in ``edges``. Instances are treated as immutable.
    """

    __slots__ = ("n", "edges", "eu", "ev", "incident")

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        if n < 0:
            raise InvalidInputError(f"vertex count must be nonnegative, got {n}")
        pairs = []
        for eid, e in enumerate(edges):
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInputError(f"edge {eid} = ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise InvalidInputError(f"edge {eid} = ({u}, {v}) is a loop")
            pairs.append((u, v))
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(pairs)
        self.eu = np.array([p[0] for p in pairs], dtype=np.int64)
        self.ev = np.array([p[1] for p in pairs], dtype=np.int64)
        inc: list[list[int]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(pairs):
            inc[u].append(eid)
            inc[v].append(eid)
        self.incident: tuple[tuple[int, ...], ...] = tuple(tuple(x) for x in inc)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def other(self, eid: int, v: int) -> int:
        u, w = self.edges[eid]
        return w if u == v else u

    def all_edges(self) -> "EdgeSubset":
        return EdgeSubset(self, frozenset(range(len(self.edges))))

    def empty(self) -> "EdgeSubset":
        return EdgeSubset(self, frozenset())

    def subset(self, ids: Iterable[int]) -> "EdgeSubset":
        return EdgeSubset(self, frozenset(int(i) for i in ids))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, edges={list(self.edges)})"


@dataclass(frozen=True)
class EdgeSubset:
    """Spanning subgraph of ``host`` given by a set of edge ids."""

    host: MultiGraph = field(repr=False)
    members: frozenset[int]

    def __post_init__(self) -> None:
        if not isinstance(self.members, frozenset):
            object.__setattr__(self, "members", frozenset(self.members))
        m = self.host.edge_count
        for eid in self.members:
            if not 0 <= eid < m:
                raise InvalidInputError(f"edge id {eid} is not valid in a host with {m} edges")

    def __contains__(self, eid: object) -> bool:
        return eid in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def ids(self) -> list[int]:
        return sorted(self.members)

    def _same_host(self, other: "EdgeSubset") -> None:
        if other.host is not self.host and other.host != self.host:
            raise InvalidInputError("edge subsets belong to different hosts")

    def __or__(self, other: "EdgeSubset") -> "EdgeSubset":
        self._same_host(other)
        return EdgeSubset(self.host, self.members | other.members)

    def __and__(self, other: "EdgeSubset") -> "EdgeSubset":
        self._same_host(other)
        return EdgeSubset(self.host, self.members & other.members)

    def __sub__(self, other: "EdgeSubset") -> "EdgeSubset":
        self._same_host(other)
        return EdgeSubset(self.host, self.members - other.members)

    def add(self, eid: int) -> "EdgeSubset":
        return EdgeSubset(self.host, self.members | {eid})

    def remove(self, eid: int) -> "EdgeSubset":
        return EdgeSubset(self.host, self.members - {eid})

    def incident(self, v: int) -> list[int]:
        """Member edges at ``v`` in increasing id order."""
        return [e for e in self.host.incident[v] if e in self.members]


@dataclass(frozen=True)
class DegreeBounds:
    """Per-vertex degree functions ``g``, ``f`` and optionally ``f'``."""

    g: tuple[int, ...]
    f: tuple[int, ...]
    f_prime: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        for name in ("g", "f", "f_prime"):
            vec = getattr(self, name)
            if vec is None:
                continue
            vec = tuple(int(x) for x in vec)
            object.__setattr__(self, name, vec)
            if any(x < 0 for x in vec):
                raise InvalidInputError(f"{name} has a negative entry")
        if len(self.g) != len(self.f):
            raise InvalidInputError("g and f have different lengths")
        if self.f_prime is not None and len(self.f_prime) != len(self.f):
            raise InvalidInputError("f_prime and f have different lengths")
        for v, (lo, hi) in enumerate(zip(self.g, self.f)):
            if lo > hi:
                raise InvalidInputError(f"g({v}) = {lo} exceeds f({v}) = {hi}")

    @property
    def n(self) -> int:
        return len(self.f)


def degree_profile(subset: EdgeSubset) -> np.ndarray:
    """Degree of every host vertex in ``subset``; parallel edges count once per id."""
    host = subset.host
    deg = np.zeros(host.n, dtype=np.int64)
    if subset.members:
        ids = np.fromiter(subset.members, dtype=np.int64, count=len(subset.members))
        np.add.at(deg, host.eu[ids], 1)
        np.add.at(deg, host.ev[ids], 1)
    return deg


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def connected_components(subset: EdgeSubset) -> list[list[int]]:
    """Vertex classes under member edges, each sorted, ordered by smallest vertex."""
    host = subset.host
    dsu = _DisjointSet(host.n)
    for eid in subset.members:
        u, v = host.edges[eid]
        dsu.union(u, v)
    classes: dict[int, list[int]] = {}
    for v in range(host.n):
        classes.setdefault(dsu.find(v), []).append(v)
    return sorted(classes.values(), key=lambda c: c[0])


def is_connected(subset: EdgeSubset) -> bool:
    return len(connected_components(subset)) <= 1


def is_spanning_tree(subset: EdgeSubset) -> bool:
    n = subset.host.n
    if n == 0:
        return False
    return len(subset) == n - 1 and is_connected(subset)


def cut_vertices(subset: EdgeSubset) -> set[int]:
    """Articulation points of ``subset``, computed per component.

    Isolated vertices are never cut vertices. Parallel edges are handled by
    skipping only the tree edge's own id when looking back at the parent.
    """
    host = subset.host
    n = host.n
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for eid in sorted(subset.members):
        u, v = host.edges[eid]
        adj[u].append((v, eid))
        adj[v].append((u, eid))

    disc = [-1] * n
    low = [0] * n
    result: set[int] = set()
    timer = 0
    for root in range(n):
        if disc[root] != -1 or not adj[root]:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        # frame: (vertex, parent edge id, next adjacency index)
        stack = [[root, -1, 0]]
        while stack:
            frame = stack[-1]
            v, pe, i = frame
            if i < len(adj[v]):
                frame[2] += 1
                w, eid = adj[v][i]
                if eid == pe:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    if v == root:
                        root_children += 1
                    stack.append([w, eid, 0])
                else:
                    low[v] = min(low[v], disc[w])
            else:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if parent != root and low[v] >= disc[parent]:
                        result.add(parent)
        if root_children > 1:
            result.add(root)
    return result


def spanning_tree_of_component(subset: EdgeSubset, component: Iterable[int]) -> EdgeSubset:
    """Lowest-id greedy spanning tree of one component of ``subset``."""
    host = subset.host
    comp = set(component)
    dsu = _DisjointSet(host.n)
    chosen = []
    for eid in sorted(subset.members):
        u, v = host.edges[eid]
        if u in comp and v in comp and dsu.union(u, v):
            chosen.append(eid)
    if len(chosen) != len(comp) - 1:
        raise PreconditionError(f"vertex set {sorted(comp)} is not connected under the subset")
    for eid in subset.members:
        u, v = host.edges[eid]
        if (u in comp) != (v in comp):
            raise PreconditionError(f"vertex set {sorted(comp)} is not a component: edge {eid} leaves it")
    return EdgeSubset(host, frozenset(chosen))


def edge_path(subset: EdgeSubset, source: int, target: int, banned_vertex: int | None = None) -> list[int]:
    """Edge ids of a shortest ``source``-``target`` path using member edges.

    BFS with neighbours scanned in increasing edge id, so the path is
    deterministic. Raises :class:`PreconditionError` if none exists.
    """
    host = subset.host
    if source == target:
        return []
    prev: dict[int, tuple[int, int]] = {source: (-1, -1)}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for eid in host.incident[v]:
            if eid not in subset.members:
                continue
            w = host.other(eid, v)
            if w in prev or w == banned_vertex:
                continue
            prev[w] = (v, eid)
            if w == target:
                path = []
                while w != source:
                    w, e = prev[w]
                    path.append(e)
                path.reverse()
                return path
            queue.append(w)
    raise PreconditionError(f"no path from {source} to {target}")


def vertex_sequence(host: MultiGraph, source: int, path: Sequence[int]) -> list[int]:
    """Vertices visited by an edge path starting at ``source``."""
    seq = [source]
    for eid in path:
        seq.append(host.other(eid, seq[-1]))
    return seq
