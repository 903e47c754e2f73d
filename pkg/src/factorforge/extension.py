"""Extending a factor to a connected or m-tree-connected factor by edge exchanges.

Every routine here is a greedy descent: one loop iteration performs one
exchange, and each exchange strictly improves a lexicographic measure, so the
loops terminate. Each step is recorded as an :class:`ExchangeStep`.

Degree caps used throughout, with ``T`` the given tree (or m-tree-connected
factor) and ``F`` the factor being extended::

    d_F(v) <= d_H(v) <= d_T(v) + max(0, d_F(v) - m)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ExchangeNotFoundError, FactorForgeError, InvalidInputError, PreconditionError
from .factors import MatchingSelection, select_extension_matching
from .graph import (
    DegreeBounds,
    EdgeSubset,
    connected_components,
    degree_profile,
    edge_path,
    is_connected,
    is_spanning_tree,
    vertex_sequence,
)
from .packing import find_exchange_edge, is_m_tree_connected, minimal_tree_connected_subgraph


class InvariantError(FactorForgeError, AssertionError):
    """An exchange loop reached a state its correctness argument rules out."""


STEP_KINDS = (
    "remove-edge",
    "swap-in-h",
    "swap-in-t0",
    "restore-matching-edge",
    "peel-AA",
    "peel-BB",
    "t0-improve",
)


@dataclass(frozen=True)
class ExchangeStep:
    kind: str
    removed: int | None = None
    added: int | None = None
    measure_before: tuple[int, int] | None = None
    measure_after: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "removed": self.removed,
            "added": self.added,
            "measure_before": list(self.measure_before) if self.measure_before else None,
            "measure_after": list(self.measure_after) if self.measure_after else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExchangeStep":
        mb, ma = d.get("measure_before"), d.get("measure_after")
        return cls(
            d["kind"],
            d.get("removed"),
            d.get("added"),
            tuple(mb) if mb is not None else None,
            tuple(ma) if ma is not None else None,
        )


@dataclass(frozen=True)
class VertexClassification:
    """``class_a``: vertices with ``d_F <= m``; ``class_b``: the rest."""

    class_a: frozenset[int]
    class_b: frozenset[int]


def classify_vertices(f: EdgeSubset, m: int) -> VertexClassification:
    deg = degree_profile(f)
    a = frozenset(int(v) for v in np.flatnonzero(deg <= m))
    return VertexClassification(a, frozenset(range(f.host.n)) - a)


@dataclass
class ExtensionState:
    """Working pair (h, t0) of the connected extension, with its trace.

    ``h`` is a connected spanning subgraph of ``g0 = T + F`` containing every
    non-matching edge of F, and ``t0`` is a spanning tree of ``h``. Two
    conditions tie t0 to F:

    * a vertex whose h-degree has reached ``d_T + d_F`` has no t0-edge in F;
    * if a matching edge ``xy`` is missing from h, x has no t0-edge in F.
    """

    f: EdgeSubset
    t: EdgeSubset
    matching: MatchingSelection
    g0: frozenset[int]
    h: set[int]
    t0: set[int]
    trace: list[ExchangeStep] = field(default_factory=list)

    def __post_init__(self) -> None:
        host = self.f.host
        self.cap = (degree_profile(self.t) + degree_profile(self.f)).tolist()
        self.dh = [0] * host.n
        for e in self.h:
            u, v = host.edges[e]
            self.dh[u] += 1
            self.dh[v] += 1

    def measure(self) -> tuple[int, int]:
        return (len(self.h), -len(self.h & self.matching.edges))

    def saturated(self, v: int) -> bool:
        return self.dh[v] == self.cap[v]

    def drop(self, e: int) -> None:
        u, v = self.f.host.edges[e]
        self.h.remove(e)
        self.dh[u] -= 1
        self.dh[v] -= 1

    def put(self, e: int) -> None:
        u, v = self.f.host.edges[e]
        self.h.add(e)
        self.dh[u] += 1
        self.dh[v] += 1

    def tree_path(self, s: int, t: int) -> list[int]:
        return edge_path(EdgeSubset(self.f.host, frozenset(self.t0)), s, t)

    def check(self) -> None:
        """Raise :class:`InvariantError` unless the state satisfies its conditions."""
        host = self.f.host
        h = EdgeSubset(host, frozenset(self.h))
        t0 = EdgeSubset(host, frozenset(self.t0))
        if not self.h <= self.g0:
            raise InvariantError("h left T + F")
        if not self.t0 <= self.h or not is_spanning_tree(t0):
            raise InvariantError("t0 is not a spanning tree inside h")
        if not (self.f.members - self.matching.edges) <= self.h:
            raise InvariantError("h lost a non-matching edge of F")
        if self.dh != degree_profile(h).tolist():
            raise InvariantError("cached degrees are stale")
        for v in range(host.n):
            if self.saturated(v) and any(e in self.f for e in t0.incident(v)):
                raise InvariantError(f"saturated vertex {v} has a t0-edge in F")
        for e, x, _ in self.matching.pairs():
            if e not in self.h and any(e2 in self.f for e2 in t0.incident(x)):
                raise InvariantError(f"x = {x} of a missing matching edge has a t0-edge in F")


def _record(state: ExtensionState, kind: str, removed, added, before, check: bool) -> None:
    after = state.measure()
    if not after < before:
        raise InvariantError(f"{kind} step did not decrease the measure {before} -> {after}")
    state.trace.append(ExchangeStep(kind, removed, added, before, after))
    if check:
        state.check()


def _phase_a_step(state: ExtensionState, u: int, comps, comp_of, pair_of, check: bool) -> None:
    host = state.f.host
    ci = comp_of[u]
    e_xy, x, y = pair_of[ci]
    before = state.measure()
    unsaturated = [w for w in comps[ci] if not state.saturated(w)]
    if not unsaturated:
        # whole component saturated: the matching edge is in h and off t0
        if e_xy not in state.h or e_xy in state.t0:
            raise InvariantError(f"matching edge {e_xy} is not removable")
        state.drop(e_xy)
        _record(state, "remove-edge", e_xy, None, before, check)
        return
    if e_xy in state.h:
        start, banned = unsaturated[0], None
    else:
        start, banned = y, x
    path = edge_path(state.f, start, u, banned_vertex=banned)
    seq = vertex_sequence(host, start, path)
    j = next(k for k in range(1, len(seq)) if state.saturated(seq[k]))
    a, b, ab = seq[j - 1], seq[j], path[j - 1]
    if ab not in state.h or ab in state.t0:
        raise InvariantError(f"edge {ab} at saturated vertex {b} is not an h-edge off t0")
    bc = state.tree_path(a, b)[-1]
    state.drop(bc)
    state.t0.discard(bc)
    state.t0.add(ab)
    _record(state, "swap-in-t0", bc, ab, before, check)


def _phase_b_step(state: ExtensionState, u: int, check: bool) -> None:
    host = state.f.host
    for e_xy, x, y in state.matching.pairs():
        if e_xy not in state.h and u in (x, y):
            break
    else:
        raise InvariantError(f"vertex {u} is below d_F but no missing matching edge meets it")
    if u != y:
        raise InvariantError(f"designated endpoint {x} fell below its F-degree")
    before = state.measure()
    xz = state.tree_path(y, x)[-1]
    if xz in state.f or host.other(xz, x) == y:
        raise InvariantError(f"tree edge {xz} at {x} cannot be exchanged for {e_xy}")
    state.drop(xz)
    state.t0.discard(xz)
    state.put(e_xy)
    state.t0.add(e_xy)
    _record(state, "restore-matching-edge", xz, e_xy, before, check)


def connected_extend(
    f: EdgeSubset,
    matching: MatchingSelection,
    t: EdgeSubset,
    check_invariants: bool = False,
) -> tuple[EdgeSubset, list[ExchangeStep]]:
    """Extend ``F - M`` to a connected factor H with ``d_F <= d_H <= d_T + max(0, d_F - 1)``.

    Starts from ``(T + F, T)`` and first deletes edges at saturated vertices
    (each step removes one edge), then re-inserts missing matching edges at
    vertices below their F-degree, swapping out a tree edge each time.
    """
    host = f.host
    if t.host != host:
        raise InvalidInputError("factor and tree live on different hosts")
    if not is_spanning_tree(t):
        raise PreconditionError("T is not a spanning tree of the host")
    matching.validate(f)
    if host.n <= 1:
        return host.empty(), []

    state = ExtensionState(
        f, t, matching, frozenset(t.members | f.members), set(t.members | f.members), set(t.members)
    )
    if check_invariants:
        state.check()
    d_f = degree_profile(f).tolist()
    comps = [c for c in connected_components(f) if len(c) > 1]
    comp_of = {v: ci for ci, c in enumerate(comps) for v in c}
    pair_of = {}
    for e, x, y in matching.pairs():
        pair_of[comp_of[x]] = (e, x, y)

    while True:
        u = next((v for v in range(host.n) if d_f[v] > 0 and state.saturated(v)), None)
        if u is None:
            break
        _phase_a_step(state, u, comps, comp_of, pair_of, check_invariants)
    while True:
        u = next((v for v in range(host.n) if state.dh[v] < d_f[v]), None)
        if u is None:
            break
        _phase_b_step(state, u, check_invariants)
    if check_invariants and any(d_f[v] > 0 and state.saturated(v) for v in range(host.n)):
        raise InvariantError("restoring matching edges re-saturated a vertex")

    h = EdgeSubset(host, frozenset(state.h))
    _verify(h, f, t, 1, containment=f - EdgeSubset(host, matching.edges))
    return h, state.trace


def _verify(h: EdgeSubset, f: EdgeSubset, t: EdgeSubset, m: int, containment: EdgeSubset | None) -> None:
    """Post-hoc check of an extension result, independent of how it was built."""
    d_h, d_f, d_t = degree_profile(h), degree_profile(f), degree_profile(t)
    upper = d_t + np.maximum(0, d_f - m)
    bad = np.flatnonzero((d_h < d_f) | (d_h > upper))
    if bad.size:
        v = int(bad[0])
        raise InvariantError(f"vertex {v}: d_H = {d_h[v]} outside [{d_f[v]}, {upper[v]}]")
    if containment is not None and not containment.members <= h.members:
        raise InvariantError("result does not contain the required edges")
    ok = is_connected(h) if m == 1 else is_m_tree_connected(h, m)
    if not ok:
        raise InvariantError(f"result is not {m}-tree-connected")


def extend_with_matching_tree(f: EdgeSubset, matching: MatchingSelection, t: EdgeSubset) -> tuple[EdgeSubset, list[ExchangeStep]]:
    """Connected extension followed by adding the matching back; needs ``M`` inside ``T``."""
    missing = sorted(matching.edges - t.members)
    if missing:
        raise PreconditionError(f"matching edge {missing[0]} is not in the tree")
    h0, trace = connected_extend(f, matching, t)
    h = h0 | EdgeSubset(f.host, matching.edges)
    if not f.members <= h.members or not is_connected(h):
        raise InvariantError("matching-tree extension lost F or connectivity")
    d_h, d_f, d_t = degree_profile(h), degree_profile(f), degree_profile(t)
    met = np.zeros(f.host.n, dtype=bool)
    for e in matching.edges:
        met[list(f.host.edges[e])] = True
    upper = np.where(met, d_t + d_f - 1, d_t + np.maximum(0, d_f - 1))
    if np.any(d_h > upper):
        raise InvariantError("matching-tree extension broke a degree cap")
    return h, trace


def _bounds_f_prime(bounds: DegreeBounds, t: EdgeSubset) -> tuple[int, ...]:
    if bounds.f_prime is not None:
        return bounds.f_prime
    return tuple(int(x) for x in degree_profile(t))


def _check_factor(f: EdgeSubset, bounds: DegreeBounds) -> None:
    if bounds.n != f.host.n:
        raise InvalidInputError(f"degree bounds have length {bounds.n}, host has {f.host.n} vertices")
    d_f = degree_profile(f)
    for v in range(f.host.n):
        if not bounds.g[v] <= d_f[v] <= bounds.f[v]:
            raise PreconditionError(
                f"F is not a (g,f)-factor at vertex {v}: d_F = {d_f[v]}, g = {bounds.g[v]}, f = {bounds.f[v]}"
            )


def connected_factor_via_tree(
    f: EdgeSubset, t: EdgeSubset, bounds: DegreeBounds, trace: list | None = None
) -> EdgeSubset:
    """Connected ``(g, f + f' - 1)``-factor from a (g,f)-factor and a spanning f'-tree."""
    _check_factor(f, bounds)
    if not is_spanning_tree(t):
        raise PreconditionError("T is not a spanning tree of the host")
    f_prime = _bounds_f_prime(bounds, t)
    d_t = degree_profile(t)
    for v in range(f.host.n):
        if d_t[v] > f_prime[v]:
            raise PreconditionError(f"T is not an f'-tree at vertex {v}: d_T = {d_t[v]}, f' = {f_prime[v]}")
        if bounds.f[v] < 1 or f_prime[v] < 1:
            raise PreconditionError(f"f and f' must be positive; vertex {v} has f = {bounds.f[v]}, f' = {f_prime[v]}")
    h, steps = connected_extend(f, select_extension_matching(f), t)
    if trace is not None:
        trace.extend(steps)
    d_h = degree_profile(h)
    for v in range(f.host.n):
        if not bounds.g[v] <= d_h[v] <= bounds.f[v] + f_prime[v] - 1:
            raise InvariantError(f"vertex {v}: d_H = {d_h[v]} outside the (g, f + f' - 1) window")
    return h


def _exchange(
    h: set[int],
    host,
    m: int,
    pivot: int,
    forbidden: frozenset[int],
    new_edge: int,
    use_minimal_q: bool,
) -> int:
    sub = EdgeSubset(host, frozenset(h))
    try:
        if not use_minimal_q:
            return find_exchange_edge(sub, m, pivot, forbidden, new_edge)
        _, q = minimal_tree_connected_subgraph(sub, m, pivot, host.other(new_edge, pivot))
        cands = [e for e in q.incident(pivot) if e not in forbidden]
    except ExchangeNotFoundError as exc:
        raise InvariantError(str(exc)) from exc
    if not cands:
        raise InvariantError(f"minimal subgraph has no free edge at {pivot}")
    e = cands[0]
    if not is_m_tree_connected(EdgeSubset(host, frozenset((h - {e}) | {new_edge})), m):
        raise InvariantError(f"swapping {e} for {new_edge} broke {m}-tree-connectivity")
    return e


def tree_connected_extend_bipartite(
    f: EdgeSubset,
    t: EdgeSubset,
    m_matching: EdgeSubset,
    m: int,
    trace: list | None = None,
    use_minimal_q: bool = False,
) -> EdgeSubset:
    """m-tree-connected H containing ``F - M`` with ``d_F <= d_H <= d_T + max(0, d_F - m)``.

    Requires every edge of ``F - T`` to join ``{d_F <= m}`` to ``{d_F > m}``.
    First rotates F-edges at low-degree vertices into a copy of T, then adds
    the rest of ``F - M`` and re-inserts M-edges at vertices still below
    their F-degree.
    """
    host = f.host
    n = host.n
    if not is_m_tree_connected(t, m):
        raise PreconditionError(f"T is not {m}-tree-connected")
    cls = classify_vertices(f, m)
    a_side = cls.class_a
    for e in sorted(f.members - t.members):
        u, v = host.edges[e]
        if (u in a_side) == (v in a_side):
            side = "A" if u in a_side else "B"
            raise PreconditionError(f"edge {e} = ({u}, {v}) of F - T has both ends in {side}")
    stray = sorted(m_matching.members - (f.members - t.members))
    if stray:
        raise PreconditionError(f"edge {stray[0]} of M is not in F - T")
    d_m = degree_profile(m_matching)
    d_ft = degree_profile(f & t)
    for v in sorted(cls.class_b):
        if d_m[v] + d_ft[v] < m:
            raise PreconditionError(f"vertex {v} in B has d_M + d_(F&T) = {d_m[v] + d_ft[v]} < m = {m}")
    if n <= 1:
        return host.empty()
    steps = trace if trace is not None else []

    f_ids = frozenset(f.members)
    m_ids = frozenset(m_matching.members)
    f_rest = f_ids - m_ids
    t0 = set(t.members)
    while True:
        todo = [
            e for e in sorted(f_rest - t0) if host.edges[e][0] in a_side or host.edges[e][1] in a_side
        ]
        if not todo:
            break
        vx = todo[0]
        u, w = host.edges[vx]
        v = u if u in a_side else w
        before = (len(t0), -len(t0 & f_ids))
        vy = _exchange(t0, host, m, v, f_ids, vx, use_minimal_q)
        t0.discard(vy)
        t0.add(vx)
        after = (len(t0), -len(t0 & f_ids))
        if not after < before:
            raise InvariantError("t0 did not gain an F-edge")
        steps.append(ExchangeStep("t0-improve", vy, vx, before, after))

    h = t0 | f_rest
    d_f = degree_profile(f).tolist()
    d_h = degree_profile(EdgeSubset(host, frozenset(h))).tolist()
    while True:
        x = next((v for v in range(n) if d_h[v] < d_f[v]), None)
        if x is None:
            break
        if x in a_side:
            raise InvariantError(f"vertex {x} with d_F <= m fell below its F-degree")
        vx = next(e for e in host.incident[x] if e in m_ids and e not in h)
        v = host.other(vx, x)
        before = (len(h), -len(h & m_ids))
        vy = _exchange(h, host, m, v, f_ids, vx, use_minimal_q)
        h.discard(vy)
        h.add(vx)
        for e, sign in ((vy, -1), (vx, 1)):
            p, q = host.edges[e]
            d_h[p] += sign
            d_h[q] += sign
        after = (len(h), -len(h & m_ids))
        if not after < before:
            raise InvariantError("h did not gain an M-edge")
        steps.append(ExchangeStep("swap-in-h", vy, vx, before, after))

    out = EdgeSubset(host, frozenset(h))
    _verify(out, f, t, m, containment=f - m_matching)
    return out


def tree_connected_extend(
    f: EdgeSubset,
    t: EdgeSubset,
    m: int,
    trace: list | None = None,
    use_minimal_q: bool = False,
) -> EdgeSubset:
    """m-tree-connected H with ``d_F <= d_H <= d_T + max(0, d_F - m)`` for any factor F.

    Peels edges of ``F - T`` lying inside ``{d_F <= m}`` (dropped) or inside
    ``{d_F > m}`` (set aside and added back at the end) until ``F - T`` is
    bipartite between the two classes, then runs the bipartite extension.
    """
    host = f.host
    if not is_m_tree_connected(t, m):
        raise PreconditionError(f"T is not {m}-tree-connected")
    if host.n <= 1:
        return host.empty()
    if not f.members:
        return t
    steps = trace if trace is not None else []
    current = set(f.members)
    set_aside: list[int] = []
    while True:
        deg = degree_profile(EdgeSubset(host, frozenset(current)))
        low = deg <= m
        outside = sorted(current - t.members)
        pick = next((e for e in outside if low[host.edges[e][0]] and low[host.edges[e][1]]), None)
        kind = "peel-AA"
        if pick is None:
            pick = next((e for e in outside if not low[host.edges[e][0]] and not low[host.edges[e][1]]), None)
            kind = "peel-BB"
        if pick is None:
            break
        current.discard(pick)
        if kind == "peel-BB":
            set_aside.append(pick)
        steps.append(ExchangeStep(kind, pick, None, None, None))

    f_core = EdgeSubset(host, frozenset(current))
    h = tree_connected_extend_bipartite(f_core, t, f_core - t, m, steps, use_minimal_q)
    out = h | EdgeSubset(host, frozenset(set_aside))
    _verify(out, f, t, m, containment=None)
    return out


def tree_connected_factor(
    f: EdgeSubset,
    t: EdgeSubset,
    bounds: DegreeBounds,
    m: int,
    trace: list | None = None,
) -> EdgeSubset:
    """m-tree-connected ``(g, f + f' - m)``-factor from a (g,f)-factor and an m-tree-connected (m,f')-factor."""
    if int(m) != m or m < 1:
        raise InvalidInputError(f"m must be a positive integer, got {m!r}")
    _check_factor(f, bounds)
    f_prime = _bounds_f_prime(bounds, t)
    d_t = degree_profile(t)
    for v in range(f.host.n):
        if m > bounds.f[v]:
            raise PreconditionError(f"m = {m} exceeds f({v}) = {bounds.f[v]}")
        if m > f_prime[v]:
            raise PreconditionError(f"m = {m} exceeds f'({v}) = {f_prime[v]}")
        if d_t[v] > f_prime[v]:
            raise PreconditionError(f"d_T({v}) = {d_t[v]} exceeds f'({v}) = {f_prime[v]}")
    if not is_m_tree_connected(t, m):
        raise PreconditionError(f"T is not {m}-tree-connected")
    h = tree_connected_extend(f, t, m, trace)
    d_h = degree_profile(h)
    for v in range(f.host.n):
        if not bounds.g[v] <= d_h[v] <= bounds.f[v] + f_prime[v] - m:
            raise InvariantError(f"vertex {v}: d_H = {d_h[v]} outside the (g, f + f' - m) window")
    return h


def trace_within_budget(trace: Iterable[ExchangeStep], g0_size: int, matching_size: int) -> bool:
    """Step count bound ``|E(T + F)| + |M|`` and strict decrease of every recorded measure."""
    steps = list(trace)
    if len(steps) > g0_size + matching_size:
        return False
    return all(s.measure_after < s.measure_before for s in steps if s.measure_before is not None)
