"""Exhaustive oracles, instance generators and the solution checker.

Nothing here calls the exchange algorithms. Tree-connectivity is decided by
partition enumeration and plain connectivity by union-find over bitmasks,
so the oracles stay independent of the packer they are used to check.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import CapacityError, InvalidInputError
from .extension import ExchangeStep, trace_within_budget
from .factors import MatchingSelection, designate_matching, select_extension_matching
from .graph import EdgeSubset, MultiGraph, connected_components, degree_profile, is_spanning_tree
from .instance import Instance
from .packing import PartitionCertificate, TreePacking, pack_spanning_trees

PARTITION_VERTEX_CAP = 12
FEASIBLE_SET_EDGE_CAP = 18

MODES = ("connected", "matching-tree", "tree-connected-bipartite", "tree-connected")
TAGS = (
    "connected",
    "matching-tree",
    "connected-factor",
    "tree-connected-bipartite",
    "tree-connected",
    "tree-connected-factor",
)
MODELS = ("planted-tree-factor", "two-ham-paths", "random-multi")


def _endpoint_arrays(host: MultiGraph, ids: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    ids = np.array(sorted(ids), dtype=np.int64)
    return host.eu[ids], host.ev[ids]


def enumerate_violating_partition(subset: EdgeSubset, m: int, cap: int = PARTITION_VERTEX_CAP) -> PartitionCertificate | None:
    """Most violating partition by exhaustive search; ``None`` iff m-tree-connected.

    Among partitions with the largest deficit ``m(|P|-1) - cross`` the
    lexicographically first restricted-growth labelling wins.
    """
    n = subset.host.n
    if n > cap:
        raise CapacityError(f"partition enumeration is capped at {cap} vertices, got {n}")
    if m < 1:
        raise InvalidInputError("m must be positive")
    eu, ev = _endpoint_arrays(subset.host, subset.members)
    labels = _kernels.best_violating_partition(n, eu, ev, m)
    if labels is None:
        return None
    classes: dict[int, list[int]] = {}
    for v, lab in enumerate(labels.tolist()):
        classes.setdefault(lab, []).append(v)
    cross = int(np.count_nonzero(labels[eu] != labels[ev]))
    return PartitionCertificate(tuple(tuple(c) for c in classes.values()), cross)


def _m_tc_by_partitions(host: MultiGraph, ids: Iterable[int], m: int) -> bool:
    eu, ev = _endpoint_arrays(host, ids)
    return _kernels.best_violating_partition(host.n, eu, ev, m) is None


def brute_force_feasible_set(
    host: MultiGraph,
    f: EdgeSubset,
    t: EdgeSubset,
    m: int = 1,
    mode: str = "connected",
    matching: Iterable[int] | None = None,
    cap: int = FEASIBLE_SET_EDGE_CAP,
) -> list[EdgeSubset]:
    """Every spanning subgraph of ``host`` meeting the selected extension conclusion.

    Modes: ``connected`` and ``matching-tree`` (m = 1), ``tree-connected``
    and ``tree-connected-bipartite``. The result is sorted by bitmask.
    """
    if mode not in MODES:
        raise InvalidInputError(f"unknown mode {mode!r}; expected one of {MODES}")
    ne = host.edge_count
    if ne > cap:
        raise CapacityError(f"feasible-set enumeration is capped at {cap} edges, got {ne}")
    m_ids = set(matching or ())
    d_f, d_t = degree_profile(f), degree_profile(t)
    k = 1 if mode in ("connected", "matching-tree") else m
    lower = d_f
    upper = d_t + np.maximum(0, d_f - k)
    if mode == "matching-tree":
        met = np.zeros(host.n, dtype=bool)
        for e in m_ids:
            met[list(host.edges[e])] = True
        upper = np.where(met, d_t + d_f - 1, upper)
        required = set(f.members)
    elif mode == "tree-connected":
        required = set()
    else:
        required = set(f.members) - m_ids
    req_mask = sum(1 << e for e in required)
    masks = _kernels.feasible_masks(host.n, host.eu, host.ev, lower, upper, req_mask)
    if k == 1:
        masks = masks[_kernels.connected_mask_filter(host.n, host.eu, host.ev, masks)]
    out = []
    for mask in masks.tolist():
        ids = [e for e in range(ne) if (mask >> e) & 1]
        if k == 1 or _m_tc_by_partitions(host, ids, k):
            out.append(EdgeSubset(host, frozenset(ids)))
    return out


def local_edge_connectivity(subset: EdgeSubset, s: int, t: int, limit: int | None = None) -> int:
    """Number of edge-disjoint s-t paths (unit-capacity augmenting paths)."""
    host = subset.host
    # each undirected edge is two opposite arcs of capacity one
    flow: dict[tuple[int, int], int] = {}
    for e in subset.members:
        flow[(e, 0)] = 0
        flow[(e, 1)] = 0
    value = 0
    while limit is None or value < limit:
        prev: dict[int, tuple[int, int] | None] = {s: None}
        queue = deque([s])
        while queue and t not in prev:
            v = queue.popleft()
            for e in host.incident[v]:
                if e not in subset.members:
                    continue
                u, w = host.edges[e]
                d = 0 if v == u else 1
                nxt = w if d == 0 else u
                # residual: forward arc unused, or reverse arc carrying flow
                if nxt not in prev and (flow[(e, d)] == 0 or flow[(e, 1 - d)] == 1):
                    prev[nxt] = (e, d)
                    queue.append(nxt)
        if t not in prev:
            break
        v = t
        while prev[v] is not None:
            e, d = prev[v]
            if flow[(e, 1 - d)] == 1:
                flow[(e, 1 - d)] = 0
            else:
                flow[(e, d)] = 1
            u, w = host.edges[e]
            v = u if d == 0 else w
        value += 1
    return value


def edge_connectivity_at_least(subset: EdgeSubset, k: int) -> bool:
    """Whether every single-edge cut and every vertex pair admits ``k`` edge-disjoint paths."""
    host = subset.host
    if host.n <= 1:
        return True
    if len(connected_components(subset)) > 1:
        return False
    if k >= 2:
        for e in subset.members:
            if len(connected_components(subset.remove(e))) > 1:
                return False
    for s in range(host.n):
        for t in range(s + 1, host.n):
            if local_edge_connectivity(subset, s, t, limit=k) < k:
                return False
    return True


# ---------------------------------------------------------------- generators


def _random_tree(rng: np.random.Generator, n: int) -> list[tuple[int, int]]:
    order = rng.permutation(n)
    return [(int(order[rng.integers(0, i)]), int(order[i])) for i in range(1, n)]


def _ham_path(rng: np.random.Generator, n: int) -> list[tuple[int, int]]:
    order = rng.permutation(n)
    return [(int(order[i]), int(order[i + 1])) for i in range(n - 1)]


def _key(p: tuple[int, int]) -> tuple[int, int]:
    return (p[0], p[1]) if p[0] < p[1] else (p[1], p[0])


def generate_planted_instance(
    seed: int,
    n: int,
    model: str = "planted-tree-factor",
    m: int = 1,
    multiplicity: int = 2,
) -> Instance:
    """Random instance with a planted m-tree-connected ``tree_factor`` and a ``factor``.

    ``g``, ``f`` and ``f_prime`` are drawn so that the factor is a
    (g,f)-factor, ``tree_factor`` is an (m,f')-factor and ``m <= f``.
    ``two-ham-paths`` always plants two edge-disjoint Hamiltonian paths
    (m = 2) and keeps ``f_prime`` equal to their degree, at most 4.
    """
    if n < 2:
        raise InvalidInputError(f"n must be at least 2, got {n}")
    if model not in MODELS:
        raise InvalidInputError(f"unknown model {model!r}; expected one of {MODELS}")
    if m < 1:
        raise InvalidInputError("m must be positive")
    rng = np.random.default_rng(seed)
    if model == "two-ham-paths":
        m = 2
    mult_cap = 3 if model == "random-multi" else multiplicity
    mult_cap = max(mult_cap, m)

    pairs: list[tuple[int, int]] = []
    count: dict[tuple[int, int], int] = {}
    roles: list[str] = []

    def add(p: tuple[int, int], role: str) -> bool:
        k = _key(p)
        if count.get(k, 0) >= mult_cap:
            return False
        count[k] = count.get(k, 0) + 1
        pairs.append(p)
        roles.append(role)
        return True

    if model == "two-ham-paths":
        first = _ham_path(rng, n)
        second = _ham_path(rng, n)
        for _ in range(64):
            if not {_key(p) for p in first} & {_key(p) for p in second}:
                break
            second = _ham_path(rng, n)
        trees = [first, second]
    else:
        trees = [_random_tree(rng, n) for _ in range(m)]
    for tree in trees:
        for p in tree:
            add(p, "T")

    # factor edges: some reuse tree edges, the rest are new host edges
    tree_idx = list(range(len(pairs)))
    in_f = [False] * len(pairs)
    target = int(rng.integers(0, 2 * n + 1))
    for _ in range(target):
        if tree_idx and rng.random() < 0.3:
            in_f[int(rng.choice(tree_idx))] = True
            continue
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        if add((u, v), "F"):
            in_f.append(True)
    extra = int(rng.integers(0, n + 1)) if model != "random-multi" else int(rng.integers(n, 2 * n + 1))
    for _ in range(extra):
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        if add((u, v), "X"):
            in_f.append(False)

    perm = rng.permutation(len(pairs))
    new_id = {int(old): new for new, old in enumerate(perm)}
    edges = [pairs[int(old)] for old in perm]
    host = MultiGraph(n, edges)
    tree_ids = tuple(sorted(new_id[i] for i, r in enumerate(roles) if r == "T"))
    factor_ids = tuple(sorted(new_id[i] for i, flag in enumerate(in_f) if flag))

    d_f = degree_profile(host.subset(factor_ids))
    d_t = degree_profile(host.subset(tree_ids))
    g = [int(rng.integers(0, d + 1)) for d in d_f]
    f = [max(int(d), m, 1) + int(rng.integers(0, 2)) for d in d_f]
    if model == "two-ham-paths":
        f_prime = [int(d) for d in d_t]
    else:
        f_prime = [int(d) + int(rng.integers(0, 2)) for d in d_t]
    return Instance(host, m, tuple(g), tuple(f), tuple(f_prime), factor_ids, tree_ids, None)


# ---------------------------------------------------------------- checker


@dataclass
class VerificationReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "checks": [{"name": n, "pass": ok, "detail": d} for n, ok, d in self.checks],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        rep = cls([(c["name"], c["pass"], c["detail"]) for c in d["checks"]])
        if rep.overall != d["overall"]:
            raise InvalidInputError("verification 'overall' disagrees with its checks")
        return rep


def _window_check(report: VerificationReport, name: str, d_h, lower, upper) -> None:
    bad = np.flatnonzero((d_h < lower) | (d_h > upper))
    if bad.size:
        v = int(bad[0])
        report.add(name, False, f"vertex {v}: d_H = {d_h[v]} not in [{lower[v]}, {upper[v]}]")
    else:
        report.add(name, True, "")


def resolve_matching(instance: Instance, matching: MatchingSelection | None = None) -> MatchingSelection:
    if matching is not None:
        return matching
    f = instance.factor_subset
    if instance.matching is not None:
        return designate_matching(f, instance.matching)
    return select_extension_matching(f)


def check_solution(
    instance: Instance,
    h: EdgeSubset,
    tag: str,
    matching: MatchingSelection | None = None,
    trace: list[ExchangeStep] | None = None,
) -> VerificationReport:
    """Re-check an extension result against the conclusion named by ``tag``."""
    if tag not in TAGS:
        raise InvalidInputError(f"unknown theorem tag {tag!r}; expected one of {TAGS}")
    host = instance.host
    if h.host != host:
        raise InvalidInputError("result is not a subset of the instance host")
    report = VerificationReport()
    f = instance.factor_subset
    t = instance.tree_subset
    m = 1 if tag in ("connected", "matching-tree", "connected-factor") else int(instance.m or 1)
    d_h, d_f, d_t = degree_profile(h), degree_profile(f), degree_profile(t)

    if m == 1:
        report.add("connected", len(connected_components(h)) == 1, "")
    else:
        witness = pack_spanning_trees(h, m)
        ok = isinstance(witness, TreePacking)
        if ok:
            try:
                witness.validate(host)
            except AssertionError as exc:
                ok = False
                report.add(f"{m}-tree-connected", False, f"invalid packing: {exc}")
        if ok or not isinstance(witness, TreePacking):
            report.add(f"{m}-tree-connected", ok, "" if ok else f"refuted by partition {witness.partition}")

    sel = resolve_matching(instance, matching) if tag in ("connected", "matching-tree") else None
    if tag in ("connected", "matching-tree", "connected-factor"):
        report.add("tree is spanning", is_spanning_tree(t), "")
    if tag == "tree-connected-bipartite":
        m_edges = instance.matching_subset
        keep = f - m_edges
    elif tag == "connected":
        keep = f - EdgeSubset(host, sel.edges)
    elif tag == "matching-tree":
        keep = f
    else:
        keep = None
    if keep is not None:
        missing = sorted(keep.members - h.members)
        report.add("containment", not missing, f"missing edges {missing}" if missing else "")

    upper = d_t + np.maximum(0, d_f - m)
    if tag == "matching-tree":
        met = np.zeros(host.n, dtype=bool)
        for e in sel.edges:
            met[list(host.edges[e])] = True
        upper = np.where(met, d_t + d_f - 1, upper)
    _window_check(report, "degree window", d_h, d_f, upper)

    if tag in ("connected-factor", "tree-connected-factor"):
        b = instance.bounds()
        f_prime = np.array(b.f_prime) if b.f_prime is not None else d_t
        _window_check(report, "(g, f+f'-m) window", d_h, np.array(b.g), np.array(b.f) + f_prime - m)

    if trace is not None:
        g0 = len(f.members | t.members)
        if tag == "connected":
            m_size = len(sel.edges)
        elif tag == "tree-connected-bipartite":
            m_size = len(instance.matching or ())
        else:
            # M is what remains of F - T after peeling
            peels = sum(1 for s in trace if s.kind.startswith("peel"))
            m_size = len(f.members - t.members) - peels
        report.add("trace budget", trace_within_budget(trace, g0, m_size), f"{len(trace)} steps")
    return report
