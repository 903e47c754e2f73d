"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with counts and wall time,
then asserts. Run ``pytest tests/test_acceptance.py -s`` to see only these.
"""

import json
import subprocess
import sys
import time
from itertools import combinations

import numpy as np
import pytest

from factorforge.cli import run_command
from factorforge.extension import connected_extend, tree_connected_factor
from factorforge.factors import designate_matching, find_gf_factor, select_extension_matching
from factorforge.graph import DegreeBounds, MultiGraph, degree_profile
from factorforge.instance import Instance
from factorforge.oracle import (
    brute_force_feasible_set,
    check_solution,
    edge_connectivity_at_least,
    enumerate_violating_partition,
    generate_planted_instance,
)
from factorforge.packing import (
    TreePacking,
    is_m_tree_connected,
    minimal_tree_connected_subgraph,
    pack_spanning_trees,
)

from helpers import components_of, random_multigraph, random_tree_connected

pytestmark = pytest.mark.acceptance


def _report(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def _measure(h, matching):
    return (len(h), -len(h & matching))


def _replay_ok(f, t, matching, trace):
    """Rebuild H from T + F step by step and re-derive every recorded measure."""
    h = set(f.members | t.members)
    for step in trace:
        before = _measure(h, matching)
        if step.measure_before is not None and tuple(step.measure_before) != before:
            return False
        h.discard(step.removed)
        if step.added is not None:
            h.add(step.added)
        after = _measure(h, matching)
        if step.measure_after is not None and tuple(step.measure_after) != after:
            return False
        if not after < before:
            return False
    return True


@pytest.fixture(scope="module")
def connected_runs():
    """500 planted instances through the connected extension."""
    runs, failures = [], []
    start = time.perf_counter()
    for seed in range(500):
        n = 2 + seed % 11
        inst = generate_planted_instance(seed, n, "planted-tree-factor", 1, multiplicity=2)
        f, t = inst.factor_subset, inst.tree_subset
        sel = select_extension_matching(f)
        h, trace = connected_extend(f, sel, t)
        rep = check_solution(inst, h, "connected", sel, trace)
        if not rep.overall:
            failures.append((seed, rep.checks))
        runs.append((inst, sel, h, trace))
    return runs, failures, time.perf_counter() - start


@pytest.fixture(scope="module")
def tree_runs():
    """300 planted instances per m through the (g, f+f'-m) pipeline."""
    runs, failures = [], []
    start = time.perf_counter()
    for m in (1, 2, 3):
        for seed in range(300):
            n = 2 + seed % 9
            inst = generate_planted_instance(10_000 * m + seed, n, "planted-tree-factor", m)
            trace: list = []
            h = tree_connected_factor(inst.factor_subset, inst.tree_subset, inst.bounds(), m, trace)
            w = pack_spanning_trees(h, m)
            ok = isinstance(w, TreePacking)
            if ok:
                w.validate(inst.host)
            d_h = degree_profile(h)
            upper = np.array(inst.f) + np.array(inst.f_prime) - m
            ok = ok and bool(np.all(d_h >= np.array(inst.g)) and np.all(d_h <= upper))
            if not ok:
                failures.append((m, seed))
            runs.append((inst, m, h, trace))
    return runs, failures, time.perf_counter() - start


def test_criterion_1_connected_extension(capsys, connected_runs):
    runs, failures, elapsed = connected_runs
    ok = not failures and len(runs) == 500 and elapsed < 60
    _report(capsys, "C1 connected extension", ok, f"{len(runs) - len(failures)}/{len(runs)} verified, {elapsed:.1f}s (limit 60s)")
    assert ok, failures[:3]


def test_criterion_2_tree_connected_factor(capsys, tree_runs):
    runs, failures, elapsed = tree_runs
    ok = not failures and len(runs) == 900 and elapsed < 300
    _report(capsys, "C2 tree-connected factor", ok, f"{len(runs) - len(failures)}/{len(runs)} verified over m=1,2,3, {elapsed:.1f}s (limit 300s)")
    assert ok, failures[:3]


def test_criterion_3_two_hamiltonian_paths(capsys):
    bad = []
    start = time.perf_counter()
    for seed in range(100):
        n = 4 + seed % 7
        inst = generate_planted_instance(seed, n, "two-ham-paths")
        h = tree_connected_factor(inst.factor_subset, inst.tree_subset, inst.bounds(), 2)
        d_h = degree_profile(h)
        window = bool(np.all(d_h >= np.array(inst.g)) and np.all(d_h <= np.array(inst.f) + 2))
        # no single edge disconnects h, and every vertex pair has two edge-disjoint paths
        pairs = [inst.host.edges[e] for e in h]
        bridgeless = len(components_of(n, pairs)) == 1 and all(
            len(components_of(n, pairs[:i] + pairs[i + 1 :])) == 1 for i in range(len(pairs))
        )
        if not (window and bridgeless and edge_connectivity_at_least(h, 2)):
            bad.append(seed)
    elapsed = time.perf_counter() - start
    ok = not bad
    _report(capsys, "C3 two Hamiltonian paths", ok, f"{100 - len(bad)}/100 are 2-edge-connected (g, f+2)-factors, {elapsed:.1f}s")
    assert ok, bad[:5]


def test_criterion_4_packing_matches_partitions(capsys):
    disagreements = []
    checked = 0
    start = time.perf_counter()
    for n in range(1, 6):
        pairs = list(combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            g = MultiGraph(n, [p for i, p in enumerate(pairs) if mask >> i & 1])
            for m in (1, 2, 3):
                checked += 1
                packed = is_m_tree_connected(g.all_edges(), m)
                if packed != (enumerate_violating_partition(g.all_edges(), m) is None):
                    disagreements.append((n, mask, m))
    rng = np.random.default_rng(4)
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        g = random_multigraph(rng, n, int(rng.integers(0, 3 * n + 1)), max_mult=3)
        m = int(rng.integers(1, 4))
        checked += 1
        w = pack_spanning_trees(g.all_edges(), m)
        if isinstance(w, TreePacking) != (enumerate_violating_partition(g.all_edges(), m) is None):
            disagreements.append((n, g.edges, m))
    elapsed = time.perf_counter() - start
    ok = not disagreements and elapsed < 120
    _report(capsys, "C4 packing vs partition oracle", ok, f"{len(disagreements)} disagreements in {checked} cases, {elapsed:.1f}s (limit 120s)")
    assert ok, disagreements[:3]


def test_criterion_5_exchange_property(capsys):
    bad = []
    edges_checked = 0
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    for case in range(200):
        n = int(rng.integers(2, 8))
        m = int(rng.integers(1, 3))
        base = random_tree_connected(rng, n, m, int(rng.integers(0, n + 1)))
        x, y = (int(v) for v in rng.choice(n, size=2, replace=False))
        host = MultiGraph(n, list(base.edges) + [(x, y)])
        xy = host.edge_count - 1
        h = host.subset(range(xy))
        _, q = minimal_tree_connected_subgraph(h, m, x, y)
        for e in q:
            edges_checked += 1
            if enumerate_violating_partition(host.subset((h.members - {e}) | {xy}), m) is not None:
                bad.append((case, e))
    elapsed = time.perf_counter() - start
    ok = not bad
    _report(capsys, "C5 exchange through minimal Q", ok, f"200 cases, {edges_checked - len(bad)}/{edges_checked} swaps stay tree-connected, {elapsed:.1f}s")
    assert ok, bad[:5]


def _cli_bytes(tmp_path, argv, name):
    out = tmp_path / name
    code = run_command(argv + ["--output", str(out)])
    return code, out.read_bytes()


def test_criterion_6_pinned_instances(capsys, tmp_path):
    problems = []
    path = MultiGraph(4, [(0, 1), (1, 2), (2, 3)])
    f, t = path.subset([0, 2]), path.all_edges()
    feasible = brute_force_feasible_set(path, f, t, 1, "connected", [0, 2])
    h, _ = connected_extend(f, designate_matching(f, [0, 2]), t)
    if [s.ids() for s in feasible] != [[0, 1, 2]] or h.ids() != [0, 1, 2]:
        problems.append("path/matching")

    k4 = MultiGraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    cycle = k4.subset([0, 3, 5, 2])
    feasible = brute_force_feasible_set(k4, cycle, k4.all_edges(), 2, "tree-connected")
    inst = Instance(k4, 2, (2,) * 4, (2,) * 4, (3,) * 4, (0, 3, 5, 2), tuple(range(6)))
    h = tree_connected_factor(cycle, k4.all_edges(), inst.bounds(), 2)
    if [s.ids() for s in feasible] != [list(range(6))] or h.ids() != list(range(6)):
        problems.append("K4/4-cycle")

    # same seed, same bytes: within one process and across processes
    runs = 0
    for seed, model, m, command in (
        (11, "planted-tree-factor", 1, "extend-connected"),
        (12, "random-multi", 2, "extend-tree-connected"),
        (13, "two-ham-paths", 2, "factor-pipeline"),
    ):
        inst_path = str(tmp_path / f"inst{seed}.json")
        assert run_command(["gen", "--seed", str(seed), "--n", "8", "--m", str(m), "--model", model, "--output", inst_path]) == 0
        first = _cli_bytes(tmp_path, [command, inst_path], f"a{seed}.json")
        second = _cli_bytes(tmp_path, [command, inst_path], f"b{seed}.json")
        proc = subprocess.run(
            [sys.executable, "-m", "factorforge", command, inst_path], capture_output=True, check=False
        )
        runs += 3
        if first[0] != 0 or first != second or proc.returncode != 0 or proc.stdout != first[1]:
            problems.append(f"{command} seed {seed} not reproducible")
        json.loads(first[1])
    ok = not problems
    _report(capsys, "C6 pinned instances and reproducibility", ok, f"2 pinned answers unique and matched, {runs} byte-compared runs" if ok else "; ".join(problems))
    assert ok, problems


def test_criterion_7_termination_accounting(capsys, connected_runs, tree_runs):
    bad = []
    steps = 0
    for inst, sel, h, trace in connected_runs[0]:
        f, t = inst.factor_subset, inst.tree_subset
        steps += len(trace)
        budget = len(f.members | t.members) + len(sel.edges)
        if len(trace) > budget or not _replay_ok(f, t, sel.edges, trace):
            bad.append(("connected", inst))
    for inst, m, h, trace in tree_runs[0]:
        f, t = inst.factor_subset, inst.tree_subset
        steps += len(trace)
        peels = sum(1 for s in trace if s.kind.startswith("peel"))
        budget = len(f.members | t.members) + len(f.members - t.members) - peels
        measured = [s for s in trace if s.measure_before is not None]
        if len(trace) > budget or not all(tuple(s.measure_after) < tuple(s.measure_before) for s in measured):
            bad.append(("tree", m, inst))
    total = len(connected_runs[0]) + len(tree_runs[0])
    ok = not bad
    _report(capsys, "C7 termination accounting", ok, f"{total - len(bad)}/{total} traces within budget with strictly decreasing measure ({steps} steps)")
    assert ok, bad[:3]


def _all_windows(host, lower, upper):
    """Bitmasks of every edge subset whose degree vector lies in [lower, upper]."""
    ne = host.edge_count
    masks = np.arange(1 << ne, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(ne)) & 1).astype(np.int16)
    inc = np.zeros((ne, host.n), dtype=np.int16)
    for e, (u, v) in enumerate(host.edges):
        inc[e, u] += 1
        inc[e, v] += 1
    deg = bits @ inc
    ok = np.all((deg >= lower) & (deg <= upper), axis=1)
    return masks[ok]


def test_criterion_8_factor_search_exact(capsys):
    bad = []
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    feasible_draws = 0
    for draw in range(200):
        n = int(rng.integers(2, 9))
        host = random_multigraph(rng, n, int(rng.integers(0, 15)), max_mult=2)
        d = degree_profile(host.all_edges())
        f = np.array([int(rng.integers(0, x + 2)) for x in d])
        g = np.array([int(rng.integers(0, x + 1)) for x in f])
        found = find_gf_factor(host, DegreeBounds(g.tolist(), f.tolist()))
        windows = _all_windows(host, g, f)
        feasible_draws += bool(windows.size)
        if found is None:
            if windows.size:
                bad.append(draw)
            continue
        mask = sum(1 << e for e in found)
        d_found = degree_profile(found)
        if mask not in set(windows.tolist()) or not (np.all(g <= d_found) and np.all(d_found <= f)):
            bad.append(draw)
    elapsed = time.perf_counter() - start
    ok = not bad
    _report(capsys, "C8 (g,f)-factor search exactness", ok, f"{200 - len(bad)}/200 draws agree ({feasible_draws} feasible), {elapsed:.1f}s")
    assert ok, bad[:5]
