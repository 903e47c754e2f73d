import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factorforge.errors import CapacityError, InvalidInputError
from factorforge.extension import connected_extend
from factorforge.factors import designate_matching, verify_factor_bounds
from factorforge.graph import MultiGraph, degree_profile, is_spanning_tree
from factorforge.instance import Instance
from factorforge.oracle import (
    VerificationReport,
    brute_force_feasible_set,
    check_solution,
    edge_connectivity_at_least,
    enumerate_violating_partition,
    generate_planted_instance,
    local_edge_connectivity,
)
from factorforge.packing import pack_spanning_trees

from helpers import brute_tree_connected, components_of, multigraphs, pairs_of


def _path_instance(path4):
    return Instance(path4, 1, (1,) * 4, (1,) * 4, (1, 2, 2, 1), (0, 2), (0, 1, 2), (0, 2))


def _k4_instance(k4):
    return Instance(k4, 2, (2,) * 4, (2,) * 4, (3,) * 4, (0, 3, 5, 2), tuple(range(6)), None)


def test_partition_c4(c4):
    cert = enumerate_violating_partition(c4.all_edges(), 2)
    assert cert.partition == ((0,), (1,), (2,), (3,))
    assert cert.cross_edge_count == 4 < 2 * 3


def test_partition_k4_and_single_vertex(k4):
    assert enumerate_violating_partition(k4.all_edges(), 2) is None
    assert enumerate_violating_partition(MultiGraph(1, []).all_edges(), 5) is None


def test_partition_cap():
    with pytest.raises(CapacityError):
        enumerate_violating_partition(MultiGraph(13, []).all_edges(), 1)
    with pytest.raises(InvalidInputError):
        enumerate_violating_partition(MultiGraph(2, [(0, 1)]).all_edges(), 0)


@settings(max_examples=120, deadline=None)
@given(multigraphs(max_n=7, max_edges=14, max_mult=3), st.integers(1, 3))
def test_partition_matches_brute_force(g, m):
    cert = enumerate_violating_partition(g.all_edges(), m)
    assert (cert is None) == brute_tree_connected(g.n, list(g.edges), m)
    if cert is not None:
        cert.validate(g.all_edges(), m)


def test_feasible_set_path(path4):
    f, t = path4.subset([0, 2]), path4.all_edges()
    sets = brute_force_feasible_set(path4, f, t, 1, "connected", [0, 2])
    assert [s.ids() for s in sets] == [[0, 1, 2]]


def test_feasible_set_k4(k4):
    f = k4.subset([0, 3, 5, 2])
    for mode in ("tree-connected", "tree-connected-bipartite"):
        sets = brute_force_feasible_set(k4, f, k4.all_edges(), 2, mode)
        assert [s.ids() for s in sets] == [list(range(6))]


def test_feasible_set_tree_only(path4):
    sets = brute_force_feasible_set(path4, path4.empty(), path4.all_edges())
    assert [s.ids() for s in sets] == [[0, 1, 2]]


def test_feasible_set_errors(path4):
    with pytest.raises(InvalidInputError):
        brute_force_feasible_set(path4, path4.empty(), path4.all_edges(), mode="nope")
    big = MultiGraph(2, [(0, 1)] * 19)
    with pytest.raises(CapacityError):
        brute_force_feasible_set(big, big.empty(), big.subset([0]))


def test_generator_is_deterministic():
    for model in ("planted-tree-factor", "two-ham-paths", "random-multi"):
        a = generate_planted_instance(7, 8, model, 2)
        b = generate_planted_instance(7, 8, model, 2)
        assert a == b
    assert generate_planted_instance(1, 8) != generate_planted_instance(2, 8)


def test_generator_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        generate_planted_instance(0, 1)
    with pytest.raises(InvalidInputError):
        generate_planted_instance(0, 5, "other")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 10), st.integers(1, 3))
def test_planted_tree_factor(seed, n, m):
    inst = generate_planted_instance(seed, n, "planted-tree-factor", m)
    t, f = inst.tree_subset, inst.factor_subset
    if m == 1:
        assert is_spanning_tree(t)
    assert brute_tree_connected(n, pairs_of(t), m)
    d_f = degree_profile(f)
    assert verify_factor_bounds(f, d_f, d_f)
    assert verify_factor_bounds(f, inst.g, inst.f)
    assert all(m <= x for x in inst.f)
    assert verify_factor_bounds(t, [m] * n, inst.f_prime)
    mult = {}
    for u, v in inst.host.edges:
        key = (min(u, v), max(u, v))
        mult[key] = mult.get(key, 0) + 1
    assert max(mult.values()) <= max(2, m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(4, 10))
def test_two_ham_paths(seed, n):
    inst = generate_planted_instance(seed, n, "two-ham-paths")
    assert inst.m == 2
    t = inst.tree_subset
    assert len(t) == 2 * (n - 1)
    w = pack_spanning_trees(t, 2)
    w.validate(inst.host)
    # a union of two Hamiltonian paths has at most four leaves and degree at most 4
    d_t = degree_profile(t)
    assert (d_t == 1).sum() <= 4 and d_t.min() >= 1 and d_t.max() <= 4
    assert list(inst.f_prime) == d_t.tolist()


def test_random_multi_multiplicity():
    for seed in range(20):
        inst = generate_planted_instance(seed, 5, "random-multi")
        mult = {}
        for u, v in inst.host.edges:
            key = (min(u, v), max(u, v))
            mult[key] = mult.get(key, 0) + 1
        assert max(mult.values()) <= 3


def test_check_solution_path(path4):
    inst = _path_instance(path4)
    ok = check_solution(inst, path4.all_edges(), "connected")
    assert ok.overall
    bad = check_solution(inst, path4.subset([0, 2]), "connected")
    assert not bad.overall
    assert ("connected", False, "") in bad.checks


def test_check_solution_with_trace(path4):
    inst = _path_instance(path4)
    sel = designate_matching(inst.factor_subset, [0, 2])
    h, trace = connected_extend(inst.factor_subset, sel, inst.tree_subset)
    rep = check_solution(inst, h, "connected", sel, trace)
    assert rep.overall
    assert any(name == "trace budget" for name, _, _ in rep.checks)


def test_check_solution_k4(k4):
    inst = _k4_instance(k4)
    assert check_solution(inst, k4.all_edges(), "tree-connected-factor").overall
    rep = check_solution(inst, k4.subset(range(5)), "tree-connected-factor")
    assert not rep.overall


def test_check_solution_unknown_tag(path4):
    with pytest.raises(InvalidInputError):
        check_solution(_path_instance(path4), path4.all_edges(), "theorem-9")


def test_report_round_trip():
    rep = VerificationReport()
    rep.add("a", True)
    rep.add("b", False, "why")
    back = VerificationReport.from_dict(rep.to_dict())
    assert back == rep and not back.overall
    doc = rep.to_dict()
    doc["overall"] = True
    with pytest.raises(InvalidInputError):
        VerificationReport.from_dict(doc)


def test_local_edge_connectivity(k4, c4, path4):
    assert local_edge_connectivity(k4.all_edges(), 0, 1) == 3
    assert local_edge_connectivity(c4.all_edges(), 0, 2) == 2
    assert local_edge_connectivity(path4.all_edges(), 0, 3) == 1
    assert local_edge_connectivity(path4.subset([0]), 0, 3) == 0
    assert edge_connectivity_at_least(c4.all_edges(), 2)
    assert not edge_connectivity_at_least(c4.all_edges(), 3)
    assert not edge_connectivity_at_least(path4.all_edges(), 2)


@settings(max_examples=80, deadline=None)
@given(multigraphs(min_n=2, max_n=6, max_edges=10, max_mult=3), st.integers(1, 3))
def test_edge_connectivity_by_cut_enumeration(g, k):
    # smallest edge cut over all vertex bipartitions
    pairs = list(g.edges)
    best = min(
        sum(1 for u, v in pairs if (mask >> u & 1) != (mask >> v & 1))
        for mask in range(1, 1 << (g.n - 1))
    )
    assert edge_connectivity_at_least(g.all_edges(), k) == (best >= k)
    if best >= 1:
        assert len(components_of(g.n, pairs)) == 1
