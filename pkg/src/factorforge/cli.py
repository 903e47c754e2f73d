"""Command line entry point.

Exit codes: 0 success, 1 infeasible or certificate returned, 2 invalid
input, 3 theorem precondition violated (or an unverifiable result),
4 capacity cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .errors import CapacityError, FactorForgeError, InvalidInputError, PreconditionError
from .extension import (
    InvariantError,
    connected_extend,
    extend_with_matching_tree,
    tree_connected_extend,
    tree_connected_extend_bipartite,
    tree_connected_factor,
)
from .factors import MatchingSelection, find_gf_factor, select_extension_matching
from .graph import EdgeSubset, degree_profile
from .instance import Instance
from .io import Result, dumps, parse_instance, parse_result, serialize_instance
from .oracle import (
    FEASIBLE_SET_EDGE_CAP,
    MODELS,
    TAGS,
    brute_force_feasible_set,
    check_solution,
    generate_planted_instance,
    resolve_matching,
)
from .packing import TreePacking, pack_spanning_trees

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_PRECONDITION, EXIT_CAPACITY = 0, 1, 2, 3, 4


class _Unverified(Exception):
    def __init__(self, result: Result):
        super().__init__("result failed verification")
        self.result = result


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise InvalidInputError(f"{path} is not UTF-8 text") from None


def _m(args, inst: Instance) -> int:
    if args.m is not None:
        return args.m
    return inst.m if inst.m is not None else 1


def _subset(inst: Instance, which: str) -> EdgeSubset:
    if which == "host":
        return inst.host.all_edges()
    if which == "factor":
        return inst.factor_subset
    return inst.tree_subset


def _degree_table(h: EdgeSubset, f: EdgeSubset, t: EdgeSubset, caps) -> list[dict]:
    d_h, d_f, d_t = degree_profile(h), degree_profile(f), degree_profile(t)
    return [
        {"v": v, "dF": int(d_f[v]), "dT": int(d_t[v]), "dH": int(d_h[v]), "cap": int(caps[v])}
        for v in range(h.host.n)
    ]


def _packing_of(h: EdgeSubset, m: int) -> list[list[int]] | None:
    if h.host.n == 0:
        return None
    w = pack_spanning_trees(h, m)
    return [list(t) for t in w.trees] if isinstance(w, TreePacking) else None


def _oracle_block(inst: Instance, h: EdgeSubset, m: int, mode: str, matching) -> dict:
    if inst.host.edge_count > FEASIBLE_SET_EDGE_CAP:
        return {"checked": False, "reason": f"host has more than {FEASIBLE_SET_EDGE_CAP} edges"}
    feasible = brute_force_feasible_set(
        inst.host, inst.factor_subset, inst.tree_subset, m, mode, matching
    )
    return {"checked": True, "feasible_count": len(feasible), "member": h in feasible}


def _finish(args, inst: Instance, h: EdgeSubset, tag: str, m: int, trace, matching_sel=None, oracle_mode=None, oracle_matching=None):
    f, t = inst.factor_subset, inst.tree_subset
    report = check_solution(inst, h, tag, matching_sel, trace)
    d_f, d_t = degree_profile(f), degree_profile(t)
    caps = d_t + np.maximum(0, d_f - m)
    if tag == "matching-tree":
        met = np.zeros(inst.host.n, dtype=bool)
        for e in matching_sel.edges:
            met[list(inst.host.edges[e])] = True
        caps = np.where(met, d_t + d_f - 1, caps)
    details: dict = {"tag": tag, "m": m}
    if matching_sel is not None:
        details["matching"] = [[e, x, y] for e, x, y in matching_sel.pairs()]
    if args.oracle and oracle_mode is not None:
        details["oracle"] = _oracle_block(inst, h, m, oracle_mode, oracle_matching)
    result = Result(
        status="ok",
        h=h.ids(),
        packing=_packing_of(h, m),
        degrees=_degree_table(h, f, t, caps),
        trace=list(trace),
        verification=report,
        details=details,
    )
    if args.trace:
        for i, step in enumerate(trace):
            print(f"step {i}: {step.kind} -{step.removed} +{step.added} {step.measure_before} -> {step.measure_after}", file=sys.stderr)
    oracle = details.get("oracle")
    if not report.overall or (oracle and oracle.get("checked") and not oracle["member"]):
        result.status = "unverified"
        raise _Unverified(result)
    return result, EXIT_OK


def cmd_pack(args, inst):
    m = _m(args, inst)
    sub = _subset(inst, args.subset)
    w = pack_spanning_trees(sub, m)
    if isinstance(w, TreePacking):
        return Result("packing", packing=[list(t) for t in w.trees], details={"m": m}), EXIT_OK
    cert = {"partition": [list(c) for c in w.partition], "cross_edge_count": w.cross_edge_count}
    return Result("certificate", details={"m": m, "certificate": cert}), EXIT_INFEASIBLE


def cmd_check_tc(args, inst):
    res, code = cmd_pack(args, inst)
    res.status = "tree-connected" if code == EXIT_OK else "not-tree-connected"
    return res, code


def cmd_find_factor(args, inst):
    f = find_gf_factor(inst.host, inst.bounds(), cap=args.cap)
    if f is None:
        return Result("infeasible"), EXIT_INFEASIBLE
    return Result("factor", h=f.ids()), EXIT_OK


def cmd_select_matching(args, inst):
    sel = select_extension_matching(inst.factor_subset)
    return Result("ok", details={"matching": [[e, x, y] for e, x, y in sel.pairs()]}), EXIT_OK


def cmd_extend_connected(args, inst):
    sel = resolve_matching(inst)
    h, trace = connected_extend(inst.factor_subset, sel, inst.tree_subset)
    return _finish(args, inst, h, "connected", 1, trace, sel, "connected", sel.edges)


def cmd_extend_matching_tree(args, inst):
    sel = resolve_matching(inst)
    h, trace = extend_with_matching_tree(inst.factor_subset, sel, inst.tree_subset)
    return _finish(args, inst, h, "matching-tree", 1, trace, sel, "matching-tree", sel.edges)


def cmd_extend_tree_connected(args, inst):
    m = _m(args, inst)
    inst = Instance(inst.host, m, inst.g, inst.f, inst.f_prime, inst.factor, inst.tree_factor, inst.matching)
    trace: list = []
    if args.bipartite:
        m_sub = inst.matching_subset
        h = tree_connected_extend_bipartite(inst.factor_subset, inst.tree_subset, m_sub, m, trace)
        return _finish(args, inst, h, "tree-connected-bipartite", m, trace, None, "tree-connected-bipartite", m_sub.members)
    h = tree_connected_extend(inst.factor_subset, inst.tree_subset, m, trace)
    return _finish(args, inst, h, "tree-connected", m, trace, None, "tree-connected")


def cmd_factor_pipeline(args, inst):
    m = _m(args, inst)
    bounds = inst.bounds()
    factor = inst.factor
    if factor is None:
        found = find_gf_factor(inst.host, bounds, cap=args.cap)
        if found is None:
            return Result("infeasible", details={"reason": "no (g,f)-factor"}), EXIT_INFEASIBLE
        factor = tuple(found.ids())
    tree = inst.tree_factor
    if tree is None:
        w = pack_spanning_trees(inst.host.all_edges(), m)
        if not isinstance(w, TreePacking):
            raise PreconditionError(f"host has no {m} edge-disjoint spanning trees")
        tree = tuple(w.union())
    f_prime = inst.f_prime
    if f_prime is None:
        f_prime = tuple(int(x) for x in degree_profile(inst.host.subset(tree)))
    inst = Instance(inst.host, m, inst.g, inst.f, f_prime, factor, tree, inst.matching)
    trace: list = []
    h = tree_connected_factor(inst.factor_subset, inst.tree_subset, inst.bounds(), m, trace)
    result, code = _finish(args, inst, h, "tree-connected-factor", m, trace, None, "tree-connected")
    # what the pipeline chose, so that verify can re-check against it
    result.details["resolved"] = {"factor": list(factor), "tree_factor": list(tree), "f_prime": list(f_prime)}
    return result, code


def cmd_verify(args, inst):
    if not args.result:
        raise InvalidInputError("verify needs --result")
    res = parse_result(_read(args.result))
    if res.h is None:
        raise InvalidInputError("result has no 'h' edge list")
    m = _m(args, inst)
    resolved = res.details.get("resolved") or {}

    def pick(name):
        value = getattr(inst, name)
        return value if value is not None or name not in resolved else tuple(resolved[name])

    inst = Instance(inst.host, m, inst.g, inst.f, pick("f_prime"), pick("factor"), pick("tree_factor"), inst.matching)
    h = inst.host.subset(res.h)
    sel = None
    if args.tag in ("connected", "matching-tree") and res.details.get("matching"):
        pairs = res.details["matching"]
        sel = MatchingSelection(frozenset(p[0] for p in pairs), {p[0]: (p[1], p[2]) for p in pairs})
        sel.validate(inst.factor_subset)
    report = check_solution(inst, h, args.tag, sel, res.trace or None)
    code = EXIT_OK if report.overall else EXIT_INFEASIBLE
    return Result("verified" if report.overall else "rejected", h=res.h, verification=report), code


COMMANDS = {
    "pack": cmd_pack,
    "check-tc": cmd_check_tc,
    "find-factor": cmd_find_factor,
    "select-matching": cmd_select_matching,
    "extend-connected": cmd_extend_connected,
    "extend-matching-tree": cmd_extend_matching_tree,
    "extend-tree-connected": cmd_extend_tree_connected,
    "factor-pipeline": cmd_factor_pipeline,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="factorforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("instance", help="instance file (JSON or line format), '-' for stdin")
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--cap", type=int, default=None, help="exhaustive-search edge cap")
        p.add_argument("--trace", action="store_true", help="log exchange steps to stderr")
        p.add_argument("--oracle", action="store_true", help="cross-check against brute force")
        p.add_argument("--output", "-o", default=None)
        if name in ("pack", "check-tc"):
            p.add_argument("--subset", choices=("host", "factor", "tree_factor"), default="host")
        if name == "extend-tree-connected":
            p.add_argument("--bipartite", action="store_true", help="use the instance matching as M")
        if name == "verify":
            p.add_argument("--result", required=False)
            p.add_argument("--tag", choices=TAGS, default="connected")
    g = sub.add_parser("gen")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=6)
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--model", choices=MODELS, default="planted-tree-factor")
    g.add_argument("--output", "-o", default=None)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    output = getattr(args, "output", None)
    kinds = (
        (InvalidInputError, EXIT_INVALID, "invalid-input"),
        (CapacityError, EXIT_CAPACITY, "capacity"),
        (PreconditionError, EXIT_PRECONDITION, "precondition"),
        (InvariantError, EXIT_PRECONDITION, "invariant"),
        (FactorForgeError, EXIT_PRECONDITION, "error"),
    )
    try:
        if args.command == "gen":
            inst = generate_planted_instance(args.seed, args.n, args.model, args.m)
            _emit(serialize_instance(inst), output)
            return EXIT_OK
        inst = parse_instance(_read(args.instance))
        result, code = COMMANDS[args.command](args, inst)
    except _Unverified as exc:
        _emit(dumps(exc.result.to_dict()), output)
        print("error: result failed verification", file=sys.stderr)
        return EXIT_PRECONDITION
    except FactorForgeError as exc:
        for cls, code, kind in kinds:
            if isinstance(exc, cls):
                break
        _emit(dumps({"status": "error", "error": {"kind": kind, "message": str(exc)}}), output)
        print(f"error: {exc}", file=sys.stderr)
        return code
    _emit(dumps(result.to_dict()), output)
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
