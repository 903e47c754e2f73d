"""Instance and result documents.

Instances are JSON objects::

    {"n": 4, "edges": [[0, 1], [1, 2]], "m": 2, "g": [...], "f": [...],
     "f_prime": [...], "factor": [...], "tree_factor": [...], "matching": [...]}

Only ``n`` and ``edges`` are required; unknown keys are rejected. A line
format is accepted for hand-written fixtures::

    # comment
    graph 4
    edge 0 1
    edge 1 2
    factor 0
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import InvalidInputError
from .extension import ExchangeStep
from .graph import MultiGraph
from .instance import Instance
from .oracle import VerificationReport

INSTANCE_FIELDS = ("n", "edges", "m", "g", "f", "f_prime", "factor", "tree_factor", "matching")
VECTOR_FIELDS = ("g", "f", "f_prime", "factor", "tree_factor", "matching")


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidInputError(f"{where}: expected an integer, got {value!r}")
    return value


def _int_list(value: Any, where: str) -> list[int]:
    if not isinstance(value, list):
        raise InvalidInputError(f"{where}: expected a list of integers")
    return [_int(x, f"{where}[{i}]") for i, x in enumerate(value)]


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InvalidInputError("instance must be a JSON object")
    unknown = sorted(set(doc) - set(INSTANCE_FIELDS))
    if unknown:
        raise InvalidInputError(f"field '{unknown[0]}': unknown field")
    if "n" not in doc or "edges" not in doc:
        raise InvalidInputError("instance needs both 'n' and 'edges'")
    n = _int(doc["n"], "field 'n'")
    if n < 0:
        raise InvalidInputError("field 'n': must be nonnegative")
    raw_edges = doc["edges"]
    if not isinstance(raw_edges, list):
        raise InvalidInputError("field 'edges': expected a list of [u, v] pairs")
    edges = []
    for i, e in enumerate(raw_edges):
        pair = _int_list(e, f"field 'edges'[{i}]")
        if len(pair) != 2:
            raise InvalidInputError(f"field 'edges'[{i}]: expected [u, v]")
        u, v = pair
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidInputError(f"field 'edges'[{i}]: endpoint out of range 0..{n - 1}")
        if u == v:
            raise InvalidInputError(f"field 'edges'[{i}]: loop at vertex {u}")
        edges.append((u, v))
    kwargs: dict[str, Any] = {}
    if doc.get("m") is not None:
        kwargs["m"] = _int(doc["m"], "field 'm'")
    for name in VECTOR_FIELDS:
        if doc.get(name) is not None:
            kwargs[name] = tuple(_int_list(doc[name], f"field '{name}'"))
    return Instance(MultiGraph(n, edges), **kwargs)


def _parse_text(text: str) -> dict:
    doc: dict[str, Any] = {"edges": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            nums = [int(x) for x in rest]
        except ValueError:
            raise InvalidInputError(f"line {lineno}: non-integer token in {raw.strip()!r}") from None
        if key == "graph":
            if len(nums) != 1 or "n" in doc:
                raise InvalidInputError(f"line {lineno}: expected a single 'graph n' line")
            doc["n"] = nums[0]
        elif key == "edge":
            if len(nums) != 2:
                raise InvalidInputError(f"line {lineno}: expected 'edge u v'")
            doc["edges"].append(nums)
        elif key == "m":
            if len(nums) != 1:
                raise InvalidInputError(f"line {lineno}: expected 'm k'")
            doc["m"] = nums[0]
        elif key in VECTOR_FIELDS:
            doc[key] = nums
        else:
            raise InvalidInputError(f"line {lineno}: unknown keyword {key!r}")
    if "n" not in doc:
        raise InvalidInputError("missing 'graph n' line")
    return doc


def parse_instance(text: str) -> Instance:
    """Strict parse of a JSON (or line-format) instance."""
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    else:
        doc = _parse_text(text)
    return instance_from_dict(doc)


def instance_to_dict(inst: Instance) -> dict:
    doc: dict[str, Any] = {"n": inst.host.n, "edges": [list(e) for e in inst.host.edges]}
    if inst.m is not None:
        doc["m"] = inst.m
    for name in VECTOR_FIELDS:
        value = getattr(inst, name)
        if value is not None:
            doc[name] = list(value)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def serialize_instance(inst: Instance) -> str:
    return dumps(instance_to_dict(inst))


@dataclass
class Result:
    status: str
    h: list[int] | None = None
    packing: list[list[int]] | None = None
    degrees: list[dict] | None = None
    trace: list[ExchangeStep] = field(default_factory=list)
    verification: VerificationReport | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {
            "status": self.status,
            "h": self.h,
            "packing": self.packing,
            "degrees": self.degrees,
            "trace": [s.to_dict() for s in self.trace],
            "verification": self.verification.to_dict() if self.verification else None,
        }
        if self.details:
            doc["details"] = self.details
        return doc

    @classmethod
    def from_dict(cls, doc: Any) -> "Result":
        if not isinstance(doc, dict) or "status" not in doc:
            raise InvalidInputError("result must be a JSON object with a 'status'")
        known = {"status", "h", "packing", "degrees", "trace", "verification", "details"}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise InvalidInputError(f"field '{unknown[0]}': unknown result field")
        ver = doc.get("verification")
        return cls(
            status=doc["status"],
            h=_int_list(doc["h"], "field 'h'") if doc.get("h") is not None else None,
            packing=doc.get("packing"),
            degrees=doc.get("degrees"),
            trace=[ExchangeStep.from_dict(s) for s in doc.get("trace") or []],
            verification=VerificationReport.from_dict(ver) if ver else None,
            details=doc.get("details") or {},
        )


def serialize_result(result: Result) -> str:
    return dumps(result.to_dict())


def parse_result(text: str) -> Result:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return Result.from_dict(doc)
