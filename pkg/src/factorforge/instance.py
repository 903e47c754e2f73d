"""Problem instance: host graph plus the optional factor data an operation consumes."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError
from .graph import DegreeBounds, EdgeSubset, MultiGraph


@dataclass(frozen=True)
class Instance:
    host: MultiGraph
    m: int | None = None
    g: tuple[int, ...] | None = None
    f: tuple[int, ...] | None = None
    f_prime: tuple[int, ...] | None = None
    factor: tuple[int, ...] | None = None
    tree_factor: tuple[int, ...] | None = None
    matching: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        n, ne = self.host.n, self.host.edge_count
        if self.m is not None and (int(self.m) != self.m or self.m < 1):
            raise InvalidInputError(f"field 'm': must be a positive integer, got {self.m!r}")
        for name in ("g", "f", "f_prime"):
            vec = getattr(self, name)
            if vec is None:
                continue
            vec = tuple(int(x) for x in vec)
            object.__setattr__(self, name, vec)
            if len(vec) != n:
                raise InvalidInputError(f"field '{name}': length {len(vec)}, expected {n}")
            bad = next((i for i, x in enumerate(vec) if x < 0), None)
            if bad is not None:
                raise InvalidInputError(f"field '{name}': entry {bad} is negative")
        for name in ("factor", "tree_factor", "matching"):
            ids = getattr(self, name)
            if ids is None:
                continue
            ids = tuple(int(x) for x in ids)
            object.__setattr__(self, name, ids)
            bad = next((i for i, x in enumerate(ids) if not 0 <= x < ne), None)
            if bad is not None:
                raise InvalidInputError(f"field '{name}': entry {bad} = {ids[bad]} is not an edge id below {ne}")
            if len(set(ids)) != len(ids):
                raise InvalidInputError(f"field '{name}': repeated edge id")

    def _need(self, name: str):
        value = getattr(self, name)
        if value is None:
            raise InvalidInputError(f"instance has no '{name}' field")
        return value

    @property
    def factor_subset(self) -> EdgeSubset:
        return self.host.subset(self._need("factor"))

    @property
    def tree_subset(self) -> EdgeSubset:
        return self.host.subset(self._need("tree_factor"))

    @property
    def matching_subset(self) -> EdgeSubset:
        return self.host.subset(self._need("matching"))

    def bounds(self) -> DegreeBounds:
        return DegreeBounds(self._need("g"), self._need("f"), self.f_prime)
