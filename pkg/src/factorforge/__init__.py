"""Degree-bounded connected and tree-connected factors by edge exchange."""

from .errors import (
    CapacityError,
    ExchangeNotFoundError,
    FactorForgeError,
    InvalidInputError,
    PreconditionError,
)
from .extension import (
    ExchangeStep,
    ExtensionState,
    InvariantError,
    VertexClassification,
    classify_vertices,
    connected_extend,
    connected_factor_via_tree,
    extend_with_matching_tree,
    tree_connected_extend,
    tree_connected_extend_bipartite,
    tree_connected_factor,
)
from .factors import (
    MatchingSelection,
    designate_matching,
    find_gf_factor,
    select_extension_matching,
    verify_factor_bounds,
)
from .graph import (
    DegreeBounds,
    EdgeSubset,
    MultiGraph,
    connected_components,
    cut_vertices,
    degree_profile,
    spanning_tree_of_component,
)
from .instance import Instance
from .packing import (
    PartitionCertificate,
    TreePacking,
    find_exchange_edge,
    is_m_tree_connected,
    minimal_tree_connected_subgraph,
    pack_spanning_trees,
)

__version__ = "0.1.0"
