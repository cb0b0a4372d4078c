"""Dynamic aggregate and top-k queries over facility effect regions.

Place weighted facilities with effect radii on the vertices of an
edge-weighted graph; query the total weight (over any semigroup) or the k
heaviest among the facilities whose effect region reaches a query ball.
Trees get a centroid-decomposition index; graphs with small separators get a
multidimensional range-tree index over a separator decomposition.
"""

from .core import (Facility, Graph, GraphError, INT_MAX, INT_MIN, INT_SUM,
                   SEMIGROUPS, STR_CONCAT, Semigroup, all_pairs_from_sources,
                   load_graph, parse_graph, shortest_distance)
from .decomp import (BranchDecomposition, CentroidTree, Degree3Tree,
                     DecompositionError, SeparatorDecomposition,
                     TreeDecomposition, ValidationReport, build_centroid_tree,
                     from_branch_decomposition, from_nice_tree_decomposition,
                     load_decomposition, parse_decomposition, reduce_to_degree3,
                     tree_to_separator_decomposition,
                     validate_separator_decomposition)
from .graphindex import GraphIndex
from .multidim import MultiDimStore
from .oracle import NaiveIndex
from .rangekit import (Entry, FacilityIndex, PrioritySearchTree, RangeSumPst,
                       RangeSumTree)
from .treeindex import TreeIndex

__version__ = "0.1.0"

__all__ = [
    "Facility", "Graph", "GraphError", "Semigroup",
    "INT_SUM", "INT_MIN", "INT_MAX", "STR_CONCAT", "SEMIGROUPS",
    "shortest_distance", "all_pairs_from_sources", "parse_graph", "load_graph",
    "Degree3Tree", "CentroidTree", "SeparatorDecomposition", "ValidationReport",
    "TreeDecomposition", "BranchDecomposition", "DecompositionError",
    "reduce_to_degree3", "build_centroid_tree", "validate_separator_decomposition",
    "from_nice_tree_decomposition", "from_branch_decomposition",
    "tree_to_separator_decomposition", "parse_decomposition", "load_decomposition",
    "Entry", "FacilityIndex", "PrioritySearchTree", "RangeSumTree", "RangeSumPst",
    "MultiDimStore", "TreeIndex", "GraphIndex", "NaiveIndex",
    "__version__",
]
