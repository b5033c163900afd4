"""Edge decomposition of dense bipartite graphs into regular pairs."""

__version__ = "0.1.0"

from .errors import DecompError, ParameterRangeWarning
from .extract import Decomposition, decompose, extract_regular_subgraph
from .graph import BipartiteGraph, Subpair, TripartiteGraph, density
from .packing import RootedTree, embed_tree, pack_trees
from .regularity import Verdict, verify_regularity
from .removal import conditional_triangle_removal, count_good_c5

__all__ = [
    "BipartiteGraph", "DecompError", "Decomposition", "ParameterRangeWarning", "RootedTree",
    "Subpair", "TripartiteGraph", "Verdict", "conditional_triangle_removal", "count_good_c5",
    "decompose", "density", "embed_tree", "extract_regular_subgraph", "pack_trees",
    "verify_regularity",
]
