"""Exact decision procedures for realizing distance intervals by weighted graphs and trees."""
from .core import (
    ConstructionError,
    DissimilarityVector,
    IntervalFamily,
    PreconditionError,
    RealizationError,
    StructureError,
    Variant,
    VariantError,
    WeightedGraph,
    WeightedTree,
    graph_two_weights,
    tree_two_weights,
)
from .graph import decide_graph, minplus_closure, verify_graph
from .linsys import fm_feasible, sistug_parametrization, solve_equalities, split_equalities
from .splits import SplitSystem, enumerate_candidate_systems, is_fat, is_saturated, is_transitive, tree_induced_splits
from .tree import build_system, construct_tree_from_D, decide_star, decide_tree, verify_tree

__version__ = "0.1.0"
