"""Approximation constructions for metric instances."""

from .concat import SweepParams, concat_approximation, shortcut, shortest_path_selection, sweep_selection
from .ktours import KTourSet, exact_k_tours, fill_phantoms, good_k_tours, nearest_insertion_k_tours
from .onetwo import best_orientation, two_edge_addition
from .reduction import approximate_bounded_weights, block_substitute, collapse_tour, expand_weights
from .tsp import christofides_tour, double_tree_tour, minimum_spanning_tree, tsp_subroutine

__all__ = [
    "KTourSet",
    "SweepParams",
    "approximate_bounded_weights",
    "best_orientation",
    "block_substitute",
    "christofides_tour",
    "collapse_tour",
    "concat_approximation",
    "double_tree_tour",
    "exact_k_tours",
    "expand_weights",
    "fill_phantoms",
    "good_k_tours",
    "minimum_spanning_tree",
    "nearest_insertion_k_tours",
    "shortcut",
    "shortest_path_selection",
    "sweep_selection",
    "tsp_subroutine",
    "two_edge_addition",
]
