from .graph_stats import OVERALL, AggregateStat, GraphStats, aggregate_stats, descriptive_stats
from .graphlet_kernel import (
    SUPPORTED_SIZES,
    GraphletCounts,
    connected_subsets,
    graphlet_class,
    graphlet_features,
    graphlet_similarity,
)
from .sp_kernel import KernelFeatures, normalized_kernel, similarity_matrix, sp_features, sp_similarity


__all__ = [
    "OVERALL",
    "SUPPORTED_SIZES",
    "AggregateStat",
    "GraphStats",
    "GraphletCounts",
    "KernelFeatures",
    "aggregate_stats",
    "connected_subsets",
    "descriptive_stats",
    "graphlet_class",
    "graphlet_features",
    "graphlet_similarity",
    "normalized_kernel",
    "similarity_matrix",
    "sp_features",
    "sp_similarity",
]
