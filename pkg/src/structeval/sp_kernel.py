import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Callable, Dict, Hashable, Mapping, Sequence, Tuple

import networkx as nx
import numpy as np

from ir import DecisionGraph

logger = logging.getLogger(__name__)

# (source kind, target kind, path length) -> count
KernelFeatures = Dict[Tuple[str, str, int], int]


def sp_features(graph: DecisionGraph, directed: bool = True) -> KernelFeatures:
    """Shortest-path distribution labelled by node kind.

    Every ordered pair (u, v), u != v, with a finite shortest path of length d
    adds one to (kind(u), kind(v), d). With directed=False paths run over the
    undirected skeleton, so each unordered pair is counted in both directions.
    """
    nx_graph = graph.to_networkx()
    if not directed:
        nx_graph = nx_graph.to_undirected()
    kinds = {node.id: node.kind.value for node in graph.nodes}

    features: Counter = Counter()
    for source, lengths in nx.all_pairs_shortest_path_length(nx_graph):
        for target, distance in lengths.items():
            if distance > 0:
                features[(kinds[source], kinds[target], distance)] += 1
    return dict(features)


def normalized_kernel(f1: Mapping[Hashable, int], f2: Mapping[Hashable, int]) -> float:
    """k(f1, f2) / sqrt(k(f1, f1) k(f2, f2)); 1.0 when both are empty, 0.0 when one is"""
    if not f1 and not f2:
        return 1.0
    if not f1 or not f2:
        return 0.0
    k12 = sum(count * f2.get(key, 0) for key, count in f1.items())
    k11 = sum(count * count for count in f1.values())
    k22 = sum(count * count for count in f2.values())
    # clamp float noise so self-similarity is exactly 1.0
    return min(1.0, k12 / math.sqrt(k11 * k22))


def sp_similarity(g1: DecisionGraph, g2: DecisionGraph, directed: bool = True) -> float:
    return normalized_kernel(sp_features(g1, directed), sp_features(g2, directed))


def similarity_matrix(
    graphs: Sequence[DecisionGraph],
    similarity: Callable[[DecisionGraph, DecisionGraph], float] = sp_similarity,
    max_workers: int = 1,
) -> np.ndarray:
    """Symmetric pairwise similarity matrix; pairs are independent"""
    n = len(graphs)
    pairs = [(i, j) for i, j in product(range(n), repeat=2) if i <= j]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        values = list(pool.map(lambda pair: similarity(graphs[pair[0]], graphs[pair[1]]), pairs))

    matrix = np.zeros((n, n))
    for (i, j), value in zip(pairs, values):
        matrix[i, j] = matrix[j, i] = value
    return matrix
