"""Graphlet kernel over the undirected skeleton of a decision graph.

Graphlets are connected induced subgraphs with 3 to 5 nodes. Each one is
bucketed by its isomorphism class, identified by its index in the networkx
graph atlas, so feature keys are stable across runs and graphs.
"""
import logging
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Sequence, Set, Tuple

import networkx as nx

from ir import DecisionGraph

from .sp_kernel import normalized_kernel

logger = logging.getLogger(__name__)

SUPPORTED_SIZES = (3, 4, 5)
EXHAUSTIVE_NODE_LIMIT = 30
DEFAULT_SAMPLE_BUDGET = 2000
DEFAULT_SEED = 0

# (graphlet size, atlas index) -> count
GraphletFeatures = Dict[Tuple[int, int], float]


@dataclass(frozen=True)
class GraphletCounts:
    features: GraphletFeatures
    sampled: bool


@lru_cache(maxsize=None)
def _atlas_classes() -> Dict[Tuple[int, int, Tuple[int, ...]], List[Tuple[int, nx.Graph]]]:
    """Connected atlas graphs of the supported sizes, bucketed by cheap invariants"""
    buckets: Dict[Tuple[int, int, Tuple[int, ...]], List[Tuple[int, nx.Graph]]] = defaultdict(list)
    for index, atlas_graph in enumerate(nx.graph_atlas_g()):
        n = atlas_graph.number_of_nodes()
        if n > max(SUPPORTED_SIZES):
            break
        if n in SUPPORTED_SIZES and nx.is_connected(atlas_graph):
            buckets[_invariants(atlas_graph)].append((index, atlas_graph))
    return dict(buckets)


def _invariants(graph: nx.Graph) -> Tuple[int, int, Tuple[int, ...]]:
    return graph.number_of_nodes(), graph.number_of_edges(), tuple(sorted(d for _, d in graph.degree()))


def graphlet_class(subgraph: nx.Graph) -> int:
    """Atlas index of the isomorphism class of a connected 3..5 node graph"""
    candidates = _atlas_classes().get(_invariants(subgraph), [])
    if len(candidates) == 1:
        return candidates[0][0]
    for index, atlas_graph in candidates:
        if nx.is_isomorphic(subgraph, atlas_graph):
            return index
    raise ValueError(f"Not a connected graphlet of size {sorted(SUPPORTED_SIZES)}: {subgraph.edges()}")


def connected_subsets(graph: nx.Graph, k: int) -> Iterator[FrozenSet]:
    """Every connected induced k-node subset exactly once (ESU enumeration)"""
    order = {node: i for i, node in enumerate(sorted(graph.nodes, key=str))}

    def extend(subset: Set, extension: Set, neighborhood: Set, root) -> Iterator[FrozenSet]:
        if len(subset) == k:
            yield frozenset(subset)
            return
        extension = set(extension)
        while extension:
            w = min(extension, key=order.__getitem__)
            extension.discard(w)
            exclusive = {
                u for u in graph.neighbors(w)
                if order[u] > order[root] and u not in subset and u not in neighborhood
            }
            yield from extend(subset | {w}, extension | exclusive, neighborhood | set(graph.neighbors(w)), root)

    for root in sorted(graph.nodes, key=order.__getitem__):
        initial = {u for u in graph.neighbors(root) if order[u] > order[root]}
        yield from extend({root}, initial, set(graph.neighbors(root)) | {root}, root)


def _sample_subsets(graph: nx.Graph, k: int, budget: int, seed: int) -> Tuple[List[FrozenSet], int]:
    """Uniform sample of at most `budget` connected k-subsets and the number there are.

    Reservoir sampling over the ESU stream, so every connected subset is
    equally likely to be kept whatever the density around it.
    """
    rng = random.Random(f"{seed}:{k}")
    reservoir: List[FrozenSet] = []
    seen = 0
    for subset in connected_subsets(graph, k):
        if seen < budget:
            reservoir.append(subset)
        else:
            slot = rng.randrange(seen + 1)
            if slot < budget:
                reservoir[slot] = subset
        seen += 1
    return reservoir, seen


def graphlet_features(
    graph: DecisionGraph,
    sizes: Iterable[int] = SUPPORTED_SIZES,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = DEFAULT_SEED,
) -> GraphletCounts:
    sizes = sorted(set(sizes))
    if not set(sizes) <= set(SUPPORTED_SIZES):
        raise ValueError(f"Graphlet sizes must be a subset of {SUPPORTED_SIZES}, got {sizes}")

    skeleton = graph.to_networkx().to_undirected()
    sampled = skeleton.number_of_nodes() > EXHAUSTIVE_NODE_LIMIT
    counts: Counter = Counter()
    for k in sizes:
        if not sampled:
            for subset in connected_subsets(skeleton, k):
                counts[(k, graphlet_class(skeleton.subgraph(subset)))] += 1
            continue
        subsets, total = _sample_subsets(skeleton, k, sample_budget, seed)
        if not subsets:
            continue
        # sampled class counts scaled to estimates of the exhaustive counts
        scale = total / len(subsets)
        sample_counts = Counter(graphlet_class(skeleton.subgraph(subset)) for subset in subsets)
        for index, count in sample_counts.items():
            counts[(k, index)] = count * scale
        logger.debug("Classified %d of %d connected %d-subsets of %s", len(subsets), total, k, graph.id)
    return GraphletCounts(features=dict(counts), sampled=sampled)


def _per_size_frequencies(features: GraphletFeatures) -> GraphletFeatures:
    totals: Counter = Counter()
    for (k, _), count in features.items():
        totals[k] += count
    return {key: count / totals[key[0]] for key, count in features.items()}


def graphlet_similarity(
    g1: DecisionGraph,
    g2: DecisionGraph,
    sizes: Sequence[int] = SUPPORTED_SIZES,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = DEFAULT_SEED,
) -> float:
    c1 = graphlet_features(g1, sizes, sample_budget, seed)
    c2 = graphlet_features(g2, sizes, sample_budget, seed)
    f1, f2 = c1.features, c2.features
    if c1.sampled or c2.sampled:
        # sampled counts are not on the exhaustive scale; compare per-size distributions
        f1, f2 = _per_size_frequencies(f1), _per_size_frequencies(f2)
    return normalized_kernel(f1, f2)
