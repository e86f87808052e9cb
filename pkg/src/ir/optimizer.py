import logging
from dataclasses import dataclass, field, replace
from statistics import fmean
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx

from .ir import DecisionGraph, ModelType, Node, NodeKind, UnaryTestType
from .values import values_equal

logger = logging.getLogger(__name__)

PLACEHOLDER_PATTERN = "vaste waarde"


@dataclass(frozen=True)
class SimplificationReport:
    graph_id: str
    removed_node_ids: Tuple[str, ...]
    identity_fraction_before: float
    nodes_before: int
    nodes_after: int
    edges_before: int
    edges_after: int
    rewired_edges: Tuple[Tuple[str, str, str], ...] = ()
    # identity nodes that could not be removed without duplicating a consumer input
    retained_identity_ids: Tuple[str, ...] = ()


@dataclass(frozen=True)
class InputChain:
    input_id: str
    shortest: Optional[int]
    longest: Optional[int]


@dataclass(frozen=True)
class ChainProfile:
    graph_id: str
    chains: Tuple[InputChain, ...]
    ur_nodes: int
    cr_nodes: int
    summary: Dict[str, float] = field(default_factory=dict)


class IROptimizer:
    """IR-to-IR rewrites that remove modelling conventions without changing outcomes"""

    def canonicalize(self, graph: DecisionGraph) -> DecisionGraph:
        simplified, _ = self.eliminate_identity_nodes(graph)
        return simplified

    @staticmethod
    def is_identity_node(node: Node) -> bool:
        """A single-input decision whose rules map distinct literals onto themselves"""
        if node.kind is not NodeKind.DECISION:
            return False
        table = node.table
        if len(table.input_refs) != 1 or not table.rules:
            return False
        seen = []
        for rule in table.rules:
            if len(rule.conditions) != 1:
                return False
            test = rule.conditions[0]
            if test.test_type is not UnaryTestType.EQUALS:
                return False
            if not values_equal(test.value, rule.output_value):
                return False
            if any(values_equal(test.value, other) for other in seen):
                return False
            seen.append(test.value)
        return True

    def eliminate_identity_nodes(self, graph: DecisionGraph) -> Tuple[DecisionGraph, SimplificationReport]:
        """Rewire consumers of identity nodes to the identity's upstream node until none is left"""
        nodes: Dict[str, Node] = {node.id: node for node in graph.nodes}
        edges: List[Tuple[str, str]] = list(graph.edges)
        removed: List[str] = []
        rewired: List[Tuple[str, str, str]] = []

        decision_count = sum(1 for node in graph.nodes if node.kind is NodeKind.DECISION)
        identity_before = sum(1 for node in graph.nodes if self.is_identity_node(node))

        while True:
            candidate = self._next_removable(nodes)
            if candidate is None:
                break
            identity = nodes.pop(candidate)
            upstream = identity.table.input_refs[0]

            for consumer_id in sorted(nodes):
                consumer = nodes[consumer_id]
                if consumer.table is None or candidate not in consumer.table.input_refs:
                    continue
                refs = tuple(upstream if ref == candidate else ref for ref in consumer.table.input_refs)
                nodes[consumer_id] = replace(consumer, table=replace(consumer.table, input_refs=refs))
                rewired.append((consumer_id, candidate, upstream))

            new_edges = []
            for src, dst in edges:
                if dst == candidate:
                    continue
                if src == candidate:
                    src = upstream
                if (src, dst) not in new_edges:
                    new_edges.append((src, dst))
            edges = new_edges
            removed.append(candidate)
            logger.debug("%s: removed identity node %s (upstream %s)", graph.id, candidate, upstream)

        retained = tuple(sorted(node_id for node_id, node in nodes.items() if self.is_identity_node(node)))
        simplified = replace(
            graph,
            nodes=tuple(nodes[node.id] for node in graph.nodes if node.id in nodes),
            edges=tuple(edges),
        )
        report = SimplificationReport(
            graph_id=graph.id,
            removed_node_ids=tuple(removed),
            identity_fraction_before=identity_before / decision_count if decision_count else 0.0,
            nodes_before=len(graph.nodes),
            nodes_after=len(simplified.nodes),
            edges_before=len(graph.edges),
            edges_after=len(simplified.edges),
            rewired_edges=tuple(rewired),
            retained_identity_ids=retained,
        )
        return simplified, report

    def _next_removable(self, nodes: Dict[str, Node]) -> Optional[str]:
        for node_id in sorted(nodes):
            node = nodes[node_id]
            if not self.is_identity_node(node):
                continue
            upstream = node.table.input_refs[0]
            if upstream not in nodes:
                continue
            clash = any(
                other.table is not None and node_id in other.table.input_refs and upstream in other.table.input_refs
                for other in nodes.values()
            )
            if not clash:
                return node_id
        return None

    @staticmethod
    def detect_placeholder_inputs(graph: DecisionGraph, pattern: str = PLACEHOLDER_PATTERN) -> List[str]:
        """Input variables whose name marks them as a fixed-value placeholder"""
        needle = pattern.lower()
        return sorted(
            node.id for node in graph.nodes
            if node.kind is NodeKind.INPUT_VARIABLE and needle in node.name.lower()
        )

    @staticmethod
    def chain_profile(graph: DecisionGraph) -> ChainProfile:
        """Node counts of the shortest and longest paths from each input to the output"""
        digraph = graph.to_networkx()
        order = list(nx.topological_sort(digraph))
        target = graph.output_node_id
        chains = []
        for node in graph.input_nodes:
            if node.id == target or not nx.has_path(digraph, node.id, target):
                chains.append(InputChain(node.id, None, None))
                continue
            shortest = nx.shortest_path_length(digraph, node.id, target) + 1
            # longest path by dynamic programming over the topological order
            longest = {node.id: 1}
            for current in order:
                if current not in longest:
                    continue
                for nxt in digraph.successors(current):
                    longest[nxt] = max(longest.get(nxt, 0), longest[current] + 1)
            chains.append(InputChain(node.id, shortest, longest[target]))

        connected = [chain for chain in chains if chain.longest is not None]
        summary: Dict[str, float] = {}
        if connected:
            summary = {
                "min_shortest": float(min(c.shortest for c in connected)),
                "mean_shortest": fmean(c.shortest for c in connected),
                "max_longest": float(max(c.longest for c in connected)),
                "mean_longest": fmean(c.longest for c in connected),
                "disconnected_inputs": float(len(chains) - len(connected)),
            }
        names = [node.name.strip() for node in graph.nodes]
        return ChainProfile(
            graph_id=graph.id,
            chains=tuple(chains),
            ur_nodes=sum(1 for name in names if name.endswith(" UR")),
            cr_nodes=sum(1 for name in names if name.endswith(" CR")),
            summary=summary,
        )


def identity_fractions(graphs: Iterable[DecisionGraph]) -> Dict[ModelType, Dict[str, float]]:
    """Pooled identity-node share per model type, over decision nodes and over all nodes"""
    totals: Dict[ModelType, List[int]] = {}
    for graph in graphs:
        identity = sum(1 for node in graph.nodes if IROptimizer.is_identity_node(node))
        decisions = sum(1 for node in graph.nodes if node.kind is NodeKind.DECISION)
        bucket = totals.setdefault(graph.model_type, [0, 0, 0])
        bucket[0] += identity
        bucket[1] += decisions
        bucket[2] += len(graph.nodes)
    return {
        model_type: {
            "identity_nodes": float(identity),
            "of_decision_nodes": identity / decisions if decisions else 0.0,
            "of_all_nodes": identity / total if total else 0.0,
        }
        for model_type, (identity, decisions, total) in totals.items()
    }


def identity_reduction(gold: DecisionGraph, generated: DecisionGraph) -> Optional[float]:
    """Relative drop in identity nodes from gold to generated; None when gold has none"""
    gold_count = sum(1 for node in gold.nodes if IROptimizer.is_identity_node(node))
    if gold_count == 0:
        return None
    generated_count = sum(1 for node in generated.nodes if IROptimizer.is_identity_node(node))
    return 1.0 - generated_count / gold_count
