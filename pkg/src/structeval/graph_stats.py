import logging
from collections import Counter
from dataclasses import asdict, dataclass, fields
from typing import Dict, Iterable, List, Sequence

import networkx as nx
import numpy as np

from ir import DecisionGraph, NodeKind, UnaryTestType

logger = logging.getLogger(__name__)

OVERALL = "Overall"


@dataclass(frozen=True)
class GraphStats:
    nodes: int
    edges: int
    input_nodes: int
    referenced_input_nodes: int
    total_rules: int
    rules_per_decision_node: float
    inputs_per_rule: float
    single_condition_rule_share: float
    mean_in_degree: float
    density: float
    depth: int
    depth_edges: int
    max_width: int

    @classmethod
    def metric_names(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class AggregateStat:
    group: str
    metric: str
    mean: float
    std: float
    count: int


def _longest_levels(nx_graph: nx.DiGraph) -> Dict[str, int]:
    """Longest distance (in edges) from any source to each node"""
    levels: Dict[str, int] = {}
    for node in nx.topological_sort(nx_graph):
        levels[node] = max((levels[p] + 1 for p in nx_graph.predecessors(node)), default=0)
    return levels


def descriptive_stats(graph: DecisionGraph) -> GraphStats:
    n = len(graph.nodes)
    e = len(graph.edges)
    nx_graph = graph.to_networkx()

    tables = [node.table for node in graph.table_nodes]
    rules = [rule for table in tables for rule in table.rules]
    active_conditions = [
        sum(1 for test in rule.conditions if test.test_type is not UnaryTestType.IRRELEVANT)
        for rule in rules
    ]
    referenced = {ref for table in tables for ref in table.input_refs}
    inputs = graph.nodes_of_kind(NodeKind.INPUT_VARIABLE)

    levels = _longest_levels(nx_graph) if n else {}
    depth_edges = max(levels.values(), default=0)
    widths = Counter(levels.values())

    return GraphStats(
        nodes=n,
        edges=e,
        input_nodes=len(inputs),
        referenced_input_nodes=sum(1 for node in inputs if node.id in referenced),
        total_rules=len(rules),
        rules_per_decision_node=len(rules) / len(tables) if tables else 0.0,
        inputs_per_rule=sum(active_conditions) / len(rules) if rules else 0.0,
        single_condition_rule_share=sum(1 for c in active_conditions if c == 1) / len(rules) if rules else 0.0,
        mean_in_degree=e / n if n else 0.0,
        density=e / (n * (n - 1)) if n > 1 else 0.0,
        depth=depth_edges + 1 if n else 0,
        depth_edges=depth_edges,
        max_width=max(widths.values(), default=0),
    )


def aggregate_stats(graphs: Iterable[DecisionGraph], include_overall: bool = True) -> List[AggregateStat]:
    """Mean and population standard deviation of every metric per model type"""
    groups: Dict[str, List[GraphStats]] = {}
    for graph in graphs:
        stats = descriptive_stats(graph)
        groups.setdefault(graph.model_type.value, []).append(stats)
        if include_overall:
            groups.setdefault(OVERALL, []).append(stats)

    rows = []
    for group in sorted(groups, key=lambda g: (g == OVERALL, g)):
        rows.extend(_summarize(group, groups[group]))
    return rows


def _summarize(group: str, members: Sequence[GraphStats]) -> List[AggregateStat]:
    matrix = np.array([[getattr(stats, name) for name in GraphStats.metric_names()] for stats in members], dtype=float)
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0, ddof=0)
    return [
        AggregateStat(group=group, metric=name, mean=float(mean), std=float(std), count=len(members))
        for name, mean, std in zip(GraphStats.metric_names(), means, stds)
    ]
