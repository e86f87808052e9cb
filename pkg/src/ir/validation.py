from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import networkx as nx

from .errors import CycleError
from .ir import DecisionGraph, NodeKind


class ViolationKind(Enum):
    CYCLE_DETECTED = "CycleDetected"
    MISSING_OUTPUT_NODE = "MissingOutputNode"
    DUPLICATE_OUTPUT_NODE = "DuplicateOutputNode"
    DANGLING_EDGE = "DanglingEdge"
    DANGLING_INPUT_REF = "DanglingInputRef"
    DUPLICATE_INPUT_REF = "DuplicateInputRef"
    INPUT_REF_WITHOUT_EDGE = "InputRefWithoutEdge"
    INPUT_WITH_INCOMING_EDGE = "InputWithIncomingEdge"
    RULE_ARITY_MISMATCH = "RuleArityMismatch"
    DUPLICATE_NODE_ID = "DuplicateNodeId"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.kind.value}({self.subject})"
        return f"{text}: {self.detail}" if self.detail else text


@dataclass(frozen=True)
class ValidationReport:
    graph_id: str
    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def kinds(self) -> List[ViolationKind]:
        return [v.kind for v in self.violations]

    def summary(self) -> str:
        if self.ok:
            return "well-formed"
        return "; ".join(str(v) for v in self.violations)


def validate_graph(graph: DecisionGraph) -> ValidationReport:
    """Report every structural problem of `graph`; never raises"""
    violations: List[Violation] = []
    ids = [node.id for node in graph.nodes]
    known = set(ids)

    for node_id, count in sorted(Counter(ids).items()):
        if count > 1:
            violations.append(Violation(ViolationKind.DUPLICATE_NODE_ID, node_id, f"{count} nodes"))

    outputs = [node.id for node in graph.nodes if node.kind is NodeKind.OUTPUT]
    if not outputs:
        violations.append(Violation(ViolationKind.MISSING_OUTPUT_NODE, graph.id))
    elif len(outputs) > 1:
        violations.append(Violation(ViolationKind.DUPLICATE_OUTPUT_NODE, graph.id, ", ".join(sorted(outputs))))
    if outputs and graph.output_node_id not in outputs:
        violations.append(Violation(
            ViolationKind.MISSING_OUTPUT_NODE, graph.output_node_id,
            "output_node_id does not name an output node",
        ))

    edge_set = set()
    for src, dst in graph.edges:
        missing = [end for end in (src, dst) if end not in known]
        if missing:
            violations.append(Violation(ViolationKind.DANGLING_EDGE, f"{src}->{dst}", f"unknown {', '.join(missing)}"))
        edge_set.add((src, dst))

    for node in graph.nodes:
        if node.kind is NodeKind.INPUT_VARIABLE:
            incoming = [src for src, dst in graph.edges if dst == node.id]
            if incoming:
                violations.append(Violation(
                    ViolationKind.INPUT_WITH_INCOMING_EDGE, node.id, f"from {', '.join(sorted(incoming))}"
                ))
            continue

        table = node.table
        for ref, count in Counter(table.input_refs).items():
            if count > 1:
                violations.append(Violation(ViolationKind.DUPLICATE_INPUT_REF, node.id, ref))
        for ref in table.input_refs:
            if ref not in known:
                violations.append(Violation(ViolationKind.DANGLING_INPUT_REF, node.id, ref))
            elif (ref, node.id) not in edge_set:
                violations.append(Violation(ViolationKind.INPUT_REF_WITHOUT_EDGE, node.id, ref))
        for index, rule in enumerate(table.rules):
            if len(rule.conditions) != len(table.input_refs):
                violations.append(Violation(
                    ViolationKind.RULE_ARITY_MISMATCH, node.id,
                    f"rule {index} has {len(rule.conditions)} condition(s) for {len(table.input_refs)} input(s)",
                ))

    try:
        cycle = nx.find_cycle(graph.to_networkx())
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        path = " -> ".join([cycle[0][0]] + [dst for _, dst in cycle])
        violations.append(Violation(ViolationKind.CYCLE_DETECTED, graph.id, path))

    return ValidationReport(graph.id, tuple(violations))


def topological_order(graph: DecisionGraph) -> List[str]:
    """Dependency order with ties broken by ascending node id"""
    digraph = graph.to_networkx()
    try:
        return list(nx.lexicographical_topological_sort(digraph))
    except nx.NetworkXUnfeasible:
        raise CycleError(nx.find_cycle(digraph)) from None
