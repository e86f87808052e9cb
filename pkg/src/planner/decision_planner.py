from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

from hit_policy import HIT_POLICY_OPS
from ir import DecisionGraph, DecisionTable, NodeKind, topological_order


@dataclass(frozen=True)
class PlanStep:
    """One node of the execution plan.

    Input steps carry no table; table steps carry the hit-policy function
    that combines their matched rules.
    """
    node_id: str
    kind: NodeKind
    input_refs: Tuple[str, ...] = ()
    table: Optional[DecisionTable] = None
    combine: Optional[Callable] = None


class DecisionPlanner:
    """Transforms a decision graph into an ordered execution plan"""

    def __init__(self):
        # Dictionary mapping hit policies to their combination functions
        self.operator_dict = dict(HIT_POLICY_OPS)

    def plan(self, graph: DecisionGraph) -> List[PlanStep]:
        """Steps in topological order (ties by node id)"""
        plan = []
        for node_id in topological_order(graph):
            node = graph.node(node_id)
            if node.kind is NodeKind.INPUT_VARIABLE:
                plan.append(PlanStep(node_id=node_id, kind=node.kind))
            else:
                plan.append(PlanStep(
                    node_id=node_id,
                    kind=node.kind,
                    input_refs=node.table.input_refs,
                    table=node.table,
                    combine=self.operator_dict[node.table.hit_policy],
                ))
        return plan
