from typing import List, Optional, Sequence

from executor import Assignment, DecisionExecutor, ExecutionResult
from ir import DecisionGraph, IROptimizer, validate_graph
from ir.errors import GraphValidationError
from planner import DecisionPlanner


class DecisionCompiler:
    """Full pipeline: decision graph -> validated -> (simplified) -> plan -> executor"""

    def __init__(self, simplify: bool = False):
        self.simplify = simplify
        self.optimizer = IROptimizer()
        self.planner = DecisionPlanner()

    def compile(self, graph: DecisionGraph) -> DecisionExecutor:
        # Layer 1: reject malformed graphs
        report = validate_graph(graph)
        if not report.ok:
            raise GraphValidationError(report)

        # Layer 2: optional identity-node elimination
        if self.simplify:
            graph, _ = self.optimizer.eliminate_identity_nodes(graph)

        # Layer 3: ordered plan with hit-policy functions
        plan = self.planner.plan(graph)

        # Layer 4: executor
        return DecisionExecutor(plan, graph.output_node_id)


def execute(graph: DecisionGraph, assignment: Assignment, strict: bool = False) -> ExecutionResult:
    return DecisionCompiler().compile(graph).execute(assignment, strict)


def batch_execute(
    graph: DecisionGraph,
    cases: Sequence[Assignment],
    strict: bool = False,
    max_workers: int = 1,
    executor: Optional[DecisionExecutor] = None,
) -> List[ExecutionResult]:
    executor = executor or DecisionCompiler().compile(graph)
    return executor.batch_execute(cases, strict, max_workers)
