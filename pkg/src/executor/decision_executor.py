import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

from hit_policy import matching_rules
from ir import NodeKind
from ir.errors import HitPolicyViolation, MissingInputError, UnknownInputError
from ir.values import Value
from planner import PlanStep

logger = logging.getLogger(__name__)

Assignment = Mapping[str, Value]


@dataclass(frozen=True)
class ExecutionError:
    node_id: str
    kind: str
    detail: str = ""


@dataclass
class ExecutionResult:
    output_value: Value
    node_values: Dict[str, Value] = field(default_factory=dict)
    errors: List[ExecutionError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


class DecisionExecutor:
    """Executes a decision plan on input assignments.

    Hit-policy violations do not abort execution: the violating node yields
    Null, the violation is recorded in `ExecutionResult.errors`, and
    downstream nodes see Null.
    """

    def __init__(self, plan: List[PlanStep], output_node_id: str):
        if not plan:
            raise ValueError("Empty execution plan")
        self.plan = plan
        self.output_node_id = output_node_id
        self.input_ids: Tuple[str, ...] = tuple(sorted(
            step.node_id for step in plan if step.kind is NodeKind.INPUT_VARIABLE
        ))

    def execute(self, assignment: Assignment, strict: bool = False) -> ExecutionResult:
        """Evaluate every node in plan order.

        In strict mode the assignment must name exactly the input variables;
        otherwise unassigned inputs read as Null and unknown keys are ignored.
        """
        missing = [input_id for input_id in self.input_ids if input_id not in assignment]
        unknown = sorted(key for key in assignment if key not in self.input_ids)
        if strict:
            if missing:
                raise MissingInputError(missing)
            if unknown:
                raise UnknownInputError(unknown)
        if missing:
            logger.debug("Inputs %s unassigned, reading Null", missing)
        if unknown:
            logger.debug("Assignment keys %s are not inputs, ignoring them", unknown)

        env: Dict[str, Value] = {}
        errors: List[ExecutionError] = []

        for step in self.plan:
            if step.kind is NodeKind.INPUT_VARIABLE:
                env[step.node_id] = assignment.get(step.node_id)
                continue

            inputs = [env.get(ref) for ref in step.input_refs]
            try:
                env[step.node_id] = step.combine(step.table, matching_rules(step.table, inputs))
            except HitPolicyViolation as e:
                errors.append(ExecutionError(step.node_id, "HitPolicyViolation", str(e)))
                env[step.node_id] = None

        return ExecutionResult(output_value=env.get(self.output_node_id), node_values=env, errors=errors)

    def batch_execute(
        self,
        cases: Sequence[Assignment],
        strict: bool = False,
        max_workers: int = 1,
    ) -> List[ExecutionResult]:
        """Results in case order, whatever the degree of parallelism"""
        if max_workers <= 1 or len(cases) < 2:
            return [self.execute(case, strict) for case in cases]
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(lambda case: self.execute(case, strict), cases))

