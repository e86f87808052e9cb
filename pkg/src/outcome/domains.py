import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Tuple

from ir import DecisionGraph, IROptimizer, NodeKind, UnaryTest, UnaryTestType, ValueType
from ir.values import Value

logger = logging.getLogger(__name__)

# stands in for "any non-null text" under pure null-check logic
PRESENCE_SENTINEL = "<aanwezig>"


class DomainKind(Enum):
    BOOLEAN = "boolean"
    CATEGORICAL = "categorical"
    PRESENCE = "presence"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class InputDomain:
    """Values an input ranges over during exhaustive testing, in canonical order"""
    input_id: str
    kind: DomainKind
    values: Tuple[Value, ...] = ()

    def __post_init__(self):
        if self.kind is DomainKind.CATEGORICAL:
            texts = [value for value in self.values if value is not None]
            if not texts:
                raise ValueError(f"Categorical domain of '{self.input_id}' is empty")
            if len(set(texts)) != len(texts):
                raise ValueError(f"Categorical domain of '{self.input_id}' repeats a value")

    @property
    def supported(self) -> bool:
        return self.kind is not DomainKind.UNSUPPORTED

    @property
    def size(self) -> int:
        return len(self.values)

    @classmethod
    def boolean(cls, input_id: str) -> 'InputDomain':
        return cls(input_id, DomainKind.BOOLEAN, (False, True))

    @classmethod
    def presence(cls, input_id: str) -> 'InputDomain':
        return cls(input_id, DomainKind.PRESENCE, (PRESENCE_SENTINEL, None))

    @classmethod
    def unsupported(cls, input_id: str) -> 'InputDomain':
        return cls(input_id, DomainKind.UNSUPPORTED)


@dataclass
class _Observations:
    literals: List[str]
    null_guarded: bool = False

    def add(self, test: UnaryTest):
        if test.test_type is UnaryTestType.NOT:
            self.add(test.operand)
        elif test.test_type in (UnaryTestType.IS_NULL, UnaryTestType.NOT_NULL):
            self.null_guarded = True
        elif test.test_type is UnaryTestType.CONTAINS or (
            test.test_type is UnaryTestType.EQUALS and isinstance(test.value, str)
        ):
            if test.value not in self.literals:
                self.literals.append(test.value)


def _bound_input(graph: DecisionGraph, ref: str) -> str:
    """Follows identity nodes upstream to the node whose value they pass through"""
    seen = set()
    while graph.has_node(ref) and ref not in seen and IROptimizer.is_identity_node(graph.node(ref)):
        seen.add(ref)
        ref = graph.node(ref).table.input_refs[0]
    return ref


def extract_string_domains(graph: DecisionGraph) -> Dict[str, InputDomain]:
    """Domain of every input variable, keyed by input id.

    String inputs draw their values from the equality literals and contains()
    needles of every condition bound to them, directly or through identity
    nodes, in order of appearance. Number inputs are unsupported.
    """
    observations: Dict[str, _Observations] = {
        node.id: _Observations(literals=[]) for node in graph.input_nodes
    }
    for node in graph.table_nodes:
        for position, ref in enumerate(node.table.input_refs):
            bound = _bound_input(graph, ref)
            if bound not in observations:
                continue
            for rule in node.table.rules:
                if position < len(rule.conditions):
                    observations[bound].add(rule.conditions[position])

    domains: Dict[str, InputDomain] = {}
    for node in graph.input_nodes:
        seen = observations[node.id]
        if node.value_type is ValueType.BOOLEAN:
            domains[node.id] = InputDomain.boolean(node.id)
        elif node.value_type is ValueType.STRING and seen.literals:
            values = tuple(seen.literals) + ((None,) if seen.null_guarded else ())
            domains[node.id] = InputDomain(node.id, DomainKind.CATEGORICAL, values)
        elif node.value_type is ValueType.STRING and seen.null_guarded:
            domains[node.id] = InputDomain.presence(node.id)
        else:
            logger.debug("%s: no finite domain for input %s (%s)", graph.id, node.id, node.value_type)
            domains[node.id] = InputDomain.unsupported(node.id)
    return domains
