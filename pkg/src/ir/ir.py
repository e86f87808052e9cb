from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx

from .values import Value, ValueKind, value_kind


class NodeKind(Enum):
    """Decision graph node types"""
    INPUT_VARIABLE = "input"
    DECISION = "decision"
    OUTPUT = "output"


class ValueType(Enum):
    """Declared type of an input variable"""
    BOOLEAN = "boolean"
    STRING = "string"
    NUMBER = "number"


class HitPolicy(Enum):
    """How matching rules of a decision table are combined"""
    UNIQUE = "UNIQUE"
    FIRST = "FIRST"
    ANY = "ANY"
    COLLECT = "COLLECT"


class ModelType(Enum):
    OUTCOME = "Outcome"
    REQUIREMENTS = "Requirements"


class UnaryTestType(Enum):
    """Unary test forms allowed in a decision table cell"""
    IRRELEVANT = "irrelevant"
    EQUALS = "equals"
    IS_NULL = "is_null"
    NOT_NULL = "not_null"
    LT = "<"
    LEQ = "<="
    GT = ">"
    GEQ = ">="
    CONTAINS = "contains"
    NOT = "not"


COMPARISON_TYPES = frozenset({UnaryTestType.LT, UnaryTestType.LEQ, UnaryTestType.GT, UnaryTestType.GEQ})


@dataclass(frozen=True, kw_only=True)
class UnaryTest:
    """A single-input condition.

    `value` holds the literal for EQUALS, the number for comparisons and the
    needle for CONTAINS; `operand` holds the wrapped test for NOT.
    """
    test_type: UnaryTestType
    value: Any = None
    operand: Optional['UnaryTest'] = None

    def __post_init__(self):
        if self.test_type is UnaryTestType.NOT:
            if self.operand is None:
                raise ValueError("not() requires an operand")
            if self.operand.test_type is UnaryTestType.IRRELEVANT:
                raise ValueError("not() never wraps the irrelevant test '-'")
            if self.operand.test_type is UnaryTestType.IS_NULL:
                raise ValueError("not(null) is represented by NOT_NULL")
        elif self.operand is not None:
            raise ValueError(f"{self.test_type.value} takes no operand")

        if self.test_type is UnaryTestType.EQUALS:
            if value_kind(self.value) in (ValueKind.LIST, ValueKind.NULL):
                raise ValueError("Equality literals hold a boolean, number or text")
        elif self.test_type in COMPARISON_TYPES:
            if not isinstance(self.value, Decimal):
                raise ValueError(f"Comparison {self.test_type.value} needs a number, got {self.value!r}")
        elif self.test_type is UnaryTestType.CONTAINS:
            if not isinstance(self.value, str):
                raise ValueError(f"contains() needs a text needle, got {self.value!r}")

    @classmethod
    def equals(cls, value: Value) -> 'UnaryTest':
        return cls(test_type=UnaryTestType.EQUALS, value=value)

    @classmethod
    def contains(cls, needle: str) -> 'UnaryTest':
        return cls(test_type=UnaryTestType.CONTAINS, value=needle)

    @classmethod
    def negate(cls, operand: 'UnaryTest') -> 'UnaryTest':
        if operand.test_type is UnaryTestType.IS_NULL:
            return NOT_NULL
        return cls(test_type=UnaryTestType.NOT, operand=operand)


IRRELEVANT = UnaryTest(test_type=UnaryTestType.IRRELEVANT)
IS_NULL = UnaryTest(test_type=UnaryTestType.IS_NULL)
NOT_NULL = UnaryTest(test_type=UnaryTestType.NOT_NULL)


@dataclass(frozen=True)
class Rule:
    """Conditions are positionally aligned with the table's input_refs"""
    conditions: Tuple[UnaryTest, ...]
    output_value: Value


@dataclass(frozen=True)
class DecisionTable:
    hit_policy: HitPolicy
    input_refs: Tuple[str, ...]
    output_name: str
    rules: Tuple[Rule, ...] = ()


@dataclass(frozen=True)
class Node:
    id: str
    name: str
    kind: NodeKind
    value_type: Optional[ValueType] = None
    table: Optional[DecisionTable] = None

    def __post_init__(self):
        if self.kind is NodeKind.INPUT_VARIABLE:
            if self.table is not None:
                raise ValueError(f"Input variable '{self.id}' cannot own a decision table")
        elif self.table is None:
            raise ValueError(f"{self.kind.value} node '{self.id}' needs a decision table")
        elif self.value_type is not None:
            raise ValueError(f"Only input variables declare a value type ('{self.id}')")


@dataclass(frozen=True)
class DecisionGraph:
    """DAG of input, decision and output nodes; an edge (a, b) means a feeds b"""
    id: str
    model_type: ModelType
    nodes: Tuple[Node, ...]
    edges: Tuple[Tuple[str, str], ...]
    output_node_id: str
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @cached_property
    def _index(self) -> Dict[str, Node]:
        # first node wins on duplicate ids; validation reports the duplicates
        index: Dict[str, Node] = {}
        for node in self.nodes:
            index.setdefault(node.id, node)
        return index

    def node(self, node_id: str) -> Node:
        return self._index[node_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._index

    @property
    def node_ids(self) -> List[str]:
        return [node.id for node in self.nodes]

    def nodes_of_kind(self, kind: NodeKind) -> List[Node]:
        return [node for node in self.nodes if node.kind is kind]

    @property
    def input_nodes(self) -> List[Node]:
        return sorted(self.nodes_of_kind(NodeKind.INPUT_VARIABLE), key=lambda n: n.id)

    @property
    def table_nodes(self) -> List[Node]:
        """Decision and output nodes, i.e. every node that owns a table"""
        return [node for node in self.nodes if node.table is not None]

    def predecessors(self, node_id: str) -> List[str]:
        return sorted(src for src, dst in self.edges if dst == node_id)

    def successors(self, node_id: str) -> List[str]:
        return sorted(dst for src, dst in self.edges if src == node_id)

    def consumers(self, node_id: str) -> List[Node]:
        """Table nodes whose input_refs mention `node_id`, by ascending id"""
        return sorted(
            (node for node in self.table_nodes if node_id in node.table.input_refs),
            key=lambda n: n.id,
        )

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for node in self.nodes:
            graph.add_node(node.id, kind=node.kind.value)
        graph.add_edges_from(self.edges)
        return graph
