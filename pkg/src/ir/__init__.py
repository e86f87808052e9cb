from .ir import (
    COMPARISON_TYPES,
    IRRELEVANT,
    IS_NULL,
    NOT_NULL,
    DecisionGraph,
    DecisionTable,
    HitPolicy,
    ModelType,
    Node,
    NodeKind,
    Rule,
    UnaryTest,
    UnaryTestType,
    ValueType,
)
from .validation import ValidationReport, Violation, ViolationKind, topological_order, validate_graph
from .optimizer import (
    ChainProfile,
    InputChain,
    IROptimizer,
    SimplificationReport,
    identity_fractions,
    identity_reduction,
)


__all__ = [
    "ChainProfile",
    "InputChain",
    "IROptimizer",
    "SimplificationReport",
    "identity_fractions",
    "identity_reduction",
    "COMPARISON_TYPES",
    "IRRELEVANT",
    "IS_NULL",
    "NOT_NULL",
    "DecisionGraph",
    "DecisionTable",
    "HitPolicy",
    "ModelType",
    "Node",
    "NodeKind",
    "Rule",
    "UnaryTest",
    "UnaryTestType",
    "ValueType",
    "ValidationReport",
    "Violation",
    "ViolationKind",
    "topological_order",
    "validate_graph",
]
