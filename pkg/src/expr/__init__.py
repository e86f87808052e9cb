from .unary_test_evaluator import UnaryTestEvaluator, eval_unary_test
from .unary_test_parser import UnaryTestParser, parse_unary_test, render_unary_test


__all__ = [
    "UnaryTestEvaluator",
    "UnaryTestParser",
    "eval_unary_test",
    "parse_unary_test",
    "render_unary_test",
]
