import operator
from decimal import Decimal

from ir import UnaryTest, UnaryTestType
from ir.values import Value, ValueKind, value_kind, values_equal


class UnaryTestEvaluator:
    """Evaluates unary tests against a single value (total: never raises)"""

    COMPARE_OPS = {
        UnaryTestType.LT: operator.lt,
        UnaryTestType.LEQ: operator.le,
        UnaryTestType.GT: operator.gt,
        UnaryTestType.GEQ: operator.ge,
    }

    @staticmethod
    def evaluate(test: UnaryTest, value: Value) -> bool:
        test_type = test.test_type
        if test_type is UnaryTestType.IRRELEVANT:
            return True
        if test_type is UnaryTestType.IS_NULL:
            return value is None
        if test_type is UnaryTestType.NOT_NULL:
            return value is not None
        if test_type is UnaryTestType.NOT:
            return not UnaryTestEvaluator.evaluate(test.operand, value)
        if test_type is UnaryTestType.EQUALS:
            # existential over COLLECT lists
            if value_kind(value) is ValueKind.LIST:
                return any(values_equal(item, test.value) for item in value)
            return values_equal(value, test.value)
        if test_type is UnaryTestType.CONTAINS:
            if isinstance(value, str):
                return test.value in value
            if isinstance(value, tuple):
                return any(isinstance(item, str) and test.value in item for item in value)
            return False

        compare = UnaryTestEvaluator.COMPARE_OPS[test_type]
        if not isinstance(value, Decimal) or isinstance(value, bool):
            return False
        return compare(value, test.value)


def eval_unary_test(test: UnaryTest, value: Value) -> bool:
    return UnaryTestEvaluator.evaluate(test, value)
