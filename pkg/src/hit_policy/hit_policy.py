from typing import List, Sequence

from expr import UnaryTestEvaluator
from ir import DecisionTable, HitPolicy
from ir.errors import HitPolicyViolation
from ir.values import Value, values_equal


def matching_rules(table: DecisionTable, inputs: Sequence[Value]) -> List[int]:
    """Indexes of the rules whose conditions all hold on the positional inputs"""
    if len(inputs) != len(table.input_refs):
        raise ValueError(
            f"Table expects {len(table.input_refs)} input value(s), got {len(inputs)}"
        )
    return [
        index for index, rule in enumerate(table.rules)
        if all(UnaryTestEvaluator.evaluate(test, value) for test, value in zip(rule.conditions, inputs))
    ]


class HitPolicies:
    """Rule-combination semantics; each takes the table and the matched rule indexes"""

    @staticmethod
    def unique(table: DecisionTable, matched: List[int]) -> Value:
        if not matched:
            return None
        if len(matched) > 1:
            raise HitPolicyViolation(HitPolicy.UNIQUE.value, matched, f"UNIQUE table matched {len(matched)} rules: {matched}")
        return table.rules[matched[0]].output_value

    @staticmethod
    def first(table: DecisionTable, matched: List[int]) -> Value:
        if not matched:
            return None
        return table.rules[matched[0]].output_value

    @staticmethod
    def any(table: DecisionTable, matched: List[int]) -> Value:
        if not matched:
            return None
        outputs = [table.rules[index].output_value for index in matched]
        if any(not values_equal(outputs[0], other) for other in outputs[1:]):
            raise HitPolicyViolation(HitPolicy.ANY.value, matched, f"ANY table matched rules {matched} with conflicting outputs")
        return outputs[0]

    @staticmethod
    def collect(table: DecisionTable, matched: List[int]) -> Value:
        return tuple(table.rules[index].output_value for index in matched)


HIT_POLICY_OPS = {
    HitPolicy.UNIQUE: HitPolicies.unique,
    HitPolicy.FIRST: HitPolicies.first,
    HitPolicy.ANY: HitPolicies.any,
    HitPolicy.COLLECT: HitPolicies.collect,
}


def evaluate_table(table: DecisionTable, inputs: Sequence[Value]) -> Value:
    """Value of `table` on positional inputs; raises HitPolicyViolation"""
    return HIT_POLICY_OPS[table.hit_policy](table, matching_rules(table, inputs))
