from .hit_policy import HIT_POLICY_OPS, HitPolicies, evaluate_table, matching_rules


__all__ = [
    "HIT_POLICY_OPS",
    "HitPolicies",
    "evaluate_table",
    "matching_rules",
]
