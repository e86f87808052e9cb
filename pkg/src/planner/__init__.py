from .decision_planner import DecisionPlanner, PlanStep


__all__ = [
    "DecisionPlanner",
    "PlanStep",
]
