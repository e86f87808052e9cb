from .decision_executor import Assignment, DecisionExecutor, ExecutionError, ExecutionResult


__all__ = [
    "Assignment",
    "DecisionExecutor",
    "ExecutionError",
    "ExecutionResult",
]
