from .decision_compiler import DecisionCompiler, batch_execute, execute


__all__ = [
    "DecisionCompiler",
    "batch_execute",
    "execute",
]
