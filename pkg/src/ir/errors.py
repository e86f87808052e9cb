from typing import Optional, Sequence


class DecisionModelError(Exception):
    """Root of every error raised by the toolkit"""


class UnaryTestSyntaxError(DecisionModelError, ValueError):
    """Unrecognized unary-test text; `offset` is a byte offset into the UTF-8 text"""

    def __init__(self, message: str, text: str, offset: int):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at byte {offset} in {text!r}")


class CycleError(DecisionModelError):
    def __init__(self, cycle: Sequence[tuple]):
        self.cycle = list(cycle)
        super().__init__(f"Decision graph contains a cycle: {self.cycle}")


class GraphValidationError(DecisionModelError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"Decision graph is not well-formed: {report.summary()}")


class HitPolicyViolation(DecisionModelError):
    def __init__(self, hit_policy: str, matched_rule_indexes: Sequence[int], message: str = ""):
        self.hit_policy = hit_policy
        self.matched_rule_indexes = list(matched_rule_indexes)
        super().__init__(message or f"{hit_policy} violated by rules {self.matched_rule_indexes}")


class MissingInputError(DecisionModelError, KeyError):
    def __init__(self, input_ids: Sequence[str]):
        self.input_ids = list(input_ids)
        super().__init__(f"Assignment misses input(s): {', '.join(self.input_ids)}")

    def __str__(self) -> str:
        return self.args[0]


class UnknownInputError(DecisionModelError, KeyError):
    def __init__(self, input_ids: Sequence[str]):
        self.input_ids = list(input_ids)
        super().__init__(f"Assignment names unknown input(s): {', '.join(self.input_ids)}")

    def __str__(self) -> str:
        return self.args[0]


class DmnParseError(DecisionModelError):
    def __init__(self, message: str, element_path: Optional[str] = None):
        self.element_path = element_path
        where = f" (at {element_path})" if element_path else ""
        super().__init__(f"{message}{where}")


class SchemaError(DecisionModelError):
    def __init__(self, message: str, field_path: str = ""):
        self.field_path = field_path
        where = f"{field_path}: " if field_path else ""
        super().__init__(f"{where}{message}")


class ArticleParseError(DecisionModelError):
    pass


class ConfigError(DecisionModelError):
    pass


class ExampleSelectionError(DecisionModelError):
    def __init__(self, target_id: str, failed_filter: str):
        self.target_id = target_id
        self.failed_filter = failed_filter
        super().__init__(f"No example candidates left for '{target_id}' after filter '{failed_filter}'")


class TemplateError(DecisionModelError):
    def __init__(self, template: str, variable: str):
        self.template = template
        self.variable = variable
        super().__init__(f"Template '{template}' leaves variable '{variable}' unresolved")


class ProviderError(DecisionModelError):
    def __init__(self, message: str, status: Optional[int] = None, attempts: int = 1, transient: bool = False):
        self.status = status
        self.attempts = attempts
        self.transient = transient
        super().__init__(f"{message} (status={status}, attempts={attempts})")


class StatisticsError(DecisionModelError):
    pass


class InsufficientDataError(StatisticsError):
    pass
