import logging
from enum import Enum
from typing import List, Optional, Tuple

from config import OutcomeKeywords
from ir import ModelType
from ir.values import Value

logger = logging.getLogger(__name__)


class OutcomeClass(Enum):
    NOT_APPLICABLE = "NotApplicable"
    PERMIT_REQUIRED = "PermitRequired"
    GENERAL_RULES_APPLY = "GeneralRulesApply"
    NOTIFICATION_REQUIRED = "NotificationRequired"
    UNCLASSIFIED = "Unclassified"


YES_NO = {"ja": True, "nee": False}


class OutcomeClassifier:
    """Keyword classification of Outcome model results; first matching entry wins"""

    def __init__(self, keywords: Optional[OutcomeKeywords] = None):
        keywords = keywords or OutcomeKeywords()
        self.entries: List[Tuple[OutcomeClass, Tuple[str, ...]]] = [
            (OutcomeClass(entry.outcome_class), tuple(keyword.lower() for keyword in entry.keywords))
            for entry in keywords.entries
        ]

    def classify(self, value: Value) -> OutcomeClass:
        if not isinstance(value, str):
            return OutcomeClass.UNCLASSIFIED
        text = value.lower()
        for outcome_class, keywords in self.entries:
            if any(keyword in text for keyword in keywords):
                return outcome_class
        return OutcomeClass.UNCLASSIFIED

    def normalize(self, value: Value, model_type: ModelType) -> Value:
        """Requirements: "Ja"/"Nee" become booleans. Outcome: text becomes its class tag."""
        if isinstance(value, tuple):
            return tuple(self.normalize(item, model_type) for item in value)
        if not isinstance(value, str):
            return value
        if model_type is ModelType.REQUIREMENTS:
            return YES_NO.get(value.strip().lower(), value)
        return self.classify(value).value


_DEFAULT = OutcomeClassifier()


def classify_outcome(value: Value, classifier: Optional[OutcomeClassifier] = None) -> OutcomeClass:
    return (classifier or _DEFAULT).classify(value)


def normalize_output(value: Value, model_type: ModelType, classifier: Optional[OutcomeClassifier] = None) -> Value:
    return (classifier or _DEFAULT).normalize(value, model_type)
