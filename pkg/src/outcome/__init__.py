from .classification import OutcomeClass, OutcomeClassifier, classify_outcome, normalize_output
from .domains import PRESENCE_SENTINEL, DomainKind, InputDomain, extract_string_domains
from .equivalence import (
    BestRunSummary,
    CaseVerdict,
    Complementarity,
    EquivalenceFlag,
    EquivalenceResult,
    best_run_summary,
    complementarity,
    equivalence,
    macro_average,
    match_inputs,
)
from .test_cases import TestabilityReason, TestabilityVerdict, assess_testability, generate_cases


__all__ = [
    "PRESENCE_SENTINEL",
    "BestRunSummary",
    "CaseVerdict",
    "Complementarity",
    "DomainKind",
    "EquivalenceFlag",
    "EquivalenceResult",
    "InputDomain",
    "OutcomeClass",
    "OutcomeClassifier",
    "TestabilityReason",
    "TestabilityVerdict",
    "assess_testability",
    "best_run_summary",
    "classify_outcome",
    "complementarity",
    "equivalence",
    "extract_string_domains",
    "generate_cases",
    "macro_average",
    "match_inputs",
    "normalize_output",
]
