import logging
import re
from dataclasses import dataclass, field
from statistics import fmean
from typing import Collection, Dict, List, Mapping, Optional, Sequence, Tuple

from compiler import DecisionCompiler
from executor import Assignment
from ir import DecisionGraph, validate_graph
from ir.errors import DecisionModelError, InsufficientDataError
from ir.values import Value, values_equal

from .classification import OutcomeClassifier, normalize_output

logger = logging.getLogger(__name__)


class EquivalenceFlag:
    INVALID_CANDIDATE = "invalid_candidate"
    UNMATCHED_INPUTS = "unmatched_inputs"
    NO_CASES = "no_cases"


@dataclass(frozen=True)
class CaseVerdict:
    index: int
    gold_value: Value
    candidate_value: Value
    agree: bool


@dataclass
class EquivalenceResult:
    model_id: str
    case_count: int
    agree_count: int
    verdicts: List[CaseVerdict] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)
    unmatched_inputs: List[str] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.agree_count / self.case_count if self.case_count else 0.0


def _normalized_name(name: str) -> str:
    return re.sub(r"\s+", " ", name).strip().lower()


def match_inputs(gold: DecisionGraph, candidate: DecisionGraph) -> Tuple[Dict[str, str], List[str]]:
    """Gold input id -> candidate input id, by id, then exact name, then normalized name.

    Returns the mapping and the gold inputs left unmatched.
    """
    candidates = {node.id: node for node in candidate.input_nodes}
    by_name = {}
    by_normalized = {}
    for node in candidate.input_nodes:
        by_name.setdefault(node.name, node.id)
        by_normalized.setdefault(_normalized_name(node.name), node.id)

    mapping: Dict[str, str] = {}
    unmatched: List[str] = []
    taken = set()
    for node in gold.input_nodes:
        for match in (
            node.id if node.id in candidates else None,
            by_name.get(node.name),
            by_normalized.get(_normalized_name(node.name)),
        ):
            if match is not None and match not in taken:
                mapping[node.id] = match
                taken.add(match)
                break
        else:
            unmatched.append(node.id)
    return mapping, unmatched


def equivalence(
    gold: DecisionGraph,
    candidate: DecisionGraph,
    cases: Sequence[Assignment],
    classifier: Optional[OutcomeClassifier] = None,
    max_workers: int = 1,
) -> EquivalenceResult:
    """Share of cases on which both models reach the same normalized decision"""
    if not cases:
        return EquivalenceResult(gold.id, 0, 0, flags=[EquivalenceFlag.NO_CASES])

    if not validate_graph(candidate).ok:
        logger.warning("Candidate for %s is not a valid decision graph; rate 0", gold.id)
        return EquivalenceResult(gold.id, len(cases), 0, flags=[EquivalenceFlag.INVALID_CANDIDATE])

    compiler = DecisionCompiler()
    gold_executor = compiler.compile(gold)
    try:
        candidate_executor = compiler.compile(candidate)
    except DecisionModelError as e:
        logger.warning("Candidate for %s does not compile: %s", gold.id, e)
        return EquivalenceResult(gold.id, len(cases), 0, flags=[EquivalenceFlag.INVALID_CANDIDATE])

    mapping, unmatched = match_inputs(gold, candidate)
    flags = [EquivalenceFlag.UNMATCHED_INPUTS] if unmatched else []
    candidate_cases = [
        {mapping[gold_id]: value for gold_id, value in case.items() if gold_id in mapping}
        for case in cases
    ]

    gold_results = gold_executor.batch_execute(cases, max_workers=max_workers)
    candidate_results = candidate_executor.batch_execute(candidate_cases, max_workers=max_workers)

    verdicts = []
    for index, (expected, actual) in enumerate(zip(gold_results, candidate_results)):
        expected_value = normalize_output(expected.output_value, gold.model_type, classifier)
        actual_value = normalize_output(actual.output_value, gold.model_type, classifier)
        verdicts.append(CaseVerdict(index, expected_value, actual_value, values_equal(expected_value, actual_value)))

    return EquivalenceResult(
        model_id=gold.id,
        case_count=len(cases),
        agree_count=sum(verdict.agree for verdict in verdicts),
        verdicts=verdicts,
        flags=flags,
        unmatched_inputs=unmatched,
    )


def macro_average(results: Sequence[EquivalenceResult], exclude: Collection[str] = ()) -> float:
    """Unweighted mean of per-model rates; `exclude` drops models by id"""
    rates = [result.rate for result in results if result.model_id not in exclude]
    if not rates:
        raise InsufficientDataError("macro average over an empty set of models")
    return fmean(rates)


@dataclass(frozen=True)
class BestRunSummary:
    models: int
    mean_best_rate: float
    share_full: float
    share_at_least_90: float


def best_run_summary(results_by_model: Mapping[str, Sequence[EquivalenceResult]]) -> BestRunSummary:
    """Per model the best of its runs, then the share of models at 100% and at >= 90%"""
    best = [max(result.rate for result in runs) for runs in results_by_model.values() if runs]
    if not best:
        raise InsufficientDataError("best-run summary over an empty set of models")
    return BestRunSummary(
        models=len(best),
        mean_best_rate=fmean(best),
        share_full=sum(1 for rate in best if rate == 1.0) / len(best),
        share_at_least_90=sum(1 for rate in best if rate >= 0.9) / len(best),
    )


@dataclass(frozen=True)
class Complementarity:
    pairs: int
    structure_without_outcome: float
    outcome_without_structure: float


def complementarity(
    pairs: Sequence[Tuple[float, float]],
    structure_threshold: float = 0.5,
    outcome_threshold: float = 0.5,
) -> Complementarity:
    """Shares of (structural similarity, outcome rate) pairs where the two metrics disagree"""
    if not pairs:
        raise InsufficientDataError("complementarity over no generations")
    structure_only = sum(1 for sp, rate in pairs if sp >= structure_threshold and rate < outcome_threshold)
    outcome_only = sum(1 for sp, rate in pairs if rate >= outcome_threshold and sp < structure_threshold)
    return Complementarity(len(pairs), structure_only / len(pairs), outcome_only / len(pairs))
