"""Report tables and their CSV emission.

Builders turn run records, gold graphs and evaluation results into rows;
`emit_report` writes every table as a UTF-8 CSV. Missing inputs leave a
header-only file and a line in gaps.csv. Output is byte-stable: rows are
sorted and floats use a fixed format.
"""
import csv
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean, pstdev
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from harness import Condition, RunRecord, Validity
from ir import DecisionGraph
from outcome import EquivalenceResult, best_run_summary, macro_average
from structeval import AggregateStat, GraphStats, descriptive_stats, graphlet_similarity, sp_similarity

from .example_effects import EXCON_GENVAR, EXSIM_GENSIM, ExampleEffects
from .statistics import StatResult, wilcoxon_signed_rank
from .text_features import TertileRow

logger = logging.getLogger(__name__)

CONDITION_PAIRS = (
    (Condition.TEXT, Condition.TEXT_SRL),
    (Condition.TEXT, Condition.TEXT_IO),
    (Condition.TEXT_IO, Condition.TEXT_SRL_IO),
)
COMPARISON_METRICS = ("nodes", "edges", "rules_per_decision_node", "inputs_per_rule", "depth", "max_width")
GOLD = "Gold"


@dataclass(frozen=True)
class SimilarityRow:
    model_type: str
    condition: str
    sp_mean: float
    sp_std: float
    graphlet_mean: Optional[float]
    graphlet_std: Optional[float]
    generations: int


@dataclass(frozen=True)
class ConditionTest:
    model_type: str
    condition_a: str
    condition_b: str
    statistic: Optional[float]
    p_value: float
    n: int
    method: str


@dataclass(frozen=True)
class ComparisonRow:
    model_type: str
    source: str
    metric: str
    mean: float
    std: float
    count: int


@dataclass(frozen=True)
class EquivalenceRow:
    model_id: str
    model_type: str
    condition: str
    run_index: int
    case_count: int
    agree_count: int
    rate: float
    flags: str


@dataclass(frozen=True)
class EquivalenceSummaryRow:
    model_type: str
    condition: str
    models: int
    macro_average: float
    macro_average_filtered: Optional[float]
    share_full: float
    share_at_least_90: float


@dataclass(frozen=True)
class RunHealthRow:
    condition: str
    records: int
    parsed: int
    schema_error: int
    validation_error: int
    provider_error: int
    failure_rate: float


@dataclass
class ReportArtifacts:
    seed: int
    gold_stats: Optional[List[AggregateStat]] = None
    similarity: Optional[List[SimilarityRow]] = None
    similarity_tests: Optional[List[ConditionTest]] = None
    descriptive_comparison: Optional[List[ComparisonRow]] = None
    equivalence: Optional[List[EquivalenceRow]] = None
    equivalence_summary: Optional[List[EquivalenceSummaryRow]] = None
    tertiles: Optional[Dict[str, List[TertileRow]]] = None
    feature_correlations: Optional[Dict[str, Optional[StatResult]]] = None
    example_effects: Optional[ExampleEffects] = None
    run_health: Optional[List[RunHealthRow]] = None
    notes: List[str] = field(default_factory=list)


def _parsed(records: Iterable[RunRecord], gold: Mapping[str, DecisionGraph]) -> List[Tuple[RunRecord, DecisionGraph]]:
    return [
        (record, record.graph())
        for record in records
        if record.validity is Validity.PARSED and record.target_model_id in gold
    ]


def similarity_by_condition(
    records: Sequence[RunRecord],
    gold: Mapping[str, DecisionGraph],
    with_graphlets: bool = True,
) -> Tuple[List[SimilarityRow], Dict[Tuple[str, str], Dict[str, float]]]:
    """Similarity of parsed generations to their gold model per model type and condition.

    Also returns per (model type, condition) the mean SP similarity per target,
    the pairing used by the condition tests.
    """
    sp_values: Dict[Tuple[str, str], List[float]] = defaultdict(list)
    graphlet_values: Dict[Tuple[str, str], List[float]] = defaultdict(list)
    per_target: Dict[Tuple[str, str], Dict[str, List[float]]] = defaultdict(lambda: defaultdict(list))
    for record, graph in _parsed(records, gold):
        target = gold[record.target_model_id]
        key = (target.model_type.value, record.condition)
        sp = sp_similarity(graph, target)
        sp_values[key].append(sp)
        per_target[key][record.target_model_id].append(sp)
        if with_graphlets:
            graphlet_values[key].append(graphlet_similarity(graph, target))

    rows = []
    for key in sorted(sp_values):
        graphlets = graphlet_values.get(key)
        rows.append(SimilarityRow(
            model_type=key[0],
            condition=key[1],
            sp_mean=fmean(sp_values[key]),
            sp_std=pstdev(sp_values[key]),
            graphlet_mean=fmean(graphlets) if graphlets else None,
            graphlet_std=pstdev(graphlets) if graphlets else None,
            generations=len(sp_values[key]),
        ))
    means = {key: {target: fmean(values) for target, values in targets.items()} for key, targets in per_target.items()}
    return rows, means


def condition_tests(per_target: Mapping[Tuple[str, str], Mapping[str, float]]) -> List[ConditionTest]:
    """Paired Wilcoxon tests on per-target mean SP similarity between conditions"""
    tests = []
    for model_type in sorted({model_type for model_type, _ in per_target}):
        for a, b in CONDITION_PAIRS:
            left = per_target.get((model_type, a.value), {})
            right = per_target.get((model_type, b.value), {})
            targets = sorted(set(left) & set(right))
            if not targets:
                continue
            result = wilcoxon_signed_rank([left[t] for t in targets], [right[t] for t in targets])
            tests.append(ConditionTest(model_type, a.value, b.value, result.value, result.p_value, result.n, result.method))
    return tests


def _comparison_rows(model_type: str, source: str, stats: Sequence[GraphStats]) -> List[ComparisonRow]:
    return [
        ComparisonRow(
            model_type=model_type,
            source=source,
            metric=metric,
            mean=fmean(getattr(s, metric) for s in stats),
            std=pstdev(getattr(s, metric) for s in stats),
            count=len(stats),
        )
        for metric in COMPARISON_METRICS
    ]


def descriptive_comparison(records: Sequence[RunRecord], gold: Mapping[str, DecisionGraph]) -> List[ComparisonRow]:
    """Descriptive properties of gold models next to the generations of every condition"""
    groups: Dict[Tuple[str, str], List[GraphStats]] = defaultdict(list)
    for graph in gold.values():
        groups[(graph.model_type.value, GOLD)].append(descriptive_stats(graph))
    for record, graph in _parsed(records, gold):
        model_type = gold[record.target_model_id].model_type.value
        groups[(model_type, record.condition)].append(descriptive_stats(graph))

    rows = []
    for model_type, source in sorted(groups, key=lambda key: (key[0], key[1] != GOLD, key[1])):
        rows.extend(_comparison_rows(model_type, source, groups[(model_type, source)]))
    return rows


def equivalence_tables(
    results: Sequence[Tuple[RunRecord, EquivalenceResult]],
    gold: Mapping[str, DecisionGraph],
    excluded_models: Iterable[str] = (),
) -> Tuple[List[EquivalenceRow], List[EquivalenceSummaryRow]]:
    """Per-generation equivalence rows and the macro averages per model type and condition"""
    excluded = set(excluded_models)
    rows = []
    grouped: Dict[Tuple[str, str], List[EquivalenceResult]] = defaultdict(list)
    by_model: Dict[Tuple[str, str], Dict[str, List[EquivalenceResult]]] = defaultdict(lambda: defaultdict(list))
    for record, result in results:
        model_type = gold[record.target_model_id].model_type.value
        rows.append(EquivalenceRow(
            model_id=record.target_model_id,
            model_type=model_type,
            condition=record.condition,
            run_index=record.run_index,
            case_count=result.case_count,
            agree_count=result.agree_count,
            rate=result.rate,
            flags=";".join(sorted(result.flags)),
        ))
        grouped[(model_type, record.condition)].append(result)
        by_model[(model_type, record.condition)][record.target_model_id].append(result)

    summary = []
    for key in sorted(grouped):
        filtered = [result for result in grouped[key] if result.model_id not in excluded]
        best = best_run_summary(by_model[key])
        summary.append(EquivalenceSummaryRow(
            model_type=key[0],
            condition=key[1],
            models=len(by_model[key]),
            macro_average=macro_average(grouped[key]),
            macro_average_filtered=macro_average(filtered) if filtered else None,
            share_full=best.share_full,
            share_at_least_90=best.share_at_least_90,
        ))
    rows.sort(key=lambda row: (row.model_id, row.condition, row.run_index))
    return rows, summary


def run_health(records: Sequence[RunRecord]) -> List[RunHealthRow]:
    counts: Dict[str, Dict[Validity, int]] = defaultdict(lambda: defaultdict(int))
    for record in records:
        counts[record.condition][record.validity] += 1
    rows = []
    for condition in sorted(counts):
        c = counts[condition]
        total = sum(c.values())
        rows.append(RunHealthRow(
            condition=condition,
            records=total,
            parsed=c[Validity.PARSED],
            schema_error=c[Validity.SCHEMA_ERROR],
            validation_error=c[Validity.VALIDATION_ERROR],
            provider_error=c[Validity.PROVIDER_ERROR],
            failure_rate=(total - c[Validity.PARSED]) / total if total else 0.0,
        ))
    return rows


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, (tuple, list)):
        return ";".join(str(item) for item in value)
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])


REPORT_FILES = {
    "gold_stats": ("gold_stats.csv", ["group", "metric", "mean", "std", "count"]),
    "similarity": ("similarity_by_condition.csv",
                   ["model_type", "condition", "sp_mean", "sp_std", "graphlet_mean", "graphlet_std", "generations"]),
    "similarity_tests": ("similarity_tests.csv",
                         ["model_type", "condition_a", "condition_b", "statistic", "p_value", "n", "method"]),
    "descriptive_comparison": ("descriptive_comparison.csv", ["model_type", "source", "metric", "mean", "std", "count"]),
    "equivalence": ("equivalence.csv",
                    ["model_id", "model_type", "condition", "run_index", "case_count", "agree_count", "rate", "flags"]),
    "equivalence_summary": ("equivalence_summary.csv",
                            ["model_type", "condition", "models", "macro_average", "macro_average_filtered",
                             "share_full", "share_at_least_90"]),
    "tertiles": ("tertiles.csv", ["model_type", "feature", "group", "lower", "upper", "count", "mean_similarity"]),
    "feature_correlations": ("feature_correlations.csv", ["feature", "rho", "p_value", "n", "method"]),
    "example_effects": ("example_effects.csv",
                        ["target_id", "condition", "ex_sim", "gen_sim", "ex_con", "gen_var", "parsed_runs", "failed_runs"]),
    "example_effect_correlations": ("example_effect_correlations.csv",
                                    ["condition", "pair", "rho", "p_value", "n", "method"]),
    "run_health": ("run_health.csv",
                   ["condition", "records", "parsed", "schema_error", "validation_error", "provider_error",
                    "failure_rate"]),
}


def _table_rows(name: str, artifacts: ReportArtifacts) -> Optional[List[Sequence[Any]]]:
    if name == "gold_stats" and artifacts.gold_stats is not None:
        return [(s.group, s.metric, s.mean, s.std, s.count) for s in artifacts.gold_stats]
    if name == "similarity" and artifacts.similarity is not None:
        return [(r.model_type, r.condition, r.sp_mean, r.sp_std, r.graphlet_mean, r.graphlet_std, r.generations)
                for r in artifacts.similarity]
    if name == "similarity_tests" and artifacts.similarity_tests is not None:
        return [(t.model_type, t.condition_a, t.condition_b, t.statistic, t.p_value, t.n, t.method)
                for t in artifacts.similarity_tests]
    if name == "descriptive_comparison" and artifacts.descriptive_comparison is not None:
        return [(r.model_type, r.source, r.metric, r.mean, r.std, r.count) for r in artifacts.descriptive_comparison]
    if name == "equivalence" and artifacts.equivalence is not None:
        return [(r.model_id, r.model_type, r.condition, r.run_index, r.case_count, r.agree_count, r.rate, r.flags)
                for r in artifacts.equivalence]
    if name == "equivalence_summary" and artifacts.equivalence_summary is not None:
        return [(r.model_type, r.condition, r.models, r.macro_average, r.macro_average_filtered, r.share_full,
                 r.share_at_least_90) for r in artifacts.equivalence_summary]
    if name == "tertiles" and artifacts.tertiles is not None:
        return [(model_type, r.feature, r.group, float(r.lower), float(r.upper), r.count, r.mean_similarity)
                for model_type in sorted(artifacts.tertiles) for r in artifacts.tertiles[model_type]]
    if name == "feature_correlations" and artifacts.feature_correlations is not None:
        return [
            (feature, None, None, 0, "insufficient-data") if result is None
            else (feature, result.value, result.p_value, result.n, result.method)
            for feature, result in sorted(artifacts.feature_correlations.items())
        ]
    if name == "example_effects" and artifacts.example_effects is not None:
        return [(r.target_id, r.condition, r.ex_sim, r.gen_sim, r.ex_con, r.gen_var, r.parsed_runs, r.failed_runs)
                for r in artifacts.example_effects.rows]
    if name == "example_effect_correlations" and artifacts.example_effects is not None:
        rows = []
        for condition, pairs in sorted(artifacts.example_effects.correlations.items()):
            for pair in (EXSIM_GENSIM, EXCON_GENVAR):
                result = pairs.get(pair)
                if result is None:
                    rows.append((condition, pair, None, None, 0, "insufficient-data"))
                else:
                    rows.append((condition, pair, result.value, result.p_value, result.n, result.method))
        return rows
    if name == "run_health" and artifacts.run_health is not None:
        return [(r.condition, r.records, r.parsed, r.schema_error, r.validation_error, r.provider_error,
                 r.failure_rate) for r in artifacts.run_health]
    return None


def emit_report(artifacts: ReportArtifacts, out_dir) -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    gaps = []
    for name, (file_name, header) in REPORT_FILES.items():
        rows = _table_rows(name, artifacts)
        if rows is None:
            gaps.append(name)
            rows = []
        path = out_dir / file_name
        _write_csv(path, header, rows)
        written.append(path)

    gaps_path = out_dir / "gaps.csv"
    _write_csv(gaps_path, ["artifact", "note"], [(gap, "not computed") for gap in gaps]
               + [("note", note) for note in artifacts.notes])
    written.append(gaps_path)

    meta_path = out_dir / "report_meta.json"
    meta = {"seed": artifacts.seed, "files": sorted(path.name for path in written), "gaps": gaps}
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(meta_path)
    if gaps:
        logger.warning("Report written with gaps: %s", ", ".join(gaps))
    logger.info("Wrote %d report files to %s", len(written), out_dir)
    return written
