"""Pipeline stages shared by the subcommands and `reproduce`.

Every stage reads its inputs, writes its outputs under one directory and
returns what the next stage needs. Nothing here touches input files.
"""
import csv
import json
import logging
from collections import defaultdict
from decimal import Decimal
from pathlib import Path
from statistics import fmean
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from analytics import (
    ReportArtifacts,
    condition_tests,
    descriptive_comparison,
    emit_report,
    equivalence_tables,
    example_effect_metrics,
    run_health,
    similarity_by_condition,
    spearman,
    tertile_table,
    text_features,
)
from config import OutcomeKeywords, PipelineConfig, ProviderConfig, TestabilityCaps, load_yaml_model
from dmn import Corpus, compression_ratio, deserialize_graph, load_corpus, parse_dmn, serialize_graph, write_manifest
from executor import Assignment
from harness import ChatProvider, Condition, HttpChatProvider, RunRecord, RunStore, StubProvider, Validity, load_records, run_experiment
from ir import DecisionGraph, IROptimizer, ModelType, identity_fractions
from ir.errors import DecisionModelError, InsufficientDataError
from ir.values import dumps_json, make_value, to_json_value
from outcome import EquivalenceFlag, EquivalenceResult, OutcomeClassifier, assess_testability, equivalence, generate_cases
from structeval import aggregate_stats, sp_similarity

logger = logging.getLogger(__name__)

RUNS_DIR = "runs"
CASES_DIR = "cases"
COMPACT_DIR = "compact"
REPORT_DIR = "report"
EQUIVALENCE_RUNS_FILE = "equivalence_runs.jsonl"


# -- line-delimited documents -------------------------------------------------

def write_jsonl(path: Path, documents: Iterable[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for document in documents:
            handle.write(dumps_json(document, sort_keys=True) + "\n")
    return path


def read_jsonl(path: Path) -> Iterator[dict]:
    with Path(path).open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield json.loads(line, parse_float=Decimal)
            except json.JSONDecodeError as e:
                raise DecisionModelError(f"{path}:{line_number}: not a JSON document: {e}") from e


def assignment_to_json(assignment: Assignment) -> dict:
    return {input_id: to_json_value(value) for input_id, value in assignment.items()}


def read_assignments(path: Path) -> List[Assignment]:
    assignments = []
    for document in read_jsonl(path):
        if not isinstance(document, dict):
            raise DecisionModelError(f"{path}: every line must be an object of input id -> value")
        try:
            assignments.append({str(key): make_value(value) for key, value in document.items()})
        except (TypeError, ValueError) as e:
            raise DecisionModelError(f"{path}: {e}") from e
    return assignments


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else f"{v:.6f}" if isinstance(v, float) else v for v in row])
    return path


# -- models and configuration -------------------------------------------------

def load_model(path) -> DecisionGraph:
    """DMN XML, or a compact JSON document when the file ends in .json"""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise DecisionModelError(f"{path}: cannot read model: {e}") from e
    if path.suffix.lower() == ".json":
        return deserialize_graph(data)
    return parse_dmn(data, source_name=path.name)


def load_classifier(config: PipelineConfig) -> OutcomeClassifier:
    if config.keywords_path is None:
        return OutcomeClassifier()
    return OutcomeClassifier(load_yaml_model(config.keywords_path, OutcomeKeywords))


def make_provider(config: PipelineConfig, stub: bool) -> ChatProvider:
    provider_config = load_yaml_model(config.provider_config, ProviderConfig) if config.provider_config else ProviderConfig()
    if stub or provider_config.model == "stub":
        logger.info("Using the offline stub provider")
        return StubProvider(provider_config)
    return HttpChatProvider(provider_config)


# -- stages -------------------------------------------------------------------

def ingest(config: PipelineConfig, out_dir: Path, max_workers: int = 1) -> Corpus:
    override = ModelType(config.model_type_override) if config.model_type_override else None
    corpus = load_corpus(config.models_dir, config.articles_dir, config.srl_dir, override, max_workers)
    write_manifest(corpus, out_dir / "manifest.json")
    rows = []
    for bundle in corpus:
        compact = serialize_graph(bundle.graph)
        (out_dir / COMPACT_DIR).mkdir(parents=True, exist_ok=True)
        (out_dir / COMPACT_DIR / f"{bundle.model_id}.json").write_bytes(compact)
        rows.append((bundle.model_id, bundle.graph.metadata.get("source_bytes"), len(compact),
                     compression_ratio(bundle.graph)))
    write_rows(out_dir / "compression.csv", ["model_id", "xml_bytes", "compact_bytes", "ratio"], rows)
    logger.info("Ingested %d models into %s", len(corpus), out_dir)
    return corpus


def gold_stats(corpus: Corpus, out_dir: Path):
    stats = aggregate_stats(bundle.graph for bundle in corpus)
    write_rows(out_dir / "gold_stats.csv", ["group", "metric", "mean", "std", "count"],
               [(s.group, s.metric, s.mean, s.std, s.count) for s in stats])
    return stats


def simplify_profile(corpus: Corpus, out_dir: Path) -> Dict[str, List[str]]:
    """Identity elimination and placeholder detection per gold model; returns placeholder inputs by model"""
    optimizer = IROptimizer()
    rows = []
    placeholders = {}
    for bundle in corpus:
        _, report = optimizer.eliminate_identity_nodes(bundle.graph)
        profile = optimizer.chain_profile(bundle.graph)
        flagged = optimizer.detect_placeholder_inputs(bundle.graph)
        if flagged:
            placeholders[bundle.model_id] = flagged
        rows.append((
            bundle.model_id, bundle.model_type.value, report.nodes_before, report.nodes_after,
            len(report.removed_node_ids), report.identity_fraction_before, profile.ur_nodes, profile.cr_nodes,
            profile.summary.get("mean_longest"), ";".join(flagged),
        ))
    write_rows(out_dir / "simplify_profile.csv", [
        "model_id", "model_type", "nodes_before", "nodes_after", "removed", "identity_fraction",
        "ur_nodes", "cr_nodes", "mean_longest_chain", "placeholder_inputs",
    ], rows)

    fractions = identity_fractions(bundle.graph for bundle in corpus)
    write_rows(out_dir / "identity_fractions.csv", ["model_type", "measure", "value"], [
        (model_type.value, measure, value)
        for model_type in sorted(fractions, key=lambda m: m.value)
        for measure, value in sorted(fractions[model_type].items())
    ])
    return placeholders


def build_cases(corpus: Corpus, out_dir: Path, caps: Optional[TestabilityCaps] = None) -> Dict[str, List[Assignment]]:
    """Test cases of every testable gold model, one case file per model"""
    cases: Dict[str, List[Assignment]] = {}
    rows = []
    for bundle in corpus:
        verdict = assess_testability(bundle.graph, caps)
        rows.append((bundle.model_id, bundle.model_type.value, verdict.eligible, verdict.reason.value,
                     verdict.case_count, ";".join(verdict.unsupported_inputs)))
        if not verdict.eligible:
            continue
        cases[bundle.model_id] = generate_cases(verdict.domains)
        write_jsonl(out_dir / CASES_DIR / f"{bundle.model_id}.jsonl",
                    (assignment_to_json(case) for case in cases[bundle.model_id]))
    write_rows(out_dir / "testability.csv",
               ["model_id", "model_type", "eligible", "reason", "case_count", "unsupported_inputs"], rows)
    logger.info("%d of %d models are testable", len(cases), len(corpus))
    return cases


def load_cases(out_dir: Path) -> Dict[str, List[Assignment]]:
    case_dir = out_dir / CASES_DIR
    if not case_dir.is_dir():
        return {}
    return {path.stem: read_assignments(path) for path in sorted(case_dir.glob("*.jsonl"))}


def generate(
    corpus: Corpus,
    config: PipelineConfig,
    provider: ChatProvider,
    out_dir: Path,
    max_workers: Optional[int] = None,
) -> List[RunRecord]:
    store = RunStore(out_dir / RUNS_DIR)
    conditions = [Condition(name) for name in config.conditions]
    return run_experiment(list(corpus), conditions, config.runs, provider, config.seed, store, max_workers)


def evaluate_runs(
    records: Sequence[RunRecord],
    gold: Mapping[str, DecisionGraph],
    cases: Mapping[str, Sequence[Assignment]],
    classifier: Optional[OutcomeClassifier] = None,
    max_workers: int = 1,
) -> List[Tuple[RunRecord, EquivalenceResult]]:
    """Equivalence of every run of a testable target; failed generations score 0"""
    results = []
    for record in sorted(records, key=lambda r: r.key):
        target_cases = cases.get(record.target_model_id)
        target = gold.get(record.target_model_id)
        if not target_cases or target is None:
            continue
        if record.validity is not Validity.PARSED:
            result = EquivalenceResult(target.id, len(target_cases), 0, flags=[EquivalenceFlag.INVALID_CANDIDATE])
        else:
            result = equivalence(target, record.graph(), target_cases, classifier, max_workers)
        results.append((record, result))
    return results


def equivalence_document(record: RunRecord, result: EquivalenceResult) -> dict:
    return {
        "key": record.key,
        "model_id": result.model_id,
        "case_count": result.case_count,
        "agree_count": result.agree_count,
        "rate": result.rate,
        "flags": sorted(result.flags),
        "unmatched_inputs": list(result.unmatched_inputs),
    }


def analyze(
    corpus: Corpus,
    out_dir: Path,
    cases: Mapping[str, Sequence[Assignment]],
    classifier: Optional[OutcomeClassifier] = None,
    max_workers: int = 1,
) -> List[Tuple[RunRecord, EquivalenceResult]]:
    records = load_records(out_dir / RUNS_DIR)
    gold = {bundle.model_id: bundle.graph for bundle in corpus}
    results = evaluate_runs(records, gold, cases, classifier, max_workers)
    write_jsonl(out_dir / EQUIVALENCE_RUNS_FILE, (equivalence_document(r, e) for r, e in results))
    logger.info("Evaluated %d generations against %d testable models", len(results), len(cases))
    return results


def load_equivalence(out_dir: Path, records: Sequence[RunRecord]) -> Optional[List[Tuple[RunRecord, EquivalenceResult]]]:
    path = out_dir / EQUIVALENCE_RUNS_FILE
    if not path.exists():
        return None
    by_key = {record.key: record for record in records}
    results = []
    for document in read_jsonl(path):
        record = by_key.get(document["key"])
        if record is None:
            logger.warning("Equivalence result %s has no run record; ignored", document["key"])
            continue
        results.append((record, EquivalenceResult(
            model_id=document["model_id"],
            case_count=document["case_count"],
            agree_count=document["agree_count"],
            flags=list(document["flags"]),
            unmatched_inputs=list(document["unmatched_inputs"]),
        )))
    return results


def _mean_similarity_per_target(records: Sequence[RunRecord], gold: Mapping[str, DecisionGraph]) -> Dict[str, float]:
    values: Dict[str, List[float]] = defaultdict(list)
    for record in records:
        if record.validity is Validity.PARSED and record.target_model_id in gold:
            values[record.target_model_id].append(sp_similarity(record.graph(), gold[record.target_model_id]))
    return {model_id: fmean(sims) for model_id, sims in values.items()}


def build_report(corpus: Corpus, out_dir: Path, seed: int) -> ReportArtifacts:
    """Every report table that the available artifacts allow; the rest become gaps"""
    gold = {bundle.model_id: bundle.graph for bundle in corpus}
    artifacts = ReportArtifacts(seed=seed)
    artifacts.gold_stats = aggregate_stats(gold.values())

    records = load_records(out_dir / RUNS_DIR)
    if not records:
        artifacts.notes.append(f"no run records under {out_dir / RUNS_DIR}")
        return artifacts

    artifacts.similarity, per_target = similarity_by_condition(records, gold)
    artifacts.similarity_tests = condition_tests(per_target)
    artifacts.descriptive_comparison = descriptive_comparison(records, gold)
    artifacts.run_health = run_health(records)
    artifacts.example_effects = example_effect_metrics(records, gold)

    results = load_equivalence(out_dir, records)
    if results is None:
        artifacts.notes.append("equivalence not evaluated; run `analyze` first")
    else:
        placeholder_models = [model_id for model_id, graph in gold.items() if IROptimizer.detect_placeholder_inputs(graph)]
        artifacts.equivalence, artifacts.equivalence_summary = equivalence_tables(results, gold, placeholder_models)

    similarity = _mean_similarity_per_target(records, gold)
    features = {
        bundle.model_id: text_features(bundle.articles).as_dict()
        for bundle in corpus if bundle.articles and bundle.model_id in similarity
    }
    _add_text_feature_tables(artifacts, corpus, features, similarity)
    return artifacts


def _add_text_feature_tables(artifacts: ReportArtifacts, corpus: Corpus, features, similarity):
    groups = {"Overall": sorted(features)}
    for bundle in corpus:
        if bundle.model_id in features:
            groups.setdefault(bundle.model_type.value, []).append(bundle.model_id)

    tertiles = {}
    for group, model_ids in sorted(groups.items()):
        rows = []
        for feature in sorted(next(iter(features.values()), {})):
            try:
                rows.extend(tertile_table({m: features[m][feature] for m in model_ids}, similarity, feature))
            except InsufficientDataError as e:
                logger.info("No %s tertiles for %s: %s", feature, group, e)
        if rows:
            tertiles[group] = rows
    if tertiles:
        artifacts.tertiles = tertiles
    else:
        artifacts.notes.append("fewer than 3 models with articles and parsed generations; no tertiles")

    correlations = {}
    model_ids = sorted(features)
    for feature in sorted(next(iter(features.values()), {})):
        if len(model_ids) < 3:
            correlations[feature] = None
            continue
        try:
            correlations[feature] = spearman([features[m][feature] for m in model_ids], [similarity[m] for m in model_ids])
        except InsufficientDataError:
            correlations[feature] = None
    if correlations:
        artifacts.feature_correlations = correlations


def report(corpus: Corpus, out_dir: Path, seed: int) -> List[Path]:
    return emit_report(build_report(corpus, out_dir, seed), out_dir / REPORT_DIR)


def reproduce(config: PipelineConfig, out_dir: Path, stub: bool, max_workers: int = 1) -> List[Path]:
    """ingest -> stats -> simplify profile -> cases -> generate -> equivalence -> report"""
    logger.info("Stage 1/7: ingest %s", config.corpus_dir)
    corpus = ingest(config, out_dir, max_workers)
    logger.info("Stage 2/7: gold statistics")
    gold_stats(corpus, out_dir)
    logger.info("Stage 3/7: simplification profile")
    simplify_profile(corpus, out_dir)
    logger.info("Stage 4/7: test cases")
    cases = build_cases(corpus, out_dir, config.caps)
    logger.info("Stage 5/7: generation")
    generate(corpus, config, make_provider(config, stub), out_dir)
    logger.info("Stage 6/7: equivalence")
    analyze(corpus, out_dir, cases, load_classifier(config), max_workers)
    logger.info("Stage 7/7: report")
    return report(corpus, out_dir, config.seed)
