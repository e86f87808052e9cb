"""dmn-lawbench command line.

Exit codes: 0 success, 1 usage error, 2 data error (any DecisionModelError).
"""
import argparse
import json
import logging
import sys
from itertools import combinations
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from compiler import DecisionCompiler
from config import CONDITION_NAMES, PipelineConfig, load_yaml_model
from dmn import serialize_graph
from ir import IROptimizer, validate_graph
from ir.errors import ConfigError, DecisionModelError, GraphValidationError
from ir.values import to_json_value
from outcome import assess_testability, equivalence, generate_cases
from structeval import descriptive_stats, graphlet_similarity, sp_similarity

from . import pipeline

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
KERNELS = {"sp": sp_similarity, "graphlet": graphlet_similarity}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _pipeline_config(args) -> PipelineConfig:
    """PipelineConfig from --config, overridden by explicit flags"""
    config = load_yaml_model(args.config, PipelineConfig) if args.config else PipelineConfig()
    overrides = {}
    for name in ("seed", "runs", "strict"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "corpus", None) is not None:
        overrides["corpus_dir"] = Path(args.corpus)
    if args.out is not None:
        overrides["out_dir"] = Path(args.out)
    if getattr(args, "conditions", None):
        overrides["conditions"] = [name.strip() for name in args.conditions.split(",") if name.strip()]
    if getattr(args, "provider", None):
        overrides["provider_config"] = Path(args.provider)
    if not overrides:
        return config
    try:
        return PipelineConfig.model_validate({**config.model_dump(), **overrides})
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(f"{'.'.join(str(part) for part in first['loc'])}: {first['msg']}") from e


def _out_dir(args) -> Path:
    out = _pipeline_config(args).out_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    config = _pipeline_config(args)
    corpus = pipeline.ingest(config, _out_dir(args), args.max_workers)
    for error in corpus.errors:
        print(f"{error.path}: {error.message}", file=sys.stderr)
    print(f"{len(corpus)} models ingested, {len(corpus.errors)} failed")
    return 0


def cmd_validate(args) -> int:
    graph = pipeline.load_model(args.model)
    report = validate_graph(graph)
    if not report.ok:
        raise GraphValidationError(report)
    print(f"{graph.id}: {report.summary()}")
    return 0


def cmd_exec(args) -> int:
    config = _pipeline_config(args)
    graph = pipeline.load_model(args.model)
    executor = DecisionCompiler().compile(graph)
    cases = pipeline.read_assignments(Path(args.assignments))
    results = executor.batch_execute(cases, config.strict, args.max_workers)
    documents = [
        {
            "case": index,
            "output": to_json_value(result.output_value),
            "errors": [{"node": error.node_id, "kind": error.kind, "detail": error.detail} for error in result.errors],
        }
        for index, result in enumerate(results)
    ]
    path = pipeline.write_jsonl(_out_dir(args) / f"{graph.id}.results.jsonl", documents)
    logger.info("Wrote %d results to %s", len(documents), path)
    return 0


def cmd_simplify(args) -> int:
    graph = pipeline.load_model(args.model)
    simplified, report = IROptimizer().eliminate_identity_nodes(graph)
    out = _out_dir(args)
    (out / f"{graph.id}.simplified.json").write_bytes(serialize_graph(simplified))
    document = {
        "graph_id": report.graph_id,
        "removed_node_ids": list(report.removed_node_ids),
        "retained_identity_ids": list(report.retained_identity_ids),
        "identity_fraction_before": report.identity_fraction_before,
        "nodes_before": report.nodes_before,
        "nodes_after": report.nodes_after,
        "edges_before": report.edges_before,
        "edges_after": report.edges_after,
        "placeholder_inputs": IROptimizer.detect_placeholder_inputs(graph),
    }
    (out / f"{graph.id}.simplify_report.json").write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    print(f"{graph.id}: removed {len(report.removed_node_ids)} identity nodes")
    return 0


def cmd_stats(args) -> int:
    graphs = [pipeline.load_model(path) for path in args.models]
    rows = []
    for graph in graphs:
        stats = descriptive_stats(graph)
        rows.extend((graph.id, metric, float(value)) for metric, value in stats.as_dict().items())
    pipeline.write_rows(_out_dir(args) / "stats.csv", ["model_id", "metric", "value"], rows)
    return 0


def cmd_kernel(args) -> int:
    graphs = [pipeline.load_model(path) for path in args.models]
    similarity = KERNELS[args.kind]
    rows = []
    for g1, g2 in combinations(graphs, 2):
        rows.append((g1.id, g2.id, f"{args.kind}_similarity", similarity(g1, g2)))
    pipeline.write_rows(_out_dir(args) / f"kernel_{args.kind}.csv", ["model_id", "other_id", "metric", "value"], rows)
    return 0


def cmd_gen_cases(args) -> int:
    config = _pipeline_config(args)
    graph = pipeline.load_model(args.model)
    verdict = assess_testability(graph, config.caps)
    if not verdict.eligible:
        detail = f" ({', '.join(verdict.unsupported_inputs)})" if verdict.unsupported_inputs else ""
        raise DecisionModelError(f"{graph.id} is not testable: {verdict.reason.value}{detail}")
    cases = generate_cases(verdict.domains)
    pipeline.write_jsonl(_out_dir(args) / f"{graph.id}.cases.jsonl", (pipeline.assignment_to_json(case) for case in cases))
    print(f"{graph.id}: {len(cases)} cases")
    return 0


def cmd_equivalence(args) -> int:
    config = _pipeline_config(args)
    gold = pipeline.load_model(args.gold)
    candidate = pipeline.load_model(args.candidate)
    cases = pipeline.read_assignments(Path(args.cases))
    result = equivalence(gold, candidate, cases, pipeline.load_classifier(config), args.max_workers)
    out = _out_dir(args)
    pipeline.write_jsonl(out / f"{gold.id}.equivalence.jsonl", (
        {"case": v.index, "gold": to_json_value(v.gold_value), "candidate": to_json_value(v.candidate_value), "agree": v.agree}
        for v in result.verdicts
    ))
    pipeline.write_rows(out / "equivalence_summary.csv", ["model_id", "case_count", "agree_count", "rate", "flags"],
                        [(result.model_id, result.case_count, result.agree_count, result.rate, ";".join(result.flags))])
    print(f"{gold.id}: {result.agree_count}/{result.case_count} cases agree")
    return 0


def cmd_generate(args) -> int:
    config = _pipeline_config(args)
    corpus = pipeline.ingest(config, _out_dir(args), args.max_workers)
    records = pipeline.generate(corpus, config, pipeline.make_provider(config, args.stub), config.out_dir)
    print(f"{len(records)} run records in {config.out_dir / pipeline.RUNS_DIR}")
    return 0


def cmd_analyze(args) -> int:
    config = _pipeline_config(args)
    out = _out_dir(args)
    corpus = pipeline.ingest(config, out, args.max_workers)
    cases = pipeline.load_cases(out) or pipeline.build_cases(corpus, out, config.caps)
    results = pipeline.analyze(corpus, out, cases, pipeline.load_classifier(config), args.max_workers)
    print(f"{len(results)} generations evaluated")
    return 0


def cmd_report(args) -> int:
    config = _pipeline_config(args)
    out = _out_dir(args)
    corpus = pipeline.ingest(config, out, args.max_workers)
    paths = pipeline.report(corpus, out, config.seed)
    print(f"{len(paths)} report files in {out / pipeline.REPORT_DIR}")
    return 0


def cmd_reproduce(args) -> int:
    config = _pipeline_config(args)
    paths = pipeline.reproduce(config, _out_dir(args), args.stub, args.max_workers)
    print(f"{len(paths)} report files in {config.out_dir / pipeline.REPORT_DIR}")
    return 0


def _add_experiment_flags(parser: argparse.ArgumentParser, generation: bool = False):
    parser.add_argument("--corpus", help="corpus directory with models/, articles/ and srl/")
    parser.add_argument("--seed", type=int, help="example selection seed")
    if generation:
        parser.add_argument("--conditions", help=f"comma-separated subset of {','.join(CONDITION_NAMES)}")
        parser.add_argument("--runs", type=int, help="runs per target and condition")
        parser.add_argument("--provider", help="provider configuration YAML")
        parser.add_argument("--stub", action="store_true", help="answer offline with the stub provider")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--config", help="pipeline configuration YAML")
    common.add_argument("--max-workers", type=int, default=1)
    common.add_argument("--out", help="output directory")

    parser = _Parser(prog="dmn-lawbench", description="DMN legal decision model toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ingest = sub.add_parser("ingest", parents=[common], help="load a corpus and write compact models")
    ingest.add_argument("--corpus")
    ingest.set_defaults(func=cmd_ingest)

    validate = sub.add_parser("validate", parents=[common], help="check a model is a well-formed decision graph")
    validate.add_argument("model")
    validate.set_defaults(func=cmd_validate)

    exec_ = sub.add_parser("exec", parents=[common], help="execute a model on line-delimited assignments")
    exec_.add_argument("model")
    exec_.add_argument("assignments")
    exec_.add_argument("--strict", action="store_true", default=None, help="fail on unassigned inputs")
    exec_.set_defaults(func=cmd_exec)

    simplify = sub.add_parser("simplify", parents=[common], help="eliminate identity nodes")
    simplify.add_argument("model")
    simplify.set_defaults(func=cmd_simplify)

    stats = sub.add_parser("stats", parents=[common], help="descriptive statistics per model")
    stats.add_argument("models", nargs="+")
    stats.set_defaults(func=cmd_stats)

    kernel = sub.add_parser("kernel", parents=[common], help="pairwise kernel similarity")
    kernel.add_argument("models", nargs="+")
    kernel.add_argument("--kind", choices=sorted(KERNELS), default="sp")
    kernel.set_defaults(func=cmd_kernel)

    gen_cases = sub.add_parser("gen-cases", parents=[common], help="exhaustive test cases of a testable model")
    gen_cases.add_argument("model")
    gen_cases.set_defaults(func=cmd_gen_cases)

    equivalence_ = sub.add_parser("equivalence", parents=[common], help="outcome equivalence of two models")
    equivalence_.add_argument("gold")
    equivalence_.add_argument("candidate")
    equivalence_.add_argument("cases")
    equivalence_.set_defaults(func=cmd_equivalence)

    generate = sub.add_parser("generate", parents=[common], help="run the generation experiment")
    _add_experiment_flags(generate, generation=True)
    generate.set_defaults(func=cmd_generate)

    analyze = sub.add_parser("analyze", parents=[common], help="evaluate stored generations")
    _add_experiment_flags(analyze)
    analyze.set_defaults(func=cmd_analyze)

    report = sub.add_parser("report", parents=[common], help="emit the report tables")
    _add_experiment_flags(report)
    report.set_defaults(func=cmd_report)

    reproduce = sub.add_parser("reproduce", parents=[common], help="run every stage end to end")
    _add_experiment_flags(reproduce, generation=True)
    reproduce.set_defaults(func=cmd_reproduce)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1

    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, stream=sys.stderr)
    try:
        return args.func(args)
    except DecisionModelError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
