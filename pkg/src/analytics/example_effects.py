import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from statistics import fmean, pstdev
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from harness import RunRecord, Validity
from ir import DecisionGraph
from ir.errors import InsufficientDataError
from structeval import sp_similarity

from .statistics import StatResult, spearman

logger = logging.getLogger(__name__)

EXSIM_GENSIM = "ExSim->GenSim"
EXCON_GENVAR = "ExCon->GenVar"


@dataclass(frozen=True)
class ExampleEffectRow:
    """Per target and condition; ex_sim and gen_sim are means over parsed runs"""
    target_id: str
    condition: str
    ex_sim: float
    gen_sim: float
    ex_con: float
    gen_var: float
    parsed_runs: int
    failed_runs: int


@dataclass
class ExampleEffects:
    rows: List[ExampleEffectRow]
    correlations: Dict[str, Dict[str, Optional[StatResult]]] = field(default_factory=dict)
    run_points: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)
    excluded_failures: int = 0


def _correlate(pairs: Sequence[Tuple[float, float]]) -> Optional[StatResult]:
    if len(pairs) < 3:
        return None
    try:
        return spearman([x for x, _ in pairs], [y for _, y in pairs])
    except InsufficientDataError:
        return None


def example_effect_metrics(
    records: Sequence[RunRecord],
    gold: Mapping[str, DecisionGraph],
) -> ExampleEffects:
    """ExSim/GenSim per run, ExCon/GenVar per target, correlated per condition"""
    grouped: Dict[Tuple[str, str], List[RunRecord]] = defaultdict(list)
    for record in records:
        grouped[(record.target_model_id, record.condition)].append(record)

    rows: List[ExampleEffectRow] = []
    run_points: Dict[str, List[Tuple[float, float]]] = defaultdict(list)
    excluded = 0
    for (target_id, condition), runs in sorted(grouped.items()):
        target = gold.get(target_id)
        if target is None:
            logger.warning("No gold graph for %s; skipping its example effects", target_id)
            continue
        runs = sorted(runs, key=lambda record: record.run_index)
        parsed = [record for record in runs if record.validity is Validity.PARSED and record.example_model_id in gold]
        failed = len(runs) - len(parsed)
        excluded += failed
        if len(parsed) < 2:
            continue

        ex_sims = [sp_similarity(gold[record.example_model_id], target) for record in parsed]
        gen_sims = [sp_similarity(record.graph(), target) for record in parsed]
        examples = [gold[record.example_model_id] for record in runs if record.example_model_id in gold]
        ex_con = fmean(sp_similarity(a, b) for a, b in combinations(examples, 2))
        run_points[condition].extend(zip(ex_sims, gen_sims))
        rows.append(ExampleEffectRow(
            target_id=target_id,
            condition=condition,
            ex_sim=fmean(ex_sims),
            gen_sim=fmean(gen_sims),
            ex_con=ex_con,
            gen_var=pstdev(gen_sims),
            parsed_runs=len(parsed),
            failed_runs=failed,
        ))

    correlations = {}
    for condition in sorted({row.condition for row in rows}):
        per_target = [(row.ex_con, row.gen_var) for row in rows if row.condition == condition]
        correlations[condition] = {
            EXSIM_GENSIM: _correlate(run_points[condition]),
            EXCON_GENVAR: _correlate(per_target),
        }
    return ExampleEffects(rows=rows, correlations=correlations, run_points=dict(run_points), excluded_failures=excluded)
