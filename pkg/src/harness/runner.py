import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from dmn import ModelBundle, serialize_graph
from ir.errors import ExampleSelectionError, ProviderError

from .conditions import Condition
from .examples import select_examples
from .generation import Validity, clean_text, parse_generation
from .prompts import TEMPLATE_VERSION, build_prompt
from .provider import ChatProvider
from .run_store import RunRecord, RunStore, record_key

logger = logging.getLogger(__name__)

HARNESS_ERROR_FLAG = "harness_error"


@dataclass(frozen=True)
class GenerationJob:
    target: ModelBundle
    example: ModelBundle
    condition: Condition
    run_index: int
    with_replacement: bool

    @property
    def key(self) -> str:
        return record_key(self.target.model_id, self.condition.value, self.run_index)


def run_job(job: GenerationJob, provider: ChatProvider, template_version: str = TEMPLATE_VERSION) -> RunRecord:
    """One generation attempt; every failure becomes a record, none escapes"""
    common = dict(
        target_model_id=job.target.model_id,
        condition=job.condition.value,
        run_index=job.run_index,
        example_model_id=job.example.model_id,
        example_with_replacement=job.with_replacement,
    )
    try:
        prompt = build_prompt(job.condition, job.target, job.example, template_version)
    except Exception as e:
        logger.warning("%s: prompt not built: %s", job.key, e)
        return RunRecord(validity=Validity.PROVIDER_ERROR, detail=f"prompt not built: {e}", prompt_hash="",
                         template_version=template_version, flags=[HARNESS_ERROR_FLAG], **common)
    common.update(prompt_hash=prompt.prompt_hash, template_version=prompt.template_version)

    try:
        response = provider.complete(prompt.system, prompt.user)
    except ProviderError as e:
        logger.warning("%s: provider failed: %s", job.key, e)
        return RunRecord(validity=Validity.PROVIDER_ERROR, detail=str(e), attempts=e.attempts,
                         flags=list(prompt.flags), **common)
    except Exception as e:
        logger.warning("%s: request failed: %s", job.key, e, exc_info=True)
        return RunRecord(validity=Validity.PROVIDER_ERROR, detail=f"{type(e).__name__}: {e}",
                         flags=list(prompt.flags) + [HARNESS_ERROR_FLAG], **common)

    text = clean_text(response.text)
    parsed = parse_generation(text)
    if parsed.validity is not Validity.PARSED:
        logger.warning("%s: %s: %s", job.key, parsed.validity.value, parsed.detail)
    return RunRecord(
        raw_response=text,
        parsed_graph=serialize_graph(parsed.graph).decode("utf-8") if parsed.graph is not None else None,
        validity=parsed.validity,
        detail=parsed.detail,
        attempts=response.attempts,
        latency_seconds=response.latency_seconds,
        usage=response.usage,
        flags=list(prompt.flags),
        **common,
    )


def plan_jobs(
    target: ModelBundle,
    pool: Sequence[ModelBundle],
    conditions: Sequence[Condition],
    runs: int,
    seed: int,
) -> List[GenerationJob]:
    """Jobs of one target; the example of a run is shared by every condition"""
    selection = select_examples(target, pool, runs, seed)
    by_id = {bundle.model_id: bundle for bundle in pool}
    return [
        GenerationJob(target, by_id[example_id], condition, run_index, selection.with_replacement)
        for condition in conditions
        for run_index, example_id in enumerate(selection.example_ids)
    ]


def run_experiment(
    corpus: Sequence[ModelBundle],
    conditions: Sequence[Condition],
    runs: int,
    provider: ChatProvider,
    seed: int,
    store: RunStore,
    max_workers: Optional[int] = None,
    template_version: str = TEMPLATE_VERSION,
) -> List[RunRecord]:
    """Targets x conditions x runs; records already in `store` are skipped.

    Records are written per target in job order, whatever order the provider
    answers in.
    """
    max_workers = max_workers or provider.config.concurrency
    targets = sorted(corpus, key=lambda bundle: bundle.model_id)
    skipped: List[Tuple[str, str]] = []

    for target in targets:
        try:
            jobs = plan_jobs(target, targets, conditions, runs, seed)
        except ExampleSelectionError as e:
            logger.warning("Skipping %s: %s", target.model_id, e)
            skipped.append((target.model_id, e.failed_filter))
            continue

        pending = [job for job in jobs if job.key not in store]
        if not pending:
            continue
        logger.info("Generating %d/%d records for %s", len(pending), len(jobs), target.model_id)
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            records = list(pool.map(lambda job: run_job(job, provider, template_version), pending))
        for record in records:
            store.append(record)

    if skipped:
        logger.warning("%d targets without example candidates: %s", len(skipped), skipped)
    records: Dict[str, RunRecord] = {record.key: record for record in store.read()}
    return [records[key] for key in sorted(records)]
