import logging
import random
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

from dmn import ModelBundle
from ir.errors import ExampleSelectionError

logger = logging.getLogger(__name__)

MIN_ARTICLES = 3
MIN_NODES = 3


@dataclass(frozen=True)
class ExampleSelection:
    target_model_id: str
    example_ids: Tuple[str, ...]
    with_replacement: bool = False


def _filters(target: ModelBundle) -> List[Tuple[str, Callable[[ModelBundle], bool]]]:
    return [
        ("same_model_type", lambda b: b.model_type is target.model_type),
        ("min_articles", lambda b: len(b.articles) >= MIN_ARTICLES),
        ("min_nodes", lambda b: len(b.graph.nodes) >= MIN_NODES),
        ("exclude_target", lambda b: b.model_id != target.model_id),
    ]


def select_examples(target: ModelBundle, pool: Sequence[ModelBundle], runs: int, seed: int) -> ExampleSelection:
    """One 1-shot example per run, fixed by (seed, target id) for every condition"""
    candidates = list(pool)
    for name, keep in _filters(target):
        candidates = [bundle for bundle in candidates if keep(bundle)]
        if not candidates:
            raise ExampleSelectionError(target.model_id, name)

    ids = sorted(bundle.model_id for bundle in candidates)
    rng = random.Random(f"{seed}:{target.model_id}")
    if len(ids) >= runs:
        return ExampleSelection(target.model_id, tuple(rng.sample(ids, runs)))
    logger.warning("Only %d example candidates for %s; drawing %d with replacement", len(ids), target.model_id, runs)
    return ExampleSelection(target.model_id, tuple(rng.choices(ids, k=runs)), with_replacement=True)
