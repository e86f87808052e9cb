import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ir import DecisionGraph, ModelType, validate_graph
from ir.errors import DecisionModelError

from .dmn_parser import parse_dmn
from .legal_articles import ArticleStore, LegalArticle, expand_cross_references

logger = logging.getLogger(__name__)

MODEL_SUFFIXES = (".dmn", ".xml")
ARTICLE_LINKS_FILE = "article_links.yaml"


class SrlAnnotation(BaseModel):
    """Precomputed semantic-role labels for the articles of one model"""
    model_config = ConfigDict(extra="ignore")

    actors: List[str] = Field(default_factory=list)
    actions: List[str] = Field(default_factory=list)
    objects: List[str] = Field(default_factory=list)
    recipients: List[str] = Field(default_factory=list)


class BundleFlag:
    MISSING_ARTICLES = "missing_articles"
    MISSING_SRL = "missing_srl"
    DANGLING_REFERENCES = "dangling_references"
    INVALID_GRAPH = "invalid_graph"


@dataclass
class ModelBundle:
    graph: DecisionGraph
    articles: List[LegalArticle] = field(default_factory=list)
    srl_annotations: Optional[SrlAnnotation] = None
    seed_article_ids: List[str] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)
    source_path: str = ""

    @property
    def model_id(self) -> str:
        return self.graph.id

    @property
    def model_type(self) -> ModelType:
        return self.graph.model_type


@dataclass
class CorpusError:
    path: str
    message: str


@dataclass
class Corpus:
    bundles: List[ModelBundle]
    errors: List[CorpusError] = field(default_factory=list)

    def __iter__(self):
        return iter(self.bundles)

    def __len__(self) -> int:
        return len(self.bundles)

    def by_id(self) -> Dict[str, ModelBundle]:
        return {bundle.model_id: bundle for bundle in self.bundles}

    def of_type(self, model_type: ModelType) -> List[ModelBundle]:
        return [bundle for bundle in self.bundles if bundle.model_type is model_type]


def load_srl(path: Path) -> SrlAnnotation:
    try:
        return SrlAnnotation.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError) as e:
        raise DecisionModelError(f"{path}: malformed SRL annotation: {e}") from e


def _load_article_links(model_dir: Path) -> Dict[str, List[str]]:
    """Optional extra model -> article links next to the models"""
    links_path = model_dir / ARTICLE_LINKS_FILE
    if not links_path.exists():
        return {}
    links = yaml.safe_load(links_path.read_text(encoding="utf-8")) or {}
    return {str(model_id): [str(ref) for ref in refs or []] for model_id, refs in links.items()}


def _parse_model_file(path: Path, model_type_override: Optional[ModelType]) -> DecisionGraph:
    return parse_dmn(path.read_bytes(), source_name=path.name, model_type=model_type_override)


def load_corpus(
    model_dir,
    article_dir,
    srl_dir=None,
    model_type_override: Optional[ModelType] = None,
    max_workers: int = 1,
) -> Corpus:
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        raise DecisionModelError(f"Model directory not found: {model_dir}")
    excluded = [Path(d).resolve() for d in (article_dir, srl_dir) if d]
    paths = sorted(
        p for p in model_dir.rglob("*")
        if p.is_file() and p.suffix.lower() in MODEL_SUFFIXES
        and not any(p.resolve().is_relative_to(d) for d in excluded)
    )
    store = ArticleStore.from_directory(article_dir) if article_dir and Path(article_dir).is_dir() else ArticleStore()
    links = _load_article_links(model_dir) if model_dir.is_dir() else {}

    def parse(path: Path) -> Tuple[Path, Optional[DecisionGraph], Optional[str]]:
        try:
            return path, _parse_model_file(path, model_type_override), None
        except (OSError, DecisionModelError) as e:
            return path, None, str(e)

    # Layer 1: per-file parsing, independent
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        parsed = list(pool.map(parse, paths))

    # Layer 2: deterministic merge
    bundles: List[ModelBundle] = []
    errors: List[CorpusError] = []
    seen: Dict[str, str] = {}
    for path, graph, error in parsed:
        if graph is None:
            logger.warning("Skipping %s: %s", path, error)
            errors.append(CorpusError(str(path), error))
            continue
        if graph.id in seen:
            message = f"duplicate model id '{graph.id}' (also in {seen[graph.id]})"
            logger.warning("Skipping %s: %s", path, message)
            errors.append(CorpusError(str(path), message))
            continue
        seen[graph.id] = str(path)
        bundles.append(_assemble(graph, path, store, links, srl_dir))

    bundles.sort(key=lambda bundle: bundle.model_id)
    logger.info("Loaded %d models (%d failed) from %s", len(bundles), len(errors), model_dir)
    return Corpus(bundles=bundles, errors=errors)


def _assemble(graph: DecisionGraph, path: Path, store: ArticleStore, links: Dict[str, List[str]], srl_dir) -> ModelBundle:
    flags: List[str] = []
    if not validate_graph(graph).ok:
        flags.append(BundleFlag.INVALID_GRAPH)

    seed = list(graph.metadata.get("article_refs", []))
    seed += [ref for ref in links.get(graph.id, []) if ref not in seed]
    article_ids, warnings = expand_cross_references(seed, store)
    if warnings:
        flags.append(BundleFlag.DANGLING_REFERENCES)
    articles = [store.get(article_id) for article_id in article_ids if article_id in store]
    if not articles:
        logger.warning("Model %s has no linked articles", graph.id)
        flags.append(BundleFlag.MISSING_ARTICLES)

    srl = None
    if srl_dir is not None:
        srl_path = Path(srl_dir) / f"{graph.id}.json"
        if srl_path.exists():
            try:
                srl = load_srl(srl_path)
            except DecisionModelError as e:
                logger.warning("%s", e)
    if srl is None:
        flags.append(BundleFlag.MISSING_SRL)

    return ModelBundle(
        graph=graph,
        articles=articles,
        srl_annotations=srl,
        seed_article_ids=seed,
        flags=flags,
        source_path=str(path),
    )


def corpus_manifest(corpus: Corpus) -> Dict[str, dict]:
    return {
        bundle.model_id: {
            "model_type": bundle.model_type.value,
            "seed_article_ids": list(bundle.seed_article_ids),
            "article_ids": [article.id for article in bundle.articles],
            "flags": sorted(bundle.flags),
        }
        for bundle in corpus.bundles
    }


def write_manifest(corpus: Corpus, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "models": corpus_manifest(corpus),
        "errors": [{"path": error.path, "message": error.message} for error in corpus.errors],
    }
    path.write_text(json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return path
