from .compact_format import (
    CompactGraph,
    compact_json_schema,
    compact_to_graph,
    compression_ratio,
    deserialize_graph,
    serialize_graph,
)
from .corpus import (
    BundleFlag,
    Corpus,
    CorpusError,
    ModelBundle,
    SrlAnnotation,
    corpus_manifest,
    load_corpus,
    load_srl,
    write_manifest,
)
from .dmn_parser import DmnParser, infer_model_type, parse_dmn
from .legal_articles import ArticleParser, ArticleStore, LegalArticle, expand_cross_references, parse_articles


__all__ = [
    "ArticleParser",
    "ArticleStore",
    "BundleFlag",
    "CompactGraph",
    "Corpus",
    "CorpusError",
    "DmnParser",
    "LegalArticle",
    "ModelBundle",
    "SrlAnnotation",
    "compact_json_schema",
    "compact_to_graph",
    "compression_ratio",
    "corpus_manifest",
    "deserialize_graph",
    "expand_cross_references",
    "infer_model_type",
    "load_corpus",
    "load_srl",
    "parse_articles",
    "parse_dmn",
    "serialize_graph",
    "write_manifest",
]
