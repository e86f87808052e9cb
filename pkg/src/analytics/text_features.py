import logging
import re
from dataclasses import asdict, dataclass, fields
from typing import Dict, List, Mapping, Sequence

from dmn import LegalArticle
from ir.errors import InsufficientDataError

logger = logging.getLogger(__name__)

# '.', '?' or '!' followed by whitespace or the end of the text
SENTENCE_END = re.compile(r"[.?!](?=\s|$)")


@dataclass(frozen=True)
class TextFeatures:
    avg_sentence_length: float
    recital_length: int
    cross_reference_count: int
    external_reference_count: int
    list_item_count: int

    @classmethod
    def feature_names(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def split_sentences(text: str) -> List[str]:
    return [part.strip() for part in SENTENCE_END.split(text) if part.split()]


def word_count(text: str) -> int:
    return len(text.split())


def text_features(articles: Sequence[LegalArticle]) -> TextFeatures:
    if not articles:
        raise InsufficientDataError("text features need at least one article")
    sentences = [sentence for article in articles for sentence in split_sentences(article.body_text)]
    words = sum(word_count(sentence) for sentence in sentences)
    return TextFeatures(
        avg_sentence_length=words / len(sentences) if sentences else 0.0,
        recital_length=sum(word_count(article.recital_text) for article in articles),
        cross_reference_count=sum(len(article.internal_refs) for article in articles),
        external_reference_count=sum(len(article.external_refs) for article in articles),
        list_item_count=sum(article.list_item_count for article in articles),
    )


TERTILE_GROUPS = ("Low", "Medium", "High")


@dataclass(frozen=True)
class TertileRow:
    feature: str
    group: str
    lower: float
    upper: float
    count: int
    mean_similarity: float
    model_ids: tuple


def tertile_table(
    features: Mapping[str, float],
    similarity: Mapping[str, float],
    feature_name: str,
) -> List[TertileRow]:
    """Models sorted by feature value, split in three; earlier groups take the remainder"""
    model_ids = sorted((model_id for model_id in features if model_id in similarity),
                       key=lambda model_id: (features[model_id], model_id))
    n = len(model_ids)
    if n < 3:
        raise InsufficientDataError(f"tertiles of '{feature_name}' need at least 3 models, got {n}")

    rows = []
    start = 0
    for index, group in enumerate(TERTILE_GROUPS):
        size = n // 3 + (1 if index < n % 3 else 0)
        members = model_ids[start:start + size]
        start += size
        values = [features[model_id] for model_id in members]
        rows.append(TertileRow(
            feature=feature_name,
            group=group,
            lower=min(values),
            upper=max(values),
            count=len(members),
            mean_similarity=sum(similarity[model_id] for model_id in members) / len(members),
            model_ids=tuple(members),
        ))
    return rows
