import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from lxml import etree

from ir.errors import ArticleParseError

logger = logging.getLogger(__name__)

ARTICLE_TAGS = frozenset({"artikel", "article"})
TITLE_TAGS = frozenset({"kop", "titel", "title"})
RECITAL_TAGS = frozenset({"toelichting", "recital"})
LIST_ITEM_TAGS = frozenset({"li"})
INTREF_TAGS = frozenset({"intref"})
EXTREF_TAGS = frozenset({"extref"})

# enumeration markers at the start of a line: "a.", "1°", "-"
LIST_MARKER = re.compile(r"(?m)^\s*(?:[a-z]\.|\d+°|-)\s+\S")


@dataclass(frozen=True)
class LegalArticle:
    id: str
    title: str
    body_text: str
    recital_text: str = ""
    internal_refs: Tuple[str, ...] = ()
    list_item_count: int = 0
    source_xml_path: str = ""
    act_id: str = ""
    external_refs: Tuple[str, ...] = ()


def _local(element) -> str:
    return etree.QName(element).localname.lower()


def _collapse(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def _dedupe(items: Iterable[str], exclude: str = "") -> Tuple[str, ...]:
    seen: List[str] = []
    for item in items:
        if item and item != exclude and item not in seen:
            seen.append(item)
    return tuple(seen)


class ArticleParser:
    """Reads one act in the dataset's article XML dialect.

    An act root carries its identifier in `bwb-id` (or `id`); each `artikel`
    holds a `kop`/`titel`, body paragraphs, optional `lijst`/`li` lists,
    `intref` cross-references (`target`, optional `bwb-id` of the referenced
    act), `extref` references to other acts (`doc`) and an optional
    `toelichting` recital.
    """

    def __init__(self, source_path: str = ""):
        self.source_path = source_path

    def parse(self, xml_bytes: bytes) -> List[LegalArticle]:
        try:
            root = etree.fromstring(xml_bytes, parser=etree.XMLParser(resolve_entities=False, no_network=True))
        except etree.XMLSyntaxError as e:
            raise ArticleParseError(f"{self.source_path or '<bytes>'}: XML syntax error: {e}") from e

        act_id = root.get("bwb-id") or root.get("id") or Path(self.source_path).stem
        articles = []
        for element in root.iter(etree.Element):
            if _local(element) in ARTICLE_TAGS:
                articles.append(self._parse_article(element, act_id))
        return articles

    def _parse_article(self, element, act_id: str) -> LegalArticle:
        article_id = element.get("id") or element.get("label")
        if not article_id:
            path = element.getroottree().getpath(element)
            raise ArticleParseError(f"{self.source_path}: article without id at {path}")

        title_parts: List[str] = []
        body_parts: List[str] = [element.text or ""]
        recital_parts: List[str] = []
        for child in element:
            if not isinstance(child.tag, str):
                body_parts.append(child.tail or "")
                continue
            tag = _local(child)
            if tag in TITLE_TAGS:
                title_parts.append("".join(child.itertext()))
            elif tag in RECITAL_TAGS:
                recital_parts.append("".join(child.itertext()))
            else:
                body_parts.append(self._text_with_breaks(child))
            body_parts.append(child.tail or "")

        raw_body = "\n".join(body_parts)
        internal_refs, external_refs = self._references(element, act_id)
        return LegalArticle(
            id=article_id,
            title=_collapse(" ".join(title_parts)),
            body_text=_collapse(raw_body),
            recital_text=_collapse(" ".join(recital_parts)),
            internal_refs=_dedupe(internal_refs, exclude=article_id),
            list_item_count=self._list_items(element, raw_body),
            source_xml_path=self.source_path,
            act_id=act_id,
            external_refs=_dedupe(external_refs),
        )

    @staticmethod
    def _text_with_breaks(element) -> str:
        # block children start on a new line so list markers stay at line starts
        parts = [element.text or ""]
        for child in element:
            if isinstance(child.tag, str) and _local(child) in RECITAL_TAGS:
                parts.append(child.tail or "")
                continue
            if isinstance(child.tag, str) and _local(child) in LIST_ITEM_TAGS | {"al", "lid", "lijst"}:
                parts.append("\n")
            parts.append(ArticleParser._text_with_breaks(child) if isinstance(child.tag, str) else "")
            parts.append(child.tail or "")
        return "".join(parts)

    @staticmethod
    def _list_items(element, raw_body: str) -> int:
        items = sum(1 for node in element.iter(etree.Element) if _local(node) in LIST_ITEM_TAGS)
        if items:
            return items
        return len(LIST_MARKER.findall(raw_body))

    @staticmethod
    def _references(element, act_id: str) -> Tuple[List[str], List[str]]:
        internal: List[str] = []
        external: List[str] = []
        for node in element.iter(etree.Element):
            tag = _local(node)
            if tag in INTREF_TAGS:
                target = (node.get("target") or node.get("href") or "").lstrip("#")
                referenced_act = node.get("bwb-id")
                if referenced_act and referenced_act != act_id:
                    external.append(referenced_act)
                else:
                    internal.append(target)
            elif tag in EXTREF_TAGS:
                external.append(node.get("doc") or node.get("bwb-id") or "")
        return internal, external


class ArticleStore:
    """Articles of one or more acts, addressable by article id"""

    def __init__(self, articles: Iterable[LegalArticle] = ()):
        self._articles: Dict[str, LegalArticle] = {}
        for article in articles:
            self.add(article)

    def add(self, article: LegalArticle):
        if article.id in self._articles:
            logger.warning("Duplicate article id '%s' in %s; keeping the first", article.id, article.source_xml_path)
            return
        self._articles[article.id] = article

    def get(self, article_id: str) -> Optional[LegalArticle]:
        return self._articles.get(article_id)

    def __contains__(self, article_id: str) -> bool:
        return article_id in self._articles

    def __len__(self) -> int:
        return len(self._articles)

    def __iter__(self) -> Iterator[LegalArticle]:
        return iter(self._articles.values())

    @classmethod
    def from_directory(cls, article_dir) -> 'ArticleStore':
        store = cls()
        for path in sorted(Path(article_dir).glob("*.xml")):
            try:
                articles = ArticleParser(str(path)).parse(path.read_bytes())
            except (OSError, ArticleParseError) as e:
                logger.warning("Skipping article file %s: %s", path, e)
                continue
            for article in articles:
                store.add(article)
        logger.info("Loaded %d articles from %s", len(store), article_dir)
        return store


def parse_articles(xml_bytes: bytes, source_path: str = "") -> List[LegalArticle]:
    return ArticleParser(source_path).parse(xml_bytes)


def expand_cross_references(seed: Sequence[str], store: ArticleStore) -> Tuple[List[str], List[str]]:
    """One-level expansion over internal references within the same act.

    Returns (article ids, warnings). Seed ids keep their order; newly reached
    ids follow in ascending order. Dangling references become warnings.
    """
    result = list(_dedupe(seed))
    warnings: List[str] = []
    added = set()
    for article_id in result:
        article = store.get(article_id)
        if article is None:
            warnings.append(f"seed article '{article_id}' not in corpus")
            continue
        for ref in article.internal_refs:
            referenced = store.get(ref)
            if referenced is None:
                warnings.append(f"article '{article_id}' references unknown article '{ref}'")
                continue
            if referenced.act_id != article.act_id:
                continue
            if ref not in result:
                added.add(ref)
    for warning in warnings:
        logger.warning(warning)
    return result + sorted(added), warnings
