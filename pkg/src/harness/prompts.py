import hashlib
import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from string import Template
from typing import Dict, List, Sequence, Tuple

from dmn import LegalArticle, ModelBundle, compact_json_schema, serialize_graph
from ir.errors import TemplateError

from .conditions import Condition, build_io_spec

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "templates"
TEMPLATE_VERSION = "v1"
EXAMPLE_START = "<<<EXAMPLE_MODEL\n"
EXAMPLE_END = "\nEXAMPLE_MODEL>>>"


class PromptFlag:
    MISSING_SRL = "missing_srl"


@dataclass(frozen=True)
class BuiltPrompt:
    system: str
    user: str
    template_version: str
    flags: Tuple[str, ...] = ()

    @property
    def prompt_hash(self) -> str:
        return prompt_hash(self.system, self.user)


def prompt_hash(system: str, user: str) -> str:
    return hashlib.sha256(f"{system}\x00{user}".encode("utf-8")).hexdigest()


@lru_cache(maxsize=None)
def load_template(version: str, name: str) -> Template:
    path = TEMPLATE_DIR / version / f"{name}.txt"
    if not path.exists():
        raise TemplateError(f"{version}/{name}", "<template file>")
    return Template(path.read_text(encoding="utf-8"))


def render_template(version: str, name: str, variables: Dict[str, str]) -> str:
    try:
        return load_template(version, name).substitute(variables)
    except KeyError as e:
        raise TemplateError(f"{version}/{name}", e.args[0]) from e
    except ValueError as e:
        raise TemplateError(f"{version}/{name}", str(e)) from e


def render_articles(articles: Sequence[LegalArticle]) -> str:
    blocks = []
    for article in articles:
        heading = f"Artikel {article.id}" + (f" {article.title}" if article.title else "")
        blocks.append(f"{heading}\n{article.body_text}")
    return "\n\n".join(blocks) if blocks else "(no article text)"


def render_srl_block(bundle: ModelBundle) -> str:
    srl = bundle.srl_annotations
    lines = ["Semantic roles in the target article(s):"]
    for role in ("actors", "actions", "objects", "recipients"):
        values = getattr(srl, role)
        lines.append(f"- {role}: " + ("; ".join(values) if values else "(none)"))
    return "\n".join(lines) + "\n\n"


def build_prompt(
    condition: Condition,
    target: ModelBundle,
    example: ModelBundle,
    template_version: str = TEMPLATE_VERSION,
) -> BuiltPrompt:
    flags: List[str] = []
    srl_block = ""
    if condition.uses_srl:
        if target.srl_annotations is None:
            logger.warning("No SRL annotations for %s; omitting the SRL block", target.model_id)
            flags.append(PromptFlag.MISSING_SRL)
        else:
            srl_block = render_srl_block(target)
    io_block = build_io_spec(target.graph).render() + "\n\n" if condition.uses_io else ""

    system = render_template(template_version, "system", {
        "schema": json.dumps(compact_json_schema(), indent=2, sort_keys=True),
    })
    user = render_template(template_version, "user", {
        "example_articles": render_articles(example.articles),
        "example_model": serialize_graph(example.graph).decode("utf-8"),
        "target_articles": render_articles(target.articles),
        "srl_block": srl_block,
        "io_block": io_block,
        "target_id": target.model_id,
        "model_type": target.model_type.value,
    })
    return BuiltPrompt(system, user, template_version, tuple(flags))


def extract_example_model(user: str) -> str:
    """The example model document embedded in a rendered user prompt"""
    start = user.index(EXAMPLE_START) + len(EXAMPLE_START)
    return user[start:user.index(EXAMPLE_END, start)]
