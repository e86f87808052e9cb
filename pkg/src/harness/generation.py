import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from dmn import deserialize_graph
from ir import DecisionGraph, validate_graph
from ir.errors import SchemaError

logger = logging.getLogger(__name__)

CODE_FENCE = re.compile(r"```[A-Za-z]*[ \t]*\n(.*?)\n?```", re.DOTALL)


class Validity(Enum):
    PARSED = "Parsed"
    SCHEMA_ERROR = "SchemaError"
    VALIDATION_ERROR = "ValidationError"
    PROVIDER_ERROR = "ProviderError"


@dataclass(frozen=True)
class ParsedGeneration:
    validity: Validity
    graph: Optional[DecisionGraph] = None
    detail: str = ""


def clean_text(raw: str) -> str:
    """Lone surrogates become U+FFFD so the text survives UTF-8 storage"""
    return raw.encode("utf-8", "surrogatepass").decode("utf-8", "replace")


def strip_code_fences(raw: str) -> str:
    match = CODE_FENCE.search(raw)
    return match.group(1) if match else raw.strip()


def parse_generation(raw: str) -> ParsedGeneration:
    try:
        graph = deserialize_graph(strip_code_fences(clean_text(raw)))
    except SchemaError as e:
        return ParsedGeneration(Validity.SCHEMA_ERROR, detail=str(e))

    report = validate_graph(graph)
    if not report.ok:
        return ParsedGeneration(Validity.VALIDATION_ERROR, detail=report.summary())
    return ParsedGeneration(Validity.PARSED, graph)
