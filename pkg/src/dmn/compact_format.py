"""Compact JSON form of a DecisionGraph.

One UTF-8 JSON document per model. Field names mirror DecisionGraph, hit
policies are uppercase strings and table cells carry the canonical text of
their unary test. The published schema is `CompactGraph.model_json_schema()`
(see docs/COMPACT_FORMAT.md).
"""
import json
import logging
from decimal import Decimal
from typing import Any, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from expr import parse_unary_test, render_unary_test
from ir import DecisionGraph, DecisionTable, HitPolicy, ModelType, Node, NodeKind, Rule, ValueType
from ir.errors import SchemaError, UnaryTestSyntaxError
from ir.values import dumps_json, make_value, to_json_value

logger = logging.getLogger(__name__)

JsonScalar = Union[bool, int, float, Decimal, str, None]


class CompactRule(BaseModel):
    model_config = ConfigDict(extra="forbid")

    when: List[str]
    then: Union[JsonScalar, List[JsonScalar]] = None


class CompactTable(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hit_policy: Literal["UNIQUE", "FIRST", "ANY", "COLLECT"]
    inputs: List[str]
    output: str
    rules: List[CompactRule] = Field(default_factory=list)


class CompactNode(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str = Field(min_length=1)
    name: str
    kind: Literal["input", "decision", "output"]
    type: Optional[Literal["boolean", "string", "number"]] = None
    table: Optional[CompactTable] = None


class CompactGraph(BaseModel):
    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    id: str = Field(min_length=1)
    model_type: Literal["Outcome", "Requirements"]
    output: str
    nodes: List[CompactNode]
    edges: List[Tuple[str, str]] = Field(default_factory=list)
    source_bytes: Optional[int] = None

    @field_validator("nodes")
    @classmethod
    def _nodes_not_empty(cls, nodes: List[CompactNode]) -> List[CompactNode]:
        if not nodes:
            raise ValueError("a decision graph has at least one node")
        return nodes


def _field_path(loc: Tuple[Any, ...]) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path


def _to_compact(graph: DecisionGraph) -> CompactGraph:
    nodes = []
    for node in graph.nodes:
        table = None
        if node.table is not None:
            table = CompactTable(
                hit_policy=node.table.hit_policy.value,
                inputs=list(node.table.input_refs),
                output=node.table.output_name,
                rules=[
                    CompactRule(
                        when=[render_unary_test(test) for test in rule.conditions],
                        then=to_json_value(rule.output_value),
                    )
                    for rule in node.table.rules
                ],
            )
        nodes.append(CompactNode(
            id=node.id,
            name=node.name,
            kind=node.kind.value,
            type=node.value_type.value if node.value_type else None,
            table=table,
        ))
    return CompactGraph(
        id=graph.id,
        model_type=graph.model_type.value,
        output=graph.output_node_id,
        nodes=nodes,
        edges=[tuple(edge) for edge in graph.edges],
        source_bytes=graph.metadata.get("source_bytes"),
    )


def serialize_graph(graph: DecisionGraph) -> bytes:
    document = _to_compact(graph).model_dump(mode="python", exclude_none=True)
    return dumps_json(document).encode("utf-8")


def deserialize_graph(data: Union[bytes, str]) -> DecisionGraph:
    try:
        # decimals stay exact; pydantic keeps Decimal in the JsonScalar union
        raw = json.loads(data, parse_float=Decimal)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise SchemaError(f"not a JSON document: {e}") from e
    return compact_to_graph(raw)


def compact_to_graph(raw: Any) -> DecisionGraph:
    """Build a DecisionGraph from an already decoded compact document"""
    try:
        document = CompactGraph.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise SchemaError(first["msg"], _field_path(first["loc"])) from e

    nodes = []
    for i, compact in enumerate(document.nodes):
        table = None
        if compact.table is not None:
            table = _table_from_compact(compact.table, f"nodes[{i}].table")
        try:
            nodes.append(Node(
                id=compact.id,
                name=compact.name,
                kind=NodeKind(compact.kind),
                value_type=ValueType(compact.type) if compact.type else None,
                table=table,
            ))
        except ValueError as e:
            raise SchemaError(str(e), f"nodes[{i}]") from e

    metadata = {}
    if document.source_bytes is not None:
        metadata["source_bytes"] = document.source_bytes
    return DecisionGraph(
        id=document.id,
        model_type=ModelType(document.model_type),
        nodes=tuple(nodes),
        edges=tuple(tuple(edge) for edge in document.edges),
        output_node_id=document.output,
        metadata=metadata,
    )


def _table_from_compact(table: CompactTable, path: str) -> DecisionTable:
    rules = []
    for j, rule in enumerate(table.rules):
        conditions = []
        for k, text in enumerate(rule.when):
            try:
                conditions.append(parse_unary_test(text))
            except UnaryTestSyntaxError as e:
                raise SchemaError(str(e), f"{path}.rules[{j}].when[{k}]") from e
        try:
            output_value = make_value(rule.then)
        except (TypeError, ValueError) as e:
            raise SchemaError(str(e), f"{path}.rules[{j}].then") from e
        rules.append(Rule(conditions=tuple(conditions), output_value=output_value))
    return DecisionTable(
        hit_policy=HitPolicy(table.hit_policy),
        input_refs=tuple(table.inputs),
        output_name=table.output,
        rules=tuple(rules),
    )


def compression_ratio(graph: DecisionGraph, xml_size: Optional[int] = None) -> Optional[float]:
    """Source XML size over compact size; None when the source size is unknown"""
    xml_size = xml_size if xml_size is not None else graph.metadata.get("source_bytes")
    if not xml_size:
        return None
    return xml_size / len(serialize_graph(graph))


def compact_json_schema() -> dict:
    return CompactGraph.model_json_schema()
