import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from lxml import etree

from expr import parse_unary_test
from ir import (
    IRRELEVANT,
    DecisionGraph,
    DecisionTable,
    HitPolicy,
    ModelType,
    Node,
    NodeKind,
    Rule,
    UnaryTestType,
    ValueType,
)
from ir.errors import DmnParseError, UnaryTestSyntaxError
from ir.values import Value

logger = logging.getLogger(__name__)

TYPE_REFS = {
    "boolean": ValueType.BOOLEAN,
    "string": ValueType.STRING,
    "number": ValueType.NUMBER,
    "integer": ValueType.NUMBER,
    "long": ValueType.NUMBER,
    "double": ValueType.NUMBER,
    "decimal": ValueType.NUMBER,
}

TYPE_PREFIX = re.compile(r"^(?:outcome|requirements)\s*-\s*", re.IGNORECASE)

MODEL_TYPE_MARKERS = (
    (ModelType.OUTCOME, ("outcome", "uitkomst", "conclusie")),
    (ModelType.REQUIREMENTS, ("requirements", "indieningsvereisten", "vereisten")),
)


def _local(element) -> str:
    return etree.QName(element).localname


def _children(element, name: str) -> List:
    return [child for child in element if isinstance(child.tag, str) and _local(child) == name]


def _child(element, name: str):
    found = _children(element, name)
    return found[0] if found else None


def _text_of(element, name: str = "text") -> str:
    child = _child(element, name) if element is not None else None
    return (child.text or "").strip() if child is not None else ""


def _normalize_name(name: str) -> str:
    return re.sub(r"\s+", " ", name).strip().lower()


def model_id_from_name(stem: str) -> str:
    """Drops the model type prefix: 'Outcome - KoelwaterLozen' -> 'KoelwaterLozen'"""
    return TYPE_PREFIX.sub("", stem).strip() or stem


def infer_model_type(source_name: str) -> Optional[ModelType]:
    """Model type from the dataset naming convention (file stem first, then folders)"""
    path = Path(source_name)
    candidates = [path.stem] + [part for part in reversed(path.parent.parts)]
    for candidate in candidates:
        lowered = candidate.lower()
        for model_type, markers in MODEL_TYPE_MARKERS:
            if any(lowered.startswith(marker) for marker in markers):
                return model_type
    return None


class DmnParser:
    """Converts DMN 1.x XML (decision requirements graph + decision tables) to a DecisionGraph"""

    def __init__(self, model_type: Optional[ModelType] = None, output_decision_id: Optional[str] = None):
        self.model_type = model_type
        self.output_decision_id = output_decision_id

    def parse(self, xml_bytes: bytes, source_name: str = "") -> DecisionGraph:
        try:
            root = etree.fromstring(xml_bytes, parser=etree.XMLParser(resolve_entities=False, no_network=True))
        except etree.XMLSyntaxError as e:
            raise DmnParseError(f"XML syntax error: {e}", source_name or None) from e
        self.tree = root.getroottree()

        if _local(root) != "definitions":
            raise DmnParseError(f"Expected <definitions>, found <{_local(root)}>", self.tree.getpath(root))

        model_id = model_id_from_name(Path(source_name).stem) if source_name else (root.get("name") or root.get("id") or "model")
        model_type = self.model_type or infer_model_type(source_name) or infer_model_type(root.get("name") or "")
        if model_type is None:
            raise DmnParseError(
                f"Cannot infer Outcome/Requirements type for '{model_id}'; pass an explicit model type"
            )

        names: Dict[str, str] = {}
        nodes: Dict[str, Node] = {}
        for element in _children(root, "inputData"):
            node = self._parse_input(element)
            nodes[node.id] = node
            names[node.id] = node.name

        decisions = _children(root, "decision")
        requirements: Dict[str, List[str]] = {}
        for element in decisions:
            decision_id = self._require_id(element)
            names[decision_id] = element.get("name") or decision_id
            requirements[decision_id] = self._parse_requirements(element)

        output_id = self._select_output(root, decisions, requirements)

        edges: List[Tuple[str, str]] = []
        for element in decisions:
            decision_id = element.get("id")
            required = requirements[decision_id]
            for ref in required:
                if ref not in names:
                    raise DmnParseError(f"Requirement of '{decision_id}' points to unknown element '{ref}'", self.tree.getpath(element))
                edges.append((ref, decision_id))
            table = self._parse_table(element, required, names)
            kind = NodeKind.OUTPUT if decision_id == output_id else NodeKind.DECISION
            nodes[decision_id] = Node(id=decision_id, name=names[decision_id], kind=kind, table=table)

        article_refs = []
        for source in _children(root, "knowledgeSource"):
            location = source.get("locationURI") or ""
            ref = location.rsplit("#", 1)[-1] if location else ""
            if ref and ref not in article_refs:
                article_refs.append(ref)

        return DecisionGraph(
            id=model_id,
            model_type=model_type,
            nodes=tuple(nodes.values()),
            edges=tuple(edges),
            output_node_id=output_id,
            metadata={"article_refs": article_refs, "source_bytes": len(xml_bytes), "name": root.get("name") or model_id},
        )

    def _require_id(self, element) -> str:
        element_id = element.get("id")
        if not element_id:
            raise DmnParseError(f"<{_local(element)}> without id", self.tree.getpath(element))
        return element_id

    def _parse_input(self, element) -> Node:
        input_id = self._require_id(element)
        variable = _child(element, "variable")
        type_ref = (variable.get("typeRef") if variable is not None else None) or ""
        value_type = TYPE_REFS.get(type_ref.lower().split(".")[-1])
        if value_type is None:
            logger.warning("Input '%s' has typeRef %r, treating it as string", input_id, type_ref)
            value_type = ValueType.STRING
        return Node(id=input_id, name=element.get("name") or input_id, kind=NodeKind.INPUT_VARIABLE, value_type=value_type)

    def _parse_requirements(self, element) -> List[str]:
        refs = []
        for requirement in _children(element, "informationRequirement"):
            for reference in list(requirement):
                if not isinstance(reference.tag, str):
                    continue
                if _local(reference) in ("requiredInput", "requiredDecision"):
                    href = reference.get("href") or ""
                    ref = href.rsplit("#", 1)[-1]
                    if ref and ref not in refs:
                        refs.append(ref)
        return refs

    def _select_output(self, root, decisions, requirements: Dict[str, List[str]]) -> str:
        decision_ids = [element.get("id") for element in decisions]
        if self.output_decision_id:
            if self.output_decision_id not in decision_ids:
                raise DmnParseError(f"Output decision '{self.output_decision_id}' not found")
            return self.output_decision_id
        if not decision_ids:
            raise DmnParseError("Missing output decision: model has no decisions", self.tree.getpath(root))

        required = {ref for refs in requirements.values() for ref in refs}
        sinks = [decision_id for decision_id in decision_ids if decision_id not in required]
        if len(sinks) == 1:
            return sinks[0]

        model_name = _normalize_name(root.get("name") or "")
        named = [element.get("id") for element in decisions
                 if element.get("id") in sinks and _normalize_name(element.get("name") or "") == model_name]
        if len(named) == 1:
            return named[0]
        raise DmnParseError(
            f"Missing output decision: {len(sinks)} candidate final decisions ({', '.join(sinks)})",
            self.tree.getpath(root),
        )

    def _parse_table(self, decision, required: List[str], names: Dict[str, str]) -> DecisionTable:
        path = self.tree.getpath(decision)
        table = _child(decision, "decisionTable")
        if table is None:
            raise DmnParseError("Unsupported construct: decision without a decisionTable", path)
        table_path = self.tree.getpath(table)

        policy_text = (table.get("hitPolicy") or "UNIQUE").strip().upper()
        try:
            hit_policy = HitPolicy(policy_text)
        except ValueError:
            raise DmnParseError(f"Unsupported construct: hit policy {policy_text!r}", table_path) from None
        if table.get("aggregation"):
            raise DmnParseError(f"Unsupported construct: COLLECT aggregation {table.get('aggregation')!r}", table_path)

        outputs = _children(table, "output")
        if len(outputs) != 1:
            raise DmnParseError(f"Unsupported construct: {len(outputs)} output columns", table_path)
        output_name = outputs[0].get("name") or decision.get("name") or decision.get("id")

        columns = _children(table, "input")
        input_refs = self._resolve_columns(columns, required, names, table_path)

        rules = []
        for rule_element in _children(table, "rule"):
            rule_path = self.tree.getpath(rule_element)
            entries = _children(rule_element, "inputEntry")
            if len(entries) != len(columns):
                raise DmnParseError(f"Rule has {len(entries)} input entries for {len(columns)} columns", rule_path)
            conditions = tuple(self._parse_condition(entry) for entry in entries)
            output_entries = _children(rule_element, "outputEntry")
            if len(output_entries) != 1:
                raise DmnParseError(f"Unsupported construct: {len(output_entries)} output entries", rule_path)
            rules.append(Rule(conditions=conditions, output_value=self._parse_output(output_entries[0])))

        return DecisionTable(hit_policy=hit_policy, input_refs=tuple(input_refs), output_name=output_name, rules=tuple(rules))

    def _resolve_columns(self, columns, required: List[str], names: Dict[str, str], table_path: str) -> List[str]:
        """Bind each input column to the required element it reads"""
        by_name = {names[ref]: ref for ref in required if ref in names}
        by_normalized = {_normalize_name(names[ref]): ref for ref in required if ref in names}
        resolved: List[Optional[str]] = []
        for column in columns:
            expression = _text_of(_child(column, "inputExpression"))
            label = column.get("label") or ""
            ref = (
                by_name.get(expression)
                or by_normalized.get(_normalize_name(expression))
                or by_normalized.get(_normalize_name(label))
                or (expression if expression in required else None)
            )
            resolved.append(ref)

        if any(ref is None for ref in resolved):
            # unbound columns take the unused requirements in order, only when counts match exactly
            unused = [ref for ref in required if ref not in resolved]
            unbound = [i for i, ref in enumerate(resolved) if ref is None]
            if len(unused) != len(unbound):
                unresolved = [_text_of(_child(columns[i], "inputExpression")) for i in unbound]
                raise DmnParseError(f"Unsupported construct: cannot bind input column(s) {unresolved}", table_path)
            for i, ref in zip(unbound, unused):
                resolved[i] = ref
        if len(set(resolved)) != len(resolved):
            raise DmnParseError("Unsupported construct: two input columns read the same element", table_path)
        return resolved

    def _parse_condition(self, entry):
        text = _text_of(entry)
        if not text:
            return IRRELEVANT
        try:
            return parse_unary_test(text)
        except UnaryTestSyntaxError as e:
            raise DmnParseError(f"Unsupported construct: {e}", self.tree.getpath(entry)) from e

    def _parse_output(self, entry) -> Value:
        text = _text_of(entry)
        if not text:
            return None
        try:
            test = parse_unary_test(text)
        except UnaryTestSyntaxError as e:
            raise DmnParseError(f"Unsupported construct: rule output {text!r} is not a literal", self.tree.getpath(entry)) from e
        if test.test_type is UnaryTestType.IS_NULL:
            return None
        if test.test_type is not UnaryTestType.EQUALS:
            raise DmnParseError(f"Unsupported construct: rule output {text!r} is not a literal", self.tree.getpath(entry))
        return test.value


def parse_dmn(
    xml_bytes: bytes,
    source_name: str = "",
    model_type: Optional[ModelType] = None,
    output_decision_id: Optional[str] = None,
) -> DecisionGraph:
    return DmnParser(model_type, output_decision_id).parse(xml_bytes, source_name)
