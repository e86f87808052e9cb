from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

from ir import DecisionGraph, ModelType

OUTCOME_CLASSES = ("NotApplicable", "PermitRequired", "GeneralRulesApply", "NotificationRequired")


class Condition(Enum):
    """Information given to the generator besides the legal text"""
    TEXT = "Text"
    TEXT_SRL = "TextSrl"
    TEXT_IO = "TextIo"
    TEXT_SRL_IO = "TextSrlIo"

    @property
    def uses_srl(self) -> bool:
        return self in (Condition.TEXT_SRL, Condition.TEXT_SRL_IO)

    @property
    def uses_io(self) -> bool:
        return self in (Condition.TEXT_IO, Condition.TEXT_SRL_IO)


@dataclass(frozen=True)
class IoInput:
    id: str
    name: str
    value_type: str


@dataclass(frozen=True)
class IoSpecification:
    """Fixed interface of the model to generate; the internals stay free"""
    inputs: Tuple[IoInput, ...]
    output_name: str
    output_type: Union[str, Tuple[str, ...]]

    def __post_init__(self):
        names = [entry.name for entry in self.inputs]
        if len(set(names)) != len(names):
            raise ValueError(f"Input names must be unique: {names}")

    def render(self) -> str:
        lines = ["Inputs:"]
        lines += [f"- {entry.id}: {entry.name} ({entry.value_type})" for entry in self.inputs]
        if isinstance(self.output_type, tuple):
            output_type = "one of " + ", ".join(self.output_type)
        else:
            output_type = self.output_type
        lines.append(f"Output: {self.output_name} ({output_type})")
        return "\n".join(lines)


def build_io_spec(graph: DecisionGraph) -> IoSpecification:
    inputs = []
    names = [node.name for node in graph.input_nodes]
    for node in graph.input_nodes:
        # repeated labels get their id appended to keep names unique
        name = node.name if names.count(node.name) == 1 else f"{node.name} [{node.id}]"
        inputs.append(IoInput(node.id, name, node.value_type.value))
    output_type = "boolean" if graph.model_type is ModelType.REQUIREMENTS else OUTCOME_CLASSES
    return IoSpecification(tuple(inputs), graph.node(graph.output_node_id).name, output_type)
