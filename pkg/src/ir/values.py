"""Runtime values flowing through decision tables.

Values are plain immutable Python objects:

    Null     -> None
    Boolean  -> bool
    Number   -> decimal.Decimal (never float, so thresholds compare exactly)
    Text     -> str
    List     -> tuple of non-list values (COLLECT results)
"""
import json
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Any, Tuple, Union

Scalar = Union[None, bool, Decimal, str]
Value = Union[Scalar, Tuple[Scalar, ...]]


class ValueKind(Enum):
    NULL = "null"
    BOOLEAN = "boolean"
    NUMBER = "number"
    TEXT = "text"
    LIST = "list"


def value_kind(value: Value) -> ValueKind:
    if value is None:
        return ValueKind.NULL
    # bool before numbers: bool is an int subclass
    if isinstance(value, bool):
        return ValueKind.BOOLEAN
    if isinstance(value, Decimal):
        return ValueKind.NUMBER
    if isinstance(value, str):
        return ValueKind.TEXT
    if isinstance(value, tuple):
        return ValueKind.LIST
    raise TypeError(f"Not a decision value: {value!r} ({type(value).__name__})")


def make_value(raw: Any) -> Value:
    """Coerce a native Python/JSON value into a decision value"""
    if raw is None or isinstance(raw, (bool, str, Decimal)):
        return raw
    if isinstance(raw, int):
        return Decimal(raw)
    if isinstance(raw, float):
        # repr gives the shortest text that round-trips, i.e. what was written
        return Decimal(repr(raw))
    if isinstance(raw, (list, tuple)):
        items = tuple(make_value(item) for item in raw)
        if any(isinstance(item, tuple) for item in items):
            raise ValueError("List values never nest another list")
        return items
    raise TypeError(f"Unsupported value type: {type(raw).__name__}")


def values_equal(left: Value, right: Value) -> bool:
    """Kind-aware equality: Boolean(true) never equals Number(1)"""
    left_kind, right_kind = value_kind(left), value_kind(right)
    if left_kind is not right_kind:
        return False
    if left_kind is ValueKind.LIST:
        return len(left) == len(right) and all(values_equal(a, b) for a, b in zip(left, right))
    return left == right


def parse_number(text: str) -> Decimal:
    try:
        number = Decimal(text)
    except InvalidOperation as e:
        raise ValueError(f"Not a decimal literal: {text!r}") from e
    if not number.is_finite():
        raise ValueError(f"Not a finite decimal literal: {text!r}")
    return number


def render_number(number: Decimal) -> str:
    text = format(number, "f")
    return text


def quote_text(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def render_value(value: Value) -> str:
    """Canonical literal text, the form used in decision table cells"""
    kind = value_kind(value)
    if kind is ValueKind.NULL:
        return "null"
    if kind is ValueKind.BOOLEAN:
        return "true" if value else "false"
    if kind is ValueKind.NUMBER:
        return render_number(value)
    if kind is ValueKind.TEXT:
        return quote_text(value)
    return "[" + ", ".join(render_value(item) for item in value) + "]"


def to_json_value(value: Value) -> Any:
    """Native JSON form: int when integral, otherwise the Decimal itself (write it with `dumps_json`)"""
    kind = value_kind(value)
    if kind is ValueKind.NUMBER:
        if value == value.to_integral_value():
            return int(value)
        return value
    if kind is ValueKind.LIST:
        return [to_json_value(item) for item in value]
    return value


def dumps_json(document: Any, sort_keys: bool = False) -> str:
    """One-line JSON where Decimal numbers keep every digit"""
    if isinstance(document, Decimal):
        return render_number(document)
    if isinstance(document, dict):
        items = sorted(document.items()) if sort_keys else document.items()
        return "{" + ",".join(
            f"{json.dumps(str(key), ensure_ascii=False)}:{dumps_json(value, sort_keys)}" for key, value in items
        ) + "}"
    if isinstance(document, (list, tuple)):
        return "[" + ",".join(dumps_json(item, sort_keys) for item in document) + "]"
    return json.dumps(document, ensure_ascii=False)
