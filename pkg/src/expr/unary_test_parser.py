import re

from ir import IRRELEVANT, IS_NULL, NOT_NULL, UnaryTest, UnaryTestType
from ir.errors import UnaryTestSyntaxError
from ir.values import parse_number, quote_text, render_number, render_value


_NUMBER = re.compile(r"-?\d+(?:\.\d+)?")
_KEYWORD = re.compile(r"[A-Za-z_]+")
_COMPARATORS = {
    "<=": UnaryTestType.LEQ,
    ">=": UnaryTestType.GEQ,
    "<": UnaryTestType.LT,
    ">": UnaryTestType.GT,
}


class UnaryTestParser:
    """Recursive-descent parser for the unary-test subset used in decision table cells.

    Grammar:
        test    := '-' | 'null' | 'true' | 'false' | number | string
                 | 'not' '(' test ')'
                 | ('<' | '<=' | '>' | '>=') number
                 | 'contains' '(' ['?' ','] string ')'
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> UnaryTest:
        if not self.text.strip():
            raise self._error("Empty unary test")
        self._skip_ws()
        test = self._parse_test()
        self._skip_ws()
        if self.pos != len(self.text):
            raise self._error("Unexpected trailing input")
        return test

    def _parse_test(self) -> UnaryTest:
        if self._at_end():
            raise self._error("Expected a unary test")
        char = self.text[self.pos]

        if char == "-" and not _NUMBER.match(self.text, self.pos):
            self.pos += 1
            return IRRELEVANT

        if char == '"':
            return UnaryTest.equals(self._parse_string())

        for symbol, test_type in _COMPARATORS.items():
            if self.text.startswith(symbol, self.pos):
                self.pos += len(symbol)
                self._skip_ws()
                return UnaryTest(test_type=test_type, value=self._parse_number())

        if _NUMBER.match(self.text, self.pos):
            return UnaryTest.equals(self._parse_number())

        keyword = _KEYWORD.match(self.text, self.pos)
        if keyword is None:
            raise self._error(f"Unexpected character {char!r}")
        word = keyword.group()
        start = self.pos
        self.pos = keyword.end()

        if word == "null":
            return IS_NULL
        if word == "true":
            return UnaryTest.equals(True)
        if word == "false":
            return UnaryTest.equals(False)
        if word == "not":
            self._expect("(")
            self._skip_ws()
            if self.text.startswith("-", self.pos) and not _NUMBER.match(self.text, self.pos):
                raise self._error("not() cannot wrap the irrelevant test '-'")
            inner = self._parse_test()
            self._skip_ws()
            self._expect(")")
            return UnaryTest.negate(inner)
        if word == "contains":
            self._expect("(")
            self._skip_ws()
            # contains(?, "x") is accepted as a synonym of contains("x")
            if self.text.startswith("?", self.pos):
                self.pos += 1
                self._expect(",")
                self._skip_ws()
            if self._at_end() or self.text[self.pos] != '"':
                raise self._error("contains() expects a double-quoted string")
            needle = self._parse_string()
            self._skip_ws()
            self._expect(")")
            return UnaryTest.contains(needle)

        self.pos = start
        raise self._error(f"Unknown keyword {word!r}")

    def _parse_number(self):
        match = _NUMBER.match(self.text, self.pos)
        if match is None:
            raise self._error("Expected a decimal number")
        self.pos = match.end()
        return parse_number(match.group())

    def _parse_string(self) -> str:
        start = self.pos
        self.pos += 1  # opening quote
        chars = []
        while not self._at_end():
            char = self.text[self.pos]
            if char == "\\":
                if self.pos + 1 >= len(self.text):
                    break
                chars.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if char == '"':
                self.pos += 1
                return "".join(chars)
            chars.append(char)
            self.pos += 1
        self.pos = start
        raise self._error("Unterminated string literal")

    def _expect(self, symbol: str):
        self._skip_ws()
        if not self.text.startswith(symbol, self.pos):
            raise self._error(f"Expected {symbol!r}")
        self.pos += len(symbol)

    def _skip_ws(self):
        while not self._at_end() and self.text[self.pos].isspace():
            self.pos += 1

    def _at_end(self) -> bool:
        return self.pos >= len(self.text)

    def _error(self, message: str) -> UnaryTestSyntaxError:
        offset = len(self.text[:self.pos].encode("utf-8"))
        return UnaryTestSyntaxError(message, self.text, offset)


def parse_unary_test(text: str) -> UnaryTest:
    return UnaryTestParser(text).parse()


def render_unary_test(test: UnaryTest) -> str:
    """Canonical text; parse_unary_test(render_unary_test(t)) == t"""
    test_type = test.test_type
    if test_type is UnaryTestType.IRRELEVANT:
        return "-"
    if test_type is UnaryTestType.IS_NULL:
        return "null"
    if test_type is UnaryTestType.NOT_NULL:
        return "not(null)"
    if test_type is UnaryTestType.EQUALS:
        return render_value(test.value)
    if test_type is UnaryTestType.CONTAINS:
        return f"contains({quote_text(test.value)})"
    if test_type is UnaryTestType.NOT:
        return f"not({render_unary_test(test.operand)})"
    return f"{test_type.value} {render_number(test.value)}"
