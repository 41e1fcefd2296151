# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Filter expressions over vector entry fields.

The language is the boolean expression dialect of vector databases such as Milvus:

    pdf_id == '12345678' and page_number in [1, 2]
    not (page_number - 1 > 3) or table_name != "chunks"

Precedence, loosest first: `or`, `and`, `not`, comparisons and `in`, `+ -`,
`* /`, unary minus. `&&`, `||` and `!` are accepted for `and`, `or` and `not`.
Expressions are type checked when parsed.
"""
import re
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any
from typing import Protocol

from ..exceptions import FilterSyntaxError
from ..exceptions import FilterTypeError
from ..exceptions import UnknownFieldError

FIELD_TYPES: dict[str, str] = {
    "pdf_id": "str",
    "page_number": "int",
    "table_name": "str",
    "column_name": "str",
    "primary_key": "str",
    "text": "str",
}

COMPARISON_OPERATORS = ("==", "!=", "<", "<=", ">", ">=")
UNSUPPORTED_OPERATORS = ("like", "%", "**", "json_contains", "array_contains")


class Entry(Protocol):
    pdf_id: str
    page_number: int
    table_name: str
    column_name: str
    primary_key: str
    text: str


# --- #
# AST #
# --- #


@dataclass(frozen=True)
class TrueFilter:
    pass


@dataclass(frozen=True)
class Literal:
    value: Any


@dataclass(frozen=True)
class Field:
    name: str


@dataclass(frozen=True)
class ListExpr:
    items: tuple["Node", ...]


@dataclass(frozen=True)
class Negate:
    operand: "Node"


@dataclass(frozen=True)
class Arithmetic:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Membership:
    left: "Node"
    right: ListExpr
    negated: bool = False


@dataclass(frozen=True)
class Not:
    operand: "Node"


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


Node = (
    TrueFilter
    | Literal
    | Field
    | ListExpr
    | Negate
    | Arithmetic
    | Compare
    | Membership
    | Not
    | And
    | Or
)

# ------ #
# Lexing #
# ------ #

_TOKEN = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
    | (?P<string>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
    | (?P<name>[A-Za-z_]\w*)
    | (?P<op>\*\*|==|!=|<=|>=|&&|\|\||[<>+\-*/%()\[\],!])
    """,
    re.VERBOSE,
)
_ESCAPE = re.compile(r"\\(.)")
_WORD_OPERATORS = {"and": "and", "or": "or", "not": "not", "in": "in"}
_SYMBOL_ALIASES = {"&&": "and", "||": "or", "!": "not"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int
    value: Any = None


def _lex(text: str) -> Iterator[Token]:
    position = 0
    while position < len(text):
        found = _TOKEN.match(text, position)
        if found is None:
            raise FilterSyntaxError(
                f"Unexpected character {text[position]!r}", position
            )
        kind = found.lastgroup
        lexeme = found.group()
        match kind:
            case "ws":
                pass
            case "number":
                value: Any = int(lexeme) if lexeme.isdigit() else float(lexeme)
                yield Token("literal", lexeme, position, value)
            case "string":
                unquoted = _ESCAPE.sub(r"\1", lexeme[1:-1])
                yield Token("literal", lexeme, position, unquoted)
            case "name":
                lowered = lexeme.lower()
                if lowered in _WORD_OPERATORS:
                    yield Token("op", _WORD_OPERATORS[lowered], position)
                elif lowered in ("true", "false"):
                    yield Token("literal", lexeme, position, lowered == "true")
                elif lowered in UNSUPPORTED_OPERATORS:
                    yield Token("unsupported", lexeme, position)
                else:
                    yield Token("name", lexeme, position)
            case "op":
                if lexeme in ("%", "**"):
                    yield Token("unsupported", lexeme, position)
                else:
                    yield Token("op", _SYMBOL_ALIASES.get(lexeme, lexeme), position)
        position = found.end()
    yield Token("end", "", len(text))


# ------- #
# Parsing #
# ------- #


class _Parser:
    """Recursive descent over the token stream, one method per precedence level."""

    def __init__(self, text: str) -> None:
        self.tokens = list(_lex(text))
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def accept(self, *ops: str) -> Token | None:
        token = self.current
        if token.kind == "op" and token.text in ops:
            self.index += 1
            return token
        return None

    def expect(self, op: str) -> Token:
        token = self.accept(op)
        if token is None:
            raise self.error(f"Expected {op!r}")
        return token

    def error(self, message: str) -> FilterSyntaxError:
        token = self.current
        if token.kind == "unsupported":
            return FilterSyntaxError(
                f"Operator {token.text!r} is not supported in filters", token.offset
            )
        found = "end of filter" if token.kind == "end" else repr(token.text)
        return FilterSyntaxError(f"{message}, found {found}", token.offset)

    def parse(self) -> Node:
        node = self.parse_or()
        if self.current.kind != "end":
            raise self.error("Expected end of filter")
        return node

    def parse_or(self) -> Node:
        node = self.parse_and()
        while self.accept("or"):
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Node:
        node = self.parse_not()
        while self.accept("and"):
            node = And(node, self.parse_not())
        return node

    def parse_not(self) -> Node:
        if self.accept("not"):
            return Not(self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self) -> Node:
        left = self.parse_additive()
        operator = self.accept(*COMPARISON_OPERATORS)
        if operator is not None:
            return Compare(operator.text, left, self.parse_additive())
        if self.accept("in"):
            return Membership(left, self.parse_list())
        if self.current.kind == "op" and self.current.text == "not":
            following = self.tokens[self.index + 1]
            if following.kind == "op" and following.text == "in":
                self.index += 2
                return Membership(left, self.parse_list(), negated=True)
        return left

    def parse_list(self) -> ListExpr:
        if self.current.kind == "op" and self.current.text == "[":
            return self.parse_primary()  # type: ignore[return-value]
        raise FilterTypeError(
            f"The right operand of 'in' must be a list (at offset "
            f"{self.current.offset})"
        )

    def parse_additive(self) -> Node:
        node = self.parse_multiplicative()
        while (operator := self.accept("+", "-")) is not None:
            node = Arithmetic(operator.text, node, self.parse_multiplicative())
        return node

    def parse_multiplicative(self) -> Node:
        node = self.parse_unary()
        while (operator := self.accept("*", "/")) is not None:
            node = Arithmetic(operator.text, node, self.parse_unary())
        return node

    def parse_unary(self) -> Node:
        if self.accept("-"):
            return Negate(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Node:
        token = self.current
        if token.kind == "literal":
            self.advance()
            return Literal(token.value)
        if token.kind == "name":
            if token.text not in FIELD_TYPES:
                raise UnknownFieldError(token.text, token.offset)
            self.advance()
            return Field(token.text)
        if self.accept("("):
            node = self.parse_or()
            self.expect(")")
            return node
        if self.accept("["):
            items: list[Node] = []
            if not self.accept("]"):
                items.append(self.parse_additive())
                while self.accept(","):
                    items.append(self.parse_additive())
                self.expect("]")
            return ListExpr(tuple(items))
        raise self.error("Expected a field, a literal or '('")


# ------------- #
# Type checking #
# ------------- #


def _literal_type(value: Any) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    return "str"


def _numeric(type_: str) -> bool:
    return type_ in ("int", "float")


def _comparable(left: str, right: str) -> bool:
    return left == right or (_numeric(left) and _numeric(right))


def infer_type(node: Node) -> str:
    """Infer the static type of a node.

    Raises:
        FilterTypeError: If operand types do not fit their operator.
    """
    match node:
        case TrueFilter():
            return "bool"
        case Literal(value):
            return _literal_type(value)
        case Field(name):
            return FIELD_TYPES[name]
        case ListExpr(items):
            for item in items:
                infer_type(item)
            return "list"
        case Negate(operand):
            if not _numeric(operand_type := infer_type(operand)):
                raise FilterTypeError(f"Cannot negate a {operand_type} value")
            return operand_type
        case Arithmetic(op, left, right):
            left_type, right_type = infer_type(left), infer_type(right)
            if not (_numeric(left_type) and _numeric(right_type)):
                raise FilterTypeError(
                    f"Operator {op!r} needs numbers, got {left_type} and {right_type}"
                )
            if op == "/" or "float" in (left_type, right_type):
                return "float"
            return "int"
        case Compare(op, left, right):
            left_type, right_type = infer_type(left), infer_type(right)
            if "list" in (left_type, right_type) or not _comparable(
                left_type, right_type
            ):
                raise FilterTypeError(
                    f"Cannot compare {left_type} with {right_type} using {op!r}"
                )
            if op not in ("==", "!=") and left_type == "bool":
                raise FilterTypeError(f"Cannot order booleans using {op!r}")
            return "bool"
        case Membership(left, right):
            left_type = infer_type(left)
            if left_type == "list":
                raise FilterTypeError("The left operand of 'in' cannot be a list")
            for item in right.items:
                if not _comparable(left_type, item_type := infer_type(item)):
                    raise FilterTypeError(
                        f"Cannot look for a {left_type} value among {item_type} values"
                    )
            return "bool"
        case Not(operand):
            if infer_type(operand) != "bool":
                raise FilterTypeError("The operand of 'not' must be a condition")
            return "bool"
        case And(left, right) | Or(left, right):
            if infer_type(left) != "bool" or infer_type(right) != "bool":
                raise FilterTypeError("The operands of 'and'/'or' must be conditions")
            return "bool"
    raise FilterTypeError(f"Unknown filter node {node!r}")  # pragma: no cover


def parse_filter(text: str) -> Node:
    """Parse and type check a filter expression.

    Raises:
        FilterSyntaxError: With the offset of the offending token.
        UnknownFieldError: If a name is not one of the entry fields.
        FilterTypeError: If the expression is ill-typed or not a condition.

    Returns:
        The expression tree, `TrueFilter()` for an empty filter.
    """
    if not text.strip():
        return TrueFilter()
    node = _Parser(text).parse()
    if infer_type(node) != "bool":
        raise FilterTypeError("A filter must be a condition, not a value")
    return node


# ---------- #
# Evaluation #
# ---------- #


def _value(node: Node, entry: Entry) -> Any:
    match node:
        case Literal(value):
            return value
        case Field(name):
            return getattr(entry, name)
        case ListExpr(items):
            return [_value(item, entry) for item in items]
        case Negate(operand):
            return -_value(operand, entry)
        case Arithmetic(op, left, right):
            left_value, right_value = _value(left, entry), _value(right, entry)
            match op:
                case "+":
                    return left_value + right_value
                case "-":
                    return left_value - right_value
                case "*":
                    return left_value * right_value
                case "/":
                    if right_value == 0:
                        raise FilterTypeError("Division by zero in filter")
                    return left_value / right_value
    return evaluate_filter(node, entry)


def evaluate_filter(node: Node, entry: Entry) -> bool:
    """Evaluate a parsed filter against one entry.

    Raises:
        FilterTypeError: If a runtime value does not fit its operator.
    """
    match node:
        case TrueFilter():
            return True
        case Literal(value) if isinstance(value, bool):
            return value
        case Compare(op, left, right):
            left_value, right_value = _value(left, entry), _value(right, entry)
            try:
                match op:
                    case "==":
                        return bool(left_value == right_value)
                    case "!=":
                        return bool(left_value != right_value)
                    case "<":
                        return bool(left_value < right_value)
                    case "<=":
                        return bool(left_value <= right_value)
                    case ">":
                        return bool(left_value > right_value)
                    case ">=":
                        return bool(left_value >= right_value)
            except TypeError as error:
                raise FilterTypeError(str(error)) from error
        case Membership(left, right, negated):
            found = _value(left, entry) in _value(right, entry)
            return found != negated
        case Not(operand):
            return not evaluate_filter(operand, entry)
        case And(left, right):
            return evaluate_filter(left, entry) and evaluate_filter(right, entry)
        case Or(left, right):
            return evaluate_filter(left, entry) or evaluate_filter(right, entry)
    raise FilterTypeError(f"Not a condition: {node!r}")
