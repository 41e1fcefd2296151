# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Python-style literals as written by language models.

Accepts what `ast.literal_eval` accepts for strings, numbers, lists and dicts,
plus lowercase `true`/`false`/`null`/`none` names. Tuples, sets, bytes and
complex numbers are not literal values here.
"""
import ast
import re
from typing import Any

from .exceptions import DocQAError

LiteralValue = str | int | float | bool | None | list[Any] | dict[str, Any]

_FENCE = re.compile(r"^```[\w+-]*[ \t]*\n?(?P<body>.*?)\n?```$", re.DOTALL)

_NAMED_CONSTANTS: dict[str, Any] = {
    "true": True,
    "false": False,
    "null": None,
    "none": None,
}


class LiteralSyntaxError(DocQAError, ValueError):
    pass


def strip_code_fences(text: str) -> str:
    """Remove one pair of surrounding markdown code fences, if any."""
    text = text.strip()
    match = _FENCE.match(text)
    if match is None:
        return text
    return match.group("body").strip()


def literal_from_node(node: ast.AST) -> Any:
    """Convert an expression node into a literal value.

    Raises:
        LiteralSyntaxError: If the node is anything but a supported literal.
    """
    if isinstance(node, ast.Constant):
        value = node.value
        if value is None or isinstance(value, (str, bool, int, float)):
            return value
        raise LiteralSyntaxError(f"Unsupported constant: {value!r}")
    if isinstance(node, ast.Name):
        try:
            return _NAMED_CONSTANTS[node.id.lower()]
        except KeyError:
            raise LiteralSyntaxError(f"Bare name is not a literal: {node.id}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        operand = literal_from_node(node.operand)
        if isinstance(operand, bool) or not isinstance(operand, (int, float)):
            raise LiteralSyntaxError("Unary sign on a non-number")
        return -operand if isinstance(node.op, ast.USub) else operand
    if isinstance(node, ast.List):
        return [literal_from_node(element) for element in node.elts]
    if isinstance(node, ast.Dict):
        result: dict[str, Any] = {}
        for key, value in zip(node.keys, node.values):
            if key is None:
                raise LiteralSyntaxError("Dict unpacking is not a literal")
            converted_key = literal_from_node(key)
            if not isinstance(converted_key, str):
                raise LiteralSyntaxError("Dict keys must be strings")
            result[converted_key] = literal_from_node(value)
        return result
    raise LiteralSyntaxError(f"Unsupported syntax: {type(node).__name__}")


def parse_expression(text: str) -> ast.expr:
    """Parse text as one Python expression, mapping every failure to our error."""
    try:
        return ast.parse(text, mode="eval").body
    except (SyntaxError, ValueError, MemoryError, RecursionError) as error:
        raise LiteralSyntaxError(str(error)) from error


def parse_strict_literal(text: str) -> Any:
    return literal_from_node(parse_expression(strip_code_fences(text)))


def parse_literal(text: str) -> Any:
    """Parse a literal, falling back to the trimmed text itself.

    Examples:
        ```python
        parse_literal('["SCG-NLI", "false"]')  # --> ["SCG-NLI", "false"]
        parse_literal("42")  # --> 42
        parse_literal("TRUE")  # --> True
        parse_literal("The answer is 42")  # --> "The answer is 42"
        ```

    Args:
        text: Raw text, optionally wrapped in code fences.

    Returns:
        The literal value. This function never raises.
    """
    stripped = strip_code_fences(text)
    try:
        return literal_from_node(parse_expression(stripped))
    except (LiteralSyntaxError, RecursionError):
        return stripped
