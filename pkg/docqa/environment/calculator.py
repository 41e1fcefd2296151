# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Arithmetic over numeric literals only: no names, no calls, no attributes."""
import ast
import operator
from collections.abc import Callable
from typing import Any

from ..exceptions import DisallowedConstructError
from ..exceptions import DivisionByZeroError
from ..exceptions import ExpressionSyntaxError
from ..literals import strip_code_fences

Number = int | float

BINARY_OPERATORS: dict[type[ast.operator], Callable[[Any, Any], Any]] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
}
UNARY_OPERATORS: dict[type[ast.unaryop], Callable[[Any], Any]] = {
    ast.UAdd: operator.pos,
    ast.USub: operator.neg,
}

# Keeps 2 ** 2 ** 30 and friends from eating the process
MAX_EXPONENT = 10_000
# Integer results stay below the interpreter's 4300 digit str() limit
MAX_RESULT_BITS = 13_000


def _check_size(value: Number) -> Number:
    if isinstance(value, int) and value.bit_length() > MAX_RESULT_BITS:
        raise DisallowedConstructError(
            f"Result exceeds the limit of {MAX_RESULT_BITS} bits"
        )
    return value


def _check_power(lhs: Number, rhs: Number) -> None:
    if abs(rhs) > MAX_EXPONENT:
        raise DisallowedConstructError(
            f"Exponent {rhs} exceeds the limit of {MAX_EXPONENT}"
        )
    if isinstance(lhs, int) and isinstance(rhs, int):
        if rhs * max(lhs.bit_length(), 1) > MAX_RESULT_BITS:
            raise DisallowedConstructError(
                f"Result exceeds the limit of {MAX_RESULT_BITS} bits"
            )


def _evaluate(node: ast.AST) -> Number:
    match node:
        case ast.Constant(value=bool()):
            raise DisallowedConstructError("Booleans are not numbers here")
        case ast.Constant(value=int() | float() as value):
            return _check_size(value)
        case ast.Constant(value=value):
            raise DisallowedConstructError(f"Unsupported constant: {value!r}")
        case ast.UnaryOp(op=op, operand=operand) if type(op) in UNARY_OPERATORS:
            return UNARY_OPERATORS[type(op)](_evaluate(operand))
        case ast.BinOp(left=left, op=op, right=right) if type(op) in BINARY_OPERATORS:
            lhs, rhs = _evaluate(left), _evaluate(right)
            if isinstance(op, ast.Pow):
                _check_power(lhs, rhs)
            try:
                result = BINARY_OPERATORS[type(op)](lhs, rhs)
            except ZeroDivisionError as error:
                raise DivisionByZeroError(f"Division by zero: {error}") from error
            except OverflowError as error:
                raise DisallowedConstructError(f"Numeric overflow: {error}") from error
            if isinstance(result, complex):
                raise DisallowedConstructError("Complex results are not supported")
            return _check_size(result)
    raise DisallowedConstructError(
        f"Unsupported construct {type(node).__name__}, only numbers, parentheses "
        "and + - * / // % ** are allowed"
    )


def calculate_expr(expr: str) -> Number:
    """Evaluate an arithmetic expression.

    Examples:
        ```python
        calculate_expr("13 * 42")  # --> 546
        calculate_expr("2 ** -1")  # --> 0.5
        ```

    Raises:
        ExpressionSyntaxError: If the text is not an expression.
        DivisionByZeroError: If a division or modulo by zero occurs.
        DisallowedConstructError: For names, calls and every other construct,
            and for integer results above `MAX_RESULT_BITS`.
    """
    text = strip_code_fences(expr)
    try:
        tree = ast.parse(text, mode="eval")
    except (SyntaxError, ValueError) as error:
        raise ExpressionSyntaxError(f"Invalid expression {text!r}: {error}") from error
    return _evaluate(tree.body)


def format_number(value: Number) -> str:
    """Integers verbatim, floats with up to 12 significant digits.

    Raises:
        DisallowedConstructError: For integers above `MAX_RESULT_BITS`.
    """
    if isinstance(value, int):
        return str(_check_size(value))
    return f"{value:.12g}"
