# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import math
from typing import Any

import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from docqa.environment import calculate_expr
from docqa.environment import format_number
from docqa.environment.calculator import MAX_RESULT_BITS
from docqa.exceptions import DisallowedConstructError
from docqa.exceptions import DivisionByZeroError
from docqa.exceptions import ExpressionSyntaxError


@pytest.mark.parametrize(
    "expr,expected",
    [
        ("13 * 42", 546),
        ("2 ** -1", 0.5),
        ("(1 + 2) * 3", 9),
        ("-7 // 2", -4),
        ("7 % 3", 1),
        ("10 / 4", 2.5),
        ("1e3 + 1", 1001.0),
        ("+5 - -5", 10),
        ("```python\n6 * 7\n```", 42),
    ],
)
def test_calculate_expr(expr: str, expected: Any) -> None:
    assert calculate_expr(expr) == expected


@pytest.mark.parametrize(
    "value,expected",
    [
        (546, "546"),
        (0.5, "0.5"),
        (1 / 3, "0.333333333333"),
        (2.0, "2"),
        (10**20, "100000000000000000000"),
        (1e20, "1e+20"),
    ],
)
def test_format_number(value: Any, expected: str) -> None:
    assert format_number(value) == expected


@pytest.mark.parametrize(
    "expr",
    [
        "__import__('os').system('true')",
        "open('/etc/passwd').read()",
        "x + 1",
        "(1).__class__",
        "[1, 2, 3]",
        "'a' * 3",
        "True + 1",
        "1 if 1 else 2",
        "lambda: 1",
        "1 < 2",
        "2 ** 20000",
        "1j * 1j",
        "(-8) ** 0.5",
        "10.0 ** 400",
        "((10 ** 10000) ** 10000) ** 10000",
        "10 ** 5000",
        "3 ** 9000",
        "(10 ** 3000) * (10 ** 3000)",
        "-(10 ** 3000) * 10 ** 3000",
    ],
)
def test_disallowed_constructs(expr: str) -> None:
    with pytest.raises(DisallowedConstructError):
        calculate_expr(expr)


@pytest.mark.parametrize("expr", ["1 / 0", "5 // 0", "5 % 0", "0 ** -1"])
def test_division_by_zero(expr: str) -> None:
    with pytest.raises(DivisionByZeroError):
        calculate_expr(expr)


@pytest.mark.parametrize("expr", ["", "1 +", "(1 + 2", "1 = 2", "import os"])
def test_syntax_errors(expr: str) -> None:
    with pytest.raises(ExpressionSyntaxError):
        calculate_expr(expr)


def expressions() -> st.SearchStrategy[str]:
    """Arithmetic expressions over small integer and decimal literals."""
    literals = st.one_of(
        st.integers(min_value=0, max_value=1000).map(str),
        st.decimals(
            min_value=0, max_value=100, places=2, allow_nan=False, allow_infinity=False
        ).map(str),
    )

    def extend(children: st.SearchStrategy[str]) -> st.SearchStrategy[str]:
        binary = st.tuples(
            children, st.sampled_from(["+", "-", "*", "/", "//", "%"]), children
        ).map(lambda parts: f"({parts[0]} {parts[1]} {parts[2]})")
        unary = st.tuples(st.sampled_from(["-", "+"]), children).map("".join)
        return binary | unary

    return st.recursive(literals, extend, max_leaves=12)


@settings(max_examples=200)
@given(expressions())
def test_matches_python_arithmetic(expr: str) -> None:
    """The calculator agrees with Python's own arithmetic on literal expressions."""
    try:
        expected = eval(expr, {"__builtins__": {}})  # noqa: S307
    except ZeroDivisionError:
        with pytest.raises(DivisionByZeroError):
            calculate_expr(expr)
        return
    result = calculate_expr(expr)
    assert type(result) is type(expected)
    assert math.isclose(result, expected, rel_tol=1e-12, abs_tol=1e-12)


def test_large_results_within_the_limit() -> None:
    """Tests that:
    * results up to the size limit are computed and formatted in full
    * oversized integers are refused by the formatter too
    """
    result = calculate_expr("10 ** 3000")
    assert isinstance(result, int)
    assert result.bit_length() <= MAX_RESULT_BITS
    assert format_number(result) == "1" + "0" * 3000
    assert calculate_expr("(-1) ** 10000") == 1

    with pytest.raises(DisallowedConstructError):
        format_number(10**5000)
