# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from typing import Any

import pytest

from docqa.agent import extract_answer
from docqa.agent import parse_turn
from docqa.agent import Turn
from docqa.choices import ActionFormat
from docqa.exceptions import MissingActionError
from docqa.exceptions import MissingThoughtError


@pytest.mark.parametrize(
    "completion,thought,action",
    [
        (
            "[Thought]: t\n[Action]: GenerateAnswer(answer='x')",
            "t",
            "GenerateAnswer(answer='x')",
        ),
        (
            "Sure!\n[thought]: look it up\n[action]:\nCalculateExpr(expr='1 + 1')\n",
            "look it up",
            "CalculateExpr(expr='1 + 1')",
        ),
        (
            "[Thought]: multi\nline\n[Action]: CalculateExpr(expr='2')\n"
            "[Observation]: 2\n[Thought]: invented",
            "multi\nline",
            "CalculateExpr(expr='2')",
        ),
        (
            "[Thought]: fenced\n[Action]:\nHere it is:\n```python\n"
            "CalculateExpr(expr='3')\n```\nDone.",
            "fenced",
            "```python\nCalculateExpr(expr='3')\n```",
        ),
    ],
)
def test_parse_turn(completion: str, thought: str, action: str) -> None:
    assert parse_turn(completion) == (thought, action)


@pytest.mark.parametrize(
    "completion,exception",
    [
        ("GenerateAnswer(answer='x')", MissingThoughtError),
        ("[Action]: GenerateAnswer(answer='x')\n[Thought]: late", MissingActionError),
        ("[Thought]: I am thinking", MissingActionError),
        ("[Thought]: empty\n[Action]:   \n[Observation]: none", MissingActionError),
    ],
)
def test_parse_turn_errors(completion: str, exception: type[Exception]) -> None:
    with pytest.raises(exception):
        parse_turn(completion)


@pytest.mark.parametrize(
    "completion,expected,has_error",
    [
        ("[Thought]: t\n[Action]: GenerateAnswer(answer=[1, 'a'])", [1, "a"], False),
        ("[Thought]: t\n[Action]: GenerateAnswer(answer=3)", 3, False),
        ("[Thought]: t\n[Action]: 42", 42, True),
        (
            "[Thought]: t\n[Action]: CalculateExpr(expr='1')",
            "CalculateExpr(expr='1')",
            True,
        ),
        ("no markers, just ['A', 'B']", "no markers, just ['A', 'B']", True),
        ("['A', 'B']", ["A", "B"], True),
    ],
)
def test_extract_answer(completion: str, expected: Any, has_error: bool) -> None:
    """Single completions always yield an answer, well-formed or not."""
    turn = Turn(index=0, completion=completion)
    assert extract_answer(turn, ActionFormat.markdown) == expected
    assert (turn.error is not None) is has_error
    if not has_error:
        assert turn.terminal
        assert turn.thought == "t"
