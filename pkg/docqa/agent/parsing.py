# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Splitting of completions into thought and action blocks."""
import re

from ..exceptions import MissingActionError
from ..exceptions import MissingThoughtError

THOUGHT_MARKER = re.compile(r"\[Thought\]:", re.IGNORECASE)
ACTION_MARKER = re.compile(r"\[Action\]:", re.IGNORECASE)
# A block ends where the model starts inventing the next part of the loop
BLOCK_END = re.compile(r"\[(?:Observation|Thought)\]:", re.IGNORECASE)
FENCED = re.compile(r"```[\w+-]*[ \t]*\n.*?\n?```", re.DOTALL)


def parse_turn(completion: str) -> tuple[str, str]:
    """Extract the thought and the action text of a completion.

    Example:
        ```python
        parse_turn("[Thought]: t\\n[Action]: GenerateAnswer(answer='x')")
        # --> ("t", "GenerateAnswer(answer='x')")
        ```

    Raises:
        MissingThoughtError: If there is no `[Thought]:` marker.
        MissingActionError: If no `[Action]:` marker follows the thought.
    """
    thought_match = THOUGHT_MARKER.search(completion)
    if thought_match is None:
        raise MissingThoughtError()
    action_match = ACTION_MARKER.search(completion, thought_match.end())
    if action_match is None:
        raise MissingActionError()

    thought = completion[thought_match.end() : action_match.start()].strip()
    rest = completion[action_match.end() :]
    end = BLOCK_END.search(rest)
    action_text = (rest[: end.start()] if end else rest).strip()
    fenced = FENCED.search(action_text)
    if fenced is not None:
        action_text = fenced.group(0)
    if not action_text:
        raise MissingActionError()
    return thought, action_text
