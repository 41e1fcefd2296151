# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Keep observations within the per-turn token budget.

Text is only ever cut at line boundaries; every rendered table row is a line.
"""
from bisect import bisect_right

from ..choices import ObservationFormat
from ..store import ResultTable
from ..tokens import count_tokens
from ..tokens import MIN_TOKEN_BUDGET
from .formatters import format_observation


def truncation_marker(budget: int) -> str:
    return f"... [observation truncated at {budget} tokens]"


def truncate_tokens(text: str, budget: int = 5000) -> str:
    """Cut text to the longest line prefix that fits budget with the marker.

    Examples:
        ```python
        truncate_tokens("short text")  # --> "short text"
        truncate_tokens("a b c " * 10, budget=16)  # --> "... [observation ...]"
        ```

    Args:
        text: The rendered observation.
        budget: The maximum number of tokens, marker included, at least
            `MIN_TOKEN_BUDGET`.

    Returns:
        text itself when it fits, else the kept lines followed by a marker line.
    """
    if budget < MIN_TOKEN_BUDGET:
        raise ValueError(f"budget must be at least {MIN_TOKEN_BUDGET}, got {budget}")
    if count_tokens(text) <= budget:
        return text
    marker = truncation_marker(budget)
    room = budget - count_tokens(marker)
    lines = text.split("\n")
    kept = (
        bisect_right(
            range(len(lines) + 1),
            room,
            key=lambda n: count_tokens("\n".join(lines[:n])),
        )
        - 1
    )
    return "\n".join(lines[:kept] + [marker])


def fit_table(table: ResultTable, fmt: ObservationFormat, budget: int) -> str:
    """Render the longest row prefix of table whose rendering fits budget.

    The footer counts the rows actually shown. When even the bare header is too
    long, the rendering is cut by `truncate_tokens`.
    """
    rendered = format_observation(table, fmt)
    if count_tokens(rendered) <= budget:
        return rendered
    marker = truncation_marker(budget)

    def rendering(rows: int) -> str:
        prefix = ResultTable(column_names=table.column_names, rows=table.rows[:rows])
        return format_observation(prefix, fmt) + "\n" + marker

    shown = (
        bisect_right(
            range(len(table.rows) + 1),
            budget,
            key=lambda rows: count_tokens(rendering(rows)),
        )
        - 1
    )
    if shown < 0:
        return truncate_tokens(rendered, budget)
    return rendering(shown)
