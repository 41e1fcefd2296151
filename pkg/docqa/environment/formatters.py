# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Rendering of tabular observations.

    markdown  +---+ bordered grid, cells centered
    json      one compact object per row
    string    right-aligned columns separated by two spaces, with a header
    html      table border="1" class="dataframe"

Every rendering ends with the line
`In total, {n} rows are displayed in {FORMAT} format.`
"""
import html
import json
from collections.abc import Callable
from typing import Any

from ..choices import ObservationFormat
from ..store import ResultTable


def _cell_text(value: Any) -> str:
    if isinstance(value, (list, dict)):
        text = json.dumps(value, ensure_ascii=False)
    else:
        text = str(value)
    # One table row per line
    return text.replace("\r", "\\r").replace("\n", "\\n")


def _text_grid(table: ResultTable) -> tuple[list[str], list[list[str]], list[int]]:
    header = [_cell_text(name) for name in table.column_names]
    cells = [[_cell_text(value) for value in row] for row in table.rows]
    widths = [
        max([len(header[i])] + [len(row[i]) for row in cells])
        for i in range(len(header))
    ]
    return header, cells, widths


def _center(text: str, width: int) -> str:
    padding = width - len(text)
    left = padding // 2
    return " " * left + text + " " * (padding - left)


def _render_markdown(table: ResultTable) -> list[str]:
    header, cells, widths = _text_grid(table)
    widths = [width + 2 for width in widths]
    border = "+" + "+".join("-" * width for width in widths) + "+"

    def line(values: list[str]) -> str:
        return "|" + "|".join(map(_center, values, widths)) + "|"

    lines = [border, line(header), border]
    lines.extend(line(row) for row in cells)
    if cells:
        lines.append(border)
    return lines


def _render_json(table: ResultTable) -> list[str]:
    return [
        json.dumps(
            dict(zip(table.column_names, row)),
            ensure_ascii=False,
            separators=(",", ":"),
            default=str,
        )
        for row in table.rows
    ]


def _render_string(table: ResultTable) -> list[str]:
    header, cells, widths = _text_grid(table)

    def line(values: list[str]) -> str:
        return "  ".join(value.rjust(width) for value, width in zip(values, widths))

    return [line(header)] + [line(row) for row in cells]


def _render_html(table: ResultTable) -> list[str]:
    def escape(value: Any) -> str:
        return html.escape(_cell_text(value), quote=False)

    lines = ['<table border="1" class="dataframe">', "  <thead>"]
    lines.append('    <tr style="text-align: right;">')
    lines.extend(f"      <th>{escape(name)}</th>" for name in table.column_names)
    lines.extend(["    </tr>", "  </thead>", "  <tbody>"])
    for row in table.rows:
        lines.append("    <tr>")
        lines.extend(f"      <td>{escape(value)}</td>" for value in row)
        lines.append("    </tr>")
    lines.extend(["  </tbody>", "</table>"])
    return lines


RENDERERS: dict[ObservationFormat, Callable[[ResultTable], list[str]]] = {
    ObservationFormat.markdown: _render_markdown,
    ObservationFormat.json: _render_json,
    ObservationFormat.string: _render_string,
    ObservationFormat.html: _render_html,
}


def footer(rows: int, fmt: ObservationFormat) -> str:
    return f"In total, {rows} rows are displayed in {fmt.value.upper()} format."


def format_observation(table: ResultTable, fmt: ObservationFormat) -> str:
    """Render a result table in an observation format, footer included.

    Example:
        ```python
        table = ResultTable(column_names=["title", "pub_year"], rows=[["X", 2023]])
        format_observation(table, ObservationFormat.json)
        # --> '{"title":"X","pub_year":2023}\\nIn total, 1 rows are displayed ...'
        ```
    """
    fmt = ObservationFormat(fmt)
    lines = RENDERERS[fmt](table)
    lines.append(footer(len(table.rows), fmt))
    return "\n".join(lines)
