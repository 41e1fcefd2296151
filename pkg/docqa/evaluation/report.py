# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Aggregation of evaluation results into per-tag accuracy reports.

Rendering is deterministic: equal inputs in any order give identical bytes.
"""
import json
from collections.abc import Iterable

from pydantic import BaseModel

from .models import EvalResult
from .models import TaskExample

# Task types, categories and evaluation genres
TAG_ORDER = (
    "single",
    "multiple",
    "retrieval",
    "text",
    "image",
    "table",
    "formula",
    "metadata",
    "objective",
    "subjective",
)


class ReportRow(BaseModel):
    class Config:
        frozen = True

    name: str
    total: int
    passed: int
    accuracy: float
    mean_score: float


class Report(BaseModel):
    class Config:
        frozen = True

    overall: ReportRow
    tags: list[ReportRow]

    def to_json(self) -> str:
        return json.dumps(self.dict(), indent=2) + "\n"

    def to_text(self) -> str:
        header = ("tag", "n", "passed", "accuracy", "score")
        rows = [
            (
                row.name,
                str(row.total),
                str(row.passed),
                f"{row.accuracy:.2f}%",
                f"{row.mean_score:.4f}",
            )
            for row in [*self.tags, self.overall]
        ]
        widths = [
            max(len(line[column]) for line in [header, *rows])
            for column in range(len(header))
        ]

        def render(line: tuple[str, ...]) -> str:
            cells = [line[0].ljust(widths[0])]
            cells += [cell.rjust(width) for cell, width in zip(line[1:], widths[1:])]
            return " | ".join(cells).rstrip()

        rule = "-+-".join("-" * width for width in widths)
        body = [render(row) for row in rows]
        return "\n".join([render(header), rule, *body[:-1], rule, body[-1]]) + "\n"


def _row(name: str, results: list[EvalResult]) -> ReportRow:
    total = len(results)
    passed = sum(result.passed for result in results)
    return ReportRow(
        name=name,
        total=total,
        passed=passed,
        accuracy=round(100 * passed / total, 2) if total else 0.0,
        mean_score=(
            round(sum(result.score for result in results) / total, 4)
            if total
            else 0.0
        ),
    )


def aggregate_report(results: Iterable[tuple[TaskExample, EvalResult]]) -> Report:
    """Accuracy per tag and overall.

    A task counts toward every tag it carries. Scores are averaged, so partial
    subjective scores show in the score column while accuracy counts passes.

    Example:
        ```python
        report = aggregate_report([(task, EvalResult.from_bool(True))])
        print(report.to_text())
        ```
    """
    ordered = sorted(results, key=lambda pair: pair[0].uuid)
    by_tag: dict[str, list[EvalResult]] = {}
    for task, result in ordered:
        for tag in dict.fromkeys(task.tags):
            by_tag.setdefault(tag, []).append(result)

    rank = {tag: index for index, tag in enumerate(TAG_ORDER)}
    tags = sorted(by_tag, key=lambda tag: (rank.get(tag, len(rank)), tag))
    return Report(
        overall=_row("overall", [result for _, result in ordered]),
        tags=[_row(tag, by_tag[tag]) for tag in tags],
    )
