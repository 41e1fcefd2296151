# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from typing import Any

from pydantic import BaseModel
from pydantic import confloat
from pydantic import Field

TAGS = frozenset(
    {
        "single",
        "multiple",
        "retrieval",
        "text",
        "image",
        "table",
        "formula",
        "metadata",
        "subjective",
        "objective",
    }
)


class Evaluator(BaseModel):
    class Config:
        frozen = True

    eval_func: str
    eval_kwargs: dict[str, Any] = Field(default_factory=dict)


class TaskExample(BaseModel):
    """One question of a dataset, with the evaluator that grades its answer."""

    class Config:
        frozen = True

    uuid: str
    question: str
    answer_format: str
    tags: list[str] = Field(default_factory=list)
    anchor_pdf: list[str] = Field(default_factory=list)
    reference_pdf: list[str] = Field(default_factory=list)
    conference: list[str] = Field(default_factory=list)
    evaluator: Evaluator | None = Field(
        None, description="Grades the answer, required in datasets."
    )

    @property
    def papers(self) -> list[str]:
        return list(dict.fromkeys(self.anchor_pdf + self.reference_pdf))


class EvalResult(BaseModel):
    """Outcome of one evaluation.

    Objective functions only produce scores of 0 or 1; partial scoring
    functions produce a score anywhere in [0, 1] and pass at 1.
    """

    passed: bool
    score: confloat(ge=0, le=1)  # type: ignore[valid-type]
    detail: str = ""
    judge_transcript: list[dict[str, str]] | None = None

    @classmethod
    def from_bool(cls, passed: bool, detail: str = "") -> "EvalResult":
        return cls(passed=passed, score=float(passed), detail=detail)

    @classmethod
    def from_score(cls, score: float, detail: str = "") -> "EvalResult":
        return cls(passed=score >= 1.0, score=score, detail=detail)
