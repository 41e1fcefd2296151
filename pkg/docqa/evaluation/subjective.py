# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Evaluation functions judged by a language model.

Each function issues exactly one judge call with a rubric from `templates/`
and parses the verdict line of the reply. A reply without a verdict fails.
"""
import json
from typing import Any

import structlog

from .judge import Judge
from .judge import parse_score
from .judge import parse_verdict
from .judge import render_rubric
from .models import EvalResult
from .registry import register

logger = structlog.get_logger()

M3SCIQA_JUDGE_MODEL = "gpt-4-0125-preview"
SCIDQA_JUDGE_MODEL = "gpt-4o-mini"


def _text(value: Any) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, ensure_ascii=False)


async def _verdict(
    judge: Judge,
    rubric: str,
    model: str | None = None,
    temperature: float | None = None,
    **context: Any,
) -> EvalResult:
    reply, transcript = await judge.ask(
        render_rubric(rubric, **context), model=model, temperature=temperature
    )
    verdict = parse_verdict(reply)
    if verdict is None:
        logger.warning("Judge reply without verdict", rubric=rubric)
        return EvalResult(
            passed=False,
            score=0.0,
            detail="no verdict in judge reply",
            judge_transcript=transcript,
        )
    return EvalResult(
        passed=verdict, score=float(verdict), judge_transcript=transcript
    )


async def _scoring_points(
    judge: Judge, pred: Any, scoring_points: list[str], question: str
) -> EvalResult:
    if not scoring_points:
        return EvalResult.from_bool(True, "no scoring points")
    reply, transcript = await judge.ask(
        render_rubric(
            "scoring_points",
            question=question,
            scoring_points=scoring_points,
            pred=_text(pred),
        )
    )
    parsed = parse_score(reply)
    if parsed is None:
        logger.warning("Judge reply without score", rubric="scoring_points")
        return EvalResult(
            passed=False,
            score=0.0,
            detail="no score in judge reply",
            judge_transcript=transcript,
        )
    points, _ = parsed
    total = len(scoring_points)
    score = min(max(points, 0), total) / total
    return EvalResult(
        passed=score >= 1.0,
        score=score,
        detail=f"{min(points, total)}/{total} scoring points",
        judge_transcript=transcript,
    )


@register(subjective=True)
async def eval_reference_answer_with_llm(
    pred: Any, reference_answer: str, judge: Judge, question: str = ""
) -> EvalResult:
    return await _verdict(
        judge,
        "reference_answer",
        question=question,
        reference_answer=reference_answer,
        pred=_text(pred),
    )


@register(subjective=True)
async def eval_scoring_points_with_llm(
    pred: Any, scoring_points: list[str], judge: Judge, question: str = ""
) -> EvalResult:
    """Pass when the answer mentions every scoring point."""
    result = await _scoring_points(judge, pred, scoring_points, question)
    return EvalResult(
        passed=result.passed,
        score=float(result.passed),
        detail=result.detail,
        judge_transcript=result.judge_transcript,
    )


@register(subjective=True)
async def eval_partial_scoring_points_with_llm(
    pred: Any, scoring_points: list[str], judge: Judge, question: str = ""
) -> EvalResult:
    """Score the fraction of scoring points the answer mentions."""
    return await _scoring_points(judge, pred, scoring_points, question)


@register(subjective=True)
async def eval_complex_math_formula_with_llm(
    pred: Any, formulas: str | list[str], judge: Judge, question: str = ""
) -> EvalResult:
    if isinstance(formulas, list):
        formulas = "\n".join(formulas)
    return await _verdict(
        judge,
        "complex_math_formula",
        question=question,
        formulas=formulas,
        pred=_text(pred),
    )


@register(subjective=True)
async def eval_m3sciqa(
    pred: Any, reference_answer: str, question: str, judge: Judge
) -> EvalResult:
    return await _verdict(
        judge,
        "m3sciqa",
        model=M3SCIQA_JUDGE_MODEL,
        temperature=0.0,
        question=question,
        reference_answer=reference_answer,
        pred=_text(pred),
    )


@register(subjective=True)
async def eval_scidqa(
    pred: Any, reference_answer: str, question: str, judge: Judge
) -> EvalResult:
    return await _verdict(
        judge,
        "scidqa",
        model=SCIDQA_JUDGE_MODEL,
        question=question,
        reference_answer=reference_answer,
        pred=_text(pred),
    )
