# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Logical combinations of evaluation functions.

Conjunction and disjunction pair element i of the predicted list with
sub-evaluator i. A single sub-evaluator is applied to the whole prediction,
so a one-element combination grades exactly like its sub-evaluator.
"""
from itertools import chain
from itertools import repeat
from typing import Any

from ..literals import parse_literal
from .judge import Judge
from .models import EvalResult
from .models import Evaluator
from .registry import evaluate
from .registry import register


def _pair(
    pred: Any, eval_func_list: list[str], eval_kwargs_list: list[dict] | None
) -> list[tuple[Any, Evaluator]] | None:
    evaluators = [
        Evaluator(eval_func=name, eval_kwargs=kwargs)
        for name, kwargs in zip(
            eval_func_list, chain(eval_kwargs_list or [], repeat({}))
        )
    ]
    if len(evaluators) == 1:
        return [(pred, evaluators[0])]
    value = parse_literal(pred) if isinstance(pred, str) else pred
    if isinstance(value, list) and len(value) == len(evaluators):
        return list(zip(value, evaluators))
    return None


def _transcript(results: list[EvalResult]) -> list[dict[str, str]] | None:
    turns = [turn for result in results for turn in result.judge_transcript or []]
    return turns or None


def _detail(results: list[EvalResult]) -> str:
    return "; ".join(
        f"[{index}] {'pass' if result.passed else 'fail'}"
        + (f" ({result.detail})" if result.detail else "")
        for index, result in enumerate(results)
    )


@register()
async def eval_conjunction(
    pred: Any,
    eval_func_list: list[str],
    eval_kwargs_list: list[dict] | None = None,
    judge: Judge | None = None,
) -> EvalResult:
    """Pass when every element passes its sub-evaluation; scores by minimum."""
    pairs = _pair(pred, eval_func_list, eval_kwargs_list)
    if pairs is None:
        return EvalResult.from_bool(
            False, f"expected a list of {len(eval_func_list)} elements"
        )
    results = [await evaluate(value, sub, judge) for value, sub in pairs]
    return EvalResult(
        passed=all(result.passed for result in results),
        score=min((result.score for result in results), default=1.0),
        detail=_detail(results),
        judge_transcript=_transcript(results),
    )


@register()
async def eval_disjunction(
    pred: Any,
    eval_func_list: list[str],
    eval_kwargs_list: list[dict] | None = None,
    judge: Judge | None = None,
) -> EvalResult:
    """Pass when at least one element passes its sub-evaluation; scores by maximum."""
    pairs = _pair(pred, eval_func_list, eval_kwargs_list)
    if pairs is None:
        return EvalResult.from_bool(
            False, f"expected a list of {len(eval_func_list)} elements"
        )
    results = [await evaluate(value, sub, judge) for value, sub in pairs]
    return EvalResult(
        passed=any(result.passed for result in results),
        score=max((result.score for result in results), default=0.0),
        detail=_detail(results),
        judge_transcript=_transcript(results),
    )


@register()
async def eval_negation(
    pred: Any,
    eval_func: str,
    eval_kwargs: dict | None = None,
    judge: Judge | None = None,
) -> EvalResult:
    result = await evaluate(
        pred, Evaluator(eval_func=eval_func, eval_kwargs=eval_kwargs or {}), judge
    )
    return EvalResult(
        passed=not result.passed,
        score=1.0 - result.score,
        detail=f"not ({result.detail})" if result.detail else "",
        judge_transcript=result.judge_transcript,
    )
