# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Rule-based evaluation functions.

Predictions may arrive as parsed literals or as raw text; text is parsed with
`parse_literal` wherever the function compares structured values.
"""
import math
import re
from typing import Any

from ..canonical import canonical
from ..literals import parse_literal
from .models import EvalResult
from .registry import register

_TRUE_WORDS = frozenset({"true", "yes"})
_FALSE_WORDS = frozenset({"false", "no"})
_WHITESPACE = re.compile(r"\s+")
_TERMINAL_PUNCTUATION = ".,;:!?\"'"


def _literal(pred: Any) -> Any:
    return parse_literal(pred) if isinstance(pred, str) else pred


def _as_bool(pred: Any) -> bool | None:
    value = _literal(pred)
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        word = value.strip().rstrip(".").lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
    return None


def _as_number(pred: Any) -> int | float | None:
    value = _literal(pred)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    return value


def _normalize_string(value: Any, lowercase: bool, strip: bool) -> str:
    text = value if isinstance(value, str) else str(value)
    if strip:
        text = text.strip()
    return text.lower() if lowercase else text


def _element(value: Any, lowercase: bool) -> Any:
    try:
        return canonical(value, lowercase=lowercase)
    except TypeError:
        return repr(value)


@register()
def eval_bool_exact_match(pred: Any, gold: bool) -> EvalResult:
    value = _as_bool(pred)
    if value is None:
        return EvalResult.from_bool(False, f"{pred!r} is not a boolean")
    return EvalResult.from_bool(value == gold)


@register()
def eval_int_exact_match(pred: Any, gold: int) -> EvalResult:
    value = _as_number(pred)
    if value is None or (isinstance(value, float) and not value.is_integer()):
        return EvalResult.from_bool(False, f"{pred!r} is not an integer")
    return EvalResult.from_bool(int(value) == int(gold))


@register()
def eval_float_exact_match(
    pred: Any,
    gold: float,
    precision: int | None = None,
    tolerance: float | None = None,
) -> EvalResult:
    """Compare numbers, rounded to `precision` digits or within `tolerance`.

    With neither given, a tolerance of 1e-6 applies.
    """
    value = _as_number(pred)
    if value is None or not math.isfinite(value):
        return EvalResult.from_bool(False, f"{pred!r} is not a finite number")
    if precision is not None:
        passed = round(value, precision) == round(gold, precision)
        if tolerance is not None:
            passed = passed or abs(value - gold) <= tolerance
        return EvalResult.from_bool(passed)
    if tolerance is None:
        tolerance = 1e-6
    return EvalResult.from_bool(abs(value - gold) <= tolerance)


@register()
def eval_string_exact_match(
    pred: Any, gold: str, lowercase: bool = True, strip: bool = True
) -> EvalResult:
    return EvalResult.from_bool(
        _normalize_string(pred, lowercase, strip)
        == _normalize_string(gold, lowercase, strip)
    )


@register()
def eval_structured_object_exact_match(
    pred: Any, gold: Any, lowercase: bool = False, ignore_order: bool = False
) -> EvalResult:
    """Compare lists and dicts recursively.

    Example:
        ```python
        eval_structured_object_exact_match(
            ["scg-nli", "false"], ["SCG-NLI", "false"], lowercase=True
        ).passed  # --> True
        ```
    """
    value = _literal(pred)
    try:
        passed = canonical(
            value, lowercase=lowercase, ignore_order=ignore_order
        ) == canonical(gold, lowercase=lowercase, ignore_order=ignore_order)
    except TypeError as error:
        return EvalResult.from_bool(False, str(error))
    return EvalResult.from_bool(passed)


@register()
def eval_element_included(
    pred: Any, gold: list[Any], lowercase: bool = False
) -> EvalResult:
    value = _literal(pred)
    accepted = {_element(item, lowercase) for item in gold}
    return EvalResult.from_bool(_element(value, lowercase) in accepted)


@register()
def eval_element_list_included(
    pred: Any, gold: list[Any], lowercase: bool = False
) -> EvalResult:
    value = _literal(pred)
    if not isinstance(value, list):
        return EvalResult.from_bool(False, f"{pred!r} is not a list")
    if not value:
        return EvalResult.from_bool(False, "empty list")
    accepted = {_element(item, lowercase) for item in gold}
    missing = [item for item in value if _element(item, lowercase) not in accepted]
    return EvalResult.from_bool(not missing, f"not included: {missing!r}")


@register()
def eval_element_list_overlap(
    pred: Any, gold: list[Any], lowercase: bool = False, min_overlap: int = 1
) -> EvalResult:
    value = _literal(pred)
    if not isinstance(value, list):
        value = [value]
    predicted = {_element(item, lowercase) for item in value}
    overlap = predicted & {_element(item, lowercase) for item in gold}
    return EvalResult.from_bool(
        len(overlap) >= min_overlap, f"{len(overlap)} shared elements"
    )


def normalize_title(title: str) -> str:
    """Lowercase, collapse whitespace and strip terminal punctuation."""
    collapsed = _WHITESPACE.sub(" ", title).strip().lower()
    return collapsed.strip(_TERMINAL_PUNCTUATION).strip()


@register()
def eval_paper_relevance_with_reference_answer(
    pred: Any, reference_answer: str
) -> EvalResult:
    value = _literal(pred)
    if isinstance(value, list) and len(value) == 1:
        value = value[0]
    if not isinstance(value, str):
        return EvalResult.from_bool(False, f"{pred!r} is not a paper title")
    return EvalResult.from_bool(
        normalize_title(value) == normalize_title(reference_answer)
    )
