# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from typing import Any

import pytest
from hypothesis import given
from hypothesis import strategies as st

from docqa.evaluation import evaluate
from docqa.evaluation import Evaluator
from docqa.evaluation.objective import eval_string_exact_match
from docqa.evaluation.objective import eval_structured_object_exact_match
from docqa.evaluation.objective import normalize_title
from docqa.exceptions import EvalArgumentError
from docqa.exceptions import UnknownEvalFuncError

THIRD = 1 / 3
MODELS = ["GPT", "BERT"]


@pytest.mark.parametrize(
    "pred,eval_func,eval_kwargs,passed",
    [
        # Booleans
        (True, "eval_bool_exact_match", {"gold": True}, True),
        ("Yes.", "eval_bool_exact_match", {"gold": True}, True),
        ("false", "eval_bool_exact_match", {"gold": False}, True),
        ("maybe", "eval_bool_exact_match", {"gold": False}, False),
        # Integers
        (3, "eval_int_exact_match", {"gold": 3}, True),
        ("3", "eval_int_exact_match", {"gold": 3}, True),
        (3.0, "eval_int_exact_match", {"gold": 3}, True),
        (3.5, "eval_int_exact_match", {"gold": 3}, False),
        (True, "eval_int_exact_match", {"gold": 1}, False),
        ("three", "eval_int_exact_match", {"gold": 3}, False),
        # Floats
        (0.3333333, "eval_float_exact_match", {"gold": THIRD, "tolerance": 1e-3}, True),
        (
            0.3333333,
            "eval_float_exact_match",
            {"gold": THIRD, "tolerance": 1e-9},
            False,
        ),
        (91.24, "eval_float_exact_match", {"gold": 91.2, "precision": 1}, True),
        (91.26, "eval_float_exact_match", {"gold": 91.2, "precision": 1}, False),
        (1.0000001, "eval_float_exact_match", {"gold": 1.0}, True),
        (1.00001, "eval_float_exact_match", {"gold": 1.0}, False),
        ("nan", "eval_float_exact_match", {"gold": 1.0}, False),
        # Strings
        ("  ContraCLM ", "eval_string_exact_match", {"gold": "contraclm"}, True),
        (
            "ContraCLM",
            "eval_string_exact_match",
            {"gold": "contraclm", "lowercase": False},
            False,
        ),
        # Structured objects
        (
            ["scg-nli", "false"],
            "eval_structured_object_exact_match",
            {"gold": ["SCG-NLI", "false"], "ignore_order": False, "lowercase": True},
            True,
        ),
        (
            ["false", "scg-nli"],
            "eval_structured_object_exact_match",
            {"gold": ["SCG-NLI", "false"], "ignore_order": False, "lowercase": True},
            False,
        ),
        (
            '["false", "SCG-NLI"]',
            "eval_structured_object_exact_match",
            {"gold": ["SCG-NLI", "false"], "ignore_order": True},
            True,
        ),
        (
            {"acc": 91.2, "f1": [1, 2]},
            "eval_structured_object_exact_match",
            {"gold": {"f1": [1, 2], "acc": 91.2}},
            True,
        ),
        (
            ["a", "a", "b"],
            "eval_structured_object_exact_match",
            {"gold": ["a", "b", "b"], "ignore_order": True},
            False,
        ),
        # Sets
        ("BERT", "eval_element_included", {"gold": MODELS}, True),
        ("bert", "eval_element_included", {"gold": MODELS}, False),
        (
            "bert",
            "eval_element_included",
            {"gold": MODELS, "lowercase": True},
            True,
        ),
        (MODELS, "eval_element_list_included", {"gold": [*MODELS, "T5"]}, True),
        (["GPT", "XLNet"], "eval_element_list_included", {"gold": MODELS}, False),
        ([], "eval_element_list_included", {"gold": ["GPT"]}, False),
        (["GPT", "XLNet"], "eval_element_list_overlap", {"gold": MODELS}, True),
        (["T5", "XLNet"], "eval_element_list_overlap", {"gold": MODELS}, False),
        (
            ["GPT", "XLNet"],
            "eval_element_list_overlap",
            {"gold": MODELS, "min_overlap": 2},
            False,
        ),
        # Paper retrieval
        (
            "multi-level knowledge distillation for out-of-distribution detection "
            "in text.",
            "eval_paper_relevance_with_reference_answer",
            {
                "reference_answer": "Multi-Level Knowledge Distillation for "
                "Out-of-Distribution Detection in Text"
            },
            True,
        ),
        (
            ["Mitigating Label Biases for  In-context Learning"],
            "eval_paper_relevance_with_reference_answer",
            {"reference_answer": "Mitigating Label Biases for In-context Learning"},
            True,
        ),
        (
            "Mitigating Label Biases",
            "eval_paper_relevance_with_reference_answer",
            {"reference_answer": "Mitigating Label Biases for In-context Learning"},
            False,
        ),
    ],
)
async def test_objective_functions(
    pred: Any, eval_func: str, eval_kwargs: dict[str, Any], passed: bool
) -> None:
    evaluator = Evaluator(eval_func=eval_func, eval_kwargs=eval_kwargs)
    result = await evaluate(pred, evaluator)
    assert result.passed is passed
    assert result.score == float(passed)
    assert result.judge_transcript is None


async def test_evaluate_accepts_mapping() -> None:
    evaluator = {"eval_func": "eval_int_exact_match", "eval_kwargs": {"gold": 3}}
    result = await evaluate(3, evaluator)
    assert result.passed


async def test_unknown_eval_func() -> None:
    with pytest.raises(UnknownEvalFuncError):
        await evaluate(3, Evaluator(eval_func="eval_telepathy"))


@pytest.mark.parametrize(
    "eval_kwargs",
    [{}, {"gold": 3, "tolerance": 0.1}, {"gold": 3, "judge": None, "extra": 1}],
)
async def test_argument_mismatch(eval_kwargs: dict[str, Any]) -> None:
    with pytest.raises(EvalArgumentError) as exc_info:
        await evaluate(
            3, Evaluator(eval_func="eval_int_exact_match", eval_kwargs=eval_kwargs)
        )
    assert "eval_int_exact_match" in str(exc_info.value)


def test_normalize_title() -> None:
    title = "  Attention  Is All\nYou Need. "
    assert normalize_title(title) == "attention is all you need"


texts = st.text(alphabet="abcABC ,.\t", max_size=12)


@given(texts, texts, st.booleans(), st.booleans())
def test_string_match_is_symmetric(
    first: str, second: str, lowercase: bool, strip: bool
) -> None:
    assert (
        eval_string_exact_match(first, second, lowercase=lowercase, strip=strip)
        == eval_string_exact_match(second, first, lowercase=lowercase, strip=strip)
    )


literals = st.recursive(
    st.one_of(st.integers(-5, 5), st.text(alphabet="aAbB", max_size=3), st.booleans()),
    lambda children: st.lists(children, max_size=4),
    max_leaves=10,
)


@given(st.lists(literals, max_size=6), st.randoms(use_true_random=False))
def test_ignore_order_is_permutation_invariant(gold: list[Any], random: Any) -> None:
    """A shuffled copy of the gold list always matches with ignore_order."""
    shuffled = list(gold)
    random.shuffle(shuffled)
    result = eval_structured_object_exact_match(shuffled, gold, ignore_order=True)
    assert result.passed
