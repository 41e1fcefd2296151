# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Registry of evaluation functions and dispatch to them."""
import inspect
from collections.abc import Awaitable
from collections.abc import Callable
from dataclasses import dataclass
from itertools import chain
from itertools import repeat
from typing import Any

import structlog

from ..exceptions import EvalArgumentError
from ..exceptions import JudgeUnavailableError
from ..exceptions import UnknownEvalFuncError
from ..metrics import eval_funcs_registered
from .judge import Judge
from .models import EvalResult
from .models import Evaluator

logger = structlog.get_logger()

EvalOutcome = EvalResult | bool | float
EvalFunc = Callable[..., EvalOutcome | Awaitable[EvalOutcome]]


@dataclass(frozen=True)
class RegisteredEvalFunc:
    name: str
    function: EvalFunc
    subjective: bool
    takes_judge: bool


REGISTRY: dict[str, RegisteredEvalFunc] = {}


def register(
    subjective: bool = False,
) -> Callable[[EvalFunc], EvalFunc]:
    """Get a decorator for registering evaluation functions under their name.

    Functions receive the prediction as first argument and the task's
    `eval_kwargs` as keyword arguments. A function with a `judge` parameter
    is also handed the LLM judge, which subjective functions require.

    Example:
        ```python
        @register()
        def eval_int_exact_match(pred: Any, gold: int) -> bool:
            ...
        ```

    Args:
        subjective: Whether the function needs an LLM judge.

    Returns:
        A decorator registering the function and returning it unmodified.
    """

    def decorator(function: EvalFunc) -> EvalFunc:
        name = function.__name__
        log = logger.bind(eval_func=name, subjective=subjective)
        log.debug("Register called")

        eval_funcs_registered.labels(name).inc()
        takes_judge = "judge" in inspect.signature(function).parameters
        REGISTRY[name] = RegisteredEvalFunc(name, function, subjective, takes_judge)
        return function

    return decorator


def lookup(name: str, uuid: str = "") -> RegisteredEvalFunc:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownEvalFuncError(uuid, name)


def _as_result(outcome: EvalOutcome) -> EvalResult:
    if isinstance(outcome, EvalResult):
        return outcome
    if isinstance(outcome, bool):
        return EvalResult.from_bool(outcome)
    return EvalResult.from_score(float(outcome))


async def evaluate(
    pred: Any, evaluator: Evaluator | dict[str, Any], judge: Judge | None = None
) -> EvalResult:
    """Grade a prediction with the evaluator's registered function.

    Raises:
        UnknownEvalFuncError: If the function is not registered.
        EvalArgumentError: If the kwargs do not fit the function.
        JudgeUnavailableError: If a subjective function gets no judge.
    """
    if isinstance(evaluator, dict):
        evaluator = Evaluator.parse_obj(evaluator)
    registered = lookup(evaluator.eval_func)
    if registered.subjective and judge is None:
        raise JudgeUnavailableError(registered.name)

    kwargs = dict(evaluator.eval_kwargs)
    if registered.takes_judge:
        kwargs["judge"] = judge
    try:
        inspect.signature(registered.function).bind(pred, **kwargs)
    except TypeError as error:
        raise EvalArgumentError(f"{registered.name}: {error}") from error

    outcome = registered.function(pred, **kwargs)
    if inspect.isawaitable(outcome):
        outcome = await outcome
    return _as_result(outcome)


def check_evaluator(evaluator: Evaluator | dict[str, Any], uuid: str = "") -> None:
    """Check that an evaluator and all nested sub-evaluators are registered.

    Raises:
        UnknownEvalFuncError: Naming the task uuid.
    """
    if isinstance(evaluator, dict):
        evaluator = Evaluator.parse_obj(evaluator)
    lookup(evaluator.eval_func, uuid)
    kwargs = evaluator.eval_kwargs
    names = kwargs.get("eval_func_list", [])
    sub_kwargs = kwargs.get("eval_kwargs_list", [])
    for name, sub in zip(names, chain(sub_kwargs, repeat({}))):
        check_evaluator(Evaluator(eval_func=name, eval_kwargs=sub), uuid)
    if "eval_func" in kwargs:
        check_evaluator(
            Evaluator(
                eval_func=kwargs["eval_func"],
                eval_kwargs=kwargs.get("eval_kwargs", {}),
            ),
            uuid,
        )
