# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Datasets, evaluation functions and accuracy reports."""
# Importing the function modules registers their functions
from . import logical  # noqa: F401
from . import objective  # noqa: F401
from . import subjective  # noqa: F401
from ..literals import parse_literal
from .dataset import load_tasks
from .dataset import parse_task
from .judge import Judge
from .models import EvalResult
from .models import Evaluator
from .models import TAGS
from .models import TaskExample
from .registry import check_evaluator
from .registry import evaluate
from .registry import REGISTRY
from .registry import register
from .report import aggregate_report
from .report import Report
from .report import ReportRow

__all__ = [
    "EvalResult",
    "Evaluator",
    "Judge",
    "REGISTRY",
    "Report",
    "ReportRow",
    "TAGS",
    "TaskExample",
    "aggregate_report",
    "check_evaluator",
    "evaluate",
    "load_tasks",
    "parse_literal",
    "parse_task",
    "register",
]
