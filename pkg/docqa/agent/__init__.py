# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Retrieval methods and the agent interaction loop."""
from .methods import CLASSIC_VIEW
from .methods import METHODS
from .methods import MethodConfig
from .methods import MethodSpec
from .methods import resolve_method
from .parsing import parse_turn
from .prompts import assemble_prompt
from .prompts import hint_prompt
from .prompts import task_prompt
from .runtime import Agent
from .runtime import extract_answer
from .runtime import run_episode
from .trajectory import read_trace
from .trajectory import TraceSummary
from .trajectory import Trajectory
from .trajectory import Turn
from .trajectory import write_trace

__all__ = [
    "Agent",
    "CLASSIC_VIEW",
    "METHODS",
    "MethodConfig",
    "MethodSpec",
    "TraceSummary",
    "Trajectory",
    "Turn",
    "assemble_prompt",
    "extract_answer",
    "hint_prompt",
    "parse_turn",
    "read_trace",
    "resolve_method",
    "run_episode",
    "task_prompt",
    "write_trace",
]
