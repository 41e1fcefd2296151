# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from .formats import action_class
from .formats import build_action
from .formats import parse_action
from .formats import serialize_action
from .models import Action
from .models import ACTION_TYPES
from .models import CalculateExpr
from .models import GenerateAnswer
from .models import RetrieveFromDatabase
from .models import RetrieveFromVectorstore
from .models import ViewImage
from .prompt import ACTION_DOCS
from .prompt import action_space_prompt
from .validation import PinnedView
from .validation import validate_action

__all__ = [
    "ACTION_DOCS",
    "ACTION_TYPES",
    "Action",
    "CalculateExpr",
    "GenerateAnswer",
    "PinnedView",
    "RetrieveFromDatabase",
    "RetrieveFromVectorstore",
    "ViewImage",
    "action_class",
    "action_space_prompt",
    "build_action",
    "parse_action",
    "serialize_action",
    "validate_action",
]
