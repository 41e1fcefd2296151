# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Action execution and observation rendering."""
from .calculator import calculate_expr
from .calculator import format_number
from .environment import Environment
from .environment import view_image
from .formatters import format_observation
from .models import IMAGE_TOKEN_COST
from .models import ImagePayload
from .models import Observation
from .truncation import fit_table
from .truncation import truncate_tokens
from .truncation import truncation_marker

__all__ = [
    "Environment",
    "IMAGE_TOKEN_COST",
    "ImagePayload",
    "Observation",
    "calculate_expr",
    "fit_table",
    "format_number",
    "format_observation",
    "truncate_tokens",
    "truncation_marker",
    "view_image",
]
