# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Enumerations shared between settings and the modules they configure."""
from enum import Enum


class ActionFormat(str, Enum):
    markdown = "markdown"
    json = "json"
    xml = "xml"
    yaml = "yaml"


class ObservationFormat(str, Enum):
    markdown = "markdown"
    json = "json"
    string = "string"
    html = "html"


class ChunkView(str, Enum):
    fixed_window = "fixed-window"
    per_page = "per-page"
    per_section = "per-section"


class Method(str, Enum):
    classic = "classic"
    iterative_classic = "iterative-classic"
    two_stage_neu = "two-stage-neu"
    iterative_neu = "iterative-neu"
    two_stage_sym = "two-stage-sym"
    iterative_sym = "iterative-sym"
    hybrid = "hybrid"
    neusym = "neusym"
    # Trivial-input references, one completion each
    question_only = "question-only"
    title_abstract = "title-abstract"
    full_text = "full-text"


# Known to users of the method zoo, but never implemented here
UNAVAILABLE_METHODS = frozenset({"graphrag"})
