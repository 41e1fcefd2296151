# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Sparse and dense collections over the encodable cells of the store."""
from .bm25 import CorpusStats
from .bm25 import encode_sparse_bm25
from .encoding import encode_collections
from .encoding import select_collections
from .filters import evaluate_filter
from .filters import parse_filter
from .index import VectorIndex
from .models import CollectionSpec
from .models import DEFAULT_COLLECTIONS
from .models import SearchRequest
from .models import VectorEntry
from .prompt import render_vs_schema_prompt

__all__ = [
    "CollectionSpec",
    "CorpusStats",
    "DEFAULT_COLLECTIONS",
    "SearchRequest",
    "VectorEntry",
    "VectorIndex",
    "encode_collections",
    "encode_sparse_bm25",
    "evaluate_filter",
    "parse_filter",
    "render_vs_schema_prompt",
    "select_collections",
]
