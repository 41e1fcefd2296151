# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Bundle loading, chunking, summaries and store population."""
from .bundle import DocumentBundle
from .bundle import load_bundle
from .chunking import Chunk
from .chunking import ChunkingConfig
from .chunking import split_chunks
from .populate import ingest_bundle
from .populate import populate
from .summaries import generate_summaries
from .summaries import SummarySet

__all__ = [
    "Chunk",
    "ChunkingConfig",
    "DocumentBundle",
    "SummarySet",
    "generate_summaries",
    "ingest_bundle",
    "load_bundle",
    "populate",
    "split_chunks",
]
