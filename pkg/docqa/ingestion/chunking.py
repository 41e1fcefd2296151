# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Token-window chunking with paragraph, sentence and whitespace break points."""
import re
from bisect import bisect_right
from collections.abc import Iterable
from itertools import accumulate

from pydantic import BaseModel
from pydantic import Field
from pydantic import PositiveInt

from ..choices import ChunkView
from ..tokens import token_spans
from .bundle import DocumentBundle

PAGE_SEPARATOR = "\n\n"

_PARAGRAPH_BREAK = re.compile(r"\n[ \t\r\f\v]*\n")
_SENTENCE_END = frozenset(".!?")


class ChunkingConfig(BaseModel):
    class Config:
        frozen = True

    chunk_size_tokens: PositiveInt = Field(512, description="Tokens per chunk.")
    view: ChunkView = Field(ChunkView.fixed_window)


class Chunk(BaseModel):
    class Config:
        frozen = True

    text: str
    page_numbers: tuple[int, ...]


def _break_rank(text: str, spans: list[tuple[int, int]], end: int) -> int:
    """Rank the boundary between token end-1 and token end, higher is better."""
    gap = text[spans[end - 1][1] : spans[end][0]]
    if not gap:
        return 0
    if _PARAGRAPH_BREAK.search(gap):
        return 3
    if text[spans[end - 1][0] : spans[end - 1][1]] in _SENTENCE_END:
        return 2
    return 1


def _windows(text: str, size: int) -> Iterable[tuple[int, int]]:
    """Yield (start, end) character offsets of chunk windows over text."""
    spans = list(token_spans(text))
    position = 0
    while position < len(spans):
        limit = min(position + size, len(spans))
        end = limit
        if limit < len(spans):
            best_rank = 0
            for candidate in range(limit, position, -1):
                rank = _break_rank(text, spans, candidate)
                if rank > best_rank:
                    best_rank, end = rank, candidate
                    if rank == 3:
                        break
        yield spans[position][0], spans[end - 1][1]
        position = end


def split_text(text: str, chunk_size_tokens: int) -> list[str]:
    return [text[start:end] for start, end in _windows(text, chunk_size_tokens)]


def split_chunks(page_texts: list[str], cfg: ChunkingConfig) -> list[Chunk]:
    """Split the concatenated pages into windows of at most `chunk_size_tokens`.

    Pages are joined by a blank line, so a page boundary is a paragraph break.
    Each window ends at the last paragraph break inside it, failing that at the
    last sentence end, then the last whitespace, and only then mid-run.

    Args:
        page_texts: Page texts in page order, page 1 first.
        cfg: The chunking configuration.

    Returns:
        The chunks with the 1-based page numbers each one overlaps.
    """
    text = PAGE_SEPARATOR.join(page_texts)
    starts = list(
        accumulate(
            (len(page) + len(PAGE_SEPARATOR) for page in page_texts[:-1]), initial=0
        )
    )
    chunks = []
    for start, end in _windows(text, cfg.chunk_size_tokens):
        first = bisect_right(starts, start)
        last = bisect_right(starts, end - 1)
        pages = tuple(
            number
            for number in range(first, last + 1)
            if len(page_texts[number - 1]) > 0
        )
        chunks.append(Chunk(text=text[start:end], page_numbers=pages))
    return chunks


def build_chunks(bundle: DocumentBundle, cfg: ChunkingConfig) -> list[Chunk]:
    """Build the chunks of a bundle for the configured view."""
    match cfg.view:
        case ChunkView.fixed_window:
            return split_chunks([page.text for page in bundle.pages], cfg)
        case ChunkView.per_page:
            return [
                Chunk(text=piece, page_numbers=(page.page_number,))
                for page in bundle.pages
                for piece in split_text(page.text, cfg.chunk_size_tokens)
            ]
        case ChunkView.per_section:
            return [
                Chunk(text=piece, page_numbers=tuple(section.page_numbers))
                for section in bundle.sections
                for piece in split_text(section.content, cfg.chunk_size_tokens)
            ]
    raise ValueError(f"Unknown chunk view: {cfg.view}")  # pragma: no cover
