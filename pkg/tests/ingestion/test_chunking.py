# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from pathlib import Path

from hypothesis import given
from hypothesis import strategies as st

from ..utils import bundle_document
from ..utils import CONTRACLM
from ..utils import write_bundle
from docqa.choices import ChunkView
from docqa.ingestion import ChunkingConfig
from docqa.ingestion import load_bundle
from docqa.ingestion import split_chunks
from docqa.ingestion.chunking import build_chunks
from docqa.tokens import count_tokens
from docqa.tokens import tokenize


def test_split_chunks_single_window() -> None:
    chunks = split_chunks(
        ["one two three. four five", "six seven"],
        ChunkingConfig(chunk_size_tokens=100),
    )
    assert len(chunks) == 1
    assert chunks[0].text == "one two three. four five\n\nsix seven"
    assert chunks[0].page_numbers == (1, 2)


def test_split_chunks_prefers_sentence_end() -> None:
    """Test that a window ends at the last sentence end inside it."""
    chunks = split_chunks(
        ["one two three. four five", "six seven"],
        ChunkingConfig(chunk_size_tokens=5),
    )
    assert [chunk.text for chunk in chunks] == [
        "one two three.",
        "four five\n\nsix seven",
    ]
    assert [chunk.page_numbers for chunk in chunks] == [(1,), (1, 2)]


def test_split_chunks_prefers_paragraph_break() -> None:
    chunks = split_chunks(
        ["alpha. beta\n\ngamma delta. epsilon zeta"],
        ChunkingConfig(chunk_size_tokens=6),
    )
    assert chunks[0].text == "alpha. beta"


def test_split_chunks_empty_pages() -> None:
    assert split_chunks(["", ""], ChunkingConfig()) == []
    chunks = split_chunks(["", "only page two"], ChunkingConfig())
    assert [chunk.page_numbers for chunk in chunks] == [(2,)]


words = st.sampled_from(["the", "model", "learns", ",", ".", "!", "3.5", "CLIP"])
separators = st.sampled_from([" ", " ", "\n", "\n\n", ""])
page_texts = st.lists(
    st.lists(st.tuples(words, separators), max_size=40).map(
        lambda pairs: "".join(word + separator for word, separator in pairs)
    ),
    min_size=1,
    max_size=4,
)


@given(page_texts, st.integers(min_value=1, max_value=12))
def test_split_chunks_covers_all_tokens(texts: list[str], size: int) -> None:
    """Test that chunks are bounded and lose no tokens.

    Tests that:
    * No chunk is longer than the configured size.
    * The chunk tokens concatenate to the tokens of the document.
    * Page numbers are ascending and refer to existing pages.
    """
    chunks = split_chunks(texts, ChunkingConfig(chunk_size_tokens=size))
    assert all(0 < count_tokens(chunk.text) <= size for chunk in chunks)
    assert [token for chunk in chunks for token in tokenize(chunk.text)] == [
        token for text in texts for token in tokenize(text)
    ]
    for chunk in chunks:
        assert list(chunk.page_numbers) == sorted(set(chunk.page_numbers))
        assert all(1 <= page <= len(texts) for page in chunk.page_numbers)


def test_chunk_views(tmp_path: Path) -> None:
    bundle = load_bundle(write_bundle(tmp_path, bundle_document(CONTRACLM)))

    per_page = build_chunks(
        bundle, ChunkingConfig(chunk_size_tokens=1000, view=ChunkView.per_page)
    )
    assert [chunk.page_numbers for chunk in per_page] == [(1,), (2,)]
    assert [chunk.text for chunk in per_page] == [page.text for page in bundle.pages]

    per_section = build_chunks(
        bundle, ChunkingConfig(chunk_size_tokens=1000, view=ChunkView.per_section)
    )
    assert [chunk.page_numbers for chunk in per_section] == [(1,), (1, 2), (1, 2)]

    fixed = build_chunks(bundle, ChunkingConfig(chunk_size_tokens=1000))
    assert len(fixed) == 1
    assert fixed[0].page_numbers == (1, 2)
