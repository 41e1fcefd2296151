# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""The one token counter shared by chunking, budgets and BM25.

A token is a run of word characters, or a single punctuation character.
Whitespace separates tokens and is never a token itself.
"""
import re
from collections.abc import Iterator

TOKEN_PATTERN = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str, lowercase: bool = False) -> list[str]:
    """Split text into tokens.

    Examples:
        ```python
        tokenize("Hello, world!")  # --> ["Hello", ",", "world", "!"]
        ```

    Args:
        text: The text to split.
        lowercase: Whether to lowercase the tokens.

    Returns:
        The tokens in order of appearance.
    """
    if lowercase:
        text = text.lower()
    return TOKEN_PATTERN.findall(text)


def count_tokens(text: str) -> int:
    return sum(1 for _ in TOKEN_PATTERN.finditer(text))


def token_spans(text: str) -> Iterator[tuple[int, int]]:
    """Yield (start, end) character offsets of every token in text."""
    for match in TOKEN_PATTERN.finditer(text):
        yield match.span()

# Smallest per-turn budget; the observation truncation marker takes 10 tokens
MIN_TOKEN_BUDGET = 16
