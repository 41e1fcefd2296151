# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Hashable canonical forms of literal values, for order-free comparisons."""
from collections import Counter
from collections.abc import Hashable
from typing import Any

from frozendict import frozendict


def is_hashable(value: Any) -> bool:
    try:
        hash(value)
    except TypeError:
        return False
    return True


def canonical(value: Any, lowercase: bool = False, ignore_order: bool = False) -> Any:
    """Convert a literal value into a hashable equivalent.

    Dicts become frozendicts and lists become tuples, or, with ignore_order,
    frozen multisets so that permutations compare equal. Integral floats
    compare equal to ints already, so numbers are kept as they are.

    Examples:
        ```python
        canonical(["B", "a"], lowercase=True)  # --> ("b", "a")
        canonical([1, 2], ignore_order=True) == canonical([2, 1], ignore_order=True)
        ```

    Raises:
        TypeError: If a non-convertable, non-hashable value is given.
    """

    def convert(item: Any) -> Any:
        return canonical(item, lowercase=lowercase, ignore_order=ignore_order)

    if isinstance(value, str):
        return value.lower() if lowercase else value
    if isinstance(value, dict):
        return frozendict({convert(key): convert(item) for key, item in value.items()})
    if isinstance(value, (list, tuple)):
        items = [convert(item) for item in value]
        if ignore_order:
            return frozendict(Counter(items))
        return tuple(items)
    if isinstance(value, set):
        return frozenset(map(convert, value))
    if not isinstance(value, Hashable) or not is_hashable(value):
        raise TypeError(repr(value) + " is not hashable")
    return value
