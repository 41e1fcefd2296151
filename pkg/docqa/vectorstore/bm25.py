# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Okapi BM25 as sparse vectors.

Document vectors carry the full per-term BM25 weight and query vectors carry raw
query term counts, so their inner product is the BM25 score of the document.
"""
import math
from collections import Counter
from collections.abc import Iterable

from pydantic import BaseModel

from ..tokens import tokenize

K1 = 1.2
B = 0.75

SparseVector = dict[str, float]


class CorpusStats(BaseModel):
    """Document frequencies and length statistics of a collection."""

    document_count: int = 0
    average_length: float = 0.0
    document_frequency: dict[str, int] = {}

    @classmethod
    def build(cls, texts: Iterable[str]) -> "CorpusStats":
        document_frequency: Counter[str] = Counter()
        document_count = 0
        total_length = 0
        for text in texts:
            terms = tokenize(text, lowercase=True)
            document_count += 1
            total_length += len(terms)
            document_frequency.update(set(terms))
        return cls(
            document_count=document_count,
            average_length=total_length / document_count if document_count else 0.0,
            document_frequency=dict(document_frequency),
        )

    def idf(self, term: str) -> float:
        frequency = self.document_frequency.get(term, 0)
        return math.log(
            1 + (self.document_count - frequency + 0.5) / (frequency + 0.5)
        )


def encode_sparse_bm25(text: str, stats: CorpusStats) -> SparseVector:
    """BM25 term weights of a document, k1=1.2 and b=0.75."""
    terms = tokenize(text, lowercase=True)
    if not terms:
        return {}
    length_norm = 1 - B + B * len(terms) / (stats.average_length or 1.0)
    return {
        term: stats.idf(term) * count * (K1 + 1) / (count + K1 * length_norm)
        for term, count in Counter(terms).items()
    }


def encode_query(text: str) -> SparseVector:
    return {term: float(n) for term, n in Counter(tokenize(text, True)).items()}


def inner_product(query: SparseVector, document: SparseVector) -> float:
    return sum(weight * document.get(term, 0.0) for term, weight in query.items())
