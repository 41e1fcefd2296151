# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Synthetic BM25 collections, independent of any store."""
import random

from docqa.store import build_catalog
from docqa.vectorstore import CorpusStats
from docqa.vectorstore import encode_sparse_bm25
from docqa.vectorstore import VectorEntry
from docqa.vectorstore import VectorIndex

VOCABULARY = [
    "retrieval",
    "agent",
    "table",
    "figure",
    "language",
    "model",
    "vision",
    "graph",
    "sparse",
    "dense",
    "query",
    "answer",
    "paper",
    "benchmark",
    "neural",
    "symbolic",
]
PAIRS = [("chunks", "text_content"), ("sections", "section_content")]


def synthetic_documents(count: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    return [
        {
            "text": " ".join(
                rng.choice(VOCABULARY) for _ in range(rng.randint(1, 25))
            ),
            "pdf_id": f"p{rng.randint(0, 4)}",
            "page_number": rng.randint(1, 6),
            "table_name": PAIRS[number % 2][0],
            "column_name": PAIRS[number % 2][1],
            "primary_key": f"k{number:03d}",
        }
        for number in range(count)
    ]


def synthetic_index(documents: list[dict]) -> VectorIndex:
    """A BM25 collection over the documents, large enough to return everything."""
    index = VectorIndex(build_catalog(), hard_limit=1000)
    collection = index.collection("text_bm25_en")
    collection.stats = CorpusStats.build(document["text"] for document in documents)
    entries = [
        VectorEntry(
            vector=encode_sparse_bm25(document["text"], collection.stats),
            **document,
        )
        for document in documents
    ]
    index.insert_entries("text_bm25_en", entries)
    return index
