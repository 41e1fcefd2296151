# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from typing import Literal

from pydantic import BaseModel
from pydantic import Field
from pydantic import PositiveInt

Modality = Literal["text", "image"]


class CollectionSpec(BaseModel):
    """Name, encoder and metric of a collection."""

    class Config:
        frozen = True

    name: str
    modality: Modality
    encoder: Literal["bm25", "dense", "image-dense"]
    model: str = Field(..., description="Encoder model id.")
    metric: Literal["inner-product", "cosine"]
    display_name: str = Field(..., description="Encoder name used in prompts.")


DEFAULT_COLLECTIONS: tuple[CollectionSpec, ...] = (
    CollectionSpec(
        name="text_bm25_en",
        modality="text",
        encoder="bm25",
        model="bm25",
        metric="inner-product",
        display_name="BM25",
    ),
    CollectionSpec(
        name="text_sentence_transformers_all_minilm_l6_v2",
        modality="text",
        encoder="dense",
        model="sentence-transformers/all-MiniLM-L6-v2",
        metric="cosine",
        display_name="MiniLM-L6-v2",
    ),
    CollectionSpec(
        name="text_bge_large_en_v1_5",
        modality="text",
        encoder="dense",
        model="BAAI/bge-large-en-v1.5",
        metric="cosine",
        display_name="BGE-large-en-v1.5",
    ),
    CollectionSpec(
        name="image_clip_vit_base_patch32",
        modality="image",
        encoder="image-dense",
        model="openai/clip-vit-base-patch32",
        metric="cosine",
        display_name="CLIP-ViT-base-patch32",
    ),
)


class VectorEntry(BaseModel):
    """One encoded cell with the provenance that resolves it in the store."""

    vector: dict[str, float] | list[float]
    text: str = ""
    pdf_id: str
    page_number: int = -1
    table_name: str
    column_name: str
    primary_key: str

    @property
    def triplet(self) -> tuple[str, str, str]:
        return (self.table_name, self.column_name, self.primary_key)


class SearchRequest(BaseModel):
    collection_name: str
    query: str
    table_name: str
    column_name: str
    filter: str = ""
    limit: PositiveInt = 5


RESULT_COLUMNS = [
    "text",
    "pdf_id",
    "page_number",
    "table_name",
    "column_name",
    "primary_key",
    "score",
]
