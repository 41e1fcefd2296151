# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Encode the encodable cells of a store into the collections of an index."""
from collections.abc import Iterable

import structlog
from more_itertools import chunked
from tqdm import tqdm

from ..exceptions import UnknownCollectionError
from ..gateway import BaseGateway
from ..store import crop_png
from ..store import DocumentStore
from ..store import EncodableCell
from ..store import RasterStore
from .bm25 import CorpusStats
from .bm25 import encode_sparse_bm25
from .index import Collection
from .index import VectorIndex
from .models import VectorEntry

logger = structlog.get_logger()


def select_collections(
    index: VectorIndex,
    selectors: Iterable[str] = (),
    embed_model: str | None = None,
) -> list[str]:
    """Resolve collection selectors to collection names in index order.

    A selector is a collection name or an encoder kind (`bm25`, `dense` or
    `image-dense`); no selectors select every collection. `embed_model` keeps
    only the dense text collections encoded with that model.

    Examples:
        ```python
        select_collections(index, ["bm25", "dense"], "BAAI/bge-large-en-v1.5")
        # --> ["text_bm25_en", "text_bge_large_en_v1_5"]
        ```

    Raises:
        UnknownCollectionError: For a selector or embedding model that matches
            no collection.
    """
    specs = index.specs
    wanted = [selector.strip() for selector in selectors if selector.strip()]
    for selector in wanted:
        if not any(selector in (spec.name, spec.encoder) for spec in specs):
            raise UnknownCollectionError(selector)
    names = [
        spec.name
        for spec in specs
        if not wanted or spec.name in wanted or spec.encoder in wanted
    ]
    if embed_model is None:
        return names
    dense = {spec.name for spec in specs if spec.encoder == "dense"}
    matching = {spec.name for spec in specs if spec.model == embed_model} & dense
    if not matching:
        raise UnknownCollectionError(f"dense collection for {embed_model}")
    return [name for name in names if name not in dense or name in matching]


def _entry(cell: EncodableCell, vector: dict[str, float] | list[float]) -> VectorEntry:
    return VectorEntry(
        vector=vector,
        text=cell.payload if isinstance(cell.payload, str) else "",
        pdf_id=cell.pdf_id,
        page_number=cell.page_number,
        table_name=cell.table,
        column_name=cell.column,
        primary_key=cell.primary_key,
    )


def _encode_bm25(
    collection: Collection, cells: list[EncodableCell]
) -> list[VectorEntry]:
    texts = [str(cell.payload) for cell in cells]
    collection.stats = CorpusStats.build(texts)
    return [
        _entry(cell, encode_sparse_bm25(text, collection.stats))
        for cell, text in zip(cells, texts)
    ]


async def _encode_dense(
    collection: Collection,
    cells: list[EncodableCell],
    gateway: BaseGateway,
    batch_size: int,
    progress: bool,
) -> list[VectorEntry]:
    entries = []
    with tqdm(
        total=len(cells), unit="cell", desc=collection.spec.name, disable=not progress
    ) as progress_bar:
        for batch in chunked(cells, batch_size):
            vectors = await gateway.embed(
                collection.spec.model, [str(cell.payload) for cell in batch]
            )
            entries.extend(map(_entry, batch, vectors))
            progress_bar.update(len(batch))
    return entries


def _encode_images(
    collection: Collection,
    cells: list[EncodableCell],
    gateway: BaseGateway,
    rasters: RasterStore,
) -> list[VectorEntry]:
    crops = []
    for cell in cells:
        assert isinstance(cell.payload, tuple)
        page = rasters.load(cell.pdf_id, cell.page_number)
        crop, _, _ = crop_png(page, cell.payload)
        crops.append(crop)
    vectors = gateway.embed_images(collection.spec.model, crops)
    return list(map(_entry, cells, vectors))


async def encode_collections(
    index: VectorIndex,
    store: DocumentStore,
    rasters: RasterStore,
    gateway: BaseGateway | None = None,
    names: Iterable[str] | None = None,
    batch_size: int = 100,
    progress: bool = False,
) -> dict[str, int]:
    """Fill collections with one entry per non-null encodable cell.

    Collections are rebuilt from scratch. Dense text collections need a gateway;
    without one they are skipped with a warning.

    Args:
        index: The index whose collections to fill.
        store: The populated relational store.
        rasters: Page rasters, cropped for the image collection.
        gateway: Embedding endpoint for the dense collections.
        names: Collections to encode, all by default.
        batch_size: Texts per embedding request.
        progress: Whether to show progress bars.

    Returns:
        The number of entries per encoded collection.
    """
    cells = list(store.enumerate_encodable_cells())
    by_modality = {
        "text": [cell for cell in cells if isinstance(cell.payload, str)],
        "image": [cell for cell in cells if isinstance(cell.payload, tuple)],
    }
    counts = {}
    for name in names or list(index.collections):
        collection = index.collection(name)
        spec = collection.spec
        log = logger.bind(collection=name)
        selected = by_modality[spec.modality]
        if spec.encoder == "bm25":
            entries = _encode_bm25(collection, selected)
        elif gateway is None:
            log.warning("No gateway for a dense collection, skipping")
            continue
        elif spec.encoder == "dense":
            entries = await _encode_dense(
                collection, selected, gateway, batch_size, progress
            )
        else:
            entries = _encode_images(collection, selected, gateway, rasters)
        fresh = Collection(spec)
        fresh.stats = collection.stats
        fresh.insert(entries)
        index.collections[name] = fresh
        counts[name] = len(entries)
        log.info("Collection encoded", entries=len(entries))
    return counts
