# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Collections of vector entries with exact, filtered top-K search."""
import time
from collections.abc import Iterable
from pathlib import Path

import numpy as np
import structlog
from pydantic import BaseModel

from ..exceptions import DanglingProvenanceError
from ..exceptions import DuplicateEntryError
from ..exceptions import ModalityMismatchError
from ..exceptions import NotEncodablePairError
from ..exceptions import StoreError
from ..exceptions import UnknownCollectionError
from ..exceptions import UnsupportedQueryError
from ..gateway import BaseGateway
from ..gateway import CallRecord
from ..metrics import search_time
from ..store import DocumentStore
from ..store import ResultTable
from ..store import SchemaCatalog
from .bm25 import CorpusStats
from .bm25 import encode_query
from .bm25 import inner_product
from .filters import evaluate_filter
from .filters import parse_filter
from .models import CollectionSpec
from .models import DEFAULT_COLLECTIONS
from .models import RESULT_COLUMNS
from .models import SearchRequest
from .models import VectorEntry

logger = structlog.get_logger()


class CollectionDump(BaseModel):
    spec: CollectionSpec
    stats: CorpusStats | None = None
    entries: list[VectorEntry] = []


class Collection:
    """Entries of one encoder, unique per (table, column, primary key)."""

    def __init__(self, spec: CollectionSpec) -> None:
        self.spec = spec
        self.entries: list[VectorEntry] = []
        self.stats: CorpusStats | None = None
        self._triplets: set[tuple[str, str, str]] = set()

    def __len__(self) -> int:
        return len(self.entries)

    def insert(self, entries: Iterable[VectorEntry]) -> int:
        """Add entries, all or none.

        Raises:
            DuplicateEntryError: If an entry's triplet is already present.
        """
        entries = list(entries)
        seen = set(self._triplets)
        for entry in entries:
            if entry.triplet in seen:
                raise DuplicateEntryError(
                    f"Collection {self.spec.name} already has an entry for "
                    f"{entry.triplet}"
                )
            seen.add(entry.triplet)
        self.entries.extend(entries)
        self._triplets = seen
        return len(entries)

    def score(self, query: dict[str, float] | list[float], entry: VectorEntry) -> float:
        if isinstance(query, dict):
            assert isinstance(entry.vector, dict)
            return inner_product(query, entry.vector)
        vector = np.asarray(entry.vector, dtype=np.float64)
        norm = float(np.linalg.norm(vector) * np.linalg.norm(query))
        if norm == 0.0:
            return 0.0
        return float(np.dot(vector, query) / norm)

    def dump(self) -> CollectionDump:
        return CollectionDump(spec=self.spec, stats=self.stats, entries=self.entries)

    @classmethod
    def from_dump(cls, dump: CollectionDump) -> "Collection":
        collection = cls(dump.spec)
        collection.stats = dump.stats
        collection.insert(dump.entries)
        return collection


class VectorIndex:
    """The vectorstore: named collections over the encodable cells of a store.

    Example:
        ```python
        index = VectorIndex(store.catalog)
        await encode_collections(index, store, rasters, gateway)
        table = await index.search(
            SearchRequest(
                collection_name="text_bm25_en",
                query="contrastive learning",
                table_name="chunks",
                column_name="text_content",
                filter="page_number == 1",
            ),
            gateway,
        )
        ```
    """

    def __init__(
        self,
        catalog: SchemaCatalog,
        specs: Iterable[CollectionSpec] = DEFAULT_COLLECTIONS,
        hard_limit: int = 30,
        image_text_queries: bool = False,
    ) -> None:
        self.catalog = catalog
        self.collections = {spec.name: Collection(spec) for spec in specs}
        self.hard_limit = hard_limit
        self.image_text_queries = image_text_queries

    @property
    def specs(self) -> list[CollectionSpec]:
        return [collection.spec for collection in self.collections.values()]

    def collection(self, name: str) -> Collection:
        try:
            return self.collections[name]
        except KeyError:
            raise UnknownCollectionError(name)

    def check_pair(self, collection: Collection, table: str, column: str) -> None:
        """Check that a (table, column) pair is encoded in a collection.

        Raises:
            NotEncodablePairError: If the pair is not encodable at all.
            ModalityMismatchError: If it is encoded in collections of another
                modality.
        """
        if not self.catalog.is_encodable(table, column):
            raise NotEncodablePairError(table, column)
        if self.catalog.modality(table, column) != collection.spec.modality:
            raise ModalityMismatchError(table, column, collection.spec.name)

    def insert_entries(
        self,
        name: str,
        entries: list[VectorEntry],
        store: DocumentStore | None = None,
    ) -> int:
        """Insert entries into a collection.

        Args:
            name: The collection name.
            entries: The entries to insert.
            store: When given, every entry's provenance must resolve in it.

        Raises:
            UnknownCollectionError: If the collection does not exist.
            DuplicateEntryError: If an entry's triplet is already present.
            DanglingProvenanceError: If an entry does not resolve in the store.

        Returns:
            The number of inserted entries.
        """
        collection = self.collection(name)
        for entry in entries:
            self.check_pair(collection, entry.table_name, entry.column_name)
            if store is None:
                continue
            try:
                store.resolve_cell(*entry.triplet)
            except StoreError as error:
                raise DanglingProvenanceError(
                    f"Entry {entry.triplet} does not resolve: {error}"
                ) from error
        return collection.insert(entries)

    async def _query_vector(
        self,
        collection: Collection,
        query: str,
        gateway: BaseGateway | None,
        trace: list[CallRecord] | None,
    ) -> dict[str, float] | list[float]:
        spec = collection.spec
        if spec.encoder == "bm25":
            return encode_query(query)
        if gateway is None:
            raise UnsupportedQueryError(
                f"Collection {spec.name} needs an embedding endpoint to search"
            )
        if spec.encoder == "image-dense":
            if not self.image_text_queries:
                raise UnsupportedQueryError(
                    f"Text queries against the image collection {spec.name} are not "
                    f"supported by the configured encoders"
                )
            return gateway.embed_image_queries(spec.model, [query])[0]
        return (await gateway.embed(spec.model, [query], trace=trace))[0]

    async def search(
        self,
        request: SearchRequest,
        gateway: BaseGateway | None = None,
        trace: list[CallRecord] | None = None,
    ) -> ResultTable:
        """Exact top-K search restricted to one (table, column) pair and a filter.

        Results are ordered by score, descending, with ties broken by primary key.

        Raises:
            UnknownCollectionError, NotEncodablePairError, FilterError,
            UnsupportedQueryError, GatewayError
        """
        collection = self.collection(request.collection_name)
        self.check_pair(collection, request.table_name, request.column_name)
        condition = parse_filter(request.filter)
        limit = min(request.limit, self.hard_limit)
        query = await self._query_vector(collection, request.query, gateway, trace)

        start = time.monotonic()
        scored = [
            (collection.score(query, entry), entry)
            for entry in collection.entries
            if entry.table_name == request.table_name
            and entry.column_name == request.column_name
            and evaluate_filter(condition, entry)
        ]
        scored.sort(key=lambda pair: (-pair[0], pair[1].primary_key))
        search_time.labels(collection=collection.spec.name).observe(
            time.monotonic() - start
        )
        rows = [
            [
                entry.text,
                entry.pdf_id,
                entry.page_number,
                entry.table_name,
                entry.column_name,
                entry.primary_key,
                round(score, 4),
            ]
            for score, entry in scored[:limit]
        ]
        logger.debug(
            "Vectorstore search",
            collection=collection.spec.name,
            candidates=len(scored),
            returned=len(rows),
        )
        return ResultTable(column_names=list(RESULT_COLUMNS), rows=rows)

    # ----------- #
    # Persistence #
    # ----------- #

    def save(self, directory: Path) -> None:
        """Write one JSON document per collection into directory."""
        directory.mkdir(parents=True, exist_ok=True)
        for name, collection in self.collections.items():
            (directory / f"{name}.json").write_text(
                collection.dump().json(), encoding="utf-8"
            )
        logger.info("Vector index saved", path=str(directory))

    @classmethod
    def load(
        cls,
        directory: Path,
        catalog: SchemaCatalog,
        hard_limit: int = 30,
        image_text_queries: bool = False,
    ) -> "VectorIndex":
        """Load the collections saved in directory.

        Collections that were never encoded are empty.
        """
        index = cls(
            catalog, hard_limit=hard_limit, image_text_queries=image_text_queries
        )
        for name in list(index.collections):
            path = directory / f"{name}.json"
            if path.exists():
                dump = CollectionDump.parse_file(path)
                index.collections[name] = Collection.from_dump(dump)
        logger.info(
            "Vector index loaded",
            path=str(directory),
            entries={name: len(c) for name, c in index.collections.items()},
        )
        return index
