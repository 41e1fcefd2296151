# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Turn a bundle into rows of the eight tables and insert them."""
from pathlib import Path
from typing import Any
from uuid import UUID
from uuid import uuid5

import structlog

from ..exceptions import DuplicatePaperError
from ..gateway import BaseGateway
from ..store import DocumentStore
from ..store import RasterStore
from .bundle import DocumentBundle
from .bundle import load_bundle
from .chunking import build_chunks
from .chunking import ChunkingConfig
from .summaries import generate_summaries
from .summaries import SummarySet

logger = structlog.get_logger()


def element_id(paper_id: str, kind: str, index: int) -> str:
    """Deterministic id of the index'th element of a kind within a paper."""
    return str(uuid5(UUID(paper_id), f"{kind}/{index}"))


def build_rows(
    bundle: DocumentBundle, cfg: ChunkingConfig, summaries: SummarySet | None
) -> dict[str, list[dict[str, Any]]]:
    """Build the rows of every table for one paper.

    Without summaries the summary and tldr columns are left null.
    """
    paper_id = bundle.paper_id
    meta = bundle.metadata
    page_ids = {
        page.page_number: element_id(paper_id, "page", page.page_number)
        for page in bundle.pages
    }

    def summary(attribute: str, index: int) -> str | None:
        if summaries is None:
            return None
        return getattr(summaries, attribute)[index]

    return {
        "metadata": [
            {
                "paper_id": paper_id,
                "title": meta.title,
                "abstract": meta.abstract,
                "num_pages": len(bundle.pages),
                "conference_full": meta.conference_full,
                "conference_abbreviation": meta.conference_abbreviation,
                "pub_year": meta.pub_year,
                "volume": meta.volume,
                "download_url": meta.download_url,
                "bibtex": meta.bibtex,
                "authors": list(meta.authors),
                "pdf_path": meta.pdf_path,
                "tldr": summaries.tldr if summaries is not None else None,
                "tags": list(meta.tags),
            }
        ],
        "pages": [
            {
                "page_id": page_ids[page.page_number],
                "page_number": page.page_number,
                "page_width": page.width,
                "page_height": page.height,
                "page_content": page.text,
                "page_summary": summary("page_summaries", index),
                "ref_paper_id": paper_id,
            }
            for index, page in enumerate(bundle.pages)
        ],
        "sections": [
            {
                "section_id": element_id(paper_id, "section", index),
                "section_title": section.title,
                "section_content": section.content,
                "section_summary": summary("section_summaries", index),
                "page_numbers": list(section.page_numbers),
                "ref_paper_id": paper_id,
            }
            for index, section in enumerate(bundle.sections)
        ],
        "chunks": [
            {
                "chunk_id": element_id(paper_id, "chunk", index),
                "text_content": chunk.text,
                "page_numbers": list(chunk.page_numbers),
                "ref_paper_id": paper_id,
            }
            for index, chunk in enumerate(build_chunks(bundle, cfg))
        ],
        "images": [
            {
                "image_id": element_id(paper_id, "image", index),
                "image_caption": figure.caption,
                "image_summary": summary("image_summaries", index),
                "bounding_box": list(figure.bounding_box),
                "page_number": figure.page_number,
                "ref_paper_id": paper_id,
                "ref_page_id": page_ids[figure.page_number],
            }
            for index, figure in enumerate(bundle.figures)
        ],
        "tables": [
            {
                "table_id": element_id(paper_id, "table", index),
                "table_caption": table.caption,
                "table_content": table.content,
                "table_summary": summary("table_summaries", index),
                "bounding_box": list(table.bounding_box),
                "page_number": table.page_number,
                "ref_paper_id": paper_id,
                "ref_page_id": page_ids[table.page_number],
            }
            for index, table in enumerate(bundle.tables)
        ],
        "equations": [
            {
                "equation_id": element_id(paper_id, "equation", index),
                "equation_content": equation.content,
                "page_number": equation.page_number,
                "ref_paper_id": paper_id,
                "ref_page_id": page_ids[equation.page_number],
            }
            for index, equation in enumerate(bundle.equations)
        ],
        "reference": [
            {
                "reference_id": element_id(paper_id, "reference", index),
                "reference_content": content,
                "reference_number": index + 1,
                "ref_paper_id": paper_id,
            }
            for index, content in enumerate(bundle.references)
        ],
    }


def populate(
    store: DocumentStore,
    rasters: RasterStore,
    bundle: DocumentBundle,
    cfg: ChunkingConfig,
    summaries: SummarySet | None = None,
) -> str:
    """Insert one paper into the store and save its page rasters.

    All rows go in with a single transaction, so a failing paper leaves no rows.

    Raises:
        DuplicatePaperError: If the paper is already stored.

    Returns:
        The paper id.
    """
    log = logger.bind(paper_id=bundle.paper_id)
    if store.has_paper(bundle.paper_id):
        raise DuplicatePaperError(bundle.paper_id)
    counts = store.bulk_insert(build_rows(bundle, cfg, summaries))
    for page in bundle.pages:
        rasters.save(bundle.paper_id, page.page_number, page.raster)
    log.info("Paper populated", **counts)
    return bundle.paper_id


async def ingest_bundle(
    path: Path,
    store: DocumentStore,
    rasters: RasterStore,
    cfg: ChunkingConfig,
    gateway: BaseGateway | None = None,
) -> str:
    """Load, summarize and populate one bundle file.

    Summaries are skipped when no gateway is given.
    """
    bundle = load_bundle(path)
    if store.has_paper(bundle.paper_id):
        raise DuplicatePaperError(bundle.paper_id)
    summaries = None
    if gateway is not None:
        summaries = await generate_summaries(bundle, gateway)
    return populate(store, rasters, bundle, cfg, summaries)
