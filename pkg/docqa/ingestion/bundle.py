# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Pre-parsed document bundles.

A bundle is one JSON document per paper, produced by an external OCR and layout
toolchain, with page rasters stored as sibling PNG files:

    {
        "paper_id": "<uuid>",
        "metadata": {"title": ..., "abstract": ..., "authors": [...], ...},
        "pages": [{"page_number": 1, "text": ..., "image": "page_1.png",
                   "width": 612, "height": 792}],
        "sections": [{"title": ..., "content": ..., "page_numbers": [1, 2]}],
        "figures": [{"caption": ..., "bounding_box": [x0, y0, w, h],
                     "page_number": 1}],
        "tables": [{"caption": ..., "content": "<table>...</table>",
                    "bounding_box": [x0, y0, w, h], "page_number": 2}],
        "equations": [{"content": "E = mc^2", "page_number": 2}],
        "references": ["..."]
    }
"""
import json
from io import BytesIO
from pathlib import Path
from uuid import UUID

import structlog
from PIL import Image
from PIL import UnidentifiedImageError
from pydantic import BaseModel
from pydantic import conlist
from pydantic import Field
from pydantic import PositiveInt
from pydantic import ValidationError
from pydantic import validator

from ..exceptions import BundleInvariantError
from ..exceptions import BundleParseError

logger = structlog.get_logger()

BoundingBox = conlist(int, min_items=4, max_items=4)


class BundleMetadata(BaseModel):
    title: str
    abstract: str = ""
    authors: list[str] = []
    pub_year: int | None = None
    conference_full: str | None = None
    conference_abbreviation: str | None = None
    volume: str | None = None
    bibtex: str | None = None
    pdf_path: str | None = None
    download_url: str | None = None
    tags: list[str] = []


class BundlePage(BaseModel):
    page_number: int
    text: str
    image: str = Field(..., description="Raster path relative to the bundle file.")
    width: PositiveInt
    height: PositiveInt
    raster: bytes = Field(b"", repr=False, description="Loaded PNG bytes.")


class BundleSection(BaseModel):
    title: str
    content: str
    page_numbers: list[int] = []


class BundleFigure(BaseModel):
    caption: str = ""
    bounding_box: BoundingBox  # type: ignore[valid-type]
    page_number: int


class BundleTable(BaseModel):
    caption: str = ""
    content: str = ""
    bounding_box: BoundingBox  # type: ignore[valid-type]
    page_number: int


class BundleEquation(BaseModel):
    content: str
    page_number: int


class DocumentBundle(BaseModel):
    paper_id: str
    metadata: BundleMetadata
    pages: list[BundlePage]
    sections: list[BundleSection] = []
    figures: list[BundleFigure] = []
    tables: list[BundleTable] = []
    equations: list[BundleEquation] = []
    references: list[str] = []

    @validator("paper_id")
    def canonical_uuid(cls, value: str) -> str:
        return str(UUID(value))

    def page(self, page_number: int) -> BundlePage:
        return self.pages[page_number - 1]


def _check_box(path: str, box: list[int], page: BundlePage) -> None:
    x0, y0, width, height = box
    if x0 < 0 or y0 < 0 or width <= 0 or height <= 0:
        raise BundleInvariantError(path, f"degenerate bounding box {box}")
    if x0 + width > page.width or y0 + height > page.height:
        raise BundleInvariantError(
            path,
            f"bounding box {box} exceeds page {page.page_number} raster "
            f"of {page.width}x{page.height}",
        )


def check_invariants(bundle: DocumentBundle) -> None:
    """Check page contiguity, page references and bounding boxes.

    Raises:
        BundleInvariantError: Naming the path of the first offending field.
    """
    if not bundle.pages:
        raise BundleInvariantError("pages", "a bundle needs at least one page")
    for index, page in enumerate(bundle.pages):
        if page.page_number != index + 1:
            raise BundleInvariantError(
                f"pages[{index}].page_number",
                f"pages must be numbered contiguously from 1, expected {index + 1} "
                f"but found {page.page_number}",
            )

    def check_page(path: str, page_number: int) -> BundlePage:
        if not 1 <= page_number <= len(bundle.pages):
            raise BundleInvariantError(path, f"page {page_number} does not exist")
        return bundle.page(page_number)

    for index, section in enumerate(bundle.sections):
        for offset, page_number in enumerate(section.page_numbers):
            check_page(f"sections[{index}].page_numbers[{offset}]", page_number)
    for kind, elements in (("figures", bundle.figures), ("tables", bundle.tables)):
        for index, element in enumerate(elements):
            page = check_page(f"{kind}[{index}].page_number", element.page_number)
            _check_box(f"{kind}[{index}].bounding_box", element.bounding_box, page)
    for index, equation in enumerate(bundle.equations):
        check_page(f"equations[{index}].page_number", equation.page_number)


def _load_rasters(bundle: DocumentBundle, base_dir: Path) -> None:
    for index, page in enumerate(bundle.pages):
        path = f"pages[{index}].image"
        try:
            data = (base_dir / page.image).read_bytes()
        except OSError as error:
            raise BundleInvariantError(path, f"cannot read raster: {error}")
        try:
            with Image.open(BytesIO(data)) as image:
                size = image.size
        except UnidentifiedImageError:
            raise BundleInvariantError(path, "raster is not a readable image")
        if size != (page.width, page.height):
            raise BundleInvariantError(
                path,
                f"raster is {size[0]}x{size[1]} but the page declares "
                f"{page.width}x{page.height}",
            )
        page.raster = data


def load_bundle(path: Path) -> DocumentBundle:
    """Load and validate a bundle together with its page rasters.

    Raises:
        BundleParseError: If the file is unreadable or does not fit the format.
        BundleInvariantError: If the content violates a structural invariant.
    """
    log = logger.bind(path=str(path))
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        bundle = DocumentBundle.parse_obj(raw)
    except (OSError, ValueError) as error:
        # ValidationError is a ValueError, as is JSONDecodeError
        log.warning("Unable to parse bundle", error=str(error))
        raise BundleParseError(f"{path}: {error}") from error
    check_invariants(bundle)
    _load_rasters(bundle, path.parent)
    log.info("Bundle loaded", paper_id=bundle.paper_id, pages=len(bundle.pages))
    return bundle
