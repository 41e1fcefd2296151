# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""The universal document schema and its prompt rendering.

Eight tables hold the parsed views of every paper. Text columns and bounding boxes
listed in the encodable registry are mirrored into the vectorstore, one vector per
non-null cell.
"""
import re
from enum import Enum
from typing import Literal

import sqlalchemy
from more_itertools import one
from pydantic import BaseModel
from sqlalchemy import ARRAY
from sqlalchemy import Column
from sqlalchemy import Double
from sqlalchemy import ForeignKey
from sqlalchemy import Integer
from sqlalchemy import MetaData
from sqlalchemy import String
from sqlalchemy import Table

from ..exceptions import UnknownColumnError
from ..exceptions import UnknownTableError

DATABASE_DESCRIPTION = (
    "This database contains information about AI research papers. Each PDF file is "
    "represented or parsed via different views, e.g., pages, sections, figures, "
    "tables, and references. We also extract the concrete content inside each "
    "concrete element via OCR."
)


class LogicalType(str, Enum):
    text = "text"
    integer = "integer"
    float = "float"
    uuid_text = "uuid-text"
    text_array = "text-array"
    int_array = "int-array"
    int4_array = "int4-array"


# Type names shown to the agent; bounding boxes are exactly four integers
PROMPT_TYPES: dict[LogicalType, str] = {
    LogicalType.text: "VARCHAR",
    LogicalType.integer: "INTEGER",
    LogicalType.float: "DOUBLE",
    LogicalType.uuid_text: "UUID",
    LogicalType.text_array: "VARCHAR[]",
    LogicalType.int_array: "INTEGER[]",
    LogicalType.int4_array: "INTEGER[4]",
}


class ColumnDef(BaseModel):
    class Config:
        frozen = True

    name: str
    type: LogicalType
    description: str
    nullable: bool = True


class ForeignKeyDef(BaseModel):
    class Config:
        frozen = True

    column: str
    foreign_table: str
    foreign_column: str


class TableDef(BaseModel):
    """One table of the schema.

    `pdf_id_column` and `page_number_column` tell the vectorstore where the
    provenance of a cell lives. A list-valued page column contributes its first
    page.
    """

    class Config:
        frozen = True

    name: str
    description: str
    columns: tuple[ColumnDef, ...]
    primary_key: str
    foreign_keys: tuple[ForeignKeyDef, ...] = ()
    pdf_id_column: str
    page_number_column: str | None = None

    def column(self, name: str) -> ColumnDef:
        for column in self.columns:
            if column.name == name:
                return column
        raise UnknownColumnError(self.name, name)

    @property
    def column_names(self) -> list[str]:
        return [column.name for column in self.columns]


class SchemaCatalog(BaseModel):
    class Config:
        frozen = True

    db_name: str
    tables: tuple[TableDef, ...]
    encodable: tuple[tuple[str, str], ...]

    def table(self, name: str) -> TableDef:
        for table in self.tables:
            if table.name == name:
                return table
        raise UnknownTableError(name)

    @property
    def table_names(self) -> list[str]:
        return [table.name for table in self.tables]

    def is_encodable(self, table: str, column: str) -> bool:
        return (table, column) in self.encodable

    def modality(self, table: str, column: str) -> Literal["text", "image"]:
        """Modality of an encodable column: bounding boxes are images."""
        column_def = self.table(table).column(column)
        if column_def.type == LogicalType.int4_array:
            return "image"
        return "text"

    def pairs(self, modality: Literal["text", "image"]) -> list[tuple[str, str]]:
        return [pair for pair in self.encodable if self.modality(*pair) == modality]


def _col(
    name: str, type_: LogicalType, description: str, nullable: bool = True
) -> ColumnDef:
    return ColumnDef(name=name, type=type_, description=description, nullable=nullable)


def _paper_fk() -> ForeignKeyDef:
    return ForeignKeyDef(
        column="ref_paper_id", foreign_table="metadata", foreign_column="paper_id"
    )


def _page_fk() -> ForeignKeyDef:
    return ForeignKeyDef(
        column="ref_page_id", foreign_table="pages", foreign_column="page_id"
    )


_T = LogicalType
_REF_PAPER = _col(
    "ref_paper_id",
    _T.uuid_text,
    "A foreign key referencing the paper ID in the metadata table.",
    nullable=False,
)
_REF_PAGE = _col(
    "ref_page_id",
    _T.uuid_text,
    "A foreign key referencing the page ID in the pages table.",
    nullable=False,
)
_BOX_SUFFIX = (
    "in the format [x0, y0, w, h], where (x0, y0) represents the coordinates of the "
    "top-left corner and (w, h) represents the width and height in page pixels."
)

TABLES: tuple[TableDef, ...] = (
    TableDef(
        name="metadata",
        description="This table stores metadata about each paper.",
        columns=(
            _col(
                "paper_id",
                _T.uuid_text,
                "A unique identifier for this paper.",
                nullable=False,
            ),
            _col("title", _T.text, "The title of this paper.", nullable=False),
            _col("abstract", _T.text, "The abstract of this paper."),
            _col("num_pages", _T.integer, "The number of pages in this paper."),
            _col(
                "conference_full",
                _T.text,
                "The full name of the conference where this paper was published.",
            ),
            _col(
                "conference_abbreviation",
                _T.text,
                "The abbreviation of the conference, e.g., ACL.",
            ),
            _col("pub_year", _T.integer, "The year when this paper was published."),
            _col(
                "volume",
                _T.text,
                "The volume or track of the proceedings, e.g., long papers.",
            ),
            _col("download_url", _T.text, "The URL to download the PDF file."),
            _col("bibtex", _T.text, "The bibtex of this paper."),
            _col("authors", _T.text_array, "The authors of this paper."),
            _col("pdf_path", _T.text, "The local path of the PDF file."),
            _col(
                "tldr",
                _T.text,
                "A brief summary of the paper's main idea or findings generated by "
                "LLM based on title and abstract.",
            ),
            _col(
                "tags", _T.text_array, "Keywords describing the topics of this paper."
            ),
        ),
        primary_key="paper_id",
        pdf_id_column="paper_id",
    ),
    TableDef(
        name="pages",
        description="This table stores the parsed content of each PDF page.",
        columns=(
            _col(
                "page_id",
                _T.uuid_text,
                "A unique identifier for this page.",
                nullable=False,
            ),
            _col(
                "page_number",
                _T.integer,
                "The page number in the PDF file, starting from 1.",
                nullable=False,
            ),
            _col(
                "page_width",
                _T.integer,
                "The width of the page raster in pixels.",
                nullable=False,
            ),
            _col(
                "page_height",
                _T.integer,
                "The height of the page raster in pixels.",
                nullable=False,
            ),
            _col("page_content", _T.text, "The content of the page."),
            _col(
                "page_summary",
                _T.text,
                "A brief summary of the page content, generated by LLM, focusing on "
                "key information and describing the page content.",
            ),
            _REF_PAPER,
        ),
        primary_key="page_id",
        foreign_keys=(_paper_fk(),),
        pdf_id_column="ref_paper_id",
        page_number_column="page_number",
    ),
    TableDef(
        name="sections",
        description="This table stores the sections of each paper, split by headings.",
        columns=(
            _col(
                "section_id",
                _T.uuid_text,
                "A unique identifier for this section.",
                nullable=False,
            ),
            _col("section_title", _T.text, "The title of the current section."),
            _col(
                "section_content", _T.text, "The text content of the current section."
            ),
            _col(
                "section_summary",
                _T.text,
                "A brief summary of the section content generated by LLM, focusing "
                "on key information and describing the section content.",
            ),
            _col(
                "page_numbers",
                _T.int_array,
                "The page numbers spanned by this section.",
            ),
            _REF_PAPER,
        ),
        primary_key="section_id",
        foreign_keys=(_paper_fk(),),
        pdf_id_column="ref_paper_id",
        page_number_column="page_numbers",
    ),
    TableDef(
        name="chunks",
        description="This table stores fixed-length text chunks of each paper.",
        columns=(
            _col(
                "chunk_id",
                _T.uuid_text,
                "A unique identifier for this chunk.",
                nullable=False,
            ),
            _col("text_content", _T.text, "The text content of the current chunk."),
            _col(
                "page_numbers",
                _T.int_array,
                "The page numbers spanned by this chunk.",
            ),
            _REF_PAPER,
        ),
        primary_key="chunk_id",
        foreign_keys=(_paper_fk(),),
        pdf_id_column="ref_paper_id",
        page_number_column="page_numbers",
    ),
    TableDef(
        name="images",
        description="This table stores the figures extracted from each paper.",
        columns=(
            _col(
                "image_id",
                _T.uuid_text,
                "A unique identifier for this image.",
                nullable=False,
            ),
            _col(
                "image_caption",
                _T.text,
                "The caption of this image, empty string if not found.",
            ),
            _col(
                "image_summary",
                _T.text,
                "A brief summary of the image, generated by LLM, focusing on key "
                "information and describing the image.",
            ),
            _col(
                "bounding_box",
                _T.int4_array,
                "The bounding box of the figure " + _BOX_SUFFIX,
                nullable=False,
            ),
            _col(
                "page_number",
                _T.integer,
                "The page number where this image is located.",
                nullable=False,
            ),
            _REF_PAPER,
            _REF_PAGE,
        ),
        primary_key="image_id",
        foreign_keys=(_paper_fk(), _page_fk()),
        pdf_id_column="ref_paper_id",
        page_number_column="page_number",
    ),
    TableDef(
        name="tables",
        description="This table stores the tables extracted from each paper.",
        columns=(
            _col(
                "table_id",
                _T.uuid_text,
                "A unique identifier for this table.",
                nullable=False,
            ),
            _col(
                "table_caption",
                _T.text,
                "Caption of the table, showing key information of the table.",
            ),
            _col(
                "table_content", _T.text, "The content of the table in html format."
            ),
            _col(
                "table_summary",
                _T.text,
                "A brief summary of the table content generated by LLM, focusing on "
                "key information and describing the table content.",
            ),
            _col(
                "bounding_box",
                _T.int4_array,
                "The bounding box of the table " + _BOX_SUFFIX,
                nullable=False,
            ),
            _col(
                "page_number",
                _T.integer,
                "The page number where this table is located.",
                nullable=False,
            ),
            _REF_PAPER,
            _REF_PAGE,
        ),
        primary_key="table_id",
        foreign_keys=(_paper_fk(), _page_fk()),
        pdf_id_column="ref_paper_id",
        page_number_column="page_number",
    ),
    TableDef(
        name="equations",
        description="This table stores the equations extracted from each paper.",
        columns=(
            _col(
                "equation_id",
                _T.uuid_text,
                "A unique identifier for this equation.",
                nullable=False,
            ),
            _col(
                "equation_content",
                _T.text,
                "Content of the equation in latex format.",
            ),
            _col(
                "page_number",
                _T.integer,
                "The page number where this equation is located.",
                nullable=False,
            ),
            _REF_PAPER,
            _REF_PAGE,
        ),
        primary_key="equation_id",
        foreign_keys=(_paper_fk(), _page_fk()),
        pdf_id_column="ref_paper_id",
        page_number_column="page_number",
    ),
    TableDef(
        name="reference",
        description="This table stores the references cited in each paper.",
        columns=(
            _col(
                "reference_id",
                _T.uuid_text,
                "A unique identifier for this reference.",
                nullable=False,
            ),
            _col(
                "reference_content", _T.text, "Text content of each reference."
            ),
            _col(
                "reference_number",
                _T.integer,
                "The position of this reference in the bibliography, starting from 1.",
            ),
            _REF_PAPER,
        ),
        primary_key="reference_id",
        foreign_keys=(_paper_fk(),),
        pdf_id_column="ref_paper_id",
    ),
)

ENCODABLE: tuple[tuple[str, str], ...] = (
    ("metadata", "title"),
    ("metadata", "abstract"),
    ("metadata", "bibtex"),
    ("metadata", "tldr"),
    ("pages", "page_content"),
    ("pages", "page_summary"),
    ("images", "image_caption"),
    ("images", "image_summary"),
    ("images", "bounding_box"),
    ("tables", "table_caption"),
    ("tables", "table_content"),
    ("tables", "table_summary"),
    ("tables", "bounding_box"),
    ("sections", "section_title"),
    ("sections", "section_content"),
    ("sections", "section_summary"),
    ("chunks", "text_content"),
    ("equations", "equation_content"),
    ("reference", "reference_content"),
)


def build_catalog(db_name: str = "ai_research") -> SchemaCatalog:
    return SchemaCatalog(db_name=db_name, tables=TABLES, encodable=ENCODABLE)


def _sqlalchemy_type(type_: LogicalType) -> sqlalchemy.types.TypeEngine:
    match type_:
        case LogicalType.integer:
            return Integer()
        case LogicalType.float:
            return Double()
        case LogicalType.text_array:
            return ARRAY(String)
        case LogicalType.int_array | LogicalType.int4_array:
            return ARRAY(Integer)
        case _:
            # uuid-text is stored as VARCHAR holding the canonical UUID text
            return String()


def build_metadata(catalog: SchemaCatalog) -> MetaData:
    """Translate the catalog into SQLAlchemy table definitions."""
    metadata = MetaData()
    for table in catalog.tables:
        foreign = {fk.column: fk for fk in table.foreign_keys}
        columns = []
        for column in table.columns:
            args: list = []
            if column.name in foreign:
                fk = foreign[column.name]
                args.append(ForeignKey(f"{fk.foreign_table}.{fk.foreign_column}"))
            columns.append(
                Column(
                    column.name,
                    _sqlalchemy_type(column.type),
                    *args,
                    primary_key=column.name == table.primary_key,
                    nullable=column.nullable,
                )
            )
        Table(table.name, metadata, *columns)
    return metadata


def render_schema_prompt(catalog: SchemaCatalog) -> str:
    """Render the catalog as commented CREATE statements.

    Example:
        ```
        /* table metadata: This table stores metadata about each paper. */
        CREATE TABLE IF NOT EXISTS metadata (
            paper_id UUID, -- A unique identifier for this paper.
            ...
            PRIMARY KEY (paper_id)
        );
        ```
    """
    lines = [f"/* database {catalog.db_name}: {DATABASE_DESCRIPTION} */"]
    for table in catalog.tables:
        lines.append(f"/* table {table.name}: {table.description} */")
        lines.append(f"CREATE TABLE IF NOT EXISTS {table.name} (")
        for column in table.columns:
            sql_type = PROMPT_TYPES[column.type]
            lines.append(f"    {column.name} {sql_type}, -- {column.description}")
        constraints = [f"    PRIMARY KEY ({table.primary_key})"]
        constraints.extend(
            f"    FOREIGN KEY ({fk.column}) REFERENCES "
            f"{fk.foreign_table}({fk.foreign_column})"
            for fk in table.foreign_keys
        )
        lines.append(",\n".join(constraints))
        lines.append(");")
    return "\n".join(lines)


class PromptTableInventory(BaseModel):
    columns: list[tuple[str, str]]
    primary_key: str
    foreign_keys: list[tuple[str, str, str]]


_CREATE = re.compile(r"^CREATE TABLE IF NOT EXISTS (\w+) \($")
_COLUMN = re.compile(r"^    (\w+) ([A-Z]+(?:\[\d*\])?), -- .*$")
_PRIMARY = re.compile(r"^    PRIMARY KEY \((\w+)\),?$")
_FOREIGN = re.compile(r"^    FOREIGN KEY \((\w+)\) REFERENCES (\w+)\((\w+)\),?$")


def parse_schema_prompt(text: str) -> dict[str, PromptTableInventory]:
    """Read a rendered schema prompt back into its table inventory.

    Only understands the layout produced by `render_schema_prompt`.
    """
    inventory: dict[str, PromptTableInventory] = {}
    current: str | None = None
    columns: list[tuple[str, str]] = []
    primary: list[str] = []
    foreign: list[tuple[str, str, str]] = []
    for line in text.splitlines():
        if match := _CREATE.match(line):
            current = match.group(1)
            columns, primary, foreign = [], [], []
        elif current is None:
            continue
        elif match := _COLUMN.match(line):
            columns.append((match.group(1), match.group(2)))
        elif match := _PRIMARY.match(line):
            primary.append(match.group(1))
        elif match := _FOREIGN.match(line):
            foreign.append((match.group(1), match.group(2), match.group(3)))
        elif line == ");":
            inventory[current] = PromptTableInventory(
                columns=columns, primary_key=one(primary), foreign_keys=foreign
            )
            current = None
    return inventory
