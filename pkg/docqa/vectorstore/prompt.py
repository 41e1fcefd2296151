# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""The vectorstore schema as shown to agents."""
import json
from collections.abc import Iterable
from typing import Any

from ..store import SchemaCatalog
from .models import CollectionSpec

OPERATOR_CATALOG: list[dict[str, str]] = [
    {
        "symbol": "and",
        "example": "expr1 and expr2",
        "description": "True if both expr1 and expr2 are true.",
    },
    {
        "symbol": "or",
        "example": "expr1 or expr2",
        "description": "True if either expr1 or expr2 is true.",
    },
    {
        "symbol": "not",
        "example": "not expr",
        "description": "True if expr is false.",
    },
    {
        "symbol": "==",
        "example": "a == b",
        "description": "True if a is equal to b.",
    },
    {
        "symbol": "!=",
        "example": "a != b",
        "description": "True if a is not equal to b.",
    },
    {
        "symbol": "<",
        "example": "a < b",
        "description": "True if a is less than b.",
    },
    {
        "symbol": "<=",
        "example": "a <= b",
        "description": "True if a is less than or equal to b.",
    },
    {
        "symbol": ">",
        "example": "a > b",
        "description": "True if a is greater than b.",
    },
    {
        "symbol": ">=",
        "example": "a >= b",
        "description": "True if a is greater than or equal to b.",
    },
    {
        "symbol": "in",
        "example": "a in [b, c]",
        "description": "True if a equals one of the values in the list.",
    },
    {
        "symbol": "not in",
        "example": "a not in [b, c]",
        "description": "True if a equals none of the values in the list.",
    },
    {
        "symbol": "+",
        "example": "a + b",
        "description": "Add the two operands.",
    },
    {
        "symbol": "-",
        "example": "a - b",
        "description": "Subtract the second operand from the first.",
    },
    {
        "symbol": "*",
        "example": "a * b",
        "description": "Multiply the two operands.",
    },
    {
        "symbol": "/",
        "example": "a / b",
        "description": "Divide the first operand by the second.",
    },
]


def _fields(spec: CollectionSpec) -> list[dict[str, str]]:
    if spec.encoder == "bm25":
        vector = {
            "name": "vector",
            "dtype": "SPARSE_FLOAT_VECTOR",
            "desc": f"attained by {spec.display_name} model",
        }
    else:
        vector = {
            "name": "vector",
            "dtype": "FLOAT_VECTOR",
            "desc": f"attained by {spec.display_name} model",
        }
    source = "`text` field" if spec.modality == "text" else "the cropped image"
    return [
        vector,
        {
            "name": "text",
            "dtype": "VARCHAR",
            "desc": "cell value from the database"
            if spec.modality == "text"
            else "bounding box [x0, y0, w, h] of the encoded page region",
        },
        {"name": "pdf_id", "dtype": "VARCHAR", "desc": "unique id of the PDF file"},
        {
            "name": "page_number",
            "dtype": "INT16",
            "desc": f"source page of {source}, -1 if unknown",
        },
        {"name": "table_name", "dtype": "VARCHAR", "desc": f"source table of {source}"},
        {
            "name": "column_name",
            "dtype": "VARCHAR",
            "desc": f"source column of {source}",
        },
        {
            "name": "primary_key",
            "dtype": "VARCHAR",
            "desc": f"primary key value for the row that contains {source} in the "
            "relational database",
        },
    ]


def _description(spec: CollectionSpec) -> str:
    if spec.encoder == "bm25":
        return (
            f"This collection is used to store the sparse embeddings generated by the "
            f"{spec.display_name} model for all encodable text content in another "
            f"relational database. The semantic search is based on field `vector` "
            f"with metric inner-product (IP)."
        )
    content = (
        "all encodable text content"
        if spec.modality == "text"
        else "the page regions of figures and tables (bounding_box columns)"
    )
    return (
        f"This collection is used to store the embeddings generated by the model "
        f"{spec.display_name} for {content} in another relational database. The "
        f"semantic search is based on field `vector` with metric COSINE."
    )


def render_vs_schema_prompt(
    specs: Iterable[CollectionSpec], catalog: SchemaCatalog
) -> str:
    """Serialize collections, their fields, encodable pairs and filter operators.

    The fields of a collection are listed in full for the first collection of each
    modality and referenced for the rest.
    """
    collections: list[dict[str, Any]] = []
    first_of_modality: dict[str, str] = {}
    for spec in specs:
        description: dict[str, Any] = {
            "collection_name": spec.name,
            "description": _description(spec),
        }
        if spec.modality in first_of_modality:
            description["fields"] = (
                "The fields of this collection are the same as those in "
                f"`{first_of_modality[spec.modality]}`."
            )
        else:
            first_of_modality[spec.modality] = spec.name
            description["fields"] = _fields(spec)
        collections.append(description)

    def pairs(modality: str) -> str:
        return (
            "["
            + ", ".join(
                f'("{table}", "{column}")'
                for table, column in catalog.pairs(modality)  # type: ignore[arg-type]
            )
            + "]"
        )

    return "\n".join(
        [
            json.dumps(collections, indent=4, ensure_ascii=False),
            "",
            "Here are all encodable (table_name, column_name) tuples from the "
            "corresponding DuckDB database, where the encoded vector entries are "
            "sourced. Different columns together provide multiple perspectives for "
            "vector search.",
            f"Text modality: {pairs('text')}",
            f"Image modality: {pairs('image')}",
            "",
            "Here are the operators that you can use in the filter parameter for "
            "RetrieveFromVectorstore action:",
            json.dumps(OPERATOR_CATALOG, indent=4),
        ]
    )
