# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Relational store of parsed documents."""
from .database import DocumentStore
from .models import EncodableCell
from .models import ResultTable
from .rasters import crop_png
from .rasters import RasterStore
from .schema import build_catalog
from .schema import LogicalType
from .schema import parse_schema_prompt
from .schema import render_schema_prompt
from .schema import SchemaCatalog
from .schema import TableDef

__all__ = [
    "DocumentStore",
    "EncodableCell",
    "LogicalType",
    "RasterStore",
    "ResultTable",
    "SchemaCatalog",
    "TableDef",
    "build_catalog",
    "crop_png",
    "parse_schema_prompt",
    "render_schema_prompt",
]
