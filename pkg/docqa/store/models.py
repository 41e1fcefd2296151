# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from datetime import date
from datetime import datetime
from datetime import time
from decimal import Decimal
from typing import Any
from uuid import UUID

from pydantic import BaseModel
from pydantic import validator


class ResultTable(BaseModel):
    """Tabular result of a SQL query or a vectorstore search."""

    column_names: list[str]
    rows: list[list[Any]]
    truncated: bool = False

    @validator("rows")
    def rows_match_columns(cls, rows: list[list[Any]], values: dict) -> list[list[Any]]:
        width = len(values.get("column_names", []))
        for index, row in enumerate(rows):
            if len(row) != width:
                raise ValueError(f"row {index} has {len(row)} values, expected {width}")
        return rows

    def __len__(self) -> int:
        return len(self.rows)


class EncodableCell(BaseModel):
    """One non-null cell of an encodable column with its provenance."""

    class Config:
        frozen = True

    table: str
    column: str
    primary_key: str
    pdf_id: str
    page_number: int
    payload: str | tuple[int, ...]

    @property
    def triplet(self) -> tuple[str, str, str]:
        return (self.table, self.column, self.primary_key)


def normalize_value(value: Any) -> Any:
    """Convert engine values into plain JSON-friendly python values."""
    if isinstance(value, Decimal):
        return float(value)
    if isinstance(value, UUID):
        return str(value)
    if isinstance(value, (datetime, date, time)):
        return value.isoformat()
    if isinstance(value, (bytes, bytearray, memoryview)):
        return bytes(value).hex()
    if isinstance(value, (list, tuple)):
        return [normalize_value(item) for item in value]
    if isinstance(value, dict):
        return {str(key): normalize_value(item) for key, item in value.items()}
    return value
