# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from typing import Literal

from pydantic import BaseModel
from pydantic import Field

from ..store import ResultTable

# Flat charge against the turn budget for every image
IMAGE_TOKEN_COST = 1000


class ImagePayload(BaseModel):
    paper_id: str
    page_number: int
    bounding_box: list[float] = []
    width: int
    height: int
    png_base64: str = Field(..., repr=False)


class Observation(BaseModel):
    """What the agent sees after a non-terminal action."""

    kind: Literal["table", "image", "scalar", "error"]
    rendered: str
    token_count: int
    table: ResultTable | None = None
    image: ImagePayload | None = None
    scalar: str | None = None
    error: str | None = None

    @property
    def is_error(self) -> bool:
        return self.kind == "error"
