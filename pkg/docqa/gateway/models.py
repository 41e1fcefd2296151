# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import base64
from typing import Any
from typing import Literal

from pydantic import BaseModel
from pydantic import confloat
from pydantic import Field
from pydantic import PositiveInt


class GenParams(BaseModel):
    class Config:
        frozen = True

    model: str
    temperature: confloat(ge=0) = 0.7  # type: ignore[valid-type]
    top_p: confloat(gt=0, le=1) = 0.95  # type: ignore[valid-type]
    max_output_tokens: PositiveInt = 2048


class TextPart(BaseModel):
    type: Literal["text"] = "text"
    text: str


class ImageURL(BaseModel):
    url: str


class ImagePart(BaseModel):
    type: Literal["image_url"] = "image_url"
    image_url: ImageURL

    @classmethod
    def from_png(cls, data: bytes) -> "ImagePart":
        encoded = base64.b64encode(data).decode("ascii")
        return cls(image_url=ImageURL(url=f"data:image/png;base64,{encoded}"))


ContentPart = TextPart | ImagePart


class ChatMessage(BaseModel):
    role: Literal["system", "user", "assistant"]
    content: str | list[ContentPart]

    @property
    def has_images(self) -> bool:
        return isinstance(self.content, list) and any(
            isinstance(part, ImagePart) for part in self.content
        )

    @property
    def text(self) -> str:
        """Text content with image parts left out."""
        if isinstance(self.content, str):
            return self.content
        return "\n".join(
            part.text for part in self.content if isinstance(part, TextPart)
        )

    def for_trace(self) -> dict[str, Any]:
        """Serialize for the episode trace, eliding image payloads."""
        if isinstance(self.content, str):
            return {"role": self.role, "content": self.content}
        parts: list[dict[str, Any]] = []
        for part in self.content:
            if isinstance(part, TextPart):
                parts.append(part.dict())
            else:
                parts.append({"type": "image_url", "bytes": len(part.image_url.url)})
        return {"role": self.role, "content": parts}


class Completion(BaseModel):
    text: str
    prompt_tokens: int
    completion_tokens: int


class CallRecord(BaseModel):
    """One gateway call, retries included, as written to the episode trace."""

    kind: Literal["chat", "embed"]
    model: str
    request: list[dict[str, Any]] | list[str] = Field(default_factory=list)
    response: str | None = None
    prompt_tokens: int = 0
    completion_tokens: int = 0
    attempts: int = 1
    duration: float = 0.0
    error: str | None = None
