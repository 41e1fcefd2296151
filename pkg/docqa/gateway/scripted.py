# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Deterministic replay backend.

A replay file is a JSON list. Each item is either an `[expect, reply]` pair or an
object `{"expect": ..., "reply": ..., "status": ...}`. Items are consumed in order;
`expect` must be a substring of the conversation sent, and a `status` makes the
item fail like the endpoint would with that HTTP status.
"""
import json
import threading
from pathlib import Path
from typing import Any

import structlog
from pydantic import BaseModel
from pydantic import parse_obj_as

from ..exceptions import ConfigurationError
from ..exceptions import ScriptExhaustedError
from ..exceptions import ScriptMismatchError
from ..tokens import count_tokens
from .base import BaseGateway
from .base import error_for_status
from .embedder import HashEmbedder
from .models import ChatMessage
from .models import Completion
from .models import GenParams

logger = structlog.get_logger()


class ScriptEntry(BaseModel):
    expect: str = ""
    reply: str = ""
    status: int | None = None

    @classmethod
    def parse_item(cls, item: Any) -> "ScriptEntry":
        if isinstance(item, list) and len(item) == 2:
            return cls(expect=item[0], reply=item[1])
        return parse_obj_as(cls, item)


class ScriptedGateway(BaseGateway):
    def __init__(
        self,
        script: list[ScriptEntry] | None = None,
        default_reply: str | None = None,
        default_params: GenParams | None = None,
        vision_capable: bool = False,
        max_retries: int = 3,
        wait_multiplier: float = 0.0,
        wait_max: float = 0.0,
        embedder: HashEmbedder | None = None,
    ) -> None:
        """Gateway replaying a fixed script.

        Args:
            script: Entries consumed one per chat attempt.
            default_reply: Reply once the script is used up, instead of failing.
            default_params: Generation parameters used when a call gives none.
            vision_capable: Whether to accept image parts.
            max_retries: Retries of scripted transient failures.
            wait_multiplier: Backoff multiplier, zero to retry at once.
            wait_max: Backoff ceiling.
            embedder: Embedder for `embed`, the hash projection by default.
        """
        super().__init__(
            default_params or GenParams(model="scripted"),
            vision_capable=vision_capable,
            max_retries=max_retries,
            wait_multiplier=wait_multiplier,
            wait_max=wait_max,
            embedder=embedder or HashEmbedder(),
        )
        self.script = list(script or [])
        self.default_reply = default_reply
        self.position = 0
        self.prompts: list[str] = []
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: Path, **kwargs: Any) -> "ScriptedGateway":
        try:
            items = json.loads(path.read_text(encoding="utf-8"))
            if not isinstance(items, list):
                raise ValueError("a replay file holds a JSON list")
            script = [ScriptEntry.parse_item(item) for item in items]
        except (OSError, ValueError) as error:
            raise ConfigurationError(f"Unusable replay file {path}: {error}") from error
        return cls(script, **kwargs)

    @property
    def remaining(self) -> int:
        return len(self.script) - self.position

    def _next_entry(self, prompt: str) -> ScriptEntry:
        with self._lock:
            self.prompts.append(prompt)
            if self.position >= len(self.script):
                if self.default_reply is not None:
                    return ScriptEntry(reply=self.default_reply)
                raise ScriptExhaustedError(
                    f"Replay script exhausted after {len(self.script)} replies"
                )
            entry = self.script[self.position]
            self.position += 1
        if entry.expect not in prompt:
            raise ScriptMismatchError(
                f"Reply {self.position} expected {entry.expect!r} in the prompt"
            )
        return entry

    async def _chat(self, messages: list[ChatMessage], params: GenParams) -> Completion:
        prompt = "\n".join(message.text for message in messages)
        entry = self._next_entry(prompt)
        if entry.status is not None:
            message = entry.reply or f"status {entry.status}"
            raise error_for_status(entry.status, message)
        logger.debug("Scripted reply", position=self.position)
        return Completion(
            text=entry.reply,
            prompt_tokens=count_tokens(prompt),
            completion_tokens=count_tokens(entry.reply),
        )

    async def _embed(self, model: str, texts: list[str]) -> list[list[float]]:
        # Unreachable while an embedder is set, which the constructor ensures
        assert self.embedder is not None
        return self.embedder.embed_texts(model, texts)
