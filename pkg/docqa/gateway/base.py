# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Retrying, tracing chat and embedding client shared by all backends."""
import time
from abc import ABC
from abc import abstractmethod
from collections.abc import Awaitable
from collections.abc import Callable
from typing import TypeVar

import structlog
from tenacity import AsyncRetrying
from tenacity import retry_if_exception_type
from tenacity import RetryCallState
from tenacity import stop_after_attempt
from tenacity import wait_random_exponential

from ..exceptions import AuthError
from ..exceptions import ContextOverflowError
from ..exceptions import GatewayError
from ..exceptions import NetworkError
from ..exceptions import RateLimitedError
from ..exceptions import TransientGatewayError
from ..exceptions import VisionNotSupportedError
from ..metrics import gateway_calls
from ..metrics import gateway_retries
from ..metrics import gateway_tokens
from ..tokens import count_tokens
from .embedder import HashEmbedder
from .models import CallRecord
from .models import ChatMessage
from .models import Completion
from .models import GenParams

logger = structlog.get_logger()

RETRYABLE = (RateLimitedError, TransientGatewayError, NetworkError)

T = TypeVar("T")


def error_for_status(status: int, message: str) -> GatewayError:
    """Map an HTTP error status onto the gateway error hierarchy."""
    if status in (401, 403):
        return AuthError(message)
    if status == 429:
        return RateLimitedError(message)
    if status >= 500:
        return TransientGatewayError(message)
    if status in (400, 413) and "context" in message.lower():
        return ContextOverflowError(message)
    return GatewayError(f"HTTP {status}: {message}")


class BaseGateway(ABC):
    """Chat and embedding access with retries, metrics and call records.

    Subclasses implement a single attempt in `_chat` and `_embed`; this class
    retries rate limits, server errors and network failures with exponential
    backoff, and appends one `CallRecord` per call to the given trace.
    """

    def __init__(
        self,
        default_params: GenParams,
        vision_capable: bool = False,
        max_retries: int = 3,
        wait_multiplier: float = 2.0,
        wait_max: float = 30.0,
        embedder: HashEmbedder | None = None,
    ) -> None:
        self.default_params = default_params
        self.vision_capable = vision_capable
        self.max_retries = max_retries
        self.wait_multiplier = wait_multiplier
        self.wait_max = wait_max
        self.embedder = embedder
        self.image_embedder = embedder or HashEmbedder()

    @abstractmethod
    async def _chat(self, messages: list[ChatMessage], params: GenParams) -> Completion:
        """Make a single chat completion attempt."""

    @abstractmethod
    async def _embed(self, model: str, texts: list[str]) -> list[list[float]]:
        """Make a single embedding attempt."""

    async def aclose(self) -> None:
        pass

    async def __aenter__(self) -> "BaseGateway":
        return self

    async def __aexit__(self, *_: object) -> None:
        await self.aclose()

    def _retrying(self, kind: str) -> AsyncRetrying:
        def after(retry_state: RetryCallState) -> None:
            gateway_retries.labels(kind=kind).inc()
            logger.warning(
                "Gateway call failed, retrying",
                kind=kind,
                attempt=retry_state.attempt_number,
                max_attempts=self.max_retries + 1,
                error=str(retry_state.outcome.exception())
                if retry_state.outcome
                else None,
            )

        return AsyncRetrying(
            retry=retry_if_exception_type(RETRYABLE),
            reraise=True,
            wait=wait_random_exponential(
                multiplier=self.wait_multiplier, max=self.wait_max
            ),
            stop=stop_after_attempt(self.max_retries + 1),
            after=after,
        )

    async def _call(
        self, kind: str, record: CallRecord, attempt: Callable[[], Awaitable[T]]
    ) -> T:
        start = time.monotonic()
        try:
            async for retry_attempt in self._retrying(kind):
                with retry_attempt:
                    record.attempts = retry_attempt.retry_state.attempt_number
                    result = await attempt()
        except GatewayError as error:
            record.error = f"{type(error).__name__}: {error}"
            gateway_calls.labels(kind=kind, outcome="error").inc()
            raise
        finally:
            record.duration = time.monotonic() - start
        gateway_calls.labels(kind=kind, outcome="success").inc()
        return result

    async def chat(
        self,
        messages: list[ChatMessage],
        params: GenParams | None = None,
        trace: list[CallRecord] | None = None,
    ) -> str:
        """Return the first completion for the messages.

        Args:
            messages: The conversation so far.
            params: Generation parameters, defaulting to the configured ones.
            trace: Episode trace which receives a record of this call.

        Raises:
            VisionNotSupportedError: Image parts for a model without vision.
            GatewayError: Subclasses per failure, after retries where sensible.

        Returns:
            The completion text.
        """
        params = params or self.default_params
        if not self.vision_capable and any(m.has_images for m in messages):
            raise VisionNotSupportedError()

        record = CallRecord(
            kind="chat",
            model=params.model,
            request=[message.for_trace() for message in messages],
        )
        if trace is not None:
            trace.append(record)
        completion = await self._call(
            "chat", record, lambda: self._chat(messages, params)
        )
        record.response = completion.text
        record.prompt_tokens = completion.prompt_tokens
        record.completion_tokens = completion.completion_tokens
        gateway_tokens.labels(direction="prompt").inc(completion.prompt_tokens)
        gateway_tokens.labels(direction="completion").inc(completion.completion_tokens)
        return completion.text

    async def embed(
        self,
        model: str,
        texts: list[str],
        trace: list[CallRecord] | None = None,
    ) -> list[list[float]]:
        """Embed texts in one request, one vector per text in input order."""
        record = CallRecord(kind="embed", model=model, request=list(texts))
        if trace is not None:
            trace.append(record)
        record.prompt_tokens = sum(map(count_tokens, texts))
        if not texts:
            return []
        if self.embedder is not None:
            vectors = self.embedder.embed_texts(model, texts)
        else:
            vectors = await self._call(
                "embed", record, lambda: self._embed(model, texts)
            )
        gateway_tokens.labels(direction="prompt").inc(record.prompt_tokens)
        return vectors

    def embed_images(self, model: str, images: list[bytes]) -> list[list[float]]:
        """Embed cropped rasters.

        The wire protocol has no image embeddings, so every backend uses the hash
        projection for the image modality.
        """
        return self.image_embedder.embed_images(model, images)

    def embed_image_queries(self, model: str, texts: list[str]) -> list[list[float]]:
        """Embed text queries into the vector space of an image collection."""
        return self.image_embedder.embed_texts(model, texts)
