# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""OpenAI-compatible chat completion and embedding endpoints over HTTPX."""
import json
from typing import Any
from typing import NoReturn

import httpx
import structlog
from pydantic import SecretStr

from ..exceptions import AuthError
from ..exceptions import GatewayProtocolError
from ..exceptions import NetworkError
from ..tokens import count_tokens
from .base import BaseGateway
from .base import error_for_status
from .embedder import HashEmbedder
from .models import ChatMessage
from .models import Completion
from .models import GenParams

logger = structlog.get_logger()


class HTTPGateway(BaseGateway):
    def __init__(
        self,
        base_url: str,
        api_key: SecretStr | None,
        default_params: GenParams,
        timeout: float = 120.0,
        client: httpx.AsyncClient | None = None,
        vision_capable: bool = False,
        max_retries: int = 3,
        wait_multiplier: float = 2.0,
        wait_max: float = 30.0,
        embedder: HashEmbedder | None = None,
    ) -> None:
        """Gateway for a live endpoint.

        Args:
            base_url: API root, e.g. 'https://api.openai.com/v1'.
            api_key: Bearer token. Calls fail with `AuthError` without one.
            default_params: Generation parameters used when a call gives none.
            timeout: Request timeout in seconds.
            client: Optional preconfigured client, mostly for tests.
            vision_capable: Whether the model accepts image parts.
            max_retries: Retries of transient failures.
            wait_multiplier: Exponential backoff multiplier.
            wait_max: Backoff ceiling.
            embedder: Local hash embedder to use instead of the embeddings API.
        """
        super().__init__(
            default_params,
            vision_capable=vision_capable,
            max_retries=max_retries,
            wait_multiplier=wait_multiplier,
            wait_max=wait_max,
            embedder=embedder,
        )
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.client = client or httpx.AsyncClient(timeout=timeout)

    async def aclose(self) -> None:
        await self.client.aclose()

    def _headers(self) -> dict[str, str]:
        if self.api_key is None:
            raise AuthError("No API key configured, set DOCQA_GATEWAY__API_KEY")
        return {"Authorization": f"Bearer {self.api_key.get_secret_value()}"}

    @staticmethod
    def _construct_payload(
        messages: list[ChatMessage], params: GenParams
    ) -> dict[str, Any]:
        payload = {
            "model": params.model,
            "messages": [message.dict() for message in messages],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_output_tokens,
        }
        logger.debug("Chat payload", model=params.model, messages=len(messages))
        return payload

    @staticmethod
    def _raise_response_error(response: httpx.Response, reason: str) -> NoReturn:
        """Raise the gateway error matching the response.

        HTTP error statuses map through `error_for_status`, anything else is a
        protocol error.
        """
        if response.is_error:
            try:
                message = response.json()["error"]["message"]
            except (ValueError, KeyError, TypeError):
                message = response.text
            raise error_for_status(response.status_code, str(message))
        raise GatewayProtocolError(f"{reason}: {response.text[:200]}")

    def _decode_response(self, response: httpx.Response) -> dict[str, Any]:
        logger.debug("Gateway response", status=response.status_code)
        if response.is_error:
            self._raise_response_error(response, "Error status")
        try:
            result = response.json()
        except json.JSONDecodeError:
            self._raise_response_error(response, "Not a JSON answer")
        if not isinstance(result, dict):
            self._raise_response_error(response, "Answer is not a JSON object")
        return result

    async def _post(self, path: str, payload: dict[str, Any]) -> dict[str, Any]:
        headers = self._headers()
        try:
            response = await self.client.post(
                f"{self.base_url}/{path}", json=payload, headers=headers
            )
        except httpx.TransportError as error:
            raise NetworkError(str(error) or type(error).__name__) from error
        return self._decode_response(response)

    async def _chat(self, messages: list[ChatMessage], params: GenParams) -> Completion:
        result = await self._post(
            "chat/completions", self._construct_payload(messages, params)
        )
        try:
            text = result["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as error:
            raise GatewayProtocolError(f"No completion in answer: {error}") from error
        usage = result.get("usage") or {}
        return Completion(
            text=text,
            prompt_tokens=usage.get(
                "prompt_tokens", sum(count_tokens(m.text) for m in messages)
            ),
            completion_tokens=usage.get("completion_tokens", count_tokens(text)),
        )

    async def _embed(self, model: str, texts: list[str]) -> list[list[float]]:
        result = await self._post("embeddings", {"model": model, "input": texts})
        try:
            data = sorted(result["data"], key=lambda item: item["index"])
            vectors = [item["embedding"] for item in data]
        except (KeyError, TypeError) as error:
            raise GatewayProtocolError(f"No embeddings in answer: {error}") from error
        if len(vectors) != len(texts):
            raise GatewayProtocolError(
                f"Expected {len(texts)} embeddings but got {len(vectors)}"
            )
        if len({len(vector) for vector in vectors}) > 1:
            raise GatewayProtocolError("Embeddings have differing dimensions")
        return vectors
