# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Chat and embedding endpoints."""
from ..config import GatewaySettings
from ..exceptions import ConfigurationError
from .base import BaseGateway
from .embedder import HashEmbedder
from .http import HTTPGateway
from .models import CallRecord
from .models import ChatMessage
from .models import GenParams
from .models import ImagePart
from .models import TextPart
from .scripted import ScriptedGateway
from .scripted import ScriptEntry

__all__ = [
    "BaseGateway",
    "CallRecord",
    "ChatMessage",
    "GenParams",
    "HTTPGateway",
    "HashEmbedder",
    "ImagePart",
    "ScriptEntry",
    "ScriptedGateway",
    "TextPart",
    "build_gateway",
]


def build_gateway(settings: GatewaySettings) -> BaseGateway:
    """Construct the configured gateway backend.

    Raises:
        ConfigurationError: If the scripted backend has no replay file.
    """
    params = GenParams(
        model=settings.model,
        temperature=settings.temperature,
        top_p=settings.top_p,
        max_output_tokens=settings.max_output_tokens,
    )
    embedder = (
        HashEmbedder(settings.embed_dimension)
        if settings.embed_backend == "hash"
        else None
    )
    if settings.backend == "scripted":
        if settings.replay_path is None:
            raise ConfigurationError(
                "The scripted gateway needs a replay file, "
                "set DOCQA_GATEWAY__REPLAY_PATH"
            )
        return ScriptedGateway.from_file(
            settings.replay_path,
            default_params=params,
            vision_capable=settings.vision_capable,
            max_retries=settings.max_retries,
            embedder=embedder,
        )
    return HTTPGateway(
        str(settings.base_url),
        settings.api_key,
        params,
        timeout=settings.timeout,
        vision_capable=settings.vision_capable,
        max_retries=settings.max_retries,
        wait_multiplier=settings.retry_wait_multiplier,
        wait_max=settings.retry_wait_max,
        embedder=embedder,
    )
