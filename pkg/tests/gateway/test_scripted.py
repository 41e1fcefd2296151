# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import json
from pathlib import Path

import anyio
import numpy as np
import pytest
from pydantic import SecretStr

from ..utils import scripted
from docqa.config import GatewaySettings
from docqa.exceptions import AuthError
from docqa.exceptions import ConfigurationError
from docqa.exceptions import ScriptExhaustedError
from docqa.exceptions import ScriptMismatchError
from docqa.exceptions import TransientGatewayError
from docqa.gateway import build_gateway
from docqa.gateway import CallRecord
from docqa.gateway import ChatMessage
from docqa.gateway import HashEmbedder
from docqa.gateway import HTTPGateway
from docqa.gateway import ScriptedGateway
from docqa.gateway import ScriptEntry


def user(text: str) -> list[ChatMessage]:
    return [ChatMessage(role="user", content=text)]


async def test_replies_in_order() -> None:
    """Happy-path test.

    Tests that:
    * Replies are consumed in order.
    * Every prompt is recorded.
    * The trace records the replies.
    """
    gateway = scripted("first", ("question two", "second"))
    trace: list[CallRecord] = []
    assert await gateway.chat(user("question one"), trace=trace) == "first"
    assert await gateway.chat(user("question two"), trace=trace) == "second"
    assert gateway.remaining == 0
    assert gateway.prompts == ["question one", "question two"]
    assert [record.response for record in trace] == ["first", "second"]


async def test_exhausted() -> None:
    gateway = scripted("only")
    await gateway.chat(user("hello"))
    with pytest.raises(ScriptExhaustedError):
        await gateway.chat(user("hello again"))


async def test_default_reply() -> None:
    gateway = scripted("only", default_reply="fallback")
    await gateway.chat(user("hello"))
    assert await gateway.chat(user("hello again")) == "fallback"
    assert await gateway.chat(user("and again")) == "fallback"


async def test_mismatch() -> None:
    gateway = scripted(("pub_year", "answer"))
    with pytest.raises(ScriptMismatchError) as exc_info:
        await gateway.chat(user("nothing about years"))
    assert "'pub_year'" in str(exc_info.value)


async def test_scripted_status_is_retried() -> None:
    """A scripted 503 is retried and consumes one entry per attempt."""
    gateway = ScriptedGateway(
        [
            ScriptEntry(status=503, reply="overloaded"),
            ScriptEntry(reply="recovered"),
        ]
    )
    trace: list[CallRecord] = []
    assert await gateway.chat(user("hi"), trace=trace) == "recovered"
    assert trace[0].attempts == 2


async def test_scripted_status_exhausts_retries() -> None:
    gateway = ScriptedGateway(
        [ScriptEntry(status=503), ScriptEntry(status=503)], max_retries=1
    )
    with pytest.raises(TransientGatewayError):
        await gateway.chat(user("hi"))
    assert gateway.remaining == 0


async def test_scripted_auth_error_is_not_retried() -> None:
    gateway = ScriptedGateway([ScriptEntry(status=401), ScriptEntry(reply="never")])
    with pytest.raises(AuthError):
        await gateway.chat(user("hi"))
    assert gateway.remaining == 1


async def test_concurrent_chats_consume_each_entry_once() -> None:
    gateway = scripted(*[f"reply {number}" for number in range(20)])
    replies: list[str] = []

    async def ask() -> None:
        replies.append(await gateway.chat(user("hi")))

    async with anyio.create_task_group() as task_group:
        for _ in range(20):
            task_group.start_soon(ask)
    assert sorted(replies) == sorted(f"reply {number}" for number in range(20))


async def test_embed_is_deterministic() -> None:
    """Tests that:
    * The hash embedder gives the same unit vectors for the same texts.
    * Different models project differently.
    """
    gateway = scripted()
    first = await gateway.embed("model-a", ["contrastive learning", "label biases"])
    again = await gateway.embed("model-a", ["contrastive learning", "label biases"])
    other = await gateway.embed("model-b", ["contrastive learning"])
    assert first == again
    assert first[0] != other[0]
    for vector in first:
        assert np.linalg.norm(vector) == pytest.approx(1.0)
    assert len(first[0]) == 64


def test_image_embeddings() -> None:
    embedder = HashEmbedder(16)
    gateway = scripted(embedder=embedder)
    vectors = gateway.embed_images("clip", [b"png one", b"png two"])
    assert len(vectors) == 2
    assert all(len(vector) == 16 for vector in vectors)
    assert gateway.embed_images("clip", [b"png one"]) == vectors[:1]
    assert gateway.embed_image_queries("clip", ["a figure"]) == embedder.embed_texts(
        "clip", ["a figure"]
    )


def test_from_file(tmp_path: Path) -> None:
    path = tmp_path / "replay.json"
    path.write_text(
        json.dumps(
            [
                ["expected", "first"],
                {"reply": "second"},
                {"status": 429, "reply": "slow down"},
            ]
        )
    )
    gateway = ScriptedGateway.from_file(path)
    assert gateway.script == [
        ScriptEntry(expect="expected", reply="first"),
        ScriptEntry(reply="second"),
        ScriptEntry(status=429, reply="slow down"),
    ]


@pytest.mark.parametrize("content", ["not json", '{"reply": "x"}', '[{"status": "x"}]'])
def test_from_file_errors(tmp_path: Path, content: str) -> None:
    path = tmp_path / "replay.json"
    path.write_text(content)
    with pytest.raises(ConfigurationError):
        ScriptedGateway.from_file(path)


def test_from_missing_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigurationError):
        ScriptedGateway.from_file(tmp_path / "missing.json")


def test_build_gateway(tmp_path: Path) -> None:
    """Tests that:
    * The http backend is the default and carries the settings.
    * The scripted backend reads its replay file.
    * The scripted backend without a replay file is a configuration error.
    """
    http_gateway = build_gateway(
        GatewaySettings(api_key=SecretStr("hunter2"), model="gpt-4o", max_retries=5)
    )
    assert isinstance(http_gateway, HTTPGateway)
    assert http_gateway.base_url == "https://api.openai.com/v1"
    assert http_gateway.default_params.model == "gpt-4o"
    assert http_gateway.max_retries == 5
    assert isinstance(http_gateway.embedder, HashEmbedder)

    api_gateway = build_gateway(GatewaySettings(embed_backend="api"))
    assert api_gateway.embedder is None

    replay = tmp_path / "replay.json"
    replay.write_text(json.dumps(["[Thought]: done"]))
    with pytest.raises(ConfigurationError):
        build_gateway(GatewaySettings(backend="scripted", replay_path=replay))
    replay.write_text(json.dumps([{"reply": "[Thought]: done"}]))
    scripted_gateway = build_gateway(
        GatewaySettings(backend="scripted", replay_path=replay, vision_capable=True)
    )
    assert isinstance(scripted_gateway, ScriptedGateway)
    assert scripted_gateway.remaining == 1
    assert scripted_gateway.vision_capable

    with pytest.raises(ConfigurationError) as exc_info:
        build_gateway(GatewaySettings(backend="scripted"))
    assert "DOCQA_GATEWAY__REPLAY_PATH" in str(exc_info.value)
