# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
# pylint: disable=redefined-outer-name
"""This module contains pytest specific code, fixtures and helpers."""
import os
from collections.abc import Iterator
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import pytest
import structlog
from hypothesis import settings
from more_itertools import one
from structlog.testing import LogCapture

from .utils import scripted
from .utils import write_acl_bundles
from docqa.ingestion import ChunkingConfig
from docqa.ingestion import load_bundle
from docqa.ingestion import populate
from docqa.store import DocumentStore
from docqa.store import RasterStore
from docqa.vectorstore import encode_collections
from docqa.vectorstore import VectorIndex

settings.register_profile("ci", max_examples=100, deadline=None)
settings.register_profile("deep", max_examples=10000, deadline=None)
settings.register_profile("dev", max_examples=100, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture
def log_output() -> LogCapture:
    """Pytest fixture to construct an LogCapture."""
    return LogCapture()


@pytest.fixture(autouse=True)
def fixture_configure_structlog(log_output: LogCapture) -> None:
    """Pytest autofixture to capture all logs."""
    structlog.configure(processors=[log_output])


@pytest.fixture(autouse=True)
def load_marked_envvars(
    monkeypatch: pytest.MonkeyPatch,
    request: Any,
) -> Iterator[None]:
    """Fixture to inject environmental variable via pytest.marks.

    Example:
        ```
        @pytest.mark.envvar({"DOCQA_LOG_LEVEL": "DEBUG"})
        def test_load_marked_envvars() -> None:
            assert os.environ.get("DOCQA_LOG_LEVEL") == "DEBUG"
        ```
    """
    # Settings must never pick up the developer's environment
    for key in list(os.environ):
        if key.startswith("DOCQA_"):
            monkeypatch.delenv(key)

    envvars: dict[str, str] = {}
    for mark in request.node.iter_markers("envvar"):
        if not mark.args:
            pytest.fail("envvar mark must take an argument")
        if len(mark.args) > 1:
            pytest.fail("envvar mark must take at most one argument")
        argument = one(mark.args)
        if not isinstance(argument, Mapping):
            pytest.fail("envvar mark argument must be a mapping")
        if any(not isinstance(key, str) for key in argument.keys()):
            pytest.fail("envvar mapping keys must be strings")
        if any(not isinstance(value, str) for value in argument.values()):
            pytest.fail("envvar mapping values must be strings")
        envvars.update(**argument)
    for key, value in envvars.items():
        monkeypatch.setenv(key, value)
    yield


@pytest.fixture
def bundle_paths(tmp_path: Path) -> list[Path]:
    """The three ACL bundles written to disk."""
    return write_acl_bundles(tmp_path / "bundles")


@pytest.fixture
def store(tmp_path: Path) -> Iterator[DocumentStore]:
    """An empty store with the schema created."""
    with DocumentStore(tmp_path / "docqa.duckdb") as document_store:
        document_store.initialize_schema()
        yield document_store


@pytest.fixture
def rasters(tmp_path: Path) -> RasterStore:
    return RasterStore(tmp_path / "rasters")


@pytest.fixture
def populated_store(
    store: DocumentStore, rasters: RasterStore, bundle_paths: list[Path]
) -> DocumentStore:
    """The store holding the three ACL papers, without summaries."""
    cfg = ChunkingConfig(chunk_size_tokens=32)
    for path in bundle_paths:
        populate(store, rasters, load_bundle(path), cfg)
    return store


@pytest.fixture
async def index(populated_store: DocumentStore, rasters: RasterStore) -> VectorIndex:
    """Every collection encoded over the populated store."""
    vector_index = VectorIndex(populated_store.catalog)
    await encode_collections(vector_index, populated_store, rasters, scripted())
    return vector_index
