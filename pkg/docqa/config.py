# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Settings handling.

Precedence, highest first: explicit overrides (CLI flags), environment variables
(`DOCQA_` prefixed, `__` for nesting), the TOML config file, defaults.
"""
import os
import tomllib
from contextvars import ContextVar
from functools import lru_cache
from pathlib import Path
from typing import Any
from typing import Literal

from pydantic import AnyHttpUrl
from pydantic import BaseModel
from pydantic import BaseSettings
from pydantic import Field
from pydantic import parse_obj_as
from pydantic import PositiveFloat
from pydantic import PositiveInt
from pydantic import SecretStr
from pydantic.env_settings import SettingsSourceCallable

from .choices import ActionFormat
from .choices import ChunkView
from .choices import ObservationFormat
from .tokens import MIN_TOKEN_BUDGET

CONFIG_FILE_ENV = "DOCQA_CONFIG_FILE"

_config_file: ContextVar[Path | None] = ContextVar("_config_file", default=None)


@lru_cache(maxsize=None)
def _read_config_file(path: Path) -> dict[str, Any]:
    """Parse a TOML config file.

    *Note: The result is cached, so a file rewritten after the first read is not
    picked up until `_read_config_file.cache_clear()` is called.*
    """
    with path.open("rb") as config_file:
        return tomllib.load(config_file)


def _toml_settings_source(_: BaseSettings) -> dict[str, Any]:
    path = _config_file.get()
    if path is None and os.environ.get(CONFIG_FILE_ENV):
        path = Path(os.environ[CONFIG_FILE_ENV])
    if path is None or not path.exists():
        return {}
    return _read_config_file(path.absolute())


# pylint: disable=too-few-public-methods
class StoreSettings(BaseModel):
    """Settings for the relational store and the files stored next to it."""

    class Config:
        frozen = True

    path: Path = Field(Path("docqa.duckdb"), description="DuckDB store file.")
    raster_dir: Path | None = Field(
        None, description="Page raster directory, defaults to `<path>.rasters`."
    )
    index_dir: Path | None = Field(
        None, description="Vector index directory, defaults to `<path>.index`."
    )
    db_name: str = Field("ai_research", description="Database name in prompts.")
    row_cap: PositiveInt = Field(50, description="Rows kept per SQL observation.")
    sql_timeout: PositiveFloat = Field(
        30.0, description="Seconds before agent SQL is interrupted."
    )

    def resolved_raster_dir(self) -> Path:
        return self.raster_dir or self.path.with_name(self.path.name + ".rasters")

    def resolved_index_dir(self) -> Path:
        return self.index_dir or self.path.with_name(self.path.name + ".index")


# pylint: disable=too-few-public-methods
class GatewaySettings(BaseModel):
    """Settings for the chat and embedding endpoints."""

    class Config:
        frozen = True

    backend: Literal["http", "scripted"] = Field(
        "http", description="Live OpenAI-compatible endpoint or a replay file."
    )
    base_url: AnyHttpUrl = Field(
        parse_obj_as(AnyHttpUrl, "https://api.openai.com/v1"),
        description="Base URL of the OpenAI-compatible API.",
    )
    api_key: SecretStr | None = Field(None, description="Bearer token for the API.")
    model: str = Field("gpt-4o-mini", description="Chat model id.")
    vision_capable: bool = Field(
        False, description="Whether the chat model accepts image parts."
    )
    embed_backend: Literal["hash", "api"] = Field(
        "hash", description="Deterministic hash projection or the embeddings API."
    )
    embed_dimension: PositiveInt = Field(
        64, description="Dimension of the hash projection embedder."
    )
    replay_path: Path | None = Field(
        None, description="Replay file for the scripted backend."
    )
    timeout: PositiveFloat = Field(120.0, description="HTTP timeout in seconds.")
    max_retries: int = Field(3, ge=0, description="Retries of transient failures.")
    retry_wait_multiplier: float = Field(
        2.0, ge=0, description="Exponential backoff multiplier in seconds."
    )
    retry_wait_max: float = Field(30.0, ge=0, description="Backoff ceiling.")
    max_output_tokens: PositiveInt = Field(2048, description="Completion limit.")
    temperature: float = Field(0.7, ge=0, description="Sampling temperature.")
    top_p: float = Field(0.95, gt=0, le=1, description="Nucleus sampling mass.")
    judge_model: str = Field("gpt-4o", description="Model used by LLM judges.")


# pylint: disable=too-few-public-methods
class IngestionSettings(BaseModel):
    class Config:
        frozen = True

    chunk_size: PositiveInt = Field(512, description="Tokens per chunk.")
    view: ChunkView = Field(
        ChunkView.fixed_window, description="Which view fills the chunks table."
    )
    summaries: bool = Field(True, description="Generate LLM summaries at ingest.")


# pylint: disable=too-few-public-methods
class VectorStoreSettings(BaseModel):
    class Config:
        frozen = True

    hard_limit: PositiveInt = Field(30, description="Upper bound on search limits.")
    image_text_queries: bool = Field(
        False,
        description="Route text queries to image collections through the paired "
        "text encoder.",
    )
    encode_batch_size: PositiveInt = Field(
        100, description="Texts per embedding request."
    )


# pylint: disable=too-few-public-methods
class AgentSettings(BaseModel):
    class Config:
        frozen = True

    action_format: ActionFormat = Field(ActionFormat.markdown)
    observation_format: ObservationFormat = Field(ObservationFormat.json)
    max_turns: PositiveInt = Field(20, description="Interaction turn cap.")
    per_turn_token_budget: int = Field(
        5000, ge=MIN_TOKEN_BUDGET, description="Token budget for each observation."
    )
    classic_top_k: PositiveInt = Field(4, description="Chunks for classic RAG.")
    full_text_cutoff: PositiveInt = Field(
        5000, description="Token cutoff for the full-text baseline."
    )


# pylint: disable=too-few-public-methods
class EvaluationSettings(BaseModel):
    class Config:
        frozen = True

    judge_concurrency: PositiveInt = Field(
        4, description="Concurrent LLM judge calls during bench."
    )


# pylint: disable=too-few-public-methods
class Settings(BaseSettings):
    """Settings for DocQA."""

    class Config:
        """Settings are frozen."""

        frozen = True
        env_prefix = "DOCQA_"
        env_nested_delimiter = "__"

        @classmethod
        def customise_sources(
            cls,
            init_settings: SettingsSourceCallable,
            env_settings: SettingsSourceCallable,
            file_secret_settings: SettingsSourceCallable,
        ) -> tuple[SettingsSourceCallable, ...]:
            return (
                init_settings,
                env_settings,
                _toml_settings_source,
                file_secret_settings,
            )

    log_level: str = Field("INFO", description="Log level to configure.")
    json_logs: bool = Field(
        True, description="Whether to log in json format or for development."
    )

    store: StoreSettings = Field(default_factory=StoreSettings)
    gateway: GatewaySettings = Field(default_factory=GatewaySettings)
    ingestion: IngestionSettings = Field(default_factory=IngestionSettings)
    vectorstore: VectorStoreSettings = Field(default_factory=VectorStoreSettings)
    agent: AgentSettings = Field(default_factory=AgentSettings)
    evaluation: EvaluationSettings = Field(default_factory=EvaluationSettings)


def load_settings(config_file: Path | None = None, **overrides: Any) -> Settings:
    """Build settings from the config file, the environment and overrides.

    Example:
        ```python
        settings = load_settings(Path("docqa.toml"), store={"path": "papers.duckdb"})
        ```

    Args:
        config_file: Optional TOML file, otherwise `DOCQA_CONFIG_FILE` is consulted.
        **overrides: Highest priority values, nested as the settings are.

    Returns:
        The frozen settings.
    """
    token = _config_file.set(config_file)
    try:
        return Settings(**overrides)
    finally:
        _config_file.reset(token)
