# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Command line interface.

Exit codes: 0 on success, 1 when any task or paper failed, 2 on usage and
configuration errors.
"""
import json
from collections.abc import AsyncIterator
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import anyio
import click
import structlog
from tqdm import tqdm

from .agent import Agent
from .agent import MethodConfig
from .agent import read_trace
from .agent import resolve_method
from .agent import Trajectory
from .agent import write_trace
from .asyncio_utils import async_to_sync
from .choices import Method
from .choices import UNAVAILABLE_METHODS
from .config import load_settings
from .config import Settings
from .evaluation import aggregate_report
from .evaluation import EvalResult
from .evaluation import evaluate
from .evaluation import Judge
from .evaluation import load_tasks
from .evaluation import Report
from .evaluation import TaskExample
from .exceptions import ConfigurationError
from .exceptions import DocQAError
from .exceptions import EvaluationError
from .exceptions import GatewayError
from .exceptions import UnavailableMethodError
from .exceptions import UnknownCollectionError
from .gateway import BaseGateway
from .gateway import build_gateway
from .ingestion import ChunkingConfig
from .ingestion import ingest_bundle
from .logging import configure_logging
from .metrics import write_metrics
from .store import DocumentStore
from .store import RasterStore
from .vectorstore import encode_collections
from .vectorstore import select_collections
from .vectorstore import VectorIndex

logger = structlog.get_logger()

METHOD_NAMES = [method.value for method in Method] + sorted(UNAVAILABLE_METHODS)
DEFAULT_ANSWER_FORMAT = "Your answer should be a free-form text string."


@dataclass
class CliContext:
    settings: Settings
    quiet: bool


def _method(name: str) -> Method:
    try:
        return resolve_method(name)
    except UnavailableMethodError as error:
        raise click.UsageError(str(error))


def _open_store(settings: Settings, create: bool = False) -> DocumentStore:
    path = settings.store.path
    if not create and not path.exists():
        raise click.UsageError(f"No store at {path}, run `docqa ingest` first")
    return DocumentStore(
        path,
        db_name=settings.store.db_name,
        row_cap=settings.store.row_cap,
        sql_timeout=settings.store.sql_timeout,
        read_only=not create,
    )


def _load_index(settings: Settings, store: DocumentStore) -> VectorIndex:
    return VectorIndex.load(
        settings.store.resolved_index_dir(),
        store.catalog,
        hard_limit=settings.vectorstore.hard_limit,
        image_text_queries=settings.vectorstore.image_text_queries,
    )


@asynccontextmanager
async def _gateway(settings: Settings) -> AsyncIterator[BaseGateway]:
    try:
        gateway = build_gateway(settings.gateway)
    except ConfigurationError as error:
        raise click.UsageError(str(error))
    async with gateway:
        yield gateway


def _answer_text(answer: Any) -> str:
    if isinstance(answer, str):
        return answer
    return json.dumps(answer, ensure_ascii=False)


@click.group()
@click.option(
    "--config",
    "config_file",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="TOML config file, otherwise DOCQA_CONFIG_FILE.",
)
@click.option(
    "--store",
    "store_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="DuckDB store file.",
)
@click.option("--log-level", default=None, help="Log level to configure.")
@click.option("--quiet", is_flag=True, help="Hide progress bars.")
@click.pass_context
def cli(
    ctx: click.Context,
    config_file: Path | None,
    store_path: Path | None,
    log_level: str | None,
    quiet: bool,
) -> None:
    """Agentic question answering over parsed research papers."""
    overrides: dict[str, Any] = {}
    if store_path is not None:
        overrides["store"] = {"path": store_path}
    if log_level is not None:
        overrides["log_level"] = log_level
    try:
        settings = load_settings(config_file, **overrides)
    except ValueError as error:  # ValidationError or a malformed TOML file
        raise click.UsageError(f"Invalid settings: {error}")
    configure_logging(settings.log_level, settings.json_logs)
    ctx.obj = CliContext(settings=settings, quiet=quiet)


@cli.command()
@click.option(
    "--bundle",
    "bundles",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    multiple=True,
    required=True,
    help="Parsed paper bundle, repeatable.",
)
@click.option(
    "--summaries/--no-summaries",
    default=None,
    help="Generate LLM summaries, as configured by default.",
)
@click.option(
    "--chunk-size",
    type=click.IntRange(min=1),
    default=None,
    help="Tokens per chunk, as configured by default.",
)
@click.pass_obj
@async_to_sync
async def ingest(
    obj: CliContext,
    bundles: tuple[Path, ...],
    summaries: bool | None,
    chunk_size: int | None,
) -> None:
    """Load paper bundles into the store."""
    settings = obj.settings
    if summaries is None:
        summaries = settings.ingestion.summaries
    if chunk_size is None:
        chunk_size = settings.ingestion.chunk_size
    cfg = ChunkingConfig(chunk_size_tokens=chunk_size, view=settings.ingestion.view)
    failures = 0
    with _open_store(settings, create=True) as store:
        store.initialize_schema()
        rasters = RasterStore(settings.store.resolved_raster_dir())
        async with _gateway(settings) as gateway:
            for path in tqdm(bundles, desc="ingest", disable=obj.quiet):
                try:
                    await ingest_bundle(
                        path, store, rasters, cfg, gateway if summaries else None
                    )
                except DocQAError as error:
                    failures += 1
                    logger.error("Ingestion failed", path=str(path), error=str(error))
    if failures:
        raise SystemExit(1)


@cli.command()
@click.option(
    "--collections",
    "selectors",
    default=None,
    help="Comma separated collection names or encoder kinds (bm25, dense, "
    "image-dense), all by default.",
)
@click.option(
    "--embed-model",
    default=None,
    help="Encode only the dense text collection of this embedding model.",
)
@click.pass_obj
@async_to_sync
async def encode(
    obj: CliContext, selectors: str | None, embed_model: str | None
) -> None:
    """Encode the store's encodable cells into the vector collections."""
    settings = obj.settings
    with _open_store(settings) as store:
        rasters = RasterStore(settings.store.resolved_raster_dir())
        index = _load_index(settings, store)
        try:
            names = select_collections(index, (selectors or "").split(","), embed_model)
        except UnknownCollectionError as error:
            raise click.UsageError(str(error))
        async with _gateway(settings) as gateway:
            counts = await encode_collections(
                index,
                store,
                rasters,
                gateway,
                names=names,
                batch_size=settings.vectorstore.encode_batch_size,
                progress=not obj.quiet,
            )
        index.save(settings.store.resolved_index_dir())
    click.echo(json.dumps(counts, indent=2))


@cli.command()
@click.option("--question", required=True, help="The question to answer.")
@click.option(
    "--method",
    type=click.Choice(METHOD_NAMES),
    default=Method.neusym.value,
    show_default=True,
)
@click.option("--paper", "papers", multiple=True, help="Paper id, repeatable.")
@click.option("--answer-format", default=DEFAULT_ANSWER_FORMAT)
@click.option("--trajectory", "show_trajectory", is_flag=True)
@click.pass_obj
@async_to_sync
async def ask(
    obj: CliContext,
    question: str,
    method: str,
    papers: tuple[str, ...],
    answer_format: str,
    show_trajectory: bool,
) -> None:
    """Answer a single question and print the answer."""
    settings = obj.settings
    config = MethodConfig.from_settings(settings.agent, _method(method))
    task = TaskExample(
        uuid="ask",
        question=question,
        answer_format=answer_format,
        anchor_pdf=list(papers),
    )
    with _open_store(settings) as store:
        rasters = RasterStore(settings.store.resolved_raster_dir())
        index = _load_index(settings, store)
        async with _gateway(settings) as gateway:
            trajectory = await Agent(store, index, rasters, gateway).run_episode(
                task, config
            )
    if show_trajectory:
        click.echo(trajectory.json(exclude={"calls"}, indent=2), err=True)
    if trajectory.status == "failed":
        click.echo(f"Episode failed: {trajectory.error}", err=True)
        raise SystemExit(1)
    click.echo(_answer_text(trajectory.final_answer))


async def _grade(
    task: TaskExample, trajectory: Trajectory, judge: Judge
) -> tuple[EvalResult, bool]:
    """Evaluate an episode, returning the result and whether the task failed."""
    if trajectory.status == "failed":
        return EvalResult.from_bool(False, f"episode failed: {trajectory.error}"), True
    assert task.evaluator is not None
    try:
        return await evaluate(trajectory.final_answer, task.evaluator, judge), False
    except (EvaluationError, GatewayError) as error:
        logger.error("Evaluation failed", task_uuid=task.uuid, error=str(error))
        return EvalResult.from_bool(False, f"evaluation failed: {error}"), True


def _write_report(report: Report, output: Path) -> None:
    (output / "report.json").write_text(report.to_json(), encoding="utf-8")
    (output / "report.txt").write_text(report.to_text(), encoding="utf-8")


@cli.command()
@click.option(
    "--dataset",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
)
@click.option("--method", type=click.Choice(METHOD_NAMES), required=True)
@click.option("--limit", type=click.IntRange(min=1), default=None)
@click.option("--parallel", type=click.IntRange(min=1), default=1, show_default=True)
@click.option(
    "--output",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("traces"),
    show_default=True,
    help="Directory for traces and reports.",
)
@click.option(
    "--metrics-file",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write prometheus metrics here when done.",
)
@click.pass_obj
@async_to_sync
async def bench(
    obj: CliContext,
    dataset: Path,
    method: str,
    limit: int | None,
    parallel: int,
    output: Path,
    metrics_file: Path | None,
) -> None:
    """Run a method over a dataset, writing one trace per task and the report."""
    settings = obj.settings
    config = MethodConfig.from_settings(settings.agent, _method(method))
    try:
        tasks = load_tasks(dataset)
    except DocQAError as error:
        raise click.UsageError(str(error))
    tasks = tasks[:limit]
    output.mkdir(parents=True, exist_ok=True)

    results: dict[str, tuple[TaskExample, EvalResult]] = {}
    failed: list[str] = []
    with _open_store(settings) as store:
        rasters = RasterStore(settings.store.resolved_raster_dir())
        index = _load_index(settings, store)
        async with _gateway(settings) as gateway:
            agent = Agent(store, index, rasters, gateway)
            judge = Judge(
                gateway,
                model=settings.gateway.judge_model,
                concurrency=settings.evaluation.judge_concurrency,
            )
            limiter = anyio.CapacityLimiter(parallel)
            progress = tqdm(total=len(tasks), desc="bench", disable=obj.quiet)

            async def run_one(task: TaskExample) -> None:
                async with limiter:
                    trajectory = await agent.run_episode(task, config)
                    result, task_failed = await _grade(task, trajectory, judge)
                write_trace(output / f"{task.uuid}.jsonl", task, trajectory, result)
                results[task.uuid] = (task, result)
                if task_failed:
                    failed.append(task.uuid)
                progress.update(1)

            async with anyio.create_task_group() as task_group:
                for task in tasks:
                    task_group.start_soon(run_one, task)
            progress.close()

    report = aggregate_report(results.values())
    _write_report(report, output)
    if metrics_file is not None:
        write_metrics(metrics_file)
    click.echo(report.to_text(), nl=False)
    logger.info("Bench finished", tasks=len(tasks), failed=len(failed))
    if failed:
        raise SystemExit(1)


@cli.command()
@click.option(
    "--traces",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    required=True,
)
@click.option("--json", "as_json", is_flag=True, help="Print the JSON summary.")
@click.pass_obj
def report(obj: CliContext, traces: Path, as_json: bool) -> None:
    """Re-aggregate the report of a bench trace directory."""
    try:
        summaries = [read_trace(path) for path in sorted(traces.glob("*.jsonl"))]
    except DocQAError as error:
        raise click.UsageError(str(error))
    aggregated = aggregate_report(
        (summary.task, summary.result) for summary in summaries
    )
    click.echo(aggregated.to_json() if as_json else aggregated.to_text(), nl=False)
