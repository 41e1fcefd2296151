# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Loading of task datasets, as one JSON array or as JSON lines."""
import json
from pathlib import Path
from typing import Any

import structlog
from pydantic import ValidationError

from ..exceptions import BadTagError
from ..exceptions import DatasetParseError
from .models import TAGS
from .models import TaskExample
from .registry import check_evaluator

logger = structlog.get_logger()


def _records(text: str, path: Path) -> list[Any]:
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            records = json.loads(stripped)
        except json.JSONDecodeError as error:
            raise DatasetParseError(f"{path}: {error}") from error
        return records
    records = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as error:
            raise DatasetParseError(f"{path}:{number}: {error}") from error
    return records


def parse_task(record: Any) -> TaskExample:
    """Validate one dataset record.

    Raises:
        DatasetParseError: If the record does not have the dataset fields.
        BadTagError: If a tag is outside the known tag set.
        UnknownEvalFuncError: If an evaluator names an unregistered function.
    """
    uuid = record.get("uuid", "<no uuid>") if isinstance(record, dict) else ""
    try:
        task = TaskExample.parse_obj(record)
    except ValidationError as error:
        raise DatasetParseError(f"Task {uuid}: {error}") from error
    if task.evaluator is None:
        raise DatasetParseError(f"Task {task.uuid}: missing evaluator")
    for tag in task.tags:
        if tag not in TAGS:
            raise BadTagError(task.uuid, tag)
    check_evaluator(task.evaluator, task.uuid)
    return task


def load_tasks(path: Path) -> list[TaskExample]:
    """Load and validate every task of a dataset file.

    Raises:
        DatasetParseError: If the file is unreadable, malformed or repeats a uuid.
        BadTagError: If a tag is outside the known tag set.
        UnknownEvalFuncError: If an evaluator names an unregistered function.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise DatasetParseError(f"{path}: {error}") from error
    records = _records(text, Path(path))
    if not isinstance(records, list):
        raise DatasetParseError(f"{path}: expected a list of task records")

    tasks = [parse_task(record) for record in records]
    seen: set[str] = set()
    for task in tasks:
        if task.uuid in seen:
            raise DatasetParseError(f"Task {task.uuid}: duplicate uuid")
        seen.add(task.uuid)
    logger.info("Dataset loaded", path=str(path), tasks=len(tasks))
    return tasks
