# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Episode trajectories and their JSON lines traces.

A trace file holds one record per line: the task, each turn, each gateway call
and finally the outcome with its evaluation.
"""
import json
from pathlib import Path
from typing import Any
from typing import Literal

from pydantic import BaseModel
from pydantic import Field

from ..actions import Action
from ..environment import Observation
from ..evaluation import EvalResult
from ..evaluation import TaskExample
from ..exceptions import DatasetParseError
from ..gateway import CallRecord

Status = Literal["answered", "forced", "failed"]


class ObservationRecord(BaseModel):
    kind: str
    rendered: str
    token_count: int

    @classmethod
    def from_observation(cls, observation: Observation) -> "ObservationRecord":
        return cls(
            kind=observation.kind,
            rendered=observation.rendered,
            token_count=observation.token_count,
        )


class Turn(BaseModel):
    """One completion with the action parsed from it and its observation."""

    index: int
    completion: str
    thought: str | None = None
    action_type: str | None = None
    parameters: dict[str, Any] | None = None
    observation: ObservationRecord | None = None
    error: str | None = None

    def set_action(self, action: Action) -> None:
        self.action_type = action.action_type
        self.parameters = action.parameters()

    @property
    def terminal(self) -> bool:
        return self.action_type == "GenerateAnswer"


class Trajectory(BaseModel):
    task_uuid: str
    method: str
    status: Status = "failed"
    turns: list[Turn] = Field(default_factory=list)
    answer_turn: Turn | None = Field(
        None, description="Single answer completion outside the interaction loop."
    )
    final_answer: Any = None
    prompt_tokens: int = 0
    completion_tokens: int = 0
    error: str | None = None
    calls: list[CallRecord] = Field(default_factory=list)

    @property
    def turn_count(self) -> int:
        return len(self.turns)

    def count_tokens(self) -> None:
        chats = [call for call in self.calls if call.kind == "chat"]
        self.prompt_tokens = sum(call.prompt_tokens for call in chats)
        self.completion_tokens = sum(call.completion_tokens for call in chats)


def _line(kind: str, record: dict[str, Any]) -> str:
    return json.dumps({"kind": kind, **record}, ensure_ascii=False, default=str)


def write_trace(
    path: Path, task: TaskExample, trajectory: Trajectory, result: EvalResult
) -> None:
    """Write an episode and its evaluation as JSON lines."""
    lines = [_line("task", {"task": json.loads(task.json())})]
    lines += [_line("turn", json.loads(turn.json())) for turn in trajectory.turns]
    if trajectory.answer_turn is not None:
        lines.append(_line("answer", json.loads(trajectory.answer_turn.json())))
    lines += [_line("call", json.loads(call.json())) for call in trajectory.calls]
    outcome = json.loads(
        trajectory.json(include={"status", "final_answer", "error"})
    ) | {
        "turns": trajectory.turn_count,
        "prompt_tokens": trajectory.prompt_tokens,
        "completion_tokens": trajectory.completion_tokens,
        "evaluation": json.loads(result.json()),
    }
    lines.append(_line("outcome", outcome))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TraceSummary(BaseModel):
    task: TaskExample
    status: Status
    final_answer: Any = None
    result: EvalResult


def read_trace(path: Path) -> TraceSummary:
    """Read back the task and outcome of a trace file.

    Raises:
        DatasetParseError: If the file lacks the task or the outcome record.
    """
    task: dict[str, Any] | None = None
    outcome: dict[str, Any] | None = None
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as error:
            raise DatasetParseError(f"{path}: {error}") from error
        match record.get("kind"):
            case "task":
                task = record["task"]
            case "outcome":
                outcome = record
    if task is None or outcome is None:
        raise DatasetParseError(f"{path}: incomplete trace")
    return TraceSummary(
        task=task,
        status=outcome["status"],
        final_answer=outcome.get("final_answer"),
        result=outcome["evaluation"],
    )
