# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import json
from pathlib import Path

import pytest

from docqa.agent import read_trace
from docqa.agent import Trajectory
from docqa.agent import Turn
from docqa.agent import write_trace
from docqa.agent.trajectory import ObservationRecord
from docqa.evaluation import EvalResult
from docqa.evaluation import Evaluator
from docqa.evaluation import TaskExample
from docqa.exceptions import DatasetParseError
from docqa.gateway import CallRecord

TASK = TaskExample(
    uuid="task-trace",
    question="How many papers?",
    answer_format="Your answer should be a single integer.",
    tags=["multiple", "metadata", "objective"],
    evaluator=Evaluator(eval_func="eval_int_exact_match", eval_kwargs={"gold": 3}),
)


def trajectory() -> Trajectory:
    turn = Turn(
        index=0,
        completion="[Thought]: t\n[Action]: CalculateExpr(expr='1 + 2')",
        thought="t",
        action_type="CalculateExpr",
        parameters={"expr": "1 + 2"},
        observation=ObservationRecord(kind="scalar", rendered="3", token_count=1),
    )
    answer = Turn(
        index=1,
        completion="[Thought]: done\n[Action]: GenerateAnswer(answer=3)",
        thought="done",
        action_type="GenerateAnswer",
        parameters={"answer": 3},
    )
    calls = [
        CallRecord(kind="chat", model="m", prompt_tokens=100, completion_tokens=10),
        CallRecord(kind="embed", model="e", request=["q"], prompt_tokens=1),
        CallRecord(kind="chat", model="m", prompt_tokens=120, completion_tokens=8),
    ]
    result = Trajectory(
        task_uuid=TASK.uuid,
        method="neusym",
        status="answered",
        turns=[turn, answer],
        final_answer=3,
        calls=calls,
    )
    result.count_tokens()
    return result


def test_count_tokens() -> None:
    """Only chat calls count towards the episode's token usage."""
    episode = trajectory()
    assert episode.prompt_tokens == 220
    assert episode.completion_tokens == 18
    assert episode.turn_count == 2
    assert episode.turns[1].terminal
    assert not episode.turns[0].terminal


def test_write_and_read_trace(tmp_path: Path) -> None:
    """Happy-path test.

    Tests that:
    * One JSON record per line, task first and outcome last.
    * Reading back yields the task, status, answer and evaluation.
    """
    path = tmp_path / "traces" / "task-trace.jsonl"
    result = EvalResult.from_bool(True, "3 == 3")
    write_trace(path, TASK, trajectory(), result)

    records = [json.loads(line) for line in path.read_text().splitlines()]
    assert [record["kind"] for record in records] == [
        "task",
        "turn",
        "turn",
        "call",
        "call",
        "call",
        "outcome",
    ]
    outcome = records[-1]
    assert outcome["status"] == "answered"
    assert outcome["final_answer"] == 3
    assert outcome["turns"] == 2
    assert outcome["prompt_tokens"] == 220
    assert outcome["evaluation"]["passed"] is True

    summary = read_trace(path)
    assert summary.task == TASK
    assert summary.status == "answered"
    assert summary.final_answer == 3
    assert summary.result == result


def test_answer_turn_is_written(tmp_path: Path) -> None:
    episode = Trajectory(
        task_uuid=TASK.uuid,
        method="classic",
        status="answered",
        answer_turn=Turn(index=0, completion="3"),
        final_answer=3,
    )
    path = tmp_path / "trace.jsonl"
    write_trace(path, TASK, episode, EvalResult.from_bool(True))
    kinds = [json.loads(line)["kind"] for line in path.read_text().splitlines()]
    assert kinds == ["task", "answer", "outcome"]


@pytest.mark.parametrize(
    "content",
    [
        "",
        '{"kind": "task", "task": {}}\n',
        '{"kind": "outcome", "status": "answered"}\n',
        "not json\n",
    ],
)
def test_read_incomplete_trace(tmp_path: Path, content: str) -> None:
    path = tmp_path / "trace.jsonl"
    path.write_text(content)
    with pytest.raises(DatasetParseError):
        read_trace(path)
