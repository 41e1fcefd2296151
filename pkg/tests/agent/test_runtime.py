# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
# pylint: disable=redefined-outer-name
from typing import Any

import pytest
from pytest_mock import MockerFixture

from ..utils import answer_reply
from ..utils import CONTRACLM
from ..utils import scripted
from docqa.agent import Agent
from docqa.agent import MethodConfig
from docqa.agent import run_episode
from docqa.agent import Trajectory
from docqa.choices import Method
from docqa.environment import environment as environment_module
from docqa.evaluation import TaskExample
from docqa.exceptions import ScriptExhaustedError
from docqa.gateway import ScriptedGateway
from docqa.gateway import ScriptEntry
from docqa.store import DocumentStore
from docqa.store import RasterStore
from docqa.vectorstore import VectorIndex

SEARCH = (
    "[Thought]: Find passages about contrastive learning.\n"
    "[Action]: RetrieveFromVectorstore(query='contrastive learning', "
    "collection_name='text_bm25_en', table_name='chunks', "
    "column_name='text_content', limit=3)"
)
COUNT = (
    "[Thought]: Count the ACL 2023 papers.\n"
    "[Action]: RetrieveFromDatabase(sql='SELECT COUNT(*) AS papers FROM metadata "
    "WHERE pub_year = 2023')"
)
CALCULATE = "[Thought]: Compute.\n[Action]: CalculateExpr(expr='1 + 2')"
VIEW = (
    f"[Thought]: Look at the figure.\n[Action]: ViewImage(paper_id='{CONTRACLM}', "
    "page_number=1, bounding_box=[10, 20, 100, 80])"
)


@pytest.fixture
def task() -> TaskExample:
    return TaskExample(
        uuid="task-count",
        question="How many ACL 2023 papers are stored?",
        answer_format="Your answer should be a single integer.",
        anchor_pdf=[CONTRACLM],
        conference=["acl2023"],
    )


@pytest.fixture
def stores(
    populated_store: DocumentStore, index: VectorIndex, rasters: RasterStore
) -> tuple[DocumentStore, VectorIndex, RasterStore]:
    return populated_store, index, rasters


async def run(
    stores: tuple[DocumentStore, VectorIndex, RasterStore],
    gateway: ScriptedGateway,
    task: TaskExample,
    **config: Any,
) -> Trajectory:
    return await Agent(*stores, gateway).run_episode(task, MethodConfig(**config))


async def test_neusym_episode(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    """Happy-path test.

    Tests that:
    * Each turn's observation is shown before the next completion.
    * The episode ends at GenerateAnswer with its answer.
    * Tokens are accounted from the chat calls.
    """
    gateway = scripted(
        ("[Database Schema]:", SEARCH),
        ("text_content", COUNT),
        ('{"papers":3}', answer_reply(3)),
    )
    trajectory = await run(stores, gateway, task)

    assert trajectory.status == "answered"
    assert trajectory.final_answer == 3
    assert trajectory.turn_count == 3
    assert [turn.action_type for turn in trajectory.turns] == [
        "RetrieveFromVectorstore",
        "RetrieveFromDatabase",
        "GenerateAnswer",
    ]
    first, second, last = trajectory.turns
    assert first.thought == "Find passages about contrastive learning."
    assert first.parameters is not None
    assert first.parameters["limit"] == 3
    assert first.observation is not None
    assert first.observation.kind == "table"
    assert second.observation is not None
    assert second.observation.rendered == (
        '{"papers":3}\nIn total, 1 rows are displayed in JSON format.'
    )
    assert last.observation is None
    assert gateway.remaining == 0
    assert trajectory.prompt_tokens == sum(
        call.prompt_tokens for call in trajectory.calls if call.kind == "chat"
    )
    assert trajectory.prompt_tokens > 0
    assert trajectory.completion_tokens > 0


async def test_prompt_announces_turn_cap(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    gateway = scripted(answer_reply(3))
    await run(stores, gateway, task, max_turns=7)
    assert "you only have 7 interaction turns at most" in gateway.prompts[0]


async def test_turn_cap_forces_answer(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    """Tests that:
    * The loop stops after max_turns non-terminal turns.
    * The forced prompt names the cap, and its answer ends the episode as forced.
    """
    gateway = scripted(
        *[CALCULATE] * 20,
        ("You have used all 20 interaction turns", answer_reply("forced")),
    )
    trajectory = await run(stores, gateway, task)

    assert trajectory.status == "forced"
    assert trajectory.final_answer == "forced"
    assert trajectory.turn_count == 20
    assert all(turn.observation is not None for turn in trajectory.turns)
    assert trajectory.answer_turn is not None
    assert trajectory.answer_turn.index == 20
    assert len([call for call in trajectory.calls if call.kind == "chat"]) == 21


async def test_forced_answer_may_be_malformed(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    gateway = scripted(CALCULATE, CALCULATE, "I think the answer is 3")
    trajectory = await run(stores, gateway, task, max_turns=2)
    assert trajectory.status == "forced"
    assert trajectory.final_answer == "I think the answer is 3"
    assert trajectory.answer_turn is not None
    assert trajectory.answer_turn.error is not None


async def test_malformed_turn_is_an_error_observation(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    gateway = scripted(
        "Let me answer directly: 3",
        ("[Error]: ", "[Thought]: t\n[Action]: NoSuchAction(x=1)"),
        ("NoSuchAction", answer_reply(3)),
    )
    trajectory = await run(stores, gateway, task)
    assert trajectory.status == "answered"
    assert trajectory.turn_count == 3
    for turn in trajectory.turns[:2]:
        assert turn.error is not None
        assert turn.observation is not None
        assert turn.observation.kind == "error"


async def test_gateway_failure_fails_episode(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    gateway = ScriptedGateway([ScriptEntry(reply=SEARCH), ScriptEntry(status=401)])
    trajectory = await run(stores, gateway, task)
    assert trajectory.status == "failed"
    assert trajectory.error is not None
    assert trajectory.error.startswith("AuthError")
    assert trajectory.turn_count == 1


async def test_script_exhaustion_fails_episode(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    trajectory = await run(stores, scripted(CALCULATE), task)
    assert trajectory.status == "failed"
    assert trajectory.error is not None
    assert trajectory.error.startswith(ScriptExhaustedError.__name__)


async def test_episodes_are_deterministic(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    """The same script over the same stores yields the same trajectory."""
    replies = [SEARCH, COUNT, CALCULATE, answer_reply(3)]
    first = await run(stores, scripted(*replies), task)
    second = await run(stores, scripted(*replies), task)
    assert first.dict(exclude={"calls"}) == second.dict(exclude={"calls"})
    assert [call.request for call in first.calls] == [
        call.request for call in second.calls
    ]


async def test_observations_respect_token_budget(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    every_chunk = (
        "[Thought]: Read everything.\n"
        "[Action]: RetrieveFromDatabase(sql='SELECT * FROM chunks')"
    )
    wide_search = SEARCH.replace("limit=3", "limit=30")
    gateway = scripted(every_chunk, wide_search, answer_reply(3))
    trajectory = await run(stores, gateway, task, per_turn_token_budget=120)
    observations = [turn.observation for turn in trajectory.turns[:2]]
    for observation in observations:
        assert observation is not None
        assert observation.kind == "table"
        assert observation.token_count <= 120
        assert observation.rendered.endswith(
            "... [observation truncated at 120 tokens]"
        )


async def test_view_image_attaches_crop(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    gateway = scripted(VIEW, ("attached below", answer_reply(3)), vision_capable=True)
    trajectory = await run(stores, gateway, task, method=Method.iterative_neu)
    assert trajectory.status == "answered"
    observation = trajectory.turns[0].observation
    assert observation is not None
    assert observation.kind == "image"
    # The second chat call carries the crop, elided in the trace
    request = trajectory.calls[1].request
    image_message = request[-1]
    assert isinstance(image_message, dict)
    assert image_message["content"][1]["type"] == "image_url"
    assert "bytes" in image_message["content"][1]


async def test_view_image_without_vision(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    gateway = scripted(
        VIEW, ("vision not supported by current model", answer_reply(3))
    )
    trajectory = await run(stores, gateway, task, method=Method.iterative_neu)
    observation = trajectory.turns[0].observation
    assert observation is not None
    assert observation.rendered == "[Error]: vision not supported by current model"


@pytest.mark.parametrize(
    "method,reply,target,follow_up",
    [
        (Method.iterative_sym, SEARCH, "search", []),
        (Method.iterative_neu, COUNT, "sql", []),
        (Method.iterative_classic, COUNT, "sql", []),
        (Method.iterative_classic, CALCULATE, "calculate", []),
        (Method.iterative_classic, VIEW, "view", []),
        (Method.two_stage_neu, COUNT, "sql", [SEARCH]),
        (Method.two_stage_sym, SEARCH, "search", [COUNT]),
        (Method.hybrid, CALCULATE, "calculate", [COUNT]),
    ],
)
async def test_action_set_is_enforced(
    stores: tuple[DocumentStore, VectorIndex, RasterStore],
    task: TaskExample,
    mocker: MockerFixture,
    method: Method,
    reply: str,
    target: str,
    follow_up: list[str],
) -> None:
    """Tests that:
    * An action outside the method's set is never executed.
    * The model sees the allowed action types in an error observation.
    """
    store, index, _ = stores
    spies = {
        "search": mocker.spy(index, "search"),
        "sql": mocker.spy(store, "execute_readonly_sql"),
        "calculate": mocker.spy(environment_module, "calculate_expr"),
        "view": mocker.spy(environment_module, "view_image"),
    }
    gateway = scripted(reply, *follow_up, answer_reply(3))
    trajectory = await run(stores, gateway, task, method=method)

    assert spies[target].call_count == 0
    assert trajectory.status == "answered"
    assert trajectory.final_answer == 3
    observation = trajectory.turns[0].observation
    assert observation is not None
    assert observation.kind == "error"
    assert "is not allowed here" in observation.rendered
    assert gateway.remaining == 0


async def test_two_stage_without_usable_action(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    """Tests that:
    * An unusable retrieval action gets exactly one re-prompt.
    * The episode fails when the re-prompt is unusable as well.
    """
    gateway = scripted(COUNT, ("[Error]: ", COUNT))
    trajectory = await run(stores, gateway, task, method=Method.two_stage_neu)
    assert trajectory.status == "failed"
    assert trajectory.error == "No usable retrieval action after one re-prompt"
    assert trajectory.turn_count == 2
    assert trajectory.answer_turn is None


async def test_two_stage_answers_over_observation(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    gateway = scripted(COUNT, ('[Context]:\n{"papers":3}', answer_reply(3)))
    trajectory = await run(stores, gateway, task, method=Method.two_stage_sym)
    assert trajectory.status == "answered"
    assert trajectory.final_answer == 3
    assert trajectory.turn_count == 1
    assert trajectory.answer_turn is not None
    assert trajectory.answer_turn.action_type == "GenerateAnswer"


async def test_iterative_classic_pins_the_view(
    stores: tuple[DocumentStore, VectorIndex, RasterStore],
    task: TaskExample,
    mocker: MockerFixture,
) -> None:
    """Whatever the model asks for, the classic view is searched."""
    _, index, _ = stores
    spy = mocker.spy(index, "search")
    gateway = scripted(SEARCH, answer_reply(3))
    trajectory = await run(stores, gateway, task, method=Method.iterative_classic)
    assert trajectory.status == "answered"
    request = spy.call_args.args[0]
    assert request.collection_name == "text_sentence_transformers_all_minilm_l6_v2"
    assert (request.table_name, request.column_name) == ("chunks", "text_content")


@pytest.mark.parametrize(
    "method,expect",
    [
        (Method.classic, "text_content"),
        (Method.title_abstract, "[Abstract]: This paper studies contrastive"),
        (Method.full_text, "Large language models are strong."),
    ],
)
async def test_single_completion_methods(
    stores: tuple[DocumentStore, VectorIndex, RasterStore],
    task: TaskExample,
    method: Method,
    expect: str,
) -> None:
    """One completion over retrieved context, outside the interaction loop."""
    gateway = scripted((expect, answer_reply(3)))
    trajectory = await run(stores, gateway, task, method=method)
    assert trajectory.status == "answered"
    assert trajectory.final_answer == 3
    assert trajectory.turn_count == 0
    assert gateway.remaining == 0
    assert "[Context]:" in gateway.prompts[0]


async def test_classic_restricts_to_task_papers(
    stores: tuple[DocumentStore, VectorIndex, RasterStore],
    task: TaskExample,
    mocker: MockerFixture,
) -> None:
    _, index, _ = stores
    spy = mocker.spy(index, "search")
    await run(stores, scripted(answer_reply(3)), task, method=Method.classic)
    request = spy.call_args.args[0]
    assert request.filter == f'pdf_id in ["{CONTRACLM}"]'
    assert request.limit == 4
    assert request.query == task.question


async def test_question_only(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    gateway = scripted(answer_reply(3))
    trajectory = await run(stores, gateway, task, method=Method.question_only)
    assert trajectory.final_answer == 3
    assert "[Context]:" not in gateway.prompts[0]
    assert "[Database Schema]:" not in gateway.prompts[0]


async def test_run_episode(
    stores: tuple[DocumentStore, VectorIndex, RasterStore], task: TaskExample
) -> None:
    store, index, rasters = stores
    trajectory = await run_episode(
        task, MethodConfig(), scripted(answer_reply(3)), store, index, rasters
    )
    assert trajectory.status == "answered"
    assert trajectory.method == "neusym"
    assert trajectory.task_uuid == "task-count"
