# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import pytest

from ..utils import CONTRACLM
from docqa.agent import assemble_prompt
from docqa.agent import hint_prompt
from docqa.agent import MethodConfig
from docqa.agent import task_prompt
from docqa.agent.prompts import forced_answer_prompt
from docqa.agent.prompts import INTERACTION_FRAMEWORK
from docqa.agent.prompts import RULE
from docqa.agent.prompts import SINGLE_TURN_INSTRUCTION
from docqa.choices import ActionFormat
from docqa.choices import Method
from docqa.evaluation import TaskExample

TASK = TaskExample(
    uuid="task-prompt",
    question="Which paper proposes ContraCLM?",
    answer_format="Your answer should be the paper title.",
    anchor_pdf=[CONTRACLM],
    conference=["acl2023"],
)
DB_SCHEMA = "CREATE TABLE metadata (...)"
VS_SCHEMA = '{"collection_name": "text_bm25_en"}'


def test_task_prompt() -> None:
    assert task_prompt(TASK, max_turns=20).split("\n") == [
        "Remember that, for each question, you only have 20 interaction turns at "
        "most. Now, let's start!",
        "[Question]: Which paper proposes ContraCLM?",
        "[Answer Format]: Your answer should be the paper title.",
        f'[Anchor PDF]: ["{CONTRACLM}"]',
        '[Conference]: ["acl2023"]',
    ]


def test_task_prompt_with_schemas_and_context() -> None:
    prompt = task_prompt(
        TASK,
        database_schema=DB_SCHEMA,
        vectorstore_schema=VS_SCHEMA,
        context="some chunks",
        db_name="papers",
    )
    assert "interaction turns" not in prompt
    assert '[Database Schema]: The database schema for "papers" is as follows:\n' + (
        DB_SCHEMA
    ) in prompt
    assert "[Vectorstore Schema]: The vectorstore schema for papers" in prompt
    assert prompt.endswith("[Context]:\nsome chunks")


def test_neusym_prompt() -> None:
    """Tests that:
    * The system message joins its blocks with rules.
    * Both schemas are given.
    * All hints apply.
    """
    system, user = assemble_prompt(TASK, MethodConfig(), DB_SCHEMA, VS_SCHEMA)
    assert system.role == "system"
    assert user.role == "user"
    blocks = system.text.split(RULE)
    assert blocks[0].startswith("You are an intelligent agent")
    assert blocks[1].startswith("## Task Description")
    assert "[Database Schema]: A detailed serialized schema" in blocks[1]
    assert "[Vectorstore Schema]: A detailed serialized schema" in blocks[1]
    assert INTERACTION_FRAMEWORK in system.text
    assert system.text.endswith(hint_prompt(MethodConfig()))
    for action_type in (
        "RetrieveFromVectorstore",
        "RetrieveFromDatabase",
        "CalculateExpr",
        "ViewImage",
        "GenerateAnswer",
    ):
        assert action_type in system.text
    assert DB_SCHEMA in user.text
    assert VS_SCHEMA in user.text
    assert "you only have 20 interaction turns" in user.text


def test_iterative_sym_prompt() -> None:
    system, user = assemble_prompt(
        TASK, MethodConfig(method=Method.iterative_sym), DB_SCHEMA, VS_SCHEMA
    )
    assert "[Vectorstore Schema]" not in system.text
    assert "RetrieveFromVectorstore" not in system.text
    assert DB_SCHEMA in user.text
    assert VS_SCHEMA not in user.text


@pytest.mark.parametrize(
    "fmt,marker",
    [
        (ActionFormat.markdown, "GenerateAnswer(answer="),
        (ActionFormat.json, '"action_type": "GenerateAnswer"'),
    ],
)
def test_action_format_is_shown(fmt: ActionFormat, marker: str) -> None:
    system, _ = assemble_prompt(
        TASK, MethodConfig(action_format=fmt), DB_SCHEMA, VS_SCHEMA
    )
    assert marker in system.text


def test_hints_for_both_backends() -> None:
    hints = hint_prompt(MethodConfig()).split("\n\n")
    assert hints[0] == "## Suggestions or Hints for Agent Interaction"
    numbers = [block.split(" ", 1)[0] for block in hints[1:]]
    assert numbers == ["1.", "2.", "3.", "4."]
    assert hints[2].startswith("2. Combine both structured and unstructured data.")


def test_hints_for_pinned_vectorstore() -> None:
    """Bullets for other backends or free views are dropped, numbering follows."""
    hints = hint_prompt(MethodConfig(method=Method.iterative_classic))
    assert hints.split("\n\n")[1:] == [
        "1. Iterate and refine:\n"
        "- If the vector-based neural retrieval is insufficient, try alternative "
        "approaches or parameter settings.\n"
        "- Use your findings to validate or enrich the final response.",
        "2. Ensure confidence. That is, only make a final decision when you are "
        "confident that the retrieved information fully addresses the user's query.",
    ]


def test_hints_for_database_only() -> None:
    hints = hint_prompt(MethodConfig(method=Method.iterative_sym))
    assert "Combine both" not in hints
    assert "vectorstore" not in hints
    assert "embedding models" not in hints
    assert "- If SQL execution result is not satisfactory" in hints
    assert "1. Explore multiple retrieval strategies." in hints


@pytest.mark.parametrize(
    "method",
    [Method.two_stage_neu, Method.two_stage_sym, Method.hybrid],
)
def test_two_stage_prompt(method: Method) -> None:
    system, user = assemble_prompt(
        TASK, MethodConfig(method=method), DB_SCHEMA, VS_SCHEMA
    )
    assert INTERACTION_FRAMEWORK not in system.text
    assert "GenerateAnswer" not in system.text
    assert user.text.endswith(SINGLE_TURN_INSTRUCTION)
    assert "interaction turns" not in user.text


@pytest.mark.parametrize(
    "method",
    [Method.classic, Method.question_only, Method.title_abstract, Method.full_text],
)
def test_single_completion_prompt(method: Method) -> None:
    system, user = assemble_prompt(
        TASK, MethodConfig(method=method), DB_SCHEMA, VS_SCHEMA, context="chunks"
    )
    assert system.text.startswith(
        "You are intelligent agent who is expert in answering"
    )
    assert "GenerateAnswer" in system.text
    assert DB_SCHEMA not in user.text
    assert "[Context]:\nchunks" in user.text
    assert user.text.endswith(SINGLE_TURN_INSTRUCTION)


def test_forced_answer_prompt() -> None:
    prompt = forced_answer_prompt(20)
    assert prompt.startswith("You have used all 20 interaction turns.")
    assert "`GenerateAnswer`" in prompt
    assert prompt.endswith(SINGLE_TURN_INSTRUCTION)
