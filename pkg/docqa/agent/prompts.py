# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Prompt texts and their composition per retrieval method.

The system message is the system prompt, the action and observation space, the
interaction framework and the hints, joined by rules. Blocks a method does not
use are left out. The task prompt is the first user message.
"""
import json

from pydantic import BaseModel

from ..actions import action_space_prompt
from ..choices import ActionFormat
from ..choices import Method
from ..evaluation import TaskExample
from ..gateway import ChatMessage
from .methods import ANSWER
from .methods import MethodConfig

RULE = "\n\n----\n\n"

_QUESTION_PART = (
    "[Question]: A natural language question from the user regarding PDF files, "
    "e.g., Is there any ...?"
)
_ANSWER_FORMAT_PART = (
    "[Answer Format]: Specifies the required format of the final answer, e.g., the "
    'answer is "Yes" or "No" without punctuation.'
)
_DATABASE_PART = (
    "[Database Schema]: A detailed serialized schema of the DuckDB database for "
    "reference when generating SQL queries. It includes 1) tables, 2) columns and "
    "their data types, 3) descriptions for these schema items, and 4) primary key "
    "and foreign key constraints."
)
_VECTORSTORE_PART = (
    "[Vectorstore Schema]: A detailed serialized schema of the Milvus vectorstore "
    "for reference when generating executable retrieval actions with specific "
    "parameters. It includes 1) collections, 2) fields, 3) encodable (table, "
    "column) pairs in the relational database where the vectorized content "
    "originates, and 4) grammar for valid filter rules."
)


def _task_description(database: bool, vectorstore: bool) -> str:
    parts = [_QUESTION_PART, _ANSWER_FORMAT_PART]
    if database:
        parts.append(_DATABASE_PART)
    if vectorstore:
        parts.append(_VECTORSTORE_PART)
    return "\n".join(
        ["## Task Description", "Each input task consists of the following parts:"]
        + parts
    )


NEUSYM_SYSTEM = (
    "You are an intelligent agent with expertise in retrieving useful context from "
    "both the DuckDB database and the Milvus vectorstore through SQL execution and "
    "similarity search and answering user questions. You will be given a natural "
    "language question concerning PDF files, along with the schema of both the "
    "database and the vectorstore. Your ultimate goal is to answer the input "
    "question with pre-defined answer format. The DuckDB database contains all "
    "parsed content of raw PDF files, while the Milvus vectorstore encodes specific "
    "column cells from the database as vectors. You can predict executable actions, "
    "interact with the hybrid environment (including database and vectorstore) "
    "across multiple turns, and retrieve necessary context until you are confident "
    "in resolving the question."
)
CLASSIC_SYSTEM = (
    "You are intelligent agent who is expert in answering user questions based on "
    "the retrieved context. You will be given a natural language question "
    "concerning a PDF file, and your task is to answer the input question with "
    "predefined output format using the relevant information."
)
TWO_STAGE_NEU_SYSTEM = (
    "You are intelligent agent who is expert in predicting a well-formed retrieval "
    "action to search useful information to answer the user question. You will be "
    "given a natural language question concerning a PDF file and a vectorstore "
    "schema which defines all usable collections and fields in them. The vectorized "
    "contents in the vectorstore all come from cell values in another relational "
    "database which stores the parsed content of the PDF files. And your task is to "
    "predict a parametrized retrieval action to find useful information based on "
    "vector similarity search. Please refer to the concrete vectorstore schema to "
    "produce a valid retrieval action."
)
TWO_STAGE_SYM_SYSTEM = (
    "You are intelligent agent who is expert in writing SQL programs to retrieve "
    "useful information. You will be given a natural language question concerning "
    "a PDF file and a database schema which stores the parsed PDF content, and your "
    "task is to predict SQL to retrieve content from the database. Please refer to "
    "the concrete database schema to produce the valid SQL."
)
HYBRID_SYSTEM = (
    "You are intelligent agent who is expert in predicting a well-formed retrieval "
    "action to search useful information to answer the user question. You will be "
    "given a natural language question concerning a PDF file, a database schema "
    "which stores the parsed PDF content, and a vectorstore schema which defines "
    "all usable collections and fields in them. The vectorized contents in the "
    "vectorstore all come from cell values in the database. And your task is to "
    "predict a parametrized retrieval action to find useful information. Please "
    "refer to the concrete schema to produce a valid retrieval action."
)
ANSWER_STAGE_SYSTEM = (
    "You are intelligent agent who is expert in answering user question given the "
    "retrieved context. You will be given a natural language question concerning a "
    "PDF file and the retrieved context. Your task is to predict the final answer "
    "based on given question and context. Please refer to the answer format to "
    "produce the valid answer."
)
ITERATIVE_NEU_SYSTEM = (
    "You are intelligent agent who is expert in retrieving useful context from the "
    "vectorstore based on similarity search and answering user questions. You will "
    "be given a natural language question concerning a PDF file and a vectorstore "
    "schema of Milvus, and your ultimate task is to answer the input question with "
    "pre-defined output format. The Milvus vectorstore encodes various context from "
    "the parsed PDF in multi-views. You can predict executable actions, interact "
    "with the vectorstore in multiple turns, and retrieve desired context to help "
    "you better resolve the question."
)
ITERATIVE_SYM_SYSTEM = (
    "You are intelligent agent who is expert in leveraging SQL programs to retrieve "
    "useful information and answer user questions. You will be given a natural "
    "language question concerning a PDF file and a database schema of DuckDB which "
    "stores the parsed PDF content, and your ultimate task is to answer the input "
    "question with predefined output format. You can predict intermediate SQLs, "
    "interact with the database in multiple turns, and retrieve desired information "
    "to help you better resolve the question."
)

STAGE_ONE_SYSTEM = {
    Method.two_stage_neu: TWO_STAGE_NEU_SYSTEM,
    Method.two_stage_sym: TWO_STAGE_SYM_SYSTEM,
    Method.hybrid: HYBRID_SYSTEM,
}
ITERATIVE_SYSTEM = {
    Method.iterative_classic: ITERATIVE_NEU_SYSTEM,
    Method.iterative_neu: ITERATIVE_NEU_SYSTEM,
    Method.iterative_sym: ITERATIVE_SYM_SYSTEM,
    Method.neusym: NEUSYM_SYSTEM,
}

INTERACTION_FRAMEWORK = """## Interaction Framework
The main interaction procedure proceeds like this:

----

[Thought]: reasoning process, why to take this action
[Action]: which action to take, please strictly conform to the action specification
[Observation]: execution results or error message after taking the action

... more interleaved triplets of ([Thought], [Action], [Observation]) ...

[Thought]: reasoning process to produce the final answer
[Action]: the terminal action `GenerateAnswer`, there is no further observation

----

In general, the main interaction loop consists of an interleaved of triplets \
([Thought], [Action], [Observation]), except the last `GenerateAnswer` action which \
does not have "[Observation]:". You need to predict the "[Thought]: ..." followed by \
the "[Action]: ..." for each turn, and we will execute your action in the \
environment and provide the "[Observation]: ..." for the previous action."""

SINGLE_TURN_INSTRUCTION = (
    'Please respond with exactly one "[Thought]: ..." followed by one '
    '"[Action]: ..." in the specified action format.'
)


class Hint(BaseModel):
    class Config:
        frozen = True

    text: str
    database: bool = False
    vectorstore: bool = False
    free_view: bool = False


class HintItem(BaseModel):
    class Config:
        frozen = True

    heading: str
    bullets: tuple[Hint, ...] = ()
    both_backends: bool = False


HINTS: tuple[HintItem, ...] = (
    HintItem(
        heading="Explore multiple retrieval strategies. For example:",
        bullets=(
            Hint(
                text="Experiment with different (table, column) pairs to extract "
                "diverse types of information.",
                free_view=True,
            ),
            Hint(
                text="Query various embedding models (collections) to find the "
                "most relevant context.",
                vectorstore=True,
                free_view=True,
            ),
        ),
    ),
    HintItem(
        heading="Combine both structured and unstructured data. Concretely:",
        bullets=(
            Hint(
                text="Use SQL queries to retrieve precise facts and structured data. "
                "Pay special attention to morphological variations in cell values.",
                database=True,
            ),
            Hint(
                text="Perform similarity searches in the vectorstore to capture "
                "semantic relationships and hidden insights.",
                vectorstore=True,
            ),
        ),
        both_backends=True,
    ),
    HintItem(
        heading="Iterate and refine:",
        bullets=(
            Hint(
                text="If SQL execution result is not satisfactory, try alternative "
                "SQL queries to explore the database content carefully.",
                database=True,
            ),
            Hint(
                text="If the vector-based neural retrieval is insufficient, try "
                "alternative approaches or parameter settings.",
                vectorstore=True,
            ),
            Hint(text="Use your findings to validate or enrich the final response."),
        ),
    ),
    HintItem(
        heading="Ensure confidence. That is, only make a final decision when you are "
        "confident that the retrieved information fully addresses the user's query.",
    ),
)


def hint_prompt(config: MethodConfig) -> str:
    """The hints, without bullets about backends the method cannot use."""
    spec = config.spec
    free_view = spec.pinned is None

    def applies(hint: Hint) -> bool:
        return (
            (spec.database or not hint.database)
            and (spec.vectorstore or not hint.vectorstore)
            and (free_view or not hint.free_view)
        )

    items = []
    for item in HINTS:
        if item.both_backends and not (spec.database and spec.vectorstore):
            continue
        bullets = [f"- {hint.text}" for hint in item.bullets if applies(hint)]
        if item.bullets and not bullets:
            continue
        items.append((item.heading, bullets))
    blocks = [
        "\n".join([f"{number}. {heading}", *bullets])
        for number, (heading, bullets) in enumerate(items, start=1)
    ]
    return "\n\n".join(["## Suggestions or Hints for Agent Interaction", *blocks])


def iterative_system_prompt(config: MethodConfig) -> str:
    spec = config.spec
    system = RULE.join(
        [
            ITERATIVE_SYSTEM[config.method],
            _task_description(spec.database, spec.vectorstore),
        ]
    )
    return RULE.join(
        [
            system,
            action_space_prompt(spec.actions, config.action_format, spec.pinned),
            INTERACTION_FRAMEWORK,
            hint_prompt(config),
        ]
    )


def stage_one_system_prompt(config: MethodConfig) -> str:
    spec = config.spec
    return RULE.join(
        [
            STAGE_ONE_SYSTEM[config.method],
            action_space_prompt(spec.actions, config.action_format, spec.pinned),
        ]
    )


def answer_system_prompt(system: str, action_format: ActionFormat) -> str:
    """System prompt of a single answer completion."""
    return RULE.join([system, action_space_prompt([ANSWER], action_format)])


def _scope_lines(task: TaskExample) -> list[str]:
    lines = []
    if task.anchor_pdf:
        lines.append(f"[Anchor PDF]: {json.dumps(task.anchor_pdf)}")
    if task.reference_pdf:
        lines.append(f"[Reference PDF]: {json.dumps(task.reference_pdf)}")
    if task.conference:
        lines.append(f"[Conference]: {json.dumps(task.conference)}")
    return lines


def task_prompt(
    task: TaskExample,
    max_turns: int | None = None,
    database_schema: str | None = None,
    vectorstore_schema: str | None = None,
    context: str | None = None,
    db_name: str = "ai_research",
) -> str:
    """The first user message of an episode.

    Args:
        task: The task to solve.
        max_turns: The turn cap, announced for iterative methods only.
        database_schema: Rendered database schema, if the method uses it.
        vectorstore_schema: Rendered vectorstore schema, if the method uses it.
        context: Retrieved context for single answer completions.
        db_name: Database name shown with the schemas.
    """
    lines = []
    if max_turns is not None:
        lines.append(
            f"Remember that, for each question, you only have {max_turns} "
            "interaction turns at most. Now, let's start!"
        )
    lines.append(f"[Question]: {task.question}")
    lines.append(f"[Answer Format]: {task.answer_format}")
    lines.extend(_scope_lines(task))
    if database_schema is not None:
        lines.append(
            f'[Database Schema]: The database schema for "{db_name}" is as follows:'
        )
        lines.append(database_schema)
    if vectorstore_schema is not None:
        lines.append(
            f"[Vectorstore Schema]: The vectorstore schema for {db_name} is as "
            "follows. You can try collections with different encoding models or "
            "modalities:"
        )
        lines.append(vectorstore_schema)
    if context is not None:
        lines.append(f"[Context]:\n{context}")
    return "\n".join(lines)


def observation_prompt(rendered: str) -> str:
    return f"[Observation]:\n{rendered}"


def forced_answer_prompt(max_turns: int) -> str:
    return (
        f"You have used all {max_turns} interaction turns. Based on the observations "
        "so far, predict the final answer now with the terminal action "
        "`GenerateAnswer`, strictly following the [Answer Format]. "
        + SINGLE_TURN_INSTRUCTION
    )


def retry_prompt(error: str) -> str:
    return f"[Error]: {error}\n{SINGLE_TURN_INSTRUCTION}"


def schemas_for(
    config: MethodConfig, database_schema: str, vectorstore_schema: str
) -> dict[str, str | None]:
    """The schema blocks shown to a method."""
    spec = config.spec
    return {
        "database_schema": database_schema if spec.database else None,
        "vectorstore_schema": vectorstore_schema if spec.vectorstore else None,
    }


def answer_messages(
    task: TaskExample, config: MethodConfig, system: str, context: str | None
) -> list[ChatMessage]:
    """Messages of a single answer completion over given context."""
    return [
        ChatMessage(
            role="system", content=answer_system_prompt(system, config.action_format)
        ),
        ChatMessage(
            role="user",
            content=task_prompt(task, context=context) + "\n" + SINGLE_TURN_INSTRUCTION,
        ),
    ]


def assemble_prompt(
    task: TaskExample,
    config: MethodConfig,
    database_schema: str,
    vectorstore_schema: str,
    context: str | None = None,
) -> list[ChatMessage]:
    """The opening messages of an episode.

    Iterative methods get the full system message and the task with the turn cap,
    two-stage methods the stage one prompt, and single completion methods the
    answer prompt over `context`.

    Example:
        ```python
        messages = assemble_prompt(task, MethodConfig(method="neusym"), db, vs)
        assert "[Answer Format]:" in messages[1].text
        ```
    """
    spec = config.spec
    schemas = schemas_for(config, database_schema, vectorstore_schema)
    match spec.kind:
        case "iterative":
            return [
                ChatMessage(role="system", content=iterative_system_prompt(config)),
                ChatMessage(
                    role="user",
                    content=task_prompt(task, max_turns=config.max_turns, **schemas),
                ),
            ]
        case "two-stage":
            return [
                ChatMessage(role="system", content=stage_one_system_prompt(config)),
                ChatMessage(
                    role="user",
                    content=task_prompt(task, **schemas)
                    + "\n"
                    + SINGLE_TURN_INSTRUCTION,
                ),
            ]
    return answer_messages(task, config, CLASSIC_SYSTEM, context)
