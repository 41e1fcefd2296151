# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""The action and observation space prompt.

Every action type is documented by description, observation, syntax and use
cases, the syntax block and use case actions rendered in the episode's action
format.
"""
import json
import xml.etree.ElementTree as ET
from collections.abc import Collection
from typing import Any

import yaml
from pydantic import BaseModel

from ..choices import ActionFormat
from .formats import serialize_action
from .models import Action
from .models import ACTION_TYPES
from .models import CalculateExpr
from .models import GenerateAnswer
from .models import RetrieveFromDatabase
from .models import RetrieveFromVectorstore
from .models import ViewImage
from .validation import PinnedView


class ParameterDoc(BaseModel):
    class Config:
        frozen = True

    name: str
    type: str
    description: str
    required: bool = True
    default: Any = None


class UseCase(BaseModel):
    class Config:
        frozen = True

    scenario: str
    action: Action


class ActionDoc(BaseModel):
    class Config:
        frozen = True

    action_type: str
    description: str
    observation: str
    parameters: list[ParameterDoc]
    cases: list[UseCase] = []


ACTION_DOCS: dict[str, ActionDoc] = {
    doc.action_type: doc
    for doc in (
        ActionDoc(
            action_type=RetrieveFromVectorstore.action_type,
            description=(
                "Given a query text, retrieve relevant context from the Milvus "
                "vectorstore. Please refer to the schema of different collections "
                "and fields for each stored data entry."
            ),
            observation=(
                "The observation space is the retrieved top-ranked entries from the "
                "Milvus vectorstore based on input parameters."
            ),
            parameters=[
                ParameterDoc(
                    name="query",
                    type="str",
                    description=(
                        "The query text will be encoded and used to search for "
                        "relevant context. You can rephrase the user question to "
                        "obtain a more clear and structured requirement."
                    ),
                ),
                ParameterDoc(
                    name="collection_name",
                    type="str",
                    description=(
                        "The name of the collection in the Milvus vectorstore to "
                        "search for relevant context. Please ensure the collection "
                        "does exist in the vectorstore."
                    ),
                ),
                ParameterDoc(
                    name="table_name",
                    type="str",
                    description=(
                        "The table name is used to narrow down the search space. And "
                        "it will be added to the filter condition. Please ensure this "
                        "table has encodable columns."
                    ),
                ),
                ParameterDoc(
                    name="column_name",
                    type="str",
                    description=(
                        "The column name is used to narrow down the search space. And "
                        "it will be added to the filter condition. Please ensure it is "
                        "encodable in `table_name`."
                    ),
                ),
                ParameterDoc(
                    name="filter",
                    required=False,
                    type="str",
                    default="",
                    description=(
                        "The filter condition to narrow down the search space. Please "
                        "refer to the syntax of filter rules. By default, it is empty. "
                        "It is suggested to restrict `primary_key`, `pdf_id`, or "
                        "`page_number` to refine search results."
                    ),
                ),
                ParameterDoc(
                    name="limit",
                    required=False,
                    type="int",
                    default=5,
                    description=(
                        "The number of top-ranked context to retrieve. Please ensure "
                        "that it is a positive integer. And extremely large limit "
                        "values may be truncated."
                    ),
                ),
            ],
            cases=[
                UseCase(
                    scenario=(
                        "Search the Milvus collection text_bm25_en, which use BM25 "
                        "sparse embeddings, with the filter condition \"table_name == "
                        "'chunks' and column_name == 'text_content' and pdf_id == "
                        "'12345678' and page_number == 1\" to restrict the content "
                        "source and return the top 10 relevant entries."
                    ),
                    action=RetrieveFromVectorstore(
                        query=(
                            "Does this paper discuss LLM-based agent on its first page?"
                        ),
                        collection_name="text_bm25_en",
                        table_name="chunks",
                        column_name="text_content",
                        filter="pdf_id == '12345678' and page_number == 1",
                        limit=10,
                    ),
                ),
                UseCase(
                    scenario=(
                        "Perform a vector-based similarity search on all cell values "
                        "from the `abstract` column in the `metadata` table in the "
                        "database, using the MiniLM-L6-v2 sentence transformer "
                        "embeddings. By default, the top 5 most relevant entries will "
                        "be returned."
                    ),
                    action=RetrieveFromVectorstore(
                        query="Is there any work about the topic structured RAG?",
                        collection_name="text_sentence_transformers_all_minilm_l6_v2",
                        table_name="metadata",
                        column_name="abstract",
                    ),
                ),
            ],
        ),
        ActionDoc(
            action_type=RetrieveFromDatabase.action_type,
            description=(
                "Given a SQL query, retrieve relevant context from the DuckDB "
                "database. Please refer to the database schema for the tables and "
                "columns you can query. Only read-only statements are executed."
            ),
            observation=(
                "The observation space is the execution result of the SQL query, "
                "organized as a table. The error message will be shown if the query "
                "fails. Long results may be truncated."
            ),
            parameters=[
                ParameterDoc(
                    name="sql",
                    type="str",
                    description=(
                        "The concrete DuckDB SQL query to execute and retrieve results."
                    ),
                ),
            ],
            cases=[
                UseCase(
                    scenario=(
                        "Find the titles of the papers published at ACL in 2023 from "
                        "the `metadata` table."
                    ),
                    action=RetrieveFromDatabase(
                        sql=(
                            "SELECT title FROM metadata WHERE conference_abbreviation "
                            "= 'ACL' AND pub_year = 2023"
                        )
                    ),
                ),
            ],
        ),
        ActionDoc(
            action_type=CalculateExpr.action_type,
            description=(
                "Calculate an arithmetic expression. Only numbers, parentheses and the "
                "operators +, -, *, /, //, % and ** are supported."
            ),
            observation=(
                "The observation space is the calculated result of the expression, or "
                "the error message if the expression is invalid."
            ),
            parameters=[
                ParameterDoc(
                    name="expr",
                    type="str",
                    description="The expression to calculate, e.g., '13 * 42'.",
                ),
            ],
            cases=[
                UseCase(
                    scenario=(
                        "Calculate the relative improvement of an accuracy of 83.5 "
                        "over a baseline of 78.2."
                    ),
                    action=CalculateExpr(expr="(83.5 - 78.2) / 78.2"),
                ),
            ],
        ),
        ActionDoc(
            action_type=ViewImage.action_type,
            description=(
                "You can retrieve the visual information of the paper by taking this "
                "action. Please provide the paper id, the page number, and the "
                "optional bounding box."
            ),
            observation=(
                "The observation space is the image that you want to view. We will "
                "show you the image according to your parameters. The error message "
                "will be shown if there is any problem with the image retrieval."
            ),
            parameters=[
                ParameterDoc(
                    name="paper_id",
                    type="str",
                    description="The paper id to retrieve the image.",
                ),
                ParameterDoc(
                    name="page_number",
                    type="int",
                    description=(
                        "The page number (starting from 1) of the paper to retrieve "
                        "the image."
                    ),
                ),
                ParameterDoc(
                    name="bounding_box",
                    required=False,
                    type="List[float]",
                    default=[],
                    description=(
                        "The bounding box of the image to retrieve. The format is "
                        "[x_min, y_min, delta_x, delta_y]. The complete PDF page will "
                        "be retrieved if not provided."
                    ),
                ),
            ],
            cases=[
                UseCase(
                    scenario=(
                        "View the region of a figure on the third page of the paper "
                        "with id '12345678'."
                    ),
                    action=ViewImage(
                        paper_id="12345678",
                        page_number=3,
                        bounding_box=[50.0, 120.0, 400.0, 250.0],
                    ),
                ),
            ],
        ),
        ActionDoc(
            action_type=GenerateAnswer.action_type,
            description=(
                "When you think you have collected enough information, answer the "
                "user question with this terminal action. The answer can be of any "
                "type depending on the answer format of the question."
            ),
            observation=(
                "There is no observation for this terminal action, since it indicates "
                "the completion of the task and the end of the interaction."
            ),
            parameters=[
                ParameterDoc(
                    name="answer",
                    type="Any",
                    description=(
                        "The final answer to the user question. Please adhere to the "
                        "answer format for the current question."
                    ),
                ),
            ],
            cases=[
                UseCase(
                    scenario="The answer format requires a single word Yes or No.",
                    action=GenerateAnswer(answer="Yes"),
                ),
                UseCase(
                    scenario="The answer format requires a list of strings.",
                    action=GenerateAnswer(answer=["SCG-NLI", "false"]),
                ),
            ],
        ),
    )
}


def _parameter_document(parameter: ParameterDoc) -> dict[str, Any]:
    document: dict[str, Any] = {"type": parameter.type, "required": parameter.required}
    if not parameter.required:
        document["default"] = parameter.default
    document["description"] = parameter.description
    return document


def _syntax_json(doc: ActionDoc) -> str:
    parameters = {p.name: _parameter_document(p) for p in doc.parameters}
    return json.dumps(
        {"action_type": doc.action_type, "parameters": parameters}, indent=4
    )


def _syntax_markdown(doc: ActionDoc) -> str:
    signature = ", ".join(
        f"{p.name}: {p.type}" + ("" if p.required else f" = {p.default!r}")
        for p in doc.parameters
    )
    lines = [f"{doc.action_type}({signature})"]
    for p in doc.parameters:
        necessity = "required" if p.required else f"optional, default to {p.default!r}"
        lines.append(f"    - {p.name}: {p.type}, {necessity}. {p.description}")
    return "\n".join(lines)


def _syntax_xml(doc: ActionDoc) -> str:
    root = ET.Element("action")
    ET.SubElement(root, "action_type").text = doc.action_type
    parameters = ET.SubElement(root, "parameters")
    for p in doc.parameters:
        element = ET.SubElement(parameters, p.name)
        for key, value in _parameter_document(p).items():
            if isinstance(value, bool):
                value = str(value).lower()
            elif not isinstance(value, str):
                value = json.dumps(value)
            ET.SubElement(element, key).text = value
    ET.indent(root, space="    ")
    return ET.tostring(root, encoding="unicode")


def _syntax_yaml(doc: ActionDoc) -> str:
    parameters = {p.name: _parameter_document(p) for p in doc.parameters}
    return yaml.safe_dump(
        {"action_type": doc.action_type, "parameters": parameters},
        sort_keys=False,
        indent=4,
        width=88,
    ).rstrip("\n")


_SYNTAX = {
    ActionFormat.markdown: _syntax_markdown,
    ActionFormat.json: _syntax_json,
    ActionFormat.xml: _syntax_xml,
    ActionFormat.yaml: _syntax_yaml,
}


def _render_doc(doc: ActionDoc, fmt: ActionFormat, pinned: PinnedView | None) -> str:
    label = fmt.value.upper()
    description = doc.description
    if pinned is not None and doc.action_type == RetrieveFromVectorstore.action_type:
        description += (
            f" In this setting, the collection is always `{pinned.collection_name}` "
            f"and the view is always fixed to column "
            f"`{pinned.table_name}.{pinned.column_name}`, other values for these "
            "parameters are ignored."
        )
    blocks = [
        f"### Action Type\n{doc.action_type}",
        f"### Description\n{description}",
        f"### Observation\n{doc.observation}",
        f"### Syntax and Parameters ({label} Format)\n{_SYNTAX[fmt](doc)}",
    ]
    cases = [
        f"#### Case {number}\n{case.scenario}\n\n"
        f"[Action]:\n{serialize_action(case.action, fmt)}"
        for number, case in enumerate(doc.cases, start=1)
    ]
    blocks.append(f"### Use Cases ({label} Format)\n" + "\n\n".join(cases))
    return "\n\n".join(blocks)


def action_space_prompt(
    allowed: Collection[str],
    fmt: ActionFormat,
    pinned: PinnedView | None = None,
) -> str:
    """Render the action and observation space prompt for the allowed actions.

    Example:
        ```python
        prompt = action_space_prompt({"RetrieveFromDatabase"}, ActionFormat.json)
        ```

    Args:
        allowed: The action types to document. Must not be empty.
        fmt: The action format used in syntax blocks and use cases.
        pinned: Fixed vectorstore view, mentioned in the retrieval description.

    Returns:
        The prompt text, actions ordered as in the action catalogue.
    """
    fmt = ActionFormat(fmt)
    names = [name for name in ACTION_TYPES if name in allowed]
    if not names:
        raise ValueError("At least one action type must be allowed")
    listing = ", ".join(f'"{name}"' for name in names)
    header = (
        "## Action and Observation Space\n"
        f"All allowable action types include [{listing}]. Here is the detailed "
        f"specification in {fmt.value.upper()} format for them:"
    )
    docs = [_render_doc(ACTION_DOCS[name], fmt, pinned) for name in names]
    return header + "\n\n" + "\n\n----\n\n".join(docs)
