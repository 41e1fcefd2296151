# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Retrieval methods and the per-episode configuration."""
from typing import Literal

from pydantic import BaseModel
from pydantic import Field
from pydantic import PositiveInt

from ..actions import PinnedView
from ..choices import ActionFormat
from ..choices import Method
from ..choices import ObservationFormat
from ..choices import UNAVAILABLE_METHODS
from ..config import AgentSettings
from ..exceptions import UnavailableMethodError
from ..tokens import MIN_TOKEN_BUDGET

RETRIEVE_VS = "RetrieveFromVectorstore"
RETRIEVE_DB = "RetrieveFromDatabase"
VIEW_IMAGE = "ViewImage"
CALCULATE = "CalculateExpr"
ANSWER = "GenerateAnswer"

# The dense text collection and view fixed for the classic methods
CLASSIC_VIEW = PinnedView(
    collection_name="text_sentence_transformers_all_minilm_l6_v2",
    table_name="chunks",
    column_name="text_content",
)


class MethodSpec(BaseModel):
    class Config:
        frozen = True

    kind: Literal["classic", "two-stage", "iterative", "baseline"]
    actions: tuple[str, ...] = ()
    database: bool = False
    vectorstore: bool = False
    pinned: PinnedView | None = None


METHODS: dict[Method, MethodSpec] = {
    Method.classic: MethodSpec(kind="classic"),
    Method.iterative_classic: MethodSpec(
        kind="iterative",
        actions=(RETRIEVE_VS, ANSWER),
        vectorstore=True,
        pinned=CLASSIC_VIEW,
    ),
    Method.two_stage_neu: MethodSpec(
        kind="two-stage", actions=(RETRIEVE_VS,), vectorstore=True
    ),
    Method.iterative_neu: MethodSpec(
        kind="iterative",
        actions=(RETRIEVE_VS, CALCULATE, VIEW_IMAGE, ANSWER),
        vectorstore=True,
    ),
    Method.two_stage_sym: MethodSpec(
        kind="two-stage", actions=(RETRIEVE_DB,), database=True
    ),
    Method.iterative_sym: MethodSpec(
        kind="iterative",
        actions=(RETRIEVE_DB, CALCULATE, VIEW_IMAGE, ANSWER),
        database=True,
    ),
    Method.hybrid: MethodSpec(
        kind="two-stage",
        actions=(RETRIEVE_VS, RETRIEVE_DB),
        database=True,
        vectorstore=True,
    ),
    Method.neusym: MethodSpec(
        kind="iterative",
        actions=(RETRIEVE_VS, RETRIEVE_DB, CALCULATE, VIEW_IMAGE, ANSWER),
        database=True,
        vectorstore=True,
    ),
    Method.question_only: MethodSpec(kind="baseline"),
    Method.title_abstract: MethodSpec(kind="baseline"),
    Method.full_text: MethodSpec(kind="baseline"),
}


def resolve_method(name: str | Method) -> Method:
    """Look up a method by name.

    Raises:
        UnavailableMethodError: For known but unimplemented methods.
        ValueError: For any other unknown name.
    """
    if isinstance(name, Method):
        return name
    if name in UNAVAILABLE_METHODS:
        raise UnavailableMethodError(name)
    return Method(name)


class MethodConfig(BaseModel):
    """How one episode is run."""

    class Config:
        frozen = True

    method: Method = Field(Method.neusym, description="Retrieval method.")
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

    @classmethod
    def from_settings(
        cls, settings: AgentSettings, method: str | Method
    ) -> "MethodConfig":
        return cls(method=resolve_method(method), **settings.dict())

    @property
    def spec(self) -> MethodSpec:
        return METHODS[self.method]
