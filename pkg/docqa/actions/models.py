# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""The five agent actions."""
from typing import Any
from typing import ClassVar

from pydantic import BaseModel
from pydantic import Extra
from pydantic import conint
from pydantic import Field
from pydantic import validator


class Action(BaseModel):
    class Config:
        extra = Extra.forbid

    action_type: ClassVar[str]
    terminal: ClassVar[bool] = False

    @classmethod
    def required_parameters(cls) -> list[str]:
        return [name for name, field in cls.__fields__.items() if field.required]

    @classmethod
    def parameter_names(cls) -> list[str]:
        return list(cls.__fields__)

    def parameters(self) -> dict[str, Any]:
        return self.dict()


class RetrieveFromVectorstore(Action):
    action_type: ClassVar[str] = "RetrieveFromVectorstore"

    query: str
    collection_name: str
    table_name: str
    column_name: str
    filter: str = ""
    limit: int = 5


class RetrieveFromDatabase(Action):
    action_type: ClassVar[str] = "RetrieveFromDatabase"

    sql: str


class ViewImage(Action):
    action_type: ClassVar[str] = "ViewImage"

    paper_id: str
    page_number: conint(ge=1)  # type: ignore[valid-type]
    bounding_box: list[float] = Field(default_factory=list)

    @validator("bounding_box")
    def empty_or_four(cls, box: list[float]) -> list[float]:
        if len(box) not in (0, 4):
            raise ValueError("bounding_box must be empty or [x0, y0, w, h]")
        return box


class CalculateExpr(Action):
    action_type: ClassVar[str] = "CalculateExpr"

    expr: str


class GenerateAnswer(Action):
    action_type: ClassVar[str] = "GenerateAnswer"
    terminal: ClassVar[bool] = True

    answer: Any = Field(...)


ACTION_TYPES: dict[str, type[Action]] = {
    action.action_type: action
    for action in (
        RetrieveFromVectorstore,
        RetrieveFromDatabase,
        ViewImage,
        CalculateExpr,
        GenerateAnswer,
    )
}
