# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Exceptions raised throughout DocQA.

Every library error derives from `DocQAError`. The environment turns them into
error observations, the agent runtime into a failed episode status and the CLI
into exit codes.
"""
from collections.abc import Iterable


class DocQAError(Exception):
    """Base class for all DocQA errors."""


class UnavailableMethodError(DocQAError):
    """Raised when a retrieval method is known but not implemented.

    Examples:
        ```python
        raise UnavailableMethodError("graphrag")
        ```
    """

    def __init__(self, method: str) -> None:
        super().__init__(f"Method {method!r} is unavailable in this build")
        self.method = method


class ConfigurationError(DocQAError):
    """Raised when settings are consistent in type but unusable together.

    Examples:
        ```python
        raise ConfigurationError("The scripted gateway needs a replay file")
        ```
    """


# ----- #
# Store #
# ----- #


class StoreError(DocQAError):
    """Base class for relational store errors."""


class StorageUnavailableError(StoreError):
    pass


class SchemaMismatchError(StoreError):
    """Raised when an existing store has tables shaped differently from ours."""


class UnknownTableError(StoreError):
    def __init__(self, table: str) -> None:
        super().__init__(f"Unknown table: {table}")
        self.table = table


class UnknownColumnError(StoreError):
    def __init__(self, table: str, column: str) -> None:
        super().__init__(f"Unknown column: {table}.{column}")
        self.table = table
        self.column = column


class TypeMismatchError(StoreError):
    """Raised when a value does not fit the logical type of its column.

    Also raised when a non-nullable column is missing from a row.
    """


class DuplicatePrimaryKeyError(StoreError):
    def __init__(self, table: str, key: str) -> None:
        super().__init__(f"Duplicate primary key in {table}: {key}")
        self.table = table
        self.key = key


class DanglingForeignKeyError(StoreError):
    def __init__(self, table: str, column: str, value: str, target: str) -> None:
        super().__init__(
            f"Foreign key {table}.{column}={value} has no matching row in {target}"
        )
        self.table = table
        self.column = column
        self.value = value


class CellNotFoundError(StoreError):
    def __init__(self, table: str, column: str, primary_key: str) -> None:
        super().__init__(f"No cell at ({table}, {column}, {primary_key})")


class SqlError(StoreError):
    """Base class for errors from agent-issued SQL."""


class SqlSyntaxError(SqlError):
    """The engine's parser rejected the statement; the message is kept verbatim."""


class SqlExecutionError(SqlError):
    pass


class SqlTimeoutError(SqlError):
    def __init__(self, timeout: float) -> None:
        super().__init__(f"SQL execution exceeded the time limit of {timeout} seconds")


class MutationRejectedError(SqlError):
    """Raised for any statement that could modify the store.

    Examples:
        ```python
        store.execute_readonly_sql("drop table metadata")  # raises
        ```
    """

    def __init__(self, keyword: str) -> None:
        super().__init__(
            f"Only read-only queries are allowed, found forbidden keyword {keyword!r}"
        )
        self.keyword = keyword


# --------- #
# Ingestion #
# --------- #


class IngestionError(DocQAError):
    """Base class for ingestion errors."""


class BundleParseError(IngestionError):
    pass


class BundleInvariantError(IngestionError):
    """Raised when a parsed bundle violates a structural invariant.

    The field path points at the offending element, e.g. `figures[0].bounding_box`.
    """

    def __init__(self, field_path: str, message: str) -> None:
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path


class DuplicatePaperError(IngestionError):
    def __init__(self, paper_id: str) -> None:
        super().__init__(f"Paper {paper_id} is already present in the store")
        self.paper_id = paper_id


# ----------- #
# Vectorstore #
# ----------- #


class VectorStoreError(DocQAError):
    """Base class for vector index errors."""


class UnknownCollectionError(VectorStoreError):
    def __init__(self, name: str) -> None:
        super().__init__(f"Collection {name!r} does not exist in the vectorstore")
        self.name = name


class NotEncodablePairError(VectorStoreError):
    def __init__(self, table: str, column: str) -> None:
        super().__init__(f"Column {table}.{column} is not encodable")
        self.table = table
        self.column = column


class ModalityMismatchError(NotEncodablePairError):
    def __init__(self, table: str, column: str, collection: str) -> None:
        VectorStoreError.__init__(
            self,
            f"Column {table}.{column} is not encoded in collection {collection!r}",
        )
        self.table = table
        self.column = column


class DuplicateEntryError(VectorStoreError):
    pass


class DanglingProvenanceError(VectorStoreError):
    pass


class UnsupportedQueryError(VectorStoreError):
    pass


class FilterError(VectorStoreError):
    """Base class for filter expression errors."""


class FilterSyntaxError(FilterError):
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownFieldError(FilterError):
    def __init__(self, field: str, offset: int) -> None:
        super().__init__(f"Unknown field {field!r} in filter (at offset {offset})")
        self.field = field
        self.offset = offset


class FilterTypeError(FilterError):
    pass


# ------- #
# Actions #
# ------- #


class ActionError(DocQAError):
    """Base class for action parsing and validation errors."""


class MalformedActionError(ActionError):
    """Raised when an action block cannot be parsed in the configured format.

    The message always names the format so the agent knows what was expected.

    Examples:
        ```python
        parse_action("RetrieveFromDatabase(sql=", ActionFormat.markdown)  # raises
        ```
    """

    def __init__(self, fmt: str, detail: str) -> None:
        super().__init__(
            f"Failed to parse a valid action in {fmt.upper()} format: {detail}"
        )
        self.fmt = fmt


class UnknownActionTypeError(ActionError):
    def __init__(self, action_type: str) -> None:
        super().__init__(f"Unknown action type: {action_type}")
        self.action_type = action_type


class MissingParameterError(ActionError):
    def __init__(self, action_type: str, names: Iterable[str]) -> None:
        self.names = sorted(names)
        super().__init__(
            f"Action {action_type} is missing required parameters: "
            + ", ".join(self.names)
        )


class InvalidParameterError(ActionError):
    pass


class InvalidLimitError(InvalidParameterError):
    pass


class DisallowedActionError(ActionError):
    def __init__(self, action_type: str, allowed: Iterable[str]) -> None:
        super().__init__(
            f"Action {action_type} is not allowed here. "
            f"Allowed action types: {', '.join(allowed)}"
        )
        self.action_type = action_type


# ----------- #
# Environment #
# ----------- #


class ExecutionError(DocQAError):
    """Base class for action execution errors."""


class ExpressionSyntaxError(ExecutionError):
    pass


class DivisionByZeroError(ExecutionError):
    pass


class DisallowedConstructError(ExecutionError):
    pass


class UnknownPaperError(ExecutionError):
    def __init__(self, paper_id: str) -> None:
        super().__init__(f"Unknown paper: {paper_id}")


class PageOutOfRangeError(ExecutionError):
    pass


class DegenerateBoxError(ExecutionError):
    pass


# ------- #
# Gateway #
# ------- #


class GatewayError(DocQAError):
    """Base class for LLM endpoint errors."""


class AuthError(GatewayError):
    pass


class RateLimitedError(GatewayError):
    pass


class NetworkError(GatewayError):
    pass


class TransientGatewayError(GatewayError):
    """Server side failures (5xx) which are worth retrying."""


class ContextOverflowError(GatewayError):
    pass


class GatewayProtocolError(GatewayError):
    pass


class VisionNotSupportedError(GatewayError):
    def __init__(self) -> None:
        super().__init__("vision not supported by current model")


class ScriptExhaustedError(GatewayError):
    pass


class ScriptMismatchError(GatewayError):
    pass


# ----- #
# Agent #
# ----- #


class TurnFormatError(DocQAError):
    """Base class for completions lacking the expected turn markers."""


class MissingThoughtError(TurnFormatError):
    def __init__(self) -> None:
        super().__init__(
            'Your response is missing the "[Thought]:" block. Please strictly follow '
            'the interaction framework: "[Thought]: ..." followed by "[Action]: ...".'
        )


class MissingActionError(TurnFormatError):
    def __init__(self) -> None:
        super().__init__(
            'Your response is missing the "[Action]:" block. Please strictly follow '
            'the interaction framework: "[Thought]: ..." followed by "[Action]: ...".'
        )


# ---------- #
# Evaluation #
# ---------- #


class EvaluationError(DocQAError):
    """Base class for dataset and evaluation errors."""


class DatasetParseError(EvaluationError):
    pass


class UnknownEvalFuncError(EvaluationError):
    def __init__(self, uuid: str, eval_func: str) -> None:
        super().__init__(f"Task {uuid}: unknown evaluation function {eval_func!r}")
        self.uuid = uuid
        self.eval_func = eval_func


class BadTagError(EvaluationError):
    def __init__(self, uuid: str, tag: str) -> None:
        super().__init__(f"Task {uuid}: unknown tag {tag!r}")
        self.uuid = uuid
        self.tag = tag


class EvalArgumentError(EvaluationError):
    pass


class JudgeUnavailableError(EvaluationError):
    def __init__(self, eval_func: str) -> None:
        super().__init__(f"{eval_func} requires an LLM judge but none was provided")
