# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Pre-execution checks for agent-issued SQL.

The keyword check runs on the statement with comments, string literals and quoted
identifiers blanked out, so `where title = 'Drop the Baseline'` is allowed while
`drop table metadata` is not. Statements that slip through still execute on a
read-only session without external access, in a transaction that is always
rolled back.
"""
import re

from ..exceptions import MutationRejectedError
from ..exceptions import SqlExecutionError
from ..exceptions import SqlSyntaxError
from ..literals import strip_code_fences

FORBIDDEN_KEYWORDS = (
    "insert",
    "update",
    "delete",
    "drop",
    "alter",
    "create",
    "replace",
    "truncate",
    "merge",
    "upsert",
    "attach",
    "detach",
    "copy",
    "export",
    "import",
    "install",
    "load",
    "pragma",
    "set",
    "reset",
    "call",
    "checkpoint",
    "vacuum",
    "begin",
    "commit",
    "rollback",
    "grant",
    "revoke",
)

_FORBIDDEN = re.compile(
    r"\b(" + "|".join(FORBIDDEN_KEYWORDS) + r")\b(?!\s*\()", re.IGNORECASE
)

# Table functions that read files or URLs
_FILE_FUNCTION = re.compile(
    r"\b(read_\w+|\w+_scan|parquet_\w+|glob|sniff_csv|st_read)\s*\(", re.IGNORECASE
)
_MASKED = re.compile(
    r"""
      --[^\n]*                 # line comment
    | /\*.*?(?:\*/|$)          # block comment
    | '(?:[^']|'')*(?:'|$)     # string literal
    | "(?:[^"]|"")*(?:"|$)     # quoted identifier
    """,
    re.VERBOSE | re.DOTALL,
)


def mask_literals(sql: str) -> str:
    """Blank out comments, string literals and quoted identifiers."""
    return _MASKED.sub(" ", sql)


def prepare_readonly_sql(sql: str) -> str:
    """Validate agent SQL and return the statement to execute.

    Raises:
        SqlSyntaxError: If the statement is empty.
        SqlExecutionError: If more than one statement is given, or a table function
            reads files.
        MutationRejectedError: If a forbidden keyword is used.

    Returns:
        The statement without code fences or trailing semicolons.
    """
    statement = strip_code_fences(sql).strip()
    if statement.lower().startswith("sql\n"):
        statement = statement[4:].strip()
    while statement.endswith(";"):
        statement = statement[:-1].rstrip()
    if not statement:
        raise SqlSyntaxError("Empty SQL statement")

    masked = mask_literals(statement)
    if ";" in masked:
        raise SqlExecutionError("Only a single SQL statement can be executed at once")
    match = _FORBIDDEN.search(masked)
    if match is not None:
        raise MutationRejectedError(match.group(1).lower())
    function = _FILE_FUNCTION.search(masked)
    if function is not None:
        raise SqlExecutionError(
            f"File access is not allowed: {function.group(1).lower()}"
        )
    return statement
