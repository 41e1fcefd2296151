# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import pytest

from docqa.exceptions import MutationRejectedError
from docqa.exceptions import SqlExecutionError
from docqa.exceptions import SqlSyntaxError
from docqa.store.guard import mask_literals
from docqa.store.guard import prepare_readonly_sql


@pytest.mark.parametrize(
    "sql,expected",
    [
        ("SELECT 1", "SELECT 1"),
        ("SELECT 1;", "SELECT 1"),
        ("SELECT 1 ;;", "SELECT 1"),
        ("```sql\nSELECT 1\n```", "SELECT 1"),
        ("```\nSELECT 1;\n```", "SELECT 1"),
        ("SELECT ';' AS semicolon", "SELECT ';' AS semicolon"),
        ("SELECT replace(title, 'a', 'b') FROM metadata", None),
        ("SELECT \"drop\" FROM t", None),
    ],
)
def test_prepare_readonly_sql(sql: str, expected: str | None) -> None:
    assert prepare_readonly_sql(sql) == (expected or sql)


@pytest.mark.parametrize("sql", ["", "   ", ";", "```sql\n```"])
def test_empty_statement(sql: str) -> None:
    with pytest.raises(SqlSyntaxError):
        prepare_readonly_sql(sql)


@pytest.mark.parametrize(
    "sql,keyword",
    [
        ("drop table metadata", "drop"),
        ("SELECT 1 /* */ ; DELETE FROM pages", None),
        ("Truncate pages", "truncate"),
        ("SET threads = 1", "set"),
        ("install httpfs", "install"),
    ],
)
def test_rejected(sql: str, keyword: str | None) -> None:
    if keyword is None:
        with pytest.raises(SqlExecutionError):
            prepare_readonly_sql(sql)
        return
    with pytest.raises(MutationRejectedError) as exc_info:
        prepare_readonly_sql(sql)
    assert exc_info.value.keyword == keyword


def test_mask_literals() -> None:
    masked = mask_literals(
        "SELECT 'it''s; drop' AS x, \"update\" -- delete\nFROM t /* alter */"
    )
    assert "drop" not in masked
    assert "update" not in masked
    assert "delete" not in masked
    assert "alter" not in masked
    assert ";" not in masked
    assert "SELECT" in masked
    assert "FROM t" in masked


@pytest.mark.parametrize(
    "sql,function",
    [
        ("SELECT * FROM read_text('/etc/passwd')", "read_text"),
        ("SELECT * FROM read_csv_auto('/root/.ssh/id_rsa')", "read_csv_auto"),
        ("SELECT content FROM READ_BLOB ('/etc/shadow')", "read_blob"),
        ("SELECT * FROM parquet_metadata('x.parquet')", "parquet_metadata"),
        ("SELECT * FROM glob('/home/*')", "glob"),
    ],
)
def test_file_functions_are_rejected(sql: str, function: str) -> None:
    with pytest.raises(SqlExecutionError) as exc_info:
        prepare_readonly_sql(sql)
    assert str(exc_info.value) == f"File access is not allowed: {function}"


def test_file_function_names_in_literals_are_allowed() -> None:
    sql = "SELECT title FROM metadata WHERE title = 'read_text(x)'"
    assert prepare_readonly_sql(sql) == sql
