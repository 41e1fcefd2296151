# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""The relational store: schema setup, validated inserts and read-only SQL."""
import threading
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Mapping
from contextlib import suppress
from pathlib import Path
from typing import Any
from uuid import UUID

import duckdb
import sqlalchemy
import structlog
from more_itertools import chunked
from sqlalchemy import Connection
from sqlalchemy import Engine
from sqlalchemy import func
from sqlalchemy import MetaData
from sqlalchemy import select
from sqlalchemy.exc import DBAPIError
from sqlalchemy.exc import OperationalError

from ..exceptions import CellNotFoundError
from ..exceptions import DanglingForeignKeyError
from ..exceptions import DuplicatePrimaryKeyError
from ..exceptions import SchemaMismatchError
from ..exceptions import SqlExecutionError
from ..exceptions import SqlSyntaxError
from ..exceptions import SqlTimeoutError
from ..exceptions import StorageUnavailableError
from ..exceptions import TypeMismatchError
from ..exceptions import UnknownColumnError
from ..metrics import sql_exceptions
from ..metrics import sql_time
from .guard import prepare_readonly_sql
from .models import EncodableCell
from .models import normalize_value
from .models import ResultTable
from .schema import build_catalog
from .schema import build_metadata
from .schema import LogicalType
from .schema import SchemaCatalog
from .schema import TableDef

logger = structlog.get_logger()

Row = Mapping[str, Any]

# Keep IN-lists well below engine limits
_LOOKUP_BATCH = 500


# Agent sessions can neither write the file nor reach the host filesystem
READONLY_CONNECT_ARGS: dict[str, Any] = {
    "read_only": True,
    "config": {"enable_external_access": False},
}


def create_engine(path: Path, read_only: bool = False) -> Engine:
    """Create an engine for a DuckDB store file.

    Every pooled connection opens the same file within this process, so readers in
    parallel episodes share one database instance. A read-only engine opens the
    file read-only with external access disabled.
    """
    if read_only:
        return sqlalchemy.create_engine(
            f"duckdb:///{path}", connect_args=READONLY_CONNECT_ARGS
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    return sqlalchemy.create_engine(f"duckdb:///{path}")


def run_upgrade(engine: Engine, database_metadata: MetaData) -> None:
    """Create all tables in the metadata.

    Schema migration is out of scope: an empty store gets every table, a store
    with exactly our tables is left alone, anything else is an error.
    """
    expected = {
        table.name: [column.name for column in table.columns]
        for table in database_metadata.sorted_tables
    }
    with engine.begin() as connection:
        rows = connection.exec_driver_sql(
            "SELECT table_name, column_name FROM information_schema.columns "
            "WHERE table_schema = 'main' ORDER BY table_name, ordinal_position"
        ).all()
        existing: dict[str, list[str]] = {}
        for table_name, column_name in rows:
            existing.setdefault(table_name, []).append(column_name)
        if not existing:
            database_metadata.create_all(connection, checkfirst=False)
            return
        if existing != expected:
            raise SchemaMismatchError(
                "Store already contains tables that differ from the document "
                f"schema: {sorted(existing)}"
            )


def _check_type(table: TableDef, column: str, value: Any) -> None:
    logical = table.column(column).type

    def fail(expected: str) -> None:
        raise TypeMismatchError(
            f"{table.name}.{column} expects {expected}, got {value!r}"
        )

    def is_int(item: Any) -> bool:
        return isinstance(item, int) and not isinstance(item, bool)

    match logical:
        case LogicalType.text:
            if not isinstance(value, str):
                fail("text")
        case LogicalType.uuid_text:
            if not isinstance(value, str):
                fail("uuid text")
            try:
                UUID(value)
            except ValueError:
                fail("uuid text")
        case LogicalType.integer:
            if not is_int(value):
                fail("an integer")
        case LogicalType.float:
            if not (is_int(value) or isinstance(value, float)):
                fail("a number")
        case LogicalType.text_array:
            if not isinstance(value, list) or not all(
                isinstance(item, str) for item in value
            ):
                fail("a list of text")
        case LogicalType.int_array:
            if not isinstance(value, list) or not all(map(is_int, value)):
                fail("a list of integers")
        case LogicalType.int4_array:
            if (
                not isinstance(value, list)
                or len(value) != 4
                or not all(map(is_int, value))
            ):
                fail("a list of four integers")


class DocumentStore:
    """Relational store of parsed documents.

    Writes happen through `insert_rows`/`bulk_insert` during ingestion only. Agent
    SQL goes through `execute_readonly_sql`, on a read-only session without
    external access, and never changes the store.

    DuckDB opens a file with one configuration per process, so the store swaps
    between its writable and its read-only engine when the mode changes. Swapping
    requires that no connection is checked out.
    """

    def __init__(
        self,
        path: Path,
        db_name: str = "ai_research",
        row_cap: int = 50,
        sql_timeout: float = 30.0,
        read_only: bool = False,
    ) -> None:
        self.path = path
        self.catalog = build_catalog(db_name)
        self.metadata = build_metadata(self.catalog)
        self.row_cap = row_cap
        self.sql_timeout = sql_timeout
        self.read_only = read_only
        self._switch_lock = threading.Lock()
        try:
            self.engine = create_engine(path, read_only=read_only)
        except Exception as error:  # pragma: no cover
            raise StorageUnavailableError(str(error)) from error

    def _engine_for(self, read_only: bool) -> Engine:
        with self._switch_lock:
            if self.read_only != read_only:
                logger.debug("Switching store engine", read_only=read_only)
                self.engine.dispose()
                self.engine = create_engine(self.path, read_only=read_only)
                self.read_only = read_only
            return self.engine

    def close(self) -> None:
        self.engine.dispose()

    def __enter__(self) -> "DocumentStore":
        return self

    def __exit__(self, *_: Any) -> None:
        self.close()

    def initialize_schema(self) -> SchemaCatalog:
        logger.info("Initializing schema", path=str(self.path))
        try:
            run_upgrade(self._engine_for(read_only=False), self.metadata)
        except OperationalError as error:
            raise StorageUnavailableError(str(error.orig)) from error
        return self.catalog

    # ------ #
    # Writes #
    # ------ #

    def insert_rows(self, table: str, rows: list[Row]) -> int:
        """Insert rows into one table in a single transaction.

        Returns:
            The number of inserted rows.
        """
        return self.bulk_insert({table: rows})[table]

    def bulk_insert(self, rows_by_table: Mapping[str, list[Row]]) -> dict[str, int]:
        """Validate and insert rows into several tables in one transaction.

        Rows are inserted in schema order, so a batch may carry a paper together with
        its pages and the elements referencing those pages.

        Raises:
            UnknownTableError, UnknownColumnError, TypeMismatchError,
            DuplicatePrimaryKeyError, DanglingForeignKeyError

        Returns:
            The number of inserted rows per table.
        """
        for table_name in rows_by_table:
            self.catalog.table(table_name)

        with self._engine_for(read_only=False).begin() as connection:
            pending: dict[str, set[str]] = {}
            for table in self.catalog.tables:
                rows = rows_by_table.get(table.name)
                if rows:
                    pending[table.name] = self._validate_rows(connection, table, rows)
            for table in self.catalog.tables:
                rows = rows_by_table.get(table.name)
                if rows:
                    self._validate_foreign_keys(connection, table, rows, pending)
            counts: dict[str, int] = {}
            for table in self.catalog.tables:
                rows = rows_by_table.get(table.name)
                if table.name not in rows_by_table:
                    continue
                if rows:
                    connection.execute(
                        self.metadata.tables[table.name].insert(),
                        [dict(row) for row in rows],
                    )
                counts[table.name] = len(rows or [])
        logger.debug("Inserted rows", counts=counts)
        return counts

    def _validate_rows(
        self, connection: Connection, table: TableDef, rows: list[Row]
    ) -> set[str]:
        known = set(table.column_names)
        keys: set[str] = set()
        for row in rows:
            for column in row:
                if column not in known:
                    raise UnknownColumnError(table.name, column)
            for column_def in table.columns:
                value = row.get(column_def.name)
                if value is None:
                    if not column_def.nullable:
                        raise TypeMismatchError(
                            f"{table.name}.{column_def.name} must not be null"
                        )
                    continue
                _check_type(table, column_def.name, value)
            key = row[table.primary_key]
            if key in keys:
                raise DuplicatePrimaryKeyError(table.name, key)
            keys.add(key)

        existing = self._existing_keys(
            connection, table.name, table.primary_key, keys
        )
        if existing:
            raise DuplicatePrimaryKeyError(table.name, min(existing))
        return keys

    def _validate_foreign_keys(
        self,
        connection: Connection,
        table: TableDef,
        rows: list[Row],
        pending: Mapping[str, set[str]],
    ) -> None:
        for fk in table.foreign_keys:
            values = {row[fk.column] for row in rows if row.get(fk.column) is not None}
            missing = values - pending.get(fk.foreign_table, set())
            found = self._existing_keys(
                connection, fk.foreign_table, fk.foreign_column, missing
            )
            dangling = missing - found
            if dangling:
                raise DanglingForeignKeyError(
                    table.name, fk.column, min(dangling), fk.foreign_table
                )

    def _existing_keys(
        self, connection: Connection, table: str, column: str, keys: Iterable[str]
    ) -> set[str]:
        sql_table = self.metadata.tables[table]
        found: set[str] = set()
        for batch in chunked(sorted(keys), _LOOKUP_BATCH):
            query = select(sql_table.c[column]).where(sql_table.c[column].in_(batch))
            found.update(connection.execute(query).scalars())
        return found

    # ----- #
    # Reads #
    # ----- #

    def execute_readonly_sql(self, sql: str, row_cap: int | None = None) -> ResultTable:
        """Execute one read-only statement on behalf of an agent.

        Raises:
            SqlSyntaxError: Engine parser errors, message passed through verbatim.
            MutationRejectedError: The statement could modify the store.
            SqlTimeoutError: Execution took longer than the configured timeout.
            SqlExecutionError: Any other engine error.

        Returns:
            At most `row_cap` rows, with `truncated` set when more were available.
        """
        cap = self.row_cap if row_cap is None else row_cap
        statement = prepare_readonly_sql(sql)
        log = logger.bind(sql=statement)
        log.debug("Executing readonly SQL")

        engine = self._engine_for(read_only=True)
        with engine.connect() as connection, sql_time.time():
            raw = connection.connection.dbapi_connection
            timed_out = threading.Event()

            def interrupt() -> None:
                timed_out.set()
                raw.interrupt()  # type: ignore[union-attr]

            timer = threading.Timer(self.sql_timeout, interrupt)
            timer.start()
            try:
                result = connection.exec_driver_sql(statement)
                if not result.returns_rows:
                    return ResultTable(column_names=[], rows=[])
                column_names = list(result.keys())
                fetched = result.fetchmany(cap + 1)
            except DBAPIError as error:
                raise self._map_error(error.orig, timed_out.is_set()) from error
            except duckdb.Error as error:
                raise self._map_error(error, timed_out.is_set()) from error
            finally:
                timer.cancel()
                # Never keep anything an agent did
                with suppress(DBAPIError, duckdb.Error):
                    connection.rollback()

        rows = [[normalize_value(value) for value in row] for row in fetched[:cap]]
        return ResultTable(
            column_names=column_names, rows=rows, truncated=len(fetched) > cap
        )

    def _map_error(self, error: BaseException | None, timed_out: bool) -> Exception:
        name = type(error).__name__
        sql_exceptions.labels(name).inc()
        message = str(error)
        if timed_out or isinstance(error, duckdb.InterruptException):
            return SqlTimeoutError(self.sql_timeout)
        if isinstance(error, duckdb.ParserException):
            return SqlSyntaxError(message)
        return SqlExecutionError(message)

    def enumerate_encodable_cells(self) -> Iterator[EncodableCell]:
        """Yield every non-null cell of every encodable column, ordered by key.

        A missing page number is reported as -1.
        """
        with self.engine.connect() as connection:
            for table_name, column in self.catalog.encodable:
                table = self.catalog.table(table_name)
                sql_table = self.metadata.tables[table_name]
                selected = [
                    sql_table.c[table.primary_key],
                    sql_table.c[table.pdf_id_column],
                    sql_table.c[column],
                ]
                if table.page_number_column is not None:
                    selected.append(sql_table.c[table.page_number_column])
                query = (
                    select(*selected)
                    .where(sql_table.c[column].is_not(None))
                    .order_by(sql_table.c[table.primary_key])
                )
                for row in connection.execute(query):
                    key, pdf_id, payload = row[0], row[1], row[2]
                    page = row[3] if len(row) > 3 else None
                    if isinstance(page, list):
                        page = page[0] if page else None
                    if isinstance(payload, list):
                        payload = tuple(payload)
                    yield EncodableCell(
                        table=table_name,
                        column=column,
                        primary_key=key,
                        pdf_id=pdf_id or "",
                        page_number=-1 if page is None else page,
                        payload=payload,
                    )

    def resolve_cell(self, table: str, column: str, primary_key: str) -> Any:
        """Look up a single cell by its provenance triplet.

        Raises:
            UnknownTableError, UnknownColumnError, CellNotFoundError
        """
        table_def = self.catalog.table(table)
        table_def.column(column)
        sql_table = self.metadata.tables[table]
        query = select(sql_table.c[column]).where(
            sql_table.c[table_def.primary_key] == primary_key
        )
        with self.engine.connect() as connection:
            rows = connection.execute(query).all()
        if not rows:
            raise CellNotFoundError(table, column, primary_key)
        return normalize_value(rows[0][0])

    def select_rows(
        self,
        table: str,
        where: Mapping[str, Any] | None = None,
        order_by: str | None = None,
    ) -> list[dict[str, Any]]:
        """Fetch whole rows with simple equality conditions."""
        table_def = self.catalog.table(table)
        sql_table = self.metadata.tables[table]
        query = select(sql_table)
        for column, value in (where or {}).items():
            table_def.column(column)
            query = query.where(sql_table.c[column] == value)
        query = query.order_by(sql_table.c[order_by or table_def.primary_key])
        with self.engine.connect() as connection:
            return [
                {key: normalize_value(value) for key, value in row.items()}
                for row in connection.execute(query).mappings()
            ]

    def count_rows(self, table: str) -> int:
        self.catalog.table(table)
        query = select(func.count()).select_from(self.metadata.tables[table])
        with self.engine.connect() as connection:
            return int(connection.execute(query).scalar_one())

    def has_paper(self, paper_id: str) -> bool:
        with self.engine.connect() as connection:
            found = self._existing_keys(
                connection, "metadata", "paper_id", [paper_id]
            )
        return bool(found)
