# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Execution of validated actions against the stores of one episode."""
import base64

import duckdb
import structlog

from ..actions import Action
from ..actions import CalculateExpr
from ..actions import GenerateAnswer
from ..actions import RetrieveFromDatabase
from ..actions import RetrieveFromVectorstore
from ..actions import ViewImage
from ..choices import ObservationFormat
from ..exceptions import DocQAError
from ..exceptions import PageOutOfRangeError
from ..exceptions import UnknownPaperError
from ..exceptions import VisionNotSupportedError
from ..gateway import BaseGateway
from ..gateway import CallRecord
from ..metrics import actions_executed
from ..metrics import sql_exceptions
from ..store import crop_png
from ..store import DocumentStore
from ..store import RasterStore
from ..store import ResultTable
from ..tokens import count_tokens
from ..tokens import MIN_TOKEN_BUDGET
from ..vectorstore import SearchRequest
from ..vectorstore import VectorIndex
from .calculator import calculate_expr
from .calculator import format_number
from .models import IMAGE_TOKEN_COST
from .models import ImagePayload
from .models import Observation
from .truncation import fit_table
from .truncation import truncate_tokens

logger = structlog.get_logger()


def view_image(
    store: DocumentStore,
    rasters: RasterStore,
    paper_id: str,
    page_number: int,
    bounding_box: list[float],
) -> ImagePayload:
    """Crop a stored page raster.

    Raises:
        UnknownPaperError: If the paper is not in the store.
        PageOutOfRangeError: If the paper has no such page.
        DegenerateBoxError: If the box is empty after clamping to the page.
    """
    if not store.has_paper(paper_id):
        raise UnknownPaperError(paper_id)
    pages = store.select_rows(
        "pages", where={"ref_paper_id": paper_id, "page_number": page_number}
    )
    if not pages:
        (metadata,) = store.select_rows("metadata", where={"paper_id": paper_id})
        raise PageOutOfRangeError(
            f"Page {page_number} is out of range, paper {paper_id} has "
            f"{metadata['num_pages']} pages"
        )
    png, width, height = crop_png(rasters.load(paper_id, page_number), bounding_box)
    return ImagePayload(
        paper_id=paper_id,
        page_number=page_number,
        bounding_box=list(bounding_box),
        width=width,
        height=height,
        png_base64=base64.b64encode(png).decode("ascii"),
    )


class Environment:
    """Executes actions of one episode and renders their observations.

    Instances share the read-only stores and may run concurrently, each
    owning its trace.

    Example:
        ```python
        environment = Environment(store, index, rasters, gateway)
        observation = await environment.step(CalculateExpr(expr="13 * 42"))
        assert observation.rendered == "546"
        ```
    """

    def __init__(
        self,
        store: DocumentStore,
        index: VectorIndex,
        rasters: RasterStore,
        gateway: BaseGateway | None = None,
        observation_format: ObservationFormat = ObservationFormat.json,
        token_budget: int = 5000,
        vision_capable: bool | None = None,
        trace: list[CallRecord] | None = None,
    ) -> None:
        self.store = store
        self.index = index
        self.rasters = rasters
        self.gateway = gateway
        self.observation_format = ObservationFormat(observation_format)
        if token_budget < MIN_TOKEN_BUDGET:
            raise ValueError(
                f"token_budget must be at least {MIN_TOKEN_BUDGET}, got {token_budget}"
            )
        self.token_budget = token_budget
        if vision_capable is None:
            vision_capable = gateway is not None and gateway.vision_capable
        self.vision_capable = vision_capable
        self.trace = trace

    def table_observation(self, table: ResultTable) -> Observation:
        rendered = fit_table(table, self.observation_format, self.token_budget)
        return Observation(
            kind="table",
            rendered=rendered,
            token_count=count_tokens(rendered),
            table=table,
        )

    def error_observation(self, error: BaseException) -> Observation:
        message = f"[Error]: {error}"
        rendered = truncate_tokens(message, self.token_budget)
        return Observation(
            kind="error",
            rendered=rendered,
            token_count=count_tokens(rendered),
            error=str(error),
        )

    async def step(self, action: Action) -> Observation | None:
        """Execute a validated action.

        Never raises: every failure becomes an error observation.

        Returns:
            The observation, or None for the terminal GenerateAnswer.
        """
        log = logger.bind(action_type=action.action_type)
        try:
            observation = await self._execute(action)
        except (DocQAError, duckdb.Error, OSError) as error:
            log.info("Action failed", error=str(error))
            actions_executed.labels(
                action_type=action.action_type, outcome="error"
            ).inc()
            return self.error_observation(error)
        except Exception as error:
            log.exception("Unexpected failure executing action")
            actions_executed.labels(
                action_type=action.action_type, outcome="error"
            ).inc()
            return self.error_observation(error)
        actions_executed.labels(action_type=action.action_type, outcome="ok").inc()
        return observation

    async def _execute(self, action: Action) -> Observation | None:
        match action:
            case RetrieveFromVectorstore():
                return await self._search(action)
            case RetrieveFromDatabase():
                return self._query(action)
            case ViewImage():
                return self._view(action)
            case CalculateExpr():
                return self._calculate(action)
            case GenerateAnswer():
                return None
        raise NotImplementedError(action.action_type)

    async def _search(self, action: RetrieveFromVectorstore) -> Observation:
        request = SearchRequest(
            collection_name=action.collection_name,
            query=action.query,
            table_name=action.table_name,
            column_name=action.column_name,
            filter=action.filter,
            limit=action.limit,
        )
        table = await self.index.search(request, self.gateway, trace=self.trace)
        return self.table_observation(table)

    def _query(self, action: RetrieveFromDatabase) -> Observation:
        try:
            table = self.store.execute_readonly_sql(action.sql)
        except DocQAError as error:
            sql_exceptions.labels(error=type(error).__name__).inc()
            raise
        return self.table_observation(table)

    def _view(self, action: ViewImage) -> Observation:
        if not self.vision_capable:
            raise VisionNotSupportedError()
        image = view_image(
            self.store,
            self.rasters,
            action.paper_id,
            action.page_number,
            action.bounding_box,
        )
        region = f"bounding box {image.bounding_box}" if image.bounding_box else "page"
        rendered = (
            f"[Image]: {region} of page {image.page_number} in paper "
            f"{image.paper_id}, {image.width}x{image.height} pixels, attached below."
        )
        return Observation(
            kind="image", rendered=rendered, token_count=IMAGE_TOKEN_COST, image=image
        )

    def _calculate(self, action: CalculateExpr) -> Observation:
        scalar = format_number(calculate_expr(action.expr))
        return Observation(
            kind="scalar",
            rendered=scalar,
            token_count=count_tokens(scalar),
            scalar=scalar,
        )

