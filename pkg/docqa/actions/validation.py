# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from collections.abc import Collection

import structlog
from pydantic import BaseModel

from ..exceptions import DisallowedActionError
from ..exceptions import InvalidLimitError
from ..vectorstore import VectorIndex
from .models import Action
from .models import ACTION_TYPES
from .models import RetrieveFromVectorstore

logger = structlog.get_logger()


class PinnedView(BaseModel):
    """A vectorstore view that overrides whatever the agent asked for."""

    class Config:
        frozen = True

    collection_name: str
    table_name: str
    column_name: str


def validate_action(
    action: Action,
    index: VectorIndex,
    allowed: Collection[str] | None = None,
    pinned: PinnedView | None = None,
) -> Action:
    """Check an action against the method's action set and the vectorstore.

    Defaults are already filled in by the action models; this applies the
    pinned view, clamps the search limit and checks collection encodability.

    Args:
        action: The parsed action.
        index: The vector index the action will be executed against.
        allowed: Action types permitted in this episode, all when None.
        pinned: Vectorstore view forced on every retrieval.

    Raises:
        DisallowedActionError: If the action type is outside allowed.
        InvalidLimitError: If the search limit is not positive.
        UnknownCollectionError: If the collection does not exist.
        NotEncodablePairError: If the (table, column) pair is not in the collection.

    Returns:
        The validated action, possibly a modified copy.
    """
    if allowed is not None and action.action_type not in allowed:
        ordered = [name for name in ACTION_TYPES if name in allowed]
        raise DisallowedActionError(action.action_type, ordered)
    if not isinstance(action, RetrieveFromVectorstore):
        return action

    if pinned is not None:
        action = action.copy(update=pinned.dict())
    if action.limit <= 0:
        raise InvalidLimitError(
            f"The limit must be a positive integer, got {action.limit}"
        )
    if action.limit > index.hard_limit:
        logger.debug(
            "Clamping search limit", requested=action.limit, limit=index.hard_limit
        )
        action = action.copy(update={"limit": index.hard_limit})
    collection = index.collection(action.collection_name)
    index.check_pair(collection, action.table_name, action.column_name)
    return action
