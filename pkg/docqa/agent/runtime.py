# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""The interaction loop and the single completion methods."""
import base64
import json

import structlog

from ..actions import GenerateAnswer
from ..actions import parse_action
from ..actions import validate_action
from ..choices import ActionFormat
from ..choices import Method
from ..environment import Environment
from ..environment import Observation
from ..environment import truncate_tokens
from ..evaluation import TaskExample
from ..exceptions import DocQAError
from ..exceptions import GatewayError
from ..exceptions import VectorStoreError
from ..gateway import BaseGateway
from ..gateway import CallRecord
from ..gateway import ChatMessage
from ..gateway import GenParams
from ..gateway import ImagePart
from ..gateway import TextPart
from ..literals import parse_literal
from ..metrics import episode_turns
from ..metrics import episodes
from ..store import DocumentStore
from ..store import RasterStore
from ..store import render_schema_prompt
from ..vectorstore import render_vs_schema_prompt
from ..vectorstore import SearchRequest
from ..vectorstore import VectorIndex
from .methods import CLASSIC_VIEW
from .methods import MethodConfig
from .parsing import parse_turn
from .prompts import ANSWER_STAGE_SYSTEM
from .prompts import answer_messages
from .prompts import assemble_prompt
from .prompts import forced_answer_prompt
from .prompts import observation_prompt
from .prompts import retry_prompt
from .trajectory import ObservationRecord
from .trajectory import Status
from .trajectory import Trajectory
from .trajectory import Turn

logger = structlog.get_logger()


def extract_answer(turn: Turn, action_format: ActionFormat) -> object:
    """Take the answer of a single answer completion.

    A completion that is not a well-formed GenerateAnswer action still yields an
    answer: the literal found after `[Action]:`, or in the whole completion.
    """
    action_text = turn.completion
    try:
        turn.thought, action_text = parse_turn(turn.completion)
        action = parse_action(action_text, action_format)
    except DocQAError as error:
        turn.error = str(error)
        return parse_literal(action_text)
    turn.set_action(action)
    if isinstance(action, GenerateAnswer):
        return action.answer
    turn.error = f"Expected GenerateAnswer, got {action.action_type}"
    return parse_literal(action_text)


class Agent:
    """Runs episodes of any method over shared, read-only stores.

    Example:
        ```python
        agent = Agent(store, index, rasters, gateway)
        trajectory = await agent.run_episode(task, MethodConfig(method="neusym"))
        print(trajectory.final_answer)
        ```
    """

    def __init__(
        self,
        store: DocumentStore,
        index: VectorIndex,
        rasters: RasterStore,
        gateway: BaseGateway,
        params: GenParams | None = None,
    ) -> None:
        self.store = store
        self.index = index
        self.rasters = rasters
        self.gateway = gateway
        self.params = params
        self.database_schema = render_schema_prompt(store.catalog)
        self.vectorstore_schema = render_vs_schema_prompt(index.specs, store.catalog)

    def _environment(
        self, config: MethodConfig, trace: list[CallRecord]
    ) -> Environment:
        return Environment(
            self.store,
            self.index,
            self.rasters,
            self.gateway,
            observation_format=config.observation_format,
            token_budget=config.per_turn_token_budget,
            trace=trace,
        )

    async def _complete(
        self, messages: list[ChatMessage], trajectory: Trajectory
    ) -> str:
        return await self.gateway.chat(messages, self.params, trace=trajectory.calls)

    async def run_episode(self, task: TaskExample, config: MethodConfig) -> Trajectory:
        """Answer one task with the configured method.

        Gateway failures end the episode with status `failed`; every other
        failure is shown to the model as an error observation.
        """
        trajectory = Trajectory(task_uuid=task.uuid, method=config.method.value)
        with structlog.contextvars.bound_contextvars(
            task_uuid=task.uuid, method=config.method.value
        ):
            logger.info("Episode started")
            try:
                match config.spec.kind:
                    case "iterative":
                        await self._iterate(task, config, trajectory)
                    case "two-stage":
                        await self._two_stage(task, config, trajectory)
                    case _:
                        await self._single(task, config, trajectory)
            except GatewayError as error:
                logger.warning("Episode failed", error=str(error))
                trajectory.status = "failed"
                trajectory.error = f"{type(error).__name__}: {error}"
            trajectory.count_tokens()
            episodes.labels(method=config.method.value, status=trajectory.status).inc()
            episode_turns.labels(method=config.method.value).observe(
                trajectory.turn_count
            )
            logger.info(
                "Episode finished",
                status=trajectory.status,
                turns=trajectory.turn_count,
                prompt_tokens=trajectory.prompt_tokens,
                completion_tokens=trajectory.completion_tokens,
            )
        return trajectory

    # --------- #
    # Iterative #
    # --------- #

    async def _iterate(
        self, task: TaskExample, config: MethodConfig, trajectory: Trajectory
    ) -> None:
        spec = config.spec
        environment = self._environment(config, trajectory.calls)
        messages = assemble_prompt(
            task, config, self.database_schema, self.vectorstore_schema
        )
        for number in range(config.max_turns):
            completion = await self._complete(messages, trajectory)
            messages.append(ChatMessage(role="assistant", content=completion))
            turn = Turn(index=number, completion=completion)
            trajectory.turns.append(turn)
            try:
                turn.thought, action_text = parse_turn(completion)
                action = validate_action(
                    parse_action(action_text, config.action_format),
                    self.index,
                    allowed=spec.actions,
                    pinned=spec.pinned,
                )
            except DocQAError as error:
                logger.info("Malformed turn", turn=number, error=str(error))
                turn.error = str(error)
                observation = environment.error_observation(error)
            else:
                turn.set_action(action)
                if isinstance(action, GenerateAnswer):
                    trajectory.final_answer = action.answer
                    trajectory.status = "answered"
                    return
                observation = await environment.step(action)
                assert observation is not None
            turn.observation = ObservationRecord.from_observation(observation)
            messages.append(self._observation_message(observation))

        logger.info("Turn cap reached, forcing an answer", max_turns=config.max_turns)
        messages.append(
            ChatMessage(role="user", content=forced_answer_prompt(config.max_turns))
        )
        await self._answer(messages, config, trajectory, status="forced")

    @staticmethod
    def _observation_message(observation: Observation) -> ChatMessage:
        text = observation_prompt(observation.rendered)
        if observation.image is None:
            return ChatMessage(role="user", content=text)
        png = base64.b64decode(observation.image.png_base64)
        return ChatMessage(
            role="user", content=[TextPart(text=text), ImagePart.from_png(png)]
        )

    async def _answer(
        self,
        messages: list[ChatMessage],
        config: MethodConfig,
        trajectory: Trajectory,
        status: Status = "answered",
    ) -> None:
        completion = await self._complete(messages, trajectory)
        turn = Turn(index=trajectory.turn_count, completion=completion)
        trajectory.answer_turn = turn
        trajectory.final_answer = extract_answer(turn, config.action_format)
        trajectory.status = status

    # --------- #
    # Two-stage #
    # --------- #

    async def _two_stage(
        self, task: TaskExample, config: MethodConfig, trajectory: Trajectory
    ) -> None:
        """One retrieval action, one re-prompt if it is unusable, then the answer."""
        spec = config.spec
        environment = self._environment(config, trajectory.calls)
        messages = assemble_prompt(
            task, config, self.database_schema, self.vectorstore_schema
        )
        observation: Observation | None = None
        for attempt in range(2):
            completion = await self._complete(messages, trajectory)
            turn = Turn(index=attempt, completion=completion)
            trajectory.turns.append(turn)
            try:
                turn.thought, action_text = parse_turn(completion)
                action = validate_action(
                    parse_action(action_text, config.action_format),
                    self.index,
                    allowed=spec.actions,
                    pinned=spec.pinned,
                )
            except DocQAError as error:
                logger.info("Malformed retrieval action", error=str(error))
                turn.error = str(error)
                error_observation = environment.error_observation(error)
                turn.observation = ObservationRecord.from_observation(
                    error_observation
                )
                messages += [
                    ChatMessage(role="assistant", content=completion),
                    ChatMessage(role="user", content=retry_prompt(str(error))),
                ]
                continue
            turn.set_action(action)
            observation = await environment.step(action)
            assert observation is not None
            turn.observation = ObservationRecord.from_observation(observation)
            break

        if observation is None:
            trajectory.status = "failed"
            trajectory.error = "No usable retrieval action after one re-prompt"
            return
        await self._answer(
            answer_messages(task, config, ANSWER_STAGE_SYSTEM, observation.rendered),
            config,
            trajectory,
        )

    # ------------------ #
    # Single completions #
    # ------------------ #

    async def _single(
        self, task: TaskExample, config: MethodConfig, trajectory: Trajectory
    ) -> None:
        match config.method:
            case Method.classic:
                context = await self._classic_context(task, config, trajectory)
            case Method.title_abstract:
                context = self._title_abstract_context(task)
            case Method.full_text:
                context = self._full_text_context(task, config.full_text_cutoff)
            case _:
                context = None
        await self._answer(
            assemble_prompt(
                task,
                config,
                self.database_schema,
                self.vectorstore_schema,
                context=context,
            ),
            config,
            trajectory,
        )

    async def _classic_context(
        self, task: TaskExample, config: MethodConfig, trajectory: Trajectory
    ) -> str:
        """Top-K chunks for the raw question, restricted to the task's papers."""
        environment = self._environment(config, trajectory.calls)
        papers = task.papers
        request = SearchRequest(
            **CLASSIC_VIEW.dict(),
            query=task.question,
            filter=f"pdf_id in {json.dumps(papers)}" if papers else "",
            limit=config.classic_top_k,
        )
        try:
            table = await self.index.search(request, self.gateway, trajectory.calls)
        except VectorStoreError as error:
            return environment.error_observation(error).rendered
        return environment.table_observation(table).rendered

    def _title_abstract_context(self, task: TaskExample) -> str:
        blocks = []
        for paper_id in task.papers:
            for row in self.store.select_rows("metadata", where={"paper_id": paper_id}):
                abstract = row["abstract"] or ""
                blocks.append(f"[Title]: {row['title']}\n[Abstract]: {abstract}")
        return "\n\n".join(blocks)

    def _full_text_context(self, task: TaskExample, cutoff: int) -> str:
        pages = [
            row["page_content"] or ""
            for paper_id in task.papers
            for row in self.store.select_rows(
                "pages", where={"ref_paper_id": paper_id}, order_by="page_number"
            )
        ]
        text = "\n".join(pages)
        return truncate_tokens(text, cutoff) if text else ""


async def run_episode(
    task: TaskExample,
    config: MethodConfig,
    gateway: BaseGateway,
    store: DocumentStore,
    index: VectorIndex,
    rasters: RasterStore,
) -> Trajectory:
    return await Agent(store, index, rasters, gateway).run_episode(task, config)
