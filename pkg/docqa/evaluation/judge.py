# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""LLM judge used by the subjective evaluation functions."""
import re
from functools import cache

import structlog
from anyio import CapacityLimiter
from jinja2 import Environment
from jinja2 import PackageLoader
from jinja2 import StrictUndefined

from ..gateway import BaseGateway
from ..gateway import ChatMessage
from ..gateway import GenParams

logger = structlog.get_logger()

VERDICT_PATTERN = re.compile(r"VERDICT:\s*\**\s*(yes|no)\b", re.IGNORECASE)
SCORE_PATTERN = re.compile(r"SCORE:\s*\**\s*(\d+)\s*/\s*(\d+)", re.IGNORECASE)


@cache
def rubric_environment() -> Environment:
    return Environment(
        loader=PackageLoader("docqa.evaluation", "templates"),
        undefined=StrictUndefined,
        trim_blocks=True,
        lstrip_blocks=True,
        autoescape=False,
    )


def render_rubric(name: str, **context: object) -> str:
    """Render the judge prompt `templates/{name}.j2`."""
    template = rubric_environment().get_template(f"{name}.j2")
    return template.render(**context).strip()


def parse_verdict(reply: str) -> bool | None:
    """The last `VERDICT: yes|no` line of a reply, None if there is none."""
    found = VERDICT_PATTERN.findall(reply)
    if not found:
        return None
    return found[-1].lower() == "yes"


def parse_score(reply: str) -> tuple[int, int] | None:
    """The last `SCORE: k/n` line of a reply, None if there is none."""
    found = SCORE_PATTERN.findall(reply)
    if not found:
        return None
    points, total = found[-1]
    return int(points), int(total)


class Judge:
    """Asks a chat model for verdicts, at most `concurrency` calls at a time.

    Example:
        ```python
        judge = Judge(gateway, model="gpt-4o")
        reply, transcript = await judge.ask("... VERDICT: yes or VERDICT: no")
        ```
    """

    def __init__(
        self,
        gateway: BaseGateway,
        model: str = "gpt-4o",
        temperature: float = 0.0,
        concurrency: int = 4,
        max_output_tokens: int = 1024,
    ) -> None:
        self.gateway = gateway
        self.params = GenParams(
            model=model,
            temperature=temperature,
            top_p=1.0,
            max_output_tokens=max_output_tokens,
        )
        self.limiter = CapacityLimiter(concurrency)

    async def ask(
        self,
        prompt: str,
        model: str | None = None,
        temperature: float | None = None,
    ) -> tuple[str, list[dict[str, str]]]:
        """Send one prompt and return the reply with its transcript."""
        update: dict[str, object] = {}
        if model is not None:
            update["model"] = model
        if temperature is not None:
            update["temperature"] = temperature
        params = self.params.copy(update=update)
        async with self.limiter:
            reply = await self.gateway.chat(
                [ChatMessage(role="user", content=prompt)], params
            )
        logger.debug("Judge replied", model=params.model, reply=reply)
        transcript = [
            {"role": "user", "content": prompt, "model": params.model},
            {"role": "assistant", "content": reply},
        ]
        return reply, transcript
