# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""LLM summaries of papers, pages, sections, figures and tables.

One Jinja2 template per element kind lives in `templates/`. Requests are issued
sequentially in a fixed order: the TL;DR, pages, sections, figures, tables.
"""
from functools import cache

import structlog
from jinja2 import Environment
from jinja2 import PackageLoader
from jinja2 import StrictUndefined
from pydantic import BaseModel

from ..exceptions import GatewayError
from ..gateway import BaseGateway
from ..gateway import ChatMessage
from ..gateway import GenParams
from ..gateway import ImagePart
from ..gateway import TextPart
from ..store import crop_png
from ..tokens import TOKEN_PATTERN
from .bundle import DocumentBundle

logger = structlog.get_logger()


class SummarySet(BaseModel):
    tldr: str
    page_summaries: list[str]
    section_summaries: list[str]
    image_summaries: list[str]
    table_summaries: list[str]


def head_tokens(text: str, limit: int) -> str:
    """Cut text after its first `limit` tokens."""
    for index, match in enumerate(TOKEN_PATTERN.finditer(text)):
        if index == limit:
            return text[: match.start()].rstrip() + " ..."
    return text


@cache
def template_environment() -> Environment:
    environment = Environment(
        loader=PackageLoader("docqa.ingestion", "templates"),
        undefined=StrictUndefined,
        trim_blocks=True,
        lstrip_blocks=True,
        autoescape=False,
    )
    environment.filters["head_tokens"] = head_tokens
    return environment


def render_prompt(kind: str, **context: object) -> str:
    return template_environment().get_template(f"{kind}.j2").render(**context).strip()


async def _summarize(
    gateway: BaseGateway,
    params: GenParams | None,
    kind: str,
    prompt: str,
    image: bytes | None = None,
) -> str:
    content: str | list = prompt
    if image is not None:
        content = [TextPart(text=prompt), ImagePart.from_png(image)]
    try:
        summary = await gateway.chat(
            [ChatMessage(role="user", content=content)], params
        )
    except GatewayError as error:
        logger.warning("Summary generation failed", kind=kind, error=str(error))
        return ""
    return summary.strip()


async def generate_summaries(
    bundle: DocumentBundle, gateway: BaseGateway, params: GenParams | None = None
) -> SummarySet:
    """Request a summary for every summarizable element of a bundle.

    Gateway failures left after the gateway's own retries are logged and give an
    empty summary, so ingestion is never aborted by the LLM.

    Args:
        bundle: The validated bundle.
        gateway: Chat endpoint to summarize with.
        params: Generation parameters, the gateway defaults if not given.

    Returns:
        The summaries, with lists aligned to the bundle's element lists.
    """
    title = bundle.metadata.title
    log = logger.bind(paper_id=bundle.paper_id)
    log.info("Generating summaries")

    tldr = await _summarize(
        gateway,
        params,
        "tldr",
        render_prompt("tldr", title=title, abstract=bundle.metadata.abstract),
    )
    pages = [
        await _summarize(
            gateway,
            params,
            "page",
            render_prompt(
                "page", title=title, page_number=page.page_number, content=page.text
            ),
        )
        for page in bundle.pages
    ]
    sections = [
        await _summarize(
            gateway,
            params,
            "section",
            render_prompt(
                "section",
                title=title,
                section_title=section.title,
                content=section.content,
            ),
        )
        for section in bundle.sections
    ]
    images = []
    for figure in bundle.figures:
        crop = None
        if gateway.vision_capable:
            crop, _, _ = crop_png(
                bundle.page(figure.page_number).raster, figure.bounding_box
            )
        prompt = render_prompt(
            "image",
            title=title,
            page_number=figure.page_number,
            caption=figure.caption,
            context=bundle.page(figure.page_number).text,
            with_image=crop is not None,
        )
        images.append(await _summarize(gateway, params, "image", prompt, crop))
    tables = [
        await _summarize(
            gateway,
            params,
            "table",
            render_prompt(
                "table",
                title=title,
                page_number=table.page_number,
                caption=table.caption,
                content=table.content,
            ),
        )
        for table in bundle.tables
    ]
    log.info(
        "Summaries generated",
        calls=1 + len(pages) + len(sections) + len(images) + len(tables),
    )
    return SummarySet(
        tldr=tldr,
        page_summaries=pages,
        section_summaries=sections,
        image_summaries=images,
        table_summaries=tables,
    )
