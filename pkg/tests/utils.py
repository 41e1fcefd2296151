# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Fixture data: three ACL papers as parsed bundles, plus a mini dataset."""
import json
from io import BytesIO
from pathlib import Path
from typing import Any

from PIL import Image
from PIL import ImageDraw

from docqa.gateway import ScriptedGateway
from docqa.gateway import ScriptEntry

PAGE_WIDTH = 200
PAGE_HEIGHT = 300

CONTRACLM = "11111111-1111-4111-8111-111111111111"
LABEL_BIASES = "22222222-2222-4222-8222-222222222222"
MCLIP = "33333333-3333-4333-8333-333333333333"

ACL_TITLES = {
    CONTRACLM: "ContraCLM: Contrastive Learning For Causal Language Model",
    LABEL_BIASES: "Mitigating Label Biases for In-context Learning",
    MCLIP: "mCLIP: Multilingual CLIP via Cross-lingual Transfer",
}

TOPICS = {
    CONTRACLM: "contrastive learning for causal language models and code generation",
    LABEL_BIASES: "label biases of in-context learning and calibration of prompts",
    MCLIP: "multilingual vision language pretraining with cross-lingual transfer",
}


def page_png(page_number: int) -> bytes:
    """A white page with a grey block, different per page."""
    image = Image.new("RGB", (PAGE_WIDTH, PAGE_HEIGHT), "white")
    draw = ImageDraw.Draw(image)
    offset = 10 * page_number
    draw.rectangle((offset, 20, offset + 100, 100), fill="grey")
    buffer = BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


def bundle_document(paper_id: str, sections: int = 3) -> dict[str, Any]:
    """A two page bundle with one figure, one table and one equation."""
    title = ACL_TITLES[paper_id]
    topic = TOPICS[paper_id]
    return {
        "paper_id": paper_id,
        "metadata": {
            "title": title,
            "abstract": f"This paper studies {topic}.",
            "authors": ["Ada Lovelace", "Alan Turing"],
            "pub_year": 2023,
            "conference_full": "Annual Meeting of the Association for "
            "Computational Linguistics",
            "conference_abbreviation": "ACL",
            "volume": "long",
            "tags": ["nlp"],
        },
        "pages": [
            {
                "page_number": 1,
                "text": f"{title}\n\nAbstract. This paper studies {topic}. "
                "We propose a simple method.\n\n1 Introduction\nLarge language "
                f"models are strong. Our work on {topic} improves them.",
                "image": "page_1.png",
                "width": PAGE_WIDTH,
                "height": PAGE_HEIGHT,
            },
            {
                "page_number": 2,
                "text": "2 Experiments\nTable 1 shows the main results. Our method "
                "reaches 91.2 accuracy.\n\n3 Conclusion\nWe studied "
                f"{topic}.",
                "image": "page_2.png",
                "width": PAGE_WIDTH,
                "height": PAGE_HEIGHT,
            },
        ],
        "sections": [
            {
                "title": f"Section {index + 1}",
                "content": f"Section {index + 1} discusses {topic}.",
                "page_numbers": [1] if index == 0 else [1, 2],
            }
            for index in range(sections)
        ],
        "figures": [
            {
                "caption": "Figure 1: Overview of the method.",
                "bounding_box": [10, 20, 100, 80],
                "page_number": 1,
            }
        ],
        "tables": [
            {
                "caption": "Main results",
                "content": "<table><tr><td>accuracy</td><td>91.2</td></tr></table>",
                "bounding_box": [10, 150, 150, 60],
                "page_number": 2,
            }
        ],
        "equations": [{"content": "L = - \\sum_i \\log p(x_i)", "page_number": 2}],
        "references": [
            "Vaswani et al. 2017. Attention is all you need.",
            "Brown et al. 2020. Language models are few-shot learners.",
        ],
    }


def write_bundle(directory: Path, document: dict[str, Any]) -> Path:
    """Write a bundle and its page rasters into directory/<paper_id>/."""
    target = directory / document["paper_id"]
    target.mkdir(parents=True, exist_ok=True)
    for page in document["pages"]:
        (target / page["image"]).write_bytes(page_png(page["page_number"]))
    path = target / "bundle.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def write_acl_bundles(directory: Path) -> list[Path]:
    return [
        write_bundle(directory, bundle_document(paper_id))
        for paper_id in (CONTRACLM, LABEL_BIASES, MCLIP)
    ]


def answer_reply(answer: Any, thought: str = "I know the answer.") -> str:
    return f"[Thought]: {thought}\n[Action]: GenerateAnswer(answer={answer!r})"


def mini_dataset() -> list[dict[str, Any]]:
    """Ten tasks over the ACL papers, graded on the integer answer 3."""
    tags = [
        ["single", "text", "objective"],
        ["single", "table", "objective"],
        ["multiple", "metadata", "objective"],
        ["retrieval", "text", "objective"],
        ["single", "image", "objective"],
    ]
    return [
        {
            "uuid": f"task-{number:02d}",
            "question": f"Question {number}: how many ACL 2023 papers are stored?",
            "answer_format": "Your answer should be a single integer.",
            "tags": tags[number % len(tags)],
            "anchor_pdf": [CONTRACLM] if number % 2 else [],
            "reference_pdf": [],
            "conference": ["acl2023"],
            "evaluator": {
                "eval_func": "eval_int_exact_match",
                # Every third task expects a different count and fails
                "eval_kwargs": {"gold": 4 if number % 3 == 0 else 3},
            },
        }
        for number in range(10)
    ]


def scripted(*replies: str | tuple[str, str], **kwargs: Any) -> ScriptedGateway:
    """Scripted gateway from replies or (expect, reply) pairs."""
    script = [
        ScriptEntry(expect=reply[0], reply=reply[1])
        if isinstance(reply, tuple)
        else ScriptEntry(reply=reply)
        for reply in replies
    ]
    return ScriptedGateway(script, **kwargs)
