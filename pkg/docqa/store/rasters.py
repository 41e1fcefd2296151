# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from collections.abc import Sequence
from io import BytesIO
from pathlib import Path

from PIL import Image

from ..exceptions import DegenerateBoxError


class RasterStore:
    """Page images stored as `<root>/<paper_id>/page_<n>.png`."""

    def __init__(self, root: Path) -> None:
        self.root = root

    def path_for(self, paper_id: str, page_number: int) -> Path:
        return self.root / paper_id / f"page_{page_number}.png"

    def save(self, paper_id: str, page_number: int, data: bytes) -> Path:
        path = self.path_for(paper_id, page_number)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        return path

    def load(self, paper_id: str, page_number: int) -> bytes:
        """Read a page raster.

        Raises:
            FileNotFoundError: If the page was never stored.
        """
        return self.path_for(paper_id, page_number).read_bytes()


def crop_png(data: bytes, bounding_box: Sequence[float]) -> tuple[bytes, int, int]:
    """Crop a PNG to `[x0, y0, w, h]`, clamped to the image.

    An empty box keeps the whole image.

    Raises:
        DegenerateBoxError: If nothing of the box is left after clamping.

    Returns:
        The PNG bytes of the crop with its width and height.
    """
    with Image.open(BytesIO(data)) as image:
        if not bounding_box:
            return data, image.width, image.height
        x0, y0, width, height = bounding_box
        left = max(0, min(round(x0), image.width))
        top = max(0, min(round(y0), image.height))
        right = max(0, min(round(x0 + width), image.width))
        bottom = max(0, min(round(y0 + height), image.height))
        if right <= left or bottom <= top:
            raise DegenerateBoxError(
                f"Bounding box {list(bounding_box)} is empty within the "
                f"{image.width}x{image.height} page"
            )
        crop = image.crop((left, top, right, bottom))
        buffer = BytesIO()
        crop.save(buffer, format="PNG")
    return buffer.getvalue(), right - left, bottom - top
