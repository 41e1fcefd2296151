# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Deterministic hash projection embedder.

Stands in for the dense text and image encoders: the SHA-256 digest of the model
name and the payload seeds a normal random projection, which is L2-normalized.
Equal inputs give equal vectors; nothing is learned.
"""
import hashlib

import numpy as np
from numpy.typing import NDArray


class HashEmbedder:
    def __init__(self, dimension: int = 64) -> None:
        self.dimension = dimension

    def _project(self, model: str, payload: bytes) -> NDArray[np.float64]:
        digest = hashlib.sha256(model.encode("utf-8") + b"\0" + payload).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        vector = rng.standard_normal(self.dimension)
        return vector / np.linalg.norm(vector)

    def embed_texts(self, model: str, texts: list[str]) -> list[list[float]]:
        return [self._project(model, text.encode("utf-8")).tolist() for text in texts]

    def embed_images(self, model: str, images: list[bytes]) -> list[list[float]]:
        return [self._project(model, image).tolist() for image in images]
