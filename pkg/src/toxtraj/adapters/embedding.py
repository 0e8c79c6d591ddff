"""Text embedders. Vectors are 1-D float64 numpy arrays of unit norm."""

from __future__ import annotations

import hashlib
import os

import numpy as np

from ..errors import BackendError
from ..text import word_tokens

DEFAULT_EMBED_MODEL = "sentence-transformers/all-MiniLM-L6-v2"


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("embedding has non-finite entries")
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalise a zero vector")
    return v / n


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def _bucket(token: str, dim: int) -> int:
    h = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(h, "little") % dim


class MockEmbedder:
    """Hashed bag-of-words: token counts in ``dim`` buckets, L2-normalised.

    Depends only on the token multiset, so word order is ignored and
    lexical overlap translates into cosine similarity.
    """

    def __init__(self, dim: int = 64):
        self.dim = dim
        self.backend_id = f"mock-hash-{dim}"

    def embed(self, text: str) -> np.ndarray:
        if not text or not text.strip():
            raise ValueError("cannot embed empty text")
        toks = word_tokens(text) or [text.strip()]
        v = np.zeros(self.dim)
        for t in toks:
            v[_bucket(t, self.dim)] += 1.0
        return unit(v)


class RemoteEmbedder:
    """OpenAI-style ``POST {base_url}/embeddings`` client."""

    def __init__(self, base_url, model=DEFAULT_EMBED_MODEL, api_key_env="TOXTRAJ_API_KEY",
                 timeout=30.0, transport=None):
        import httpx

        headers = {}
        key = os.environ.get(api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self.model = model
        self.backend_id = f"remote:{model}"
        self._client = httpx.Client(base_url=base_url.rstrip("/"), headers=headers,
                                    timeout=timeout, transport=transport)
        self.dim = None

    def embed(self, text: str) -> np.ndarray:
        import httpx

        if not text or not text.strip():
            raise ValueError("cannot embed empty text")
        try:
            resp = self._client.post("/embeddings", json={"model": self.model, "input": text})
            resp.raise_for_status()
            vec = resp.json()["data"][0]["embedding"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise BackendError(f"embedding request failed: {exc}") from exc
        v = unit(vec)
        if self.dim is None:
            self.dim = len(v)
        elif len(v) != self.dim:
            raise BackendError(f"embedding dimension changed from {self.dim} to {len(v)}")
        return v


def embed(text: str, backend) -> np.ndarray:
    return backend.embed(text)
