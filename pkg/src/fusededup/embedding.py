"""Semantic vectors for the combined ``"name city"`` string.

The default provider is a signed feature-hashing embedder over character
n-grams. It is deterministic across runs and platforms and maps strings that
share surface form to nearby unit vectors. A remote provider speaks a small
JSON protocol (``POST /embed``) for hosting a real language model elsewhere.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import httpx
import numpy as np

from .errors import ConfigError, ProtocolError, ProviderError

PROVIDERS = ("local_hashed", "remote")
_SIGN_BIT = 1 << 63


@dataclass(frozen=True)
class EmbeddingConfig:
    dim: int = 768
    ngram_size: int = 3
    hash_seed: int = 0
    provider: str = "local_hashed"
    endpoint: str | None = None
    timeout: float = 30.0
    max_batch: int = 64
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ConfigError("embedding.dim must be >= 1")
        if self.ngram_size < 1:
            raise ConfigError("embedding.ngram_size must be >= 1")
        if self.provider not in PROVIDERS:
            raise ConfigError(f"embedding.provider must be one of {PROVIDERS}, got {self.provider!r}")
        if self.provider == "remote" and not self.endpoint:
            raise ConfigError("remote embedding provider needs embedding.endpoint")
        if self.max_batch < 1 or self.max_in_flight < 1:
            raise ConfigError("max_batch and max_in_flight must be >= 1")


def combine_text(name: str, city: str) -> str:
    return " ".join(f"{name} {city}".casefold().split())


def char_ngrams(text: str, n: int) -> list[str]:
    if not text:
        return []
    padded = f"#{text}#"
    if len(padded) < n:
        return [padded]
    return [padded[k:k + n] for k in range(len(padded) - n + 1)]


def _hash64(token: str, key: bytes) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "big")


def _seed_key(seed: int) -> bytes:
    return (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "big")


def hashed_embedding(text: str, cfg: EmbeddingConfig) -> np.ndarray:
    vec = np.zeros(cfg.dim)
    key = _seed_key(cfg.hash_seed)
    for gram in char_ngrams(text, cfg.ngram_size):
        h = _hash64(gram, key)
        vec[h % cfg.dim] += -1.0 if h & _SIGN_BIT else 1.0
    norm = math.sqrt(float(vec @ vec))
    if norm > 0:
        vec /= norm
    return vec


def normalize_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    return np.divide(mat, norms, out=np.zeros_like(mat, dtype=float), where=norms > 0)


def embed_batch(texts: Sequence[str], cfg: EmbeddingConfig | None = None) -> np.ndarray:
    """Embed ``texts`` into an ``(len(texts), cfg.dim)`` array of unit (or zero) rows."""
    cfg = cfg or EmbeddingConfig()
    if cfg.provider == "remote":
        return RemoteEmbedder(cfg).embed(texts)
    if not texts:
        return np.zeros((0, cfg.dim))
    return np.vstack([hashed_embedding(t, cfg) for t in texts])


class RemoteEmbedder:
    """Client for an external ``/embed`` service.

    Batches are capped at ``cfg.max_batch`` texts and at most
    ``cfg.max_in_flight`` requests run concurrently.
    """

    def __init__(self, cfg: EmbeddingConfig, transport: httpx.BaseTransport | None = None) -> None:
        if not cfg.endpoint:
            raise ConfigError("remote embedding provider needs an endpoint")
        self.cfg = cfg
        base = cfg.endpoint.rstrip("/")
        self.url = base if base.endswith("/embed") else base + "/embed"
        self._transport = transport

    def _post(self, client: httpx.Client, batch: list[str]) -> np.ndarray:
        try:
            resp = client.post(self.url, json={"texts": batch})
        except httpx.TimeoutException as exc:
            raise ProviderError(f"embedding service timed out: {exc}", retryable=True) from exc
        except httpx.TransportError as exc:
            raise ProviderError(f"embedding service unreachable: {exc}", retryable=True) from exc
        if not resp.is_success:
            retryable = resp.status_code >= 500 or resp.status_code == 429
            raise ProviderError(
                f"embedding service returned HTTP {resp.status_code}", retryable=retryable
            )
        try:
            vectors = resp.json()["vectors"]
            arr = np.asarray(vectors, dtype=float)
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed embedding response: {exc}") from exc
        if arr.ndim != 2 or arr.shape[0] != len(batch):
            raise ProtocolError(
                f"expected {len(batch)} vectors, got {len(vectors) if isinstance(vectors, list) else '?'}"
            )
        if arr.shape[1] != self.cfg.dim:
            raise ProtocolError(f"expected vectors of dim {self.cfg.dim}, got {arr.shape[1]}")
        if not np.all(np.isfinite(arr)):
            raise ProtocolError("embedding response contains non-finite values")
        return normalize_rows(arr)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        texts = list(texts)
        if not texts:
            return np.zeros((0, self.cfg.dim))
        step = self.cfg.max_batch
        batches = [texts[k:k + step] for k in range(0, len(texts), step)]
        with httpx.Client(timeout=self.cfg.timeout, transport=self._transport) as client:
            with ThreadPoolExecutor(max_workers=self.cfg.max_in_flight) as pool:
                parts = list(pool.map(lambda b: self._post(client, b), batches))
        return np.vstack(parts)


def remote_embed(texts: Sequence[str], endpoint: str, cfg: EmbeddingConfig | None = None) -> np.ndarray:
    cfg = replace(cfg or EmbeddingConfig(), provider="remote", endpoint=endpoint)
    return RemoteEmbedder(cfg).embed(texts)
