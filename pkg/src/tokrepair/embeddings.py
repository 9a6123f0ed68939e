"""Token embedding providers for the localizer.

HASHED is the default: each distinct token text maps to a fixed unit-norm
random vector derived from a content hash, so embeddings are a pure
function of (text, seed) with no training state.  TRAINABLE_TABLE learns a
vocabulary table end to end.  REMOTE fetches contextual vectors over HTTP.

Sinusoidal positional encodings are added after the unit-norm content
vector so repeated token texts still get distinct rows.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np
import requests

from .errors import ConfigError, RemoteUnavailableError

HASHED = "HASHED"
TRAINABLE_TABLE = "TRAINABLE_TABLE"
REMOTE = "REMOTE"

SINUSOIDAL = "SINUSOIDAL"
NONE = "NONE"


@dataclass
class EmbeddingConfig:
    provider: str = HASHED
    dim: int = 256
    positional: str = SINUSOIDAL
    seed: int = 0
    endpoint: str | None = None

    def as_dict(self) -> dict:
        return {
            "provider": self.provider,
            "dim": self.dim,
            "positional": self.positional,
            "seed": self.seed,
            "endpoint": self.endpoint,
        }


def hashed_vector(text: str, seed: int, dim: int) -> np.ndarray:
    """Unit-norm vector as a pure function of (text, seed)."""
    digest = hashlib.blake2b(
        f"{seed}\x00{text}".encode("utf-8"), digest_size=8
    ).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    v = rng.standard_normal(dim)
    norm = np.linalg.norm(v)
    if norm == 0.0:  # effectively impossible; keep the invariant anyway
        v[0] = 1.0
        norm = 1.0
    return v / norm


def sinusoidal_table(length: int, dim: int) -> np.ndarray:
    """Standard sin/cos positional table of shape (length, dim)."""
    pos = np.arange(length, dtype=np.float64)[:, None]
    idx = np.arange(dim, dtype=np.float64)[None, :]
    angle = pos / np.power(10000.0, (2.0 * np.floor(idx / 2.0)) / dim)
    table = np.zeros((length, dim), dtype=np.float64)
    table[:, 0::2] = np.sin(angle[:, 0::2])
    table[:, 1::2] = np.cos(angle[:, 1::2])
    return table


@dataclass
class EmbedResult:
    """Embeddings for one function: code rows, context rows, optional cls."""

    code: np.ndarray
    context: np.ndarray
    cls: np.ndarray | None = None

    @property
    def n_code(self) -> int:
        return self.code.shape[0]


class HashedProvider:
    provider_id = HASHED

    def __init__(self, cfg: EmbeddingConfig):
        if cfg.provider != HASHED:
            raise ConfigError(f"HashedProvider got provider {cfg.provider!r}")
        self.cfg = cfg
        self._cache: dict[str, np.ndarray] = {}
        self._pos = np.zeros((0, cfg.dim))

    def content_vector(self, text: str) -> np.ndarray:
        v = self._cache.get(text)
        if v is None:
            v = hashed_vector(text, self.cfg.seed, self.cfg.dim)
            self._cache[text] = v
        return v

    def _positions(self, upto: int) -> np.ndarray:
        if self._pos.shape[0] < upto:
            self._pos = sinusoidal_table(max(upto, 2 * self._pos.shape[0], 64), self.cfg.dim)
        return self._pos[:upto]

    def embed(self, code_texts: list[str], context_texts: list[str] | None = None) -> EmbedResult:
        context_texts = context_texts or []
        texts = list(code_texts) + list(context_texts)
        mat = np.empty((len(texts), self.cfg.dim), dtype=np.float64)
        for i, t in enumerate(texts):
            mat[i] = self.content_vector(t)
        if self.cfg.positional == SINUSOIDAL:
            mat = mat + self._positions(len(texts))
        n = len(code_texts)
        return EmbedResult(code=mat[:n], context=mat[n:], cls=None)


class TableProvider:
    """Learned embedding table with a hashed fallback row for unknowns."""

    provider_id = TRAINABLE_TABLE
    UNK = "<unk>"

    def __init__(self, cfg: EmbeddingConfig, vocab: list[str] | None = None,
                 table: np.ndarray | None = None):
        if cfg.provider != TRAINABLE_TABLE:
            raise ConfigError(f"TableProvider got provider {cfg.provider!r}")
        self.cfg = cfg
        vocab = list(vocab) if vocab else [self.UNK]
        if self.UNK not in vocab:
            vocab = [self.UNK] + vocab
        self.vocab = vocab
        self.index = {t: i for i, t in enumerate(vocab)}
        if table is None:
            table = np.stack(
                [hashed_vector(t, cfg.seed, cfg.dim) for t in vocab]
            )
        self.table = np.asarray(table, dtype=np.float64)
        self._pos = np.zeros((0, cfg.dim))

    @classmethod
    def from_texts(cls, cfg: EmbeddingConfig, texts: set[str]) -> "TableProvider":
        return cls(cfg, vocab=sorted(texts))

    def rows(self, texts: list[str]) -> np.ndarray:
        unk = self.index[self.UNK]
        return np.fromiter(
            (self.index.get(t, unk) for t in texts), dtype=np.int64, count=len(texts)
        )

    def _positions(self, upto: int) -> np.ndarray:
        if self._pos.shape[0] < upto:
            self._pos = sinusoidal_table(max(upto, 2 * self._pos.shape[0], 64), self.cfg.dim)
        return self._pos[:upto]

    def embed(self, code_texts: list[str], context_texts: list[str] | None = None) -> EmbedResult:
        context_texts = context_texts or []
        texts = list(code_texts) + list(context_texts)
        mat = self.table[self.rows(texts)]
        if self.cfg.positional == SINUSOIDAL:
            mat = mat + self._positions(len(texts))
        n = len(code_texts)
        return EmbedResult(code=mat[:n], context=mat[n:], cls=None)


class RemoteProvider:
    """Contextual embeddings over the sidecar wire contract."""

    provider_id = REMOTE

    def __init__(self, cfg: EmbeddingConfig, retries: int = 3, backoff: float = 0.25,
                 timeout: float = 30.0, session: requests.Session | None = None):
        if cfg.provider != REMOTE:
            raise ConfigError(f"RemoteProvider got provider {cfg.provider!r}")
        if not cfg.endpoint:
            raise ConfigError("REMOTE provider requires an endpoint")
        self.cfg = cfg
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self.session = session or requests.Session()

    def _post(self, payload: dict) -> dict:
        url = self.cfg.endpoint.rstrip("/") + "/v1/embed"
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                resp = self.session.post(url, json=payload, timeout=self.timeout)
                if resp.status_code == 503:
                    raise RemoteUnavailableError("embedding service is loading")
                if resp.status_code != 200:
                    raise RemoteUnavailableError(
                        f"embed endpoint returned {resp.status_code}"
                    )
                try:
                    return resp.json()
                except ValueError as exc:
                    raise RemoteUnavailableError("embed response is not JSON") from exc
            except (requests.ConnectionError, requests.Timeout, RemoteUnavailableError) as exc:
                last = exc
                if attempt < self.retries:
                    time.sleep(self.backoff * (2 ** attempt))
        raise RemoteUnavailableError(f"embed endpoint unreachable: {last}")

    def embed(self, code_texts: list[str], context_texts: list[str] | None = None) -> EmbedResult:
        context_texts = context_texts or []
        texts = list(code_texts) + list(context_texts)
        body = self._post({"tokens": texts})
        vectors = body.get("vectors")
        cls = body.get("cls")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise RemoteUnavailableError("embed response has wrong vector count")
        mat = np.asarray(vectors, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[1] != self.cfg.dim:
            raise RemoteUnavailableError(
                f"embed response dim {mat.shape} does not match {self.cfg.dim}"
            )
        n = len(code_texts)
        cls_vec = np.asarray(cls, dtype=np.float64) if cls is not None else None
        return EmbedResult(code=mat[:n], context=mat[n:], cls=cls_vec)


def make_provider(cfg: EmbeddingConfig, **kwargs):
    if cfg.provider == HASHED:
        return HashedProvider(cfg)
    if cfg.provider == TRAINABLE_TABLE:
        return TableProvider(cfg, **kwargs)
    if cfg.provider == REMOTE:
        return RemoteProvider(cfg, **kwargs)
    raise ConfigError(f"unknown embedding provider {cfg.provider!r}")
