"""Embedding providers and the paragraph vector cache.

Feature vectors come from pluggable providers: a deterministic feature
hashing embedder (built in, used for tests and offline runs), a
pre-computed vector file, or a sidecar HTTP service wrapping an external
encoder. All providers honor one contract: a fixed dimension, finite
32-bit float entries, and determinism for (text, provider) pairs where the
provider is file- or hash-backed.

Vector file format (``.pcv``)::

    header:  magic "PCVEC1" | dim u32 LE | count u64 LE | fingerprint 32 bytes
    record:  para_id length u32 LE | para_id UTF-8 | dim * f32 LE

The fingerprint is the SHA-256 of the producing provider's canonical spec
(kind + dim + settings); a cache whose fingerprint differs from the active
provider is invalidated wholesale.
"""

from __future__ import annotations

import hashlib
import json
import re
import struct
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Paragraph
from .errors import DimensionMismatch, MissingVector, ProviderUnavailable

MAGIC = b"PCVEC1"
DEFAULT_EXTERNAL_DIM = 1024
DEFAULT_HASHING_FEATURES = 1024
DEFAULT_HASHING_SEED = 42

_TOKEN = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class EmbeddingProviderSpec:
    kind: str  # "hashing" | "external_file" | "external_service"
    dim: int
    settings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("hashing", "external_file", "external_service"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be positive")

    def fingerprint(self) -> bytes:
        payload = json.dumps(
            {"kind": self.kind, "dim": self.dim, "settings": self.settings},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).digest()


def validate_vector(values: np.ndarray, dim: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise DimensionMismatch(f"expected vector of dim {dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector contains non-finite entries")
    return arr


# ----------------------------------------------------------------------
# Feature hashing embedder
# ----------------------------------------------------------------------

def token_bucket(token: str, n_features: int, seed: int) -> tuple[int, int]:
    """Map a token to (bucket, sign) using seeded blake2b.

    The first 8 digest bytes (little-endian) choose the bucket modulo
    ``n_features``; the low bit of the 9th byte chooses the sign, +1 when
    set. Stable across platforms and processes.
    """
    digest = hashlib.blake2b(
        token.encode("utf-8"),
        digest_size=9,
        key=seed.to_bytes(8, "little", signed=False),
    ).digest()
    bucket = int.from_bytes(digest[:8], "little") % n_features
    sign = 1 if digest[8] & 1 else -1
    return bucket, sign


def hashing_embed(text: str, n_features: int = DEFAULT_HASHING_FEATURES,
                  seed: int = DEFAULT_HASHING_SEED) -> np.ndarray:
    """Signed feature-hashing embedding, L2-normalized.

    Text is lowercased and split on non-alphanumeric runs (ASCII); each
    token adds its sign to its bucket. Text with no tokens yields the zero
    vector, which is exempt from normalization.
    """
    if n_features < 2:
        raise ValueError("n_features must be >= 2")
    counts = np.zeros(n_features, dtype=np.float64)
    for token in _TOKEN.findall(text.lower()):
        bucket, sign = token_bucket(token, n_features, seed)
        counts[bucket] += sign
    norm = np.linalg.norm(counts)
    if norm > 0:
        counts /= norm
    return counts.astype(np.float32)


# ----------------------------------------------------------------------
# Providers
# ----------------------------------------------------------------------

class EmbeddingProvider:
    """Base provider: subclasses fill in _embed_one / _embed_batch."""

    spec: EmbeddingProviderSpec

    def __init__(self):
        self.calls = 0  # observable provider-call counter for cache tests

    @property
    def dim(self) -> int:
        return self.spec.dim

    def fingerprint(self) -> bytes:
        return self.spec.fingerprint()

    def embed(self, text: str, para_id: str | None = None) -> np.ndarray:
        if not text or not text.strip():
            raise ValueError("cannot embed empty text")
        self.calls += 1
        return validate_vector(self._embed_one(text, para_id), self.dim)

    def embed_batch(self, texts: Sequence[str],
                    para_ids: Sequence[str | None] | None = None) -> list[np.ndarray]:
        ids = para_ids if para_ids is not None else [None] * len(texts)
        return [self.embed(t, p) for t, p in zip(texts, ids)]

    def _embed_one(self, text: str, para_id: str | None) -> np.ndarray:
        raise NotImplementedError


class HashingProvider(EmbeddingProvider):
    def __init__(self, n_features: int = DEFAULT_HASHING_FEATURES,
                 seed: int = DEFAULT_HASHING_SEED):
        super().__init__()
        self.n_features = n_features
        self.seed = seed
        self.spec = EmbeddingProviderSpec(
            kind="hashing",
            dim=n_features,
            settings={"n_features": n_features, "seed": seed},
        )

    def _embed_one(self, text, para_id):
        return hashing_embed(text, self.n_features, self.seed)


class FileProvider(EmbeddingProvider):
    """Serves pre-computed vectors keyed by para_id from a ``.pcv`` file.

    Presents the fingerprint stored in the file header, i.e. the identity
    of whatever encoder produced the vectors.
    """

    def __init__(self, path: str | Path):
        super().__init__()
        self.path = Path(path)
        try:
            cache = load_vectors(self.path)
        except FileNotFoundError as exc:
            raise ProviderUnavailable(f"vector file not found: {self.path}") from exc
        self._vectors = cache.vectors
        self._fingerprint = cache.fingerprint
        self.spec = EmbeddingProviderSpec(kind="external_file", dim=cache.dim)

    def fingerprint(self) -> bytes:
        return self._fingerprint

    def _embed_one(self, text, para_id):
        if para_id is None or para_id not in self._vectors:
            raise MissingVector(f"no vector for paragraph {para_id!r} in {self.path}")
        return self._vectors[para_id]


class ServiceProvider(EmbeddingProvider):
    """Sidecar HTTP encoder: POST /embed {"texts": [...]} -> {"dim", "vectors"}."""

    def __init__(self, url: str, dim: int = DEFAULT_EXTERNAL_DIM, timeout: float = 30.0):
        super().__init__()
        self.url = url.rstrip("/")
        self.timeout = timeout
        self.spec = EmbeddingProviderSpec(
            kind="external_service", dim=dim, settings={"url": self.url}
        )

    def _post(self, texts: Sequence[str]) -> list[np.ndarray]:
        body = json.dumps({"texts": list(texts)}).encode("utf-8")
        req = urllib.request.Request(
            self.url + "/embed", data=body,
            headers={"Content-Type": "application/json"}, method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
            raise ProviderUnavailable(f"embedding service at {self.url} failed: {exc}") from exc
        if payload.get("dim") != self.dim:
            raise DimensionMismatch(
                f"service returned dim {payload.get('dim')}, expected {self.dim}"
            )
        vectors = payload.get("vectors", [])
        if len(vectors) != len(texts):
            raise ProviderUnavailable(
                f"service returned {len(vectors)} vectors for {len(texts)} texts"
            )
        return [np.asarray(v, dtype=np.float32) for v in vectors]

    def _embed_one(self, text, para_id):
        return self._post([text])[0]

    def embed_batch(self, texts, para_ids=None):
        for t in texts:
            if not t or not t.strip():
                raise ValueError("cannot embed empty text")
        self.calls += len(texts)
        return [validate_vector(v, self.dim) for v in self._post(texts)]


def provider_from_string(spec: str, *, n_features: int = DEFAULT_HASHING_FEATURES,
                         seed: int = DEFAULT_HASHING_SEED,
                         dim: int = DEFAULT_EXTERNAL_DIM) -> EmbeddingProvider:
    """Parse CLI provider syntax: ``hashing``, ``file:<path>`` or ``http:<url>``."""
    if spec == "hashing":
        return HashingProvider(n_features=n_features, seed=seed)
    if spec.startswith("file:"):
        return FileProvider(spec[len("file:"):])
    if spec.startswith(("http://", "https://")):
        return ServiceProvider(spec, dim=dim)
    if spec.startswith("http:"):
        rest = spec[len("http:"):]
        url = rest if rest.startswith(("http://", "https://")) else "http://" + rest
        return ServiceProvider(url, dim=dim)
    raise ValueError(f"unknown provider spec {spec!r}")


# ----------------------------------------------------------------------
# Vector cache and file format
# ----------------------------------------------------------------------

class VectorCache:
    """para_id -> vector map bound to one provider fingerprint.

    Writes are serialized; reads are lock-free over the immutable arrays.
    """

    def __init__(self, dim: int, fingerprint: bytes,
                 vectors: dict[str, np.ndarray] | None = None):
        if len(fingerprint) != 32:
            raise ValueError("fingerprint must be 32 bytes")
        self.dim = dim
        self.fingerprint = fingerprint
        self.vectors: dict[str, np.ndarray] = vectors or {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, para_id: str) -> bool:
        return para_id in self.vectors

    def get(self, para_id: str) -> np.ndarray:
        try:
            return self.vectors[para_id]
        except KeyError:
            raise MissingVector(f"no cached vector for {para_id!r}") from None

    def put(self, para_id: str, values: np.ndarray):
        arr = validate_vector(values, self.dim)
        with self._lock:
            self.vectors[para_id] = arr

    def matrix(self, para_ids: Sequence[str]) -> np.ndarray:
        """Stack vectors for the given paragraphs into an (n, dim) array."""
        return np.stack([self.get(pid) for pid in para_ids]) if para_ids else \
            np.zeros((0, self.dim), dtype=np.float32)


def save_vectors(cache: VectorCache, path: str | Path):
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", cache.dim))
        fh.write(struct.pack("<Q", len(cache.vectors)))
        fh.write(cache.fingerprint)
        for para_id in sorted(cache.vectors):
            encoded = para_id.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(cache.vectors[para_id].astype("<f4").tobytes())


def load_vectors(path: str | Path) -> VectorCache:
    path = Path(path)
    with path.open("rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path} is not a PCVEC1 vector file")
        dim = struct.unpack("<I", fh.read(4))[0]
        count = struct.unpack("<Q", fh.read(8))[0]
        fingerprint = fh.read(32)
        vectors: dict[str, np.ndarray] = {}
        for _ in range(count):
            (id_len,) = struct.unpack("<I", fh.read(4))
            para_id = fh.read(id_len).decode("utf-8")
            raw = fh.read(dim * 4)
            vectors[para_id] = np.frombuffer(raw, dtype="<f4").astype(np.float32)
    return VectorCache(dim=dim, fingerprint=fingerprint, vectors=vectors)


def embed_corpus(paragraphs: Iterable[Paragraph], provider: EmbeddingProvider,
                 cache: VectorCache | None = None, batch_size: int = 64) -> VectorCache:
    """Embed every paragraph, reusing cached vectors where the fingerprint matches.

    A cache built by a different provider (fingerprint mismatch) is
    discarded and everything is recomputed. Provider errors are re-raised
    annotated with the offending para_id.
    """
    fingerprint = provider.fingerprint()
    if cache is None or cache.fingerprint != fingerprint or cache.dim != provider.dim:
        cache = VectorCache(dim=provider.dim, fingerprint=fingerprint)

    pending = [p for p in paragraphs if p.para_id not in cache]
    for start in range(0, len(pending), batch_size):
        chunk = pending[start:start + batch_size]
        texts = [p.text for p in chunk]
        ids = [p.para_id for p in chunk]
        try:
            vectors = provider.embed_batch(texts, ids)
        except Exception:
            # fall back to one-by-one so the failing paragraph is identifiable
            vectors = []
            for p in chunk:
                try:
                    vectors.append(provider.embed(p.text, p.para_id))
                except Exception as exc:
                    raise type(exc)(f"{exc} (paragraph {p.para_id})") from exc
        for pid, vec in zip(ids, vectors):
            cache.put(pid, vec)
    return cache
