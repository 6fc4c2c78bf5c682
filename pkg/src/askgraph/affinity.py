"""Semantic affinity between two labels.

The score is the mean pairwise cosine similarity between the token
embeddings of the two labels.  Tokens found in the loaded word-vector
vocabulary use their stored vector; out-of-vocabulary tokens fall back to a
deterministic hashed character-trigram embedding that captures spelling
similarity.  Pairs that mix the two embedding sources contribute zero.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import numpy as np
import requests

from .errors import EmptyAfterNormalization, ProviderUnavailable

WORD = "word"
CHAR = "char"

_TOKEN_CLEAN_RE = re.compile(r"[^\w-]+", re.UNICODE)


def normalize_label(label: str) -> list[str]:
    """Lowercase, split on whitespace/underscores, strip punctuation.

    Intra-word hyphens survive so tokens like "co-founder" stay whole;
    IRI local names such as "Danish_straits" split into useful words.
    """
    tokens = []
    for raw in label.lower().replace("_", " ").split():
        cleaned = _TOKEN_CLEAN_RE.sub("", raw).strip("-")
        if cleaned:
            tokens.append(cleaned)
    return tokens


def char_embed(token: str, dimension: int) -> np.ndarray:
    """Deterministic hashed character-trigram embedding, L2-normalized."""
    padded = f"^{token}$"
    vector = np.zeros(dimension, dtype=np.float64)
    for i in range(max(1, len(padded) - 2)):
        trigram = padded[i : i + 3]
        digest = hashlib.blake2b(trigram.encode("utf-8"), digest_size=8).digest()
        h = int.from_bytes(digest, "big")
        sign = 1.0 if h >> 63 == 0 else -1.0
        vector[h % dimension] += sign
    norm = np.linalg.norm(vector)
    if norm == 0.0:  # cancellation across colliding trigrams
        vector[hash_bucket(padded, dimension)] = 1.0
        norm = 1.0
    return vector / norm


def hash_bucket(text: str, dimension: int) -> int:
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % dimension


@dataclass(frozen=True)
class TokenEmbedding:
    token: str
    vector: np.ndarray
    source: str  # "word" | "char"


class EmbeddingStore:
    """Immutable word-vector vocabulary; safe for concurrent readers."""

    def __init__(self, vocabulary: dict[str, np.ndarray], dimension: int):
        for token, vector in vocabulary.items():
            if vector.shape != (dimension,):
                raise ValueError(f"vector for {token!r} has wrong dimension")
            if not np.any(vector):
                raise ValueError(f"vector for {token!r} is all-zero")
        self.vocabulary = dict(vocabulary)
        self.dimension = dimension

    @classmethod
    def from_file(cls, path: str) -> "EmbeddingStore":
        """Load the usual text format: ``token v1 ... vD`` per line.

        An optional first header line ``N D`` is skipped, so pre-trained
        300-d vector files load unchanged.
        """
        vocabulary: dict[str, np.ndarray] = {}
        dimension = None
        with open(path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle):
                parts = line.rstrip("\n").split(" ")
                if not parts or parts == [""]:
                    continue
                if line_no == 0 and len(parts) == 2:
                    try:
                        int(parts[0]), int(parts[1])
                        continue  # header
                    except ValueError:
                        pass
                token, values = parts[0], parts[1:]
                vector = np.asarray([float(v) for v in values], dtype=np.float64)
                if dimension is None:
                    dimension = vector.size
                elif vector.size != dimension:
                    raise ValueError(
                        f"{path}:{line_no + 1}: expected {dimension} values"
                    )
                vocabulary[token] = vector
        if dimension is None:
            raise ValueError(f"{path}: no vectors found")
        return cls(vocabulary, dimension)

    def lookup(self, token: str) -> np.ndarray | None:
        return self.vocabulary.get(token)


def embed_label(label: str, store: EmbeddingStore) -> list[TokenEmbedding]:
    """One embedding per normalized token, word vectors first choice."""
    tokens = normalize_label(label)
    if not tokens:
        raise EmptyAfterNormalization(f"label {label!r} has no usable tokens")
    embeddings = []
    for token in tokens:
        vector = store.lookup(token)
        if vector is not None:
            embeddings.append(TokenEmbedding(token, vector, WORD))
        else:
            embeddings.append(
                TokenEmbedding(token, char_embed(token, store.dimension), CHAR)
            )
    return embeddings


def _unit(vectors: list[np.ndarray]) -> np.ndarray:
    matrix = np.stack(vectors)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix / norms


def affinity(label_x: str, label_y: str, store: EmbeddingStore) -> float:
    """Mean pairwise cosine over token embeddings; cross-source pairs are 0."""
    xs = embed_label(label_x, store)
    ys = embed_label(label_y, store)
    sims = _unit([e.vector for e in xs]) @ _unit([e.vector for e in ys]).T
    same_source = np.asarray(
        [[x.source == y.source for y in ys] for x in xs], dtype=bool
    )
    total = float(np.where(same_source, sims, 0.0).sum())
    return total / (len(xs) * len(ys))


def scorer_from_store(store: EmbeddingStore):
    """Affinity callable bound to a store, for injection into the linker."""

    def score(label_x: str, label_y: str) -> float:
        return affinity(label_x, label_y, store)

    return score


# --- coarse-grained variant ----------------------------------------------------


@dataclass(frozen=True)
class CoarseProviderConfig:
    """Remote sentence-embedding service returning one vector per string.

    Wire contract: POST <url> with JSON {"texts": [a, b]} and get back
    {"vectors": [[...], [...]]}.
    """

    url: str
    timeout: float = 15.0


def coarse_affinity(label_x: str, label_y: str, provider: CoarseProviderConfig) -> float:
    """Cosine similarity of two whole-label vectors from a remote embedder."""
    try:
        response = requests.post(
            provider.url,
            json={"texts": [label_x, label_y]},
            timeout=provider.timeout,
        )
        response.raise_for_status()
        vectors = response.json()["vectors"]
        vx = np.asarray(vectors[0], dtype=np.float64)
        vy = np.asarray(vectors[1], dtype=np.float64)
    except (requests.RequestException, ValueError, KeyError, IndexError) as exc:
        raise ProviderUnavailable(f"sentence embedder unavailable: {exc}") from exc
    denominator = np.linalg.norm(vx) * np.linalg.norm(vy)
    if denominator == 0.0:
        raise ProviderUnavailable("sentence embedder returned a zero vector")
    return float(np.dot(vx, vy) / denominator)


def coarse_scorer(provider: CoarseProviderConfig):
    def score(label_x: str, label_y: str) -> float:
        return coarse_affinity(label_x, label_y, provider)

    return score
