"""Skip-gram word embeddings with negative sampling, in plain numpy.

Training follows the usual word2vec recipe: input vectors initialised
uniformly in ``[-0.5/dim, 0.5/dim]``, output vectors at zero, a dynamic window
(the effective radius for each centre word is drawn from ``1..window``), noise
words drawn from the unigram distribution raised to the 3/4 power, and a
learning rate decaying linearly from ``learning_rate`` to
``learning_rate * 1e-4`` over all training pairs. Frequent-word subsampling is
not applied.

Updates are applied in small mini-batches of (centre, context) pairs, which
keeps the loop vectorised while remaining fully deterministic for a seed.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

NEUTRAL_SIMILARITY = 0.5


class EmbeddingError(ValueError):
    pass


class UndefinedSimilarityError(EmbeddingError, ZeroDivisionError):
    pass


@dataclass(frozen=True)
class EmbeddingConfig:
    dimension: int = 100
    window: int = 5
    negative_samples: int = 5
    epochs: int = 5
    min_count: int = 2
    learning_rate: float = 0.025
    seed: int = 1
    batch_size: int = 64

    def __post_init__(self):
        for name in ("dimension", "window", "negative_samples", "epochs", "min_count", "batch_size"):
            if getattr(self, name) <= 0:
                raise EmbeddingError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.learning_rate > 0:
            raise EmbeddingError(f"learning_rate must be positive, got {self.learning_rate}")


@dataclass(eq=False)
class EmbeddingTable:
    vocab: dict[str, int]
    vectors: np.ndarray
    # mean SGNS loss per epoch, filled in by training
    epoch_losses: list[float] = field(default_factory=list, compare=False)

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def __len__(self) -> int:
        return len(self.vocab)

    def __getitem__(self, token: str) -> np.ndarray:
        return self.vectors[self.vocab[token]]

    def most_similar(self, token: str, topn: int = 10) -> list[tuple[str, float]]:
        v = self[token]
        norms = np.linalg.norm(self.vectors, axis=1) * np.linalg.norm(v)
        with np.errstate(invalid="ignore", divide="ignore"):
            sims = np.where(norms > 0, self.vectors @ v / norms, 0.0)
        words = sorted(self.vocab, key=self.vocab.get)
        order = sorted(range(len(words)), key=lambda i: (-sims[i], words[i]))
        return [(words[i], float(sims[i])) for i in order if words[i] != token][:topn]


def build_vocab(tokens: Sequence[str], min_count: int) -> tuple[dict[str, int], np.ndarray]:
    """Vocabulary ordered by descending frequency, ties alphabetically."""
    counts = Counter(tokens)
    kept = sorted((t for t, c in counts.items() if c >= min_count), key=lambda t: (-counts[t], t))
    vocab = {t: i for i, t in enumerate(kept)}
    return vocab, np.array([counts[t] for t in kept], dtype=np.float64)


def _pairs_for_epoch(ids: np.ndarray, window: int, rng: np.random.Generator) -> np.ndarray:
    n = len(ids)
    radius = rng.integers(1, window + 1, size=n)
    centres, contexts = [], []
    for offset in range(1, window + 1):
        if offset >= n:
            break
        use = radius[: n - offset] >= offset
        left = np.arange(n - offset)[use]
        centres.append(left)
        contexts.append(left + offset)
        use = radius[offset:] >= offset
        right = np.arange(offset, n)[use]
        centres.append(right)
        contexts.append(right - offset)
    if not centres:
        return np.empty((0, 2), dtype=np.int64)
    c = np.concatenate(centres)
    o = np.concatenate(contexts)
    # walk the corpus position by position, like the sequential C implementation
    order = np.lexsort((o, c))
    return np.stack([ids[c[order]], ids[o[order]]], axis=1)


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def sgns_batch(w_in, w_out, centre, context, negs):
    """Summed SGNS loss of a batch and its gradients.

    Returns ``(loss, d/d w_in[centre], d/d w_out[context], d/d w_out[negs])``
    with shapes ``(), (B, d), (B, d), (B, k, d)``.
    """
    v = w_in[centre]
    u_pos = w_out[context]
    u_neg = w_out[negs]
    s_pos = np.einsum("bd,bd->b", v, u_pos)
    s_neg = np.einsum("bd,bkd->bk", v, u_neg)
    loss = float(-(_log_sigmoid(s_pos).sum() + _log_sigmoid(-s_neg).sum()))
    g_pos = 1.0 / (1.0 + np.exp(-s_pos)) - 1.0
    g_neg = 1.0 / (1.0 + np.exp(-s_neg))
    grad_v = g_pos[:, None] * u_pos + np.einsum("bk,bkd->bd", g_neg, u_neg)
    return loss, grad_v, g_pos[:, None] * v, g_neg[..., None] * v[:, None, :]


def train_skipgram(corpus_tokens: Sequence[str], config: EmbeddingConfig | None = None) -> EmbeddingTable:
    """Train SGNS input vectors on one token stream.

    Raises :class:`EmbeddingError` when no token reaches ``min_count``.
    """
    config = config or EmbeddingConfig()
    vocab, counts = build_vocab(corpus_tokens, config.min_count)
    if not vocab:
        raise EmbeddingError(f"no token occurs at least {config.min_count} times")
    rng = np.random.default_rng(config.seed)
    dim, V = config.dimension, len(vocab)
    w_in = (rng.random((V, dim)) - 0.5) / dim
    w_out = np.zeros((V, dim))

    noise = counts ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())
    noise_cdf[-1] = 1.0

    ids = np.array([vocab[t] for t in corpus_tokens if t in vocab], dtype=np.int64)
    k = config.negative_samples
    alpha0 = config.learning_rate
    epoch_pairs = [_pairs_for_epoch(ids, config.window, rng) for _ in range(config.epochs)]
    total = max(sum(len(p) for p in epoch_pairs), 1)
    seen = 0
    losses: list[float] = []

    for epoch, pairs in enumerate(epoch_pairs):
        loss_sum = 0.0
        for start in range(0, len(pairs), config.batch_size):
            batch = pairs[start:start + config.batch_size]
            alpha = max(alpha0 * (1.0 - seen / total), alpha0 * 1e-4)
            seen += len(batch)
            centre, context = batch[:, 0], batch[:, 1]
            negs = np.searchsorted(noise_cdf, rng.random((len(batch), k)), side="right")
            negs = np.minimum(negs, V - 1)

            loss, grad_v, grad_pos, grad_neg = sgns_batch(w_in, w_out, centre, context, negs)
            loss_sum += loss
            np.add.at(w_out, context, -alpha * grad_pos)
            np.add.at(w_out, negs.ravel(), -alpha * grad_neg.reshape(-1, dim))
            np.add.at(w_in, centre, -alpha * grad_v)
        mean = loss_sum / max(len(pairs), 1)
        losses.append(mean)
        logger.debug("epoch %d: %d pairs, mean loss %.5f", epoch + 1, len(pairs), mean)

    if not np.all(np.isfinite(w_in)):
        raise EmbeddingError("training diverged (non-finite vectors)")
    return EmbeddingTable(vocab=vocab, vectors=w_in, epoch_losses=losses)


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise EmbeddingError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise UndefinedSimilarityError("cosine similarity of a zero vector is undefined")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def w2v_feature(person_token: str, entity_token: str, table: EmbeddingTable) -> float:
    """Cosine of the two tokens mapped to [0, 1]; 0.5 if either is out of vocabulary."""
    if person_token not in table or entity_token not in table:
        return NEUTRAL_SIMILARITY
    try:
        return (cosine(table[person_token], table[entity_token]) + 1.0) / 2.0
    except UndefinedSimilarityError:
        return NEUTRAL_SIMILARITY


def save_embeddings(table: EmbeddingTable, path) -> None:
    """word2vec text format; floats written with ``repr`` so reloads are exact."""
    words = sorted(table.vocab, key=table.vocab.get)
    lines = [f"{len(words)} {table.dimension}"]
    for w in words:
        lines.append(w + " " + " ".join(repr(float(x)) for x in table[w]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_embeddings(path) -> EmbeddingTable:
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise EmbeddingError(f"{path}: bad header")
        n, dim = int(header[0]), int(header[1])
        vocab: dict[str, int] = {}
        vectors = np.zeros((n, dim))
        for i in range(n):
            parts = f.readline().rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise EmbeddingError(f"{path}:{i + 2}: expected {dim} components")
            vocab[parts[0]] = i
            vectors[i] = [float(x) for x in parts[1:]]
    return EmbeddingTable(vocab=vocab, vectors=vectors)
