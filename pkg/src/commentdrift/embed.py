"""Blended code/comment documents, skip-gram training, and similarities.

Documents interleave each source word with two randomly drawn words from the
opposite side, so a window of five sees both vocabularies around any center.
Training is plain sequential SGD on the negative-sampling objective; with a
fixed seed the resulting model is bitwise reproducible. Both vector tables
are initialized from the seeded generator (small uniform noise) so every
vocabulary word carries a nonzero vector from the start.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .lexicon import TokenSequence, normalize

_MAGIC = b"CDEM"
_FORMAT_VERSION = 1


@dataclass
class SkipgramConfig:
    window_radius: int = 2
    embedding_dim: int = 100
    negative_samples: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    seed: int = 0

    def validate(self) -> None:
        for name in ("window_radius", "embedding_dim", "negative_samples", "epochs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class EmbeddingModel:
    vocab: dict[str, int]
    input_vectors: np.ndarray  # (V, dim) learned word representations
    output_vectors: np.ndarray  # (V, dim) context-side representations
    config: SkipgramConfig
    train_log: list[float] = field(default_factory=list)  # mean loss per epoch

    def vector(self, word: str) -> np.ndarray | None:
        at = self.vocab.get(word)
        return self.input_vectors[at] if at is not None else None


@dataclass
class DocumentPair:
    comment_doc: TokenSequence
    code_doc: TokenSequence
    degenerate: bool = False


def build_documents(comment_text: str, code_text: str, seed: int) -> DocumentPair:
    """Normalized [word, other1, other2] triples for both sides of a pair.

    Draws are uniform over the opposite side's token list; the second draw
    avoids repeating the first unless fewer than two distinct words exist.
    When either side normalizes to nothing, no blending happens: each side's
    document falls back to the other side's plain tokens if it is the empty
    one, or its own tokens otherwise, and the pair is flagged degenerate.
    """
    comment_tokens = normalize(comment_text, "comment")
    code_tokens = normalize(code_text, "code")
    if not comment_tokens or not code_tokens:
        return DocumentPair(
            comment_tokens or code_tokens, code_tokens or comment_tokens, degenerate=True
        )
    rng = np.random.default_rng(seed)

    def blend(primary: TokenSequence, other: TokenSequence) -> TokenSequence:
        doc: list[str] = []
        distinct = len(set(other)) >= 2
        for word in primary:
            first = other[int(rng.integers(len(other)))]
            if distinct:
                rest = [t for t in other if t != first]
                second = rest[int(rng.integers(len(rest)))]
            else:
                second = other[int(rng.integers(len(other)))]
            doc.extend((word, first, second))
        return tuple(doc)

    return DocumentPair(blend(comment_tokens, code_tokens), blend(code_tokens, comment_tokens))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def pair_loss(
    center_vec: np.ndarray, context_vec: np.ndarray, negative_vecs: np.ndarray
) -> float:
    """Negative-sampling loss for one (center, context, negatives) triple."""
    eps = 1e-12
    pos = float(_sigmoid(np.array([context_vec @ center_vec]))[0])
    loss = -np.log(max(pos, eps))
    if len(negative_vecs):
        neg = _sigmoid(-(negative_vecs @ center_vec))
        loss -= float(np.sum(np.log(np.maximum(neg, eps))))
    return float(loss)


def pair_gradients(
    center_vec: np.ndarray, context_vec: np.ndarray, negative_vecs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(d/d center, d/d context, d/d negatives) of pair_loss."""
    g_pos = float(_sigmoid(np.array([context_vec @ center_vec]))[0]) - 1.0
    grad_center = g_pos * context_vec
    grad_context = g_pos * center_vec
    if len(negative_vecs):
        g_neg = _sigmoid(negative_vecs @ center_vec)  # sigma(s) - 0
        grad_center = grad_center + g_neg @ negative_vecs
        grad_negatives = np.outer(g_neg, center_vec)
    else:
        grad_negatives = np.zeros((0, center_vec.shape[0]))
    return grad_center, grad_context, grad_negatives


def train_skipgram(corpus: list[TokenSequence], config: SkipgramConfig) -> EmbeddingModel:
    """Sequential SGD over every (center, context) pair, epoch by epoch.

    All contexts of one center share a parameter snapshot and learning rate;
    the learning rate decays linearly per center step to a floor of 1e-4 of
    its starting value. Negatives follow the unigram^0.75 distribution.
    """
    config.validate()
    sentences = [tuple(s) for s in corpus if len(s) > 0]
    if not sentences:
        raise ValueError("corpus is empty")

    vocab: dict[str, int] = {}
    counts: list[int] = []
    for sentence in sentences:
        for word in sentence:
            at = vocab.setdefault(word, len(vocab))
            if at == len(counts):
                counts.append(0)
            counts[at] += 1
    size = len(vocab)
    dim = config.embedding_dim

    rng = np.random.default_rng(np.random.PCG64(config.seed))
    span = 0.5 / dim
    inputs = rng.uniform(-span, span, size=(size, dim))
    outputs = rng.uniform(-span, span, size=(size, dim))

    noise = np.asarray(counts, dtype=np.float64) ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    encoded = [np.asarray([vocab[w] for w in s], dtype=np.int64) for s in sentences]
    k = config.window_radius
    total_centers = config.epochs * sum(len(s) for s in encoded)
    lr0 = config.learning_rate
    lr_floor = lr0 * 1e-4

    train_log: list[float] = []
    step = 0
    for _ in range(config.epochs):
        epoch_loss = 0.0
        epoch_pairs = 0
        for ids in encoded:
            length = len(ids)
            for t in range(length):
                lr = max(lr0 * (1.0 - step / total_centers), lr_floor)
                step += 1
                lo, hi = max(0, t - k), min(length, t + k + 1)
                ctx = np.concatenate((ids[lo:t], ids[t + 1 : hi]))
                if not len(ctx):
                    continue
                center = ids[t]
                negs = np.searchsorted(
                    noise_cdf, rng.random(len(ctx) * config.negative_samples)
                ).reshape(len(ctx), config.negative_samples)
                rows = np.concatenate(
                    [np.concatenate(([c], n)) for c, n in zip(ctx, negs)]
                )
                labels = np.tile(
                    np.concatenate(([1.0], np.zeros(config.negative_samples))), len(ctx)
                )
                vc = inputs[center]
                table = outputs[rows]
                scores = table @ vc
                probs = _sigmoid(scores)
                eps = 1e-12
                epoch_loss += float(
                    -np.sum(np.log(np.maximum(probs[labels == 1.0], eps)))
                    - np.sum(np.log(np.maximum(1.0 - probs[labels == 0.0], eps)))
                )
                epoch_pairs += len(ctx)
                g = probs - labels
                inputs[center] = vc - lr * (g @ table)
                np.add.at(outputs, rows, -lr * np.outer(g, vc))
        train_log.append(epoch_loss / max(epoch_pairs, 1))

    return EmbeddingModel(vocab, inputs, outputs, config, train_log)


def sim_ww(w1: str, w2: str, model: EmbeddingModel) -> float:
    """Cosine similarity of the two words' input vectors; 0 when OOV."""
    a, b = model.vector(w1), model.vector(w2)
    if a is None or b is None:
        return 0.0
    denom = float(np.linalg.norm(a) * np.linalg.norm(b))
    return float(a @ b) / denom if denom else 0.0


def sim_ws(w: str, sentence: TokenSequence, model: EmbeddingModel) -> float:
    """Best similarity between a word and any word of a sentence."""
    if not sentence:
        return 0.0
    return max(sim_ww(w, s, model) for s in sentence)


def sim_ss(s1: TokenSequence, s2: TokenSequence, model: EmbeddingModel) -> float:
    """Mean of the two directed sentence similarities."""
    if not s1 or not s2:
        return 0.0
    forward = sum(sim_ws(w, s2, model) for w in s1) / len(s1)
    backward = sum(sim_ws(w, s1, model) for w in s2) / len(s2)
    return 0.5 * (forward + backward)


def save_model(model: EmbeddingModel, path: str) -> None:
    """Binary layout: magic, version, dim, vocab size, config, word records."""
    cfg = model.config
    words = sorted(model.vocab, key=model.vocab.get)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(
            struct.pack(
                "<IIIIIIdq",
                _FORMAT_VERSION,
                model.input_vectors.shape[1],
                len(words),
                cfg.window_radius,
                cfg.negative_samples,
                cfg.epochs,
                cfg.learning_rate,
                cfg.seed,
            )
        )
        fh.write(struct.pack("<I", len(model.train_log)))
        fh.write(np.asarray(model.train_log, dtype="<f8").tobytes())
        for i, word in enumerate(words):
            raw = word.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
            fh.write(model.input_vectors[i].astype("<f8").tobytes())
            fh.write(model.output_vectors[i].astype("<f8").tobytes())


def load_model(path: str) -> EmbeddingModel:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not an embedding model file")
        version, dim, size, radius, negatives, epochs, lr, seed = struct.unpack(
            "<IIIIIIdq", fh.read(40)
        )
        if version != _FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported model version {version}")
        (log_len,) = struct.unpack("<I", fh.read(4))
        train_log = list(np.frombuffer(fh.read(8 * log_len), dtype="<f8"))
        vocab: dict[str, int] = {}
        inputs = np.empty((size, dim))
        outputs = np.empty((size, dim))
        for i in range(size):
            (word_len,) = struct.unpack("<I", fh.read(4))
            vocab[fh.read(word_len).decode("utf-8")] = i
            inputs[i] = np.frombuffer(fh.read(8 * dim), dtype="<f8")
            outputs[i] = np.frombuffer(fh.read(8 * dim), dtype="<f8")
    config = SkipgramConfig(radius, dim, negatives, epochs, lr, seed)
    return EmbeddingModel(vocab, inputs, outputs, config, train_log)
