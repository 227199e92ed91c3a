"""Hand-built embedding over a small vocabulary for similarity tests.

VECTORS maps ten words to four-dimensional vectors picked by hand so the
cosine landscape has structure: near-synonyms point the same way, "pad"
is the zero vector to exercise the degenerate-norm branch, and the rest
spread out. Tests compare the library's similarity functions against a
plain-Python oracle over this same table.
"""

import numpy as np

from commentdrift.embed import EmbeddingModel, SkipgramConfig

VECTORS = {
    "scale": (1.0, 0.2, -0.3, 0.5),
    "factor": (0.9, 0.3, -0.2, 0.4),
    "offset": (-0.4, 1.1, 0.6, -0.1),
    "clamp": (0.1, -0.8, 1.2, 0.3),
    "value": (0.7, 0.7, 0.1, -0.6),
    "read": (-0.2, 0.4, -0.9, 1.0),
    "cap": (0.3, -0.5, 0.8, 0.9),
    "margin": (-1.0, 0.1, 0.2, 0.2),
    "area": (0.5, -0.3, -0.7, -0.8),
    "pad": (0.0, 0.0, 0.0, 0.0),
}


def build_model() -> EmbeddingModel:
    vocab = {word: i for i, word in enumerate(VECTORS)}
    mat = np.array([VECTORS[w] for w in VECTORS], dtype=np.float64)
    config = SkipgramConfig(embedding_dim=mat.shape[1])
    return EmbeddingModel(vocab, mat, mat.copy(), config)
