"""Heading label embeddings: skip-gram with negative sampling.

Each table's ordered heading list is one training sentence; the context
window spans the whole sentence.  Labels occurring fewer than ``min_count``
times are out of vocabulary and score 0 in similarity lookups.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .tables import CorpusHandle
from .typesys import normalize_label


class LabelEmbeddings:
    def __init__(self, vectors: dict[str, np.ndarray], dim: int):
        self.vectors = vectors
        self.dim = dim

    @property
    def vocabulary(self) -> set[str]:
        return set(self.vectors)

    def get(self, label: str):
        return self.vectors.get(normalize_label(label))

    def __contains__(self, label: str) -> bool:
        return normalize_label(label) in self.vectors


def train_label_embeddings(corpus: CorpusHandle, dim: int = 64, epochs: int = 15,
                           seed: int = 0, negatives: int = 5, lr: float = 0.025,
                           min_count: int = 2) -> LabelEmbeddings:
    """Train skip-gram/negative-sampling vectors over table heading lists."""
    sentences = [list(t.headings) for t in corpus]
    freqs = Counter(label for s in sentences for label in s)
    vocab = sorted(label for label, n in freqs.items() if n >= min_count)
    if len(vocab) < 2:
        raise ValueError("need at least 2 in-vocabulary heading labels to train")
    index = {label: i for i, label in enumerate(vocab)}

    rng = np.random.default_rng(seed)
    w_in = (rng.random((len(vocab), dim)) - 0.5) / dim
    w_out = np.zeros((len(vocab), dim))

    # Unigram^0.75 noise distribution for negative sampling.
    noise = np.array([freqs[label] for label in vocab], dtype=float) ** 0.75
    noise /= noise.sum()

    pairs: list[tuple[int, int]] = []
    for sent in sentences:
        ids = [index[label] for label in sent if label in index]
        for i, center in enumerate(ids):
            for j, ctx in enumerate(ids):
                if i != j:
                    pairs.append((center, ctx))
    if not pairs:
        raise ValueError("no co-occurring in-vocabulary labels to train on")

    total = epochs * len(pairs)
    done = 0
    for _epoch in range(epochs):
        for center, ctx in pairs:
            alpha = lr * max(1.0 - done / total, 1e-4)
            done += 1
            negs = rng.choice(len(vocab), size=negatives, p=noise)
            targets = [ctx] + [n for n in negs if n != ctx]
            labels = np.zeros(len(targets))
            labels[0] = 1.0
            v = w_in[center]
            u = w_out[targets]
            logits = np.clip(u @ v, -8.0, 8.0)
            scores = 1.0 / (1.0 + np.exp(-logits))
            g = (labels - scores) * alpha
            w_in[center] = v + g @ u
            w_out[targets] = u + np.outer(g, v)

    # Export input+output vectors: co-occurring labels then score high via the
    # trained in/out dot products, and labels sharing contexts stay close too.
    return LabelEmbeddings({label: w_in[i] + w_out[i] for label, i in index.items()}, dim)


def l2v_sim(a: str, b: str, embeddings: LabelEmbeddings) -> float:
    """Cosine similarity of two label vectors, clamped to [0, 1]; OOV gives 0."""
    va, vb = embeddings.get(a), embeddings.get(b)
    if va is None or vb is None:
        return 0.0
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(min(1.0, max(0.0, float(va @ vb) / (na * nb))))


def save_embeddings(embeddings: LabelEmbeddings, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("#% cellac embeddings 1\n")
        f.write(f"{len(embeddings.vectors)} {embeddings.dim}\n")
        for label in sorted(embeddings.vectors):
            vec = " ".join(repr(float(x)) for x in embeddings.vectors[label])
            f.write(f"{label} {vec}\n")


def load_embeddings(path) -> LabelEmbeddings:
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip() and not ln.startswith("#%")]
    count, dim = (int(x) for x in lines[0].split())
    vectors: dict[str, np.ndarray] = {}
    for ln in lines[1:]:
        parts = ln.split(" ")
        label = " ".join(parts[:-dim])
        vectors[label] = np.array([float(x) for x in parts[-dim:]])
    assert len(vectors) == count, "embedding file count mismatch"
    return LabelEmbeddings(vectors, dim)
