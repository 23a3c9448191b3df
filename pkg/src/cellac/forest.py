"""Deterministic regression forest with impurity-based feature importance.

Used as the pointwise learner for both table matching and value ranking.
Training samples are canonically sorted before bootstrap sampling, so
permuting the input order never changes the fitted model.  Models
serialize to JSON with exact float round-trip.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

FeatureVector = Mapping[str, float]


@dataclass
class ForestParams:
    n_trees: int = 100
    max_depth: int = 12
    min_leaf: int = 2
    feature_subsample: Optional[int] = None  # None: ceil(sqrt(#varying features))

    def to_dict(self) -> dict:
        return {"n_trees": self.n_trees, "max_depth": self.max_depth,
                "min_leaf": self.min_leaf, "feature_subsample": self.feature_subsample}

    @classmethod
    def from_dict(cls, d: dict) -> "ForestParams":
        return cls(**d)


@dataclass
class _Tree:
    feature: list[int] = field(default_factory=list)   # -1 marks a leaf
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def add_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        value = np.asarray(self.value)
        node = np.zeros(len(x), dtype=np.int64)
        while True:
            feat = feature[node]
            active = feat >= 0
            if not active.any():
                break
            rows = np.nonzero(active)[0]
            goes_left = x[rows, feat[rows]] <= threshold[node[rows]]
            node[rows] = np.where(goes_left, left[node[rows]], right[node[rows]])
        return value[node]


class ForestModel:
    def __init__(self, schema: Sequence[str], params: ForestParams, seed: int,
                 trees: list[_Tree], importance: np.ndarray):
        self.schema = list(schema)
        self.params = params
        self.seed = seed
        self.trees = trees
        self._importance = importance

    def vectorize(self, x: FeatureVector) -> np.ndarray:
        # Missing features default to 0; features outside the schema are ignored.
        return np.array([float(x.get(name, 0.0)) for name in self.schema])

    def predict(self, x: FeatureVector) -> float:
        return float(self.predict_batch(self.vectorize(x)[None, :])[0])

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(len(x))
        for tree in self.trees:
            out += tree.predict_batch(x)
        return out / len(self.trees)

    def predict_many(self, xs: Sequence[FeatureVector]) -> np.ndarray:
        if len(xs) == 0:
            return np.zeros(0)
        return self.predict_batch(np.stack([self.vectorize(x) for x in xs]))

    def importance(self) -> dict[str, float]:
        """Normalized total impurity decrease per feature (sums to 1, or all 0)."""
        return {name: float(v) for name, v in zip(self.schema, self._importance)}

    def to_dict(self) -> dict:
        return {
            "format": "cellac-forest",
            "version": 1,
            "schema": self.schema,
            "params": self.params.to_dict(),
            "seed": self.seed,
            "importance": [float(v) for v in self._importance],
            "trees": [{"feature": t.feature, "threshold": t.threshold,
                       "left": t.left, "right": t.right, "value": t.value}
                      for t in self.trees],
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f)

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        if d.get("format") != "cellac-forest":
            raise ValueError("not a forest model file")
        trees = [_Tree(feature=list(t["feature"]), threshold=list(t["threshold"]),
                       left=list(t["left"]), right=list(t["right"]),
                       value=list(t["value"])) for t in d["trees"]]
        return cls(d["schema"], ForestParams.from_dict(d["params"]), d["seed"],
                   trees, np.array(d["importance"]))

    @classmethod
    def load(cls, path) -> "ForestModel":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def _best_split(x: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best threshold on one feature; returns (sse_decrease, threshold) or None."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(ys)
    csum = np.cumsum(ys)
    csq = np.cumsum(ys * ys)
    total_sum, total_sq = csum[-1], csq[-1]
    # Candidate cut after position i (1-based count i+1 on the left).
    counts = np.arange(1, n)
    valid = (xs[:-1] != xs[1:]) & (counts >= min_leaf) & (n - counts >= min_leaf)
    if not valid.any():
        return None
    left_sum, left_sq = csum[:-1], csq[:-1]
    right_sum, right_sq = total_sum - left_sum, total_sq - left_sq
    sse_left = left_sq - left_sum * left_sum / counts
    sse_right = right_sq - right_sum * right_sum / (n - counts)
    parent = total_sq - total_sum * total_sum / n
    decrease = np.where(valid, parent - sse_left - sse_right, -np.inf)
    best = int(np.argmax(decrease))
    if not np.isfinite(decrease[best]) or decrease[best] <= 0:
        return None
    thr = (xs[best] + xs[best + 1]) / 2.0
    # Midpoints of adjacent doubles can round up to the right value, which
    # would route every sample left; fall back to the left value itself.
    if not (xs[best] <= thr < xs[best + 1]):
        thr = xs[best]
    return float(decrease[best]), float(thr)


def _grow_tree(x: np.ndarray, y: np.ndarray, idx: np.ndarray, params: ForestParams,
               active: np.ndarray, k: int, rng: np.random.Generator,
               importance: np.ndarray) -> _Tree:
    tree = _Tree()

    def build(indices: np.ndarray, depth: int) -> int:
        node = tree.add_node()
        ysub = y[indices]
        tree.value[node] = float(ysub.mean())
        if depth >= params.max_depth or len(indices) < 2 * params.min_leaf or np.ptp(ysub) == 0:
            return node
        if len(active) == 0:
            return node
        feats = rng.choice(active, size=min(k, len(active)), replace=False)
        best = None
        for f in feats:
            found = _best_split(x[indices, f], ysub, params.min_leaf)
            if found is None:
                continue
            decrease, thr = found
            if best is None or decrease > best[0]:
                best = (decrease, int(f), thr)
        if best is None:
            return node
        decrease, f, thr = best
        goes_left = x[indices, f] <= thr
        if goes_left.all() or not goes_left.any():
            return node
        importance[f] += decrease
        tree.feature[node] = f
        tree.threshold[node] = thr
        tree.left[node] = build(indices[goes_left], depth + 1)
        tree.right[node] = build(indices[~goes_left], depth + 1)
        return node

    build(idx, 0)
    return tree


def fit(samples: Sequence[tuple[FeatureVector, float]],
        params: Optional[ForestParams] = None, seed: int = 0) -> ForestModel:
    """Fit a variance-reduction regression forest; deterministic given seed."""
    if len(samples) < 2:
        raise ValueError("need at least 2 training samples")
    params = params or ForestParams()
    schema = sorted({name for fv, _t in samples for name in fv})
    x = np.array([[float(fv.get(name, 0.0)) for name in schema] for fv, _t in samples])
    y = np.array([float(t) for _fv, t in samples])
    if not np.isfinite(x).all() or not np.isfinite(y).all():
        raise ValueError("features and targets must be finite")

    # Canonical sample order: permutation-invariant training.
    order = np.lexsort(tuple(x[:, c] for c in range(x.shape[1] - 1, -1, -1)) + (y,))
    x, y = x[order], y[order]

    # Constant columns are excluded up front so that adding a feature with no
    # variation leaves the RNG draws, and therefore the model, unchanged.
    active = np.nonzero([len(np.unique(x[:, c])) > 1 for c in range(x.shape[1])])[0]
    if params.feature_subsample is not None:
        k = params.feature_subsample
    else:
        k = max(1, math.ceil(math.sqrt(len(active))))

    importance = np.zeros(len(schema))
    trees = []
    seeds = np.random.SeedSequence(seed).spawn(params.n_trees)
    n = len(y)
    for ss in seeds:
        rng = np.random.default_rng(ss)
        bootstrap = rng.integers(0, n, size=n)
        trees.append(_grow_tree(x, y, np.sort(bootstrap), params, active, k, rng, importance))

    total = importance.sum()
    if total > 0:
        importance = importance / total
    return ForestModel(schema, params, seed, trees, importance)
