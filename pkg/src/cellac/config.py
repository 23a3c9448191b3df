"""Engine configuration: JSON config file with CELLAC_-prefixed env overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from typing import Optional

from .forest import ForestParams

ENV_PREFIX = "CELLAC_"


@dataclass
class EngineConfig:
    # Artifact paths.
    corpus: Optional[str] = None
    triples: Optional[str] = None
    labels: Optional[str] = None
    h2h: Optional[str] = None
    h2p: Optional[str] = None
    embeddings: Optional[str] = None
    tmatch: Optional[str] = None
    ltr: Optional[str] = None
    # Thresholds and weights.
    gamma: float = 0.6
    tau_ed: float = 0.8
    msje_threshold: float = 0.8
    ig_weights: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)
    min_entity_rate: float = 0.0
    # Forest hyperparameters.
    n_trees: int = 100
    max_depth: int = 12
    min_leaf: int = 2
    feature_subsample: Optional[int] = None
    seed: int = 0

    def forest_params(self) -> ForestParams:
        return ForestParams(n_trees=self.n_trees, max_depth=self.max_depth,
                            min_leaf=self.min_leaf,
                            feature_subsample=self.feature_subsample)


_PATH_FIELDS = ("corpus", "triples", "labels", "h2h", "h2p", "embeddings", "tmatch", "ltr")
_FLOAT_FIELDS = ("gamma", "tau_ed", "msje_threshold", "min_entity_rate")
_INT_FIELDS = ("n_trees", "max_depth", "min_leaf", "seed")


def load_config(path=None, env: Optional[dict] = None) -> EngineConfig:
    """Config file values, overridden by CELLAC_* environment variables."""
    env = os.environ if env is None else env
    data: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    cfg = EngineConfig()
    known = {f.name for f in fields(EngineConfig)}
    for key, value in data.items():
        if key not in known:
            raise ValueError(f"unknown config key: {key}")
        if key == "ig_weights":
            value = tuple(float(x) for x in value)
        setattr(cfg, key, value)
    for key in known:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is None:
            continue
        if key in _PATH_FIELDS:
            setattr(cfg, key, raw)
        elif key in _FLOAT_FIELDS:
            setattr(cfg, key, float(raw))
        elif key in _INT_FIELDS:
            setattr(cfg, key, int(raw))
        elif key == "feature_subsample":
            setattr(cfg, key, None if raw.lower() in ("", "none") else int(raw))
        elif key == "ig_weights":
            setattr(cfg, key, tuple(float(x) for x in raw.split(",")))
    return cfg
