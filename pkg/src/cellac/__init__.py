"""Evidence-backed value suggestions for relational table cells."""

from .typesys import (
    EMPTY,
    EmptySentinel,
    NormalizedValue,
    ValueType,
    canonical_string,
    classify_cell,
    detect_column_type,
    normalize,
    normalize_auto,
    parse_canonical,
    values_equal,
)
from .tables import (
    Cell,
    CorpusHandle,
    PageMeta,
    RelationalTable,
    detect_core_column,
    entity_rate,
    ingest_corpus,
    relational_filter,
)
from .kb import KbHandle, load_kb
from .stats import HeadingStats, build_h2h, build_h2p, build_stats, edit_sim
from .embeddings import LabelEmbeddings, l2v_sim, train_label_embeddings
from .forest import ForestModel, ForestParams, fit
from .matching import (
    extract_match_features,
    infogather_score,
    msje_heading_score,
    tmatch_score,
    train_tmatch,
)
from .candidates import CandidateValue, build_pool, find_kb_candidates, find_tc_candidates
from .ranking import RankedSuggestion, Ranker, kfold, train_ltr
from .evaluation import (
    Qrels,
    TestCell,
    build_test_collection,
    evaluate,
    learn_gamma,
    ndcg_at_k,
    qrels_from_cells,
)
from .config import EngineConfig, load_config
from .engine import Engine, Suggestion

__all__ = [
    "EMPTY", "EmptySentinel", "NormalizedValue", "ValueType",
    "canonical_string", "classify_cell", "detect_column_type", "normalize",
    "normalize_auto", "parse_canonical", "values_equal",
    "Cell", "CorpusHandle", "PageMeta", "RelationalTable",
    "detect_core_column", "entity_rate", "ingest_corpus", "relational_filter",
    "KbHandle", "load_kb",
    "HeadingStats", "build_h2h", "build_h2p", "build_stats", "edit_sim",
    "LabelEmbeddings", "l2v_sim", "train_label_embeddings",
    "ForestModel", "ForestParams", "fit",
    "extract_match_features", "infogather_score", "msje_heading_score",
    "tmatch_score", "train_tmatch",
    "CandidateValue", "build_pool", "find_kb_candidates", "find_tc_candidates",
    "RankedSuggestion", "Ranker", "kfold", "train_ltr",
    "Qrels", "TestCell", "build_test_collection", "evaluate", "learn_gamma",
    "ndcg_at_k", "qrels_from_cells",
    "EngineConfig", "load_config", "Engine", "Suggestion",
]

__version__ = "0.1.0"
