"""Semantic similarity between an input table and a candidate table.

Two scorers: an element-wise linear model over term-vector cosines (table
data, aligned column values, page title, heading labels), and a trained
forest over the full feature set (per-table quality features plus ten
matching features).
"""

from __future__ import annotations

from collections import Counter
from math import sqrt
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .forest import ForestModel, ForestParams, fit
from .stats import edit_sim
from .tables import CorpusHandle, RelationalTable, tokenize
from .typesys import normalize_label

MSJE_EDIT_THRESHOLD = 0.8
INFOGATHER_ELEMENTS = ("data", "columns", "title", "headings")
DEFAULT_IG_WEIGHTS = (0.25, 0.25, 0.25, 0.25)


def term_vector(text: str) -> Counter:
    return Counter(tokenize(text))


def cosine(a: Counter, b: Counter) -> float:
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    dot = sum(w * b[t] for t, w in a.items())
    na = sqrt(sum(w * w for w in a.values()))
    nb = sqrt(sum(w * w for w in b.values()))
    return dot / (na * nb)


def element_texts(table: RelationalTable, target_heading: Optional[str] = None) -> dict[str, str]:
    """The four element texts a table is matched on.

    The column element covers the columns aligned to the target heading, or
    every attribute column when no target is given.
    """
    cells = [c.raw_text for row in table.rows for c in row]
    if target_heading is None:
        cols = table.attribute_columns()
    else:
        target = normalize_label(target_heading)
        cols = [c for c, h in enumerate(table.headings) if h == target]
    col_cells = [row[c].raw_text for c in cols for row in table.rows]
    return {
        "data": " ".join(cells),
        "columns": " ".join(col_cells),
        "title": table.page_title,
        "headings": " ".join(table.headings),
    }


def infogather_score(ta: RelationalTable, tb: RelationalTable,
                     weights: Sequence[float] = DEFAULT_IG_WEIGHTS,
                     target_heading: Optional[str] = None) -> float:
    """Weighted sum of element-wise term-vector cosines."""
    if len(weights) != 4 or any(w < 0 for w in weights):
        raise ValueError("need 4 nonnegative element weights")
    ea, eb = element_texts(ta, target_heading), element_texts(tb, target_heading)
    return sum(w * cosine(term_vector(ea[x]), term_vector(eb[x]))
               for w, x in zip(weights, INFOGATHER_ELEMENTS))


def max_weight_matching_total(weights: np.ndarray) -> float:
    """Total weight of a maximum-weight bipartite matching."""
    if weights.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(weights, maximize=True)
    return float(weights[rows, cols].sum())


def msje_heading_score(ta: RelationalTable, tb: RelationalTable,
                       threshold: float = MSJE_EDIT_THRESHOLD) -> float:
    """Edit-similarity bipartite matching over heading labels.

    Edges below the threshold are dropped; the matching total is normalized
    by the larger heading count.
    """
    ha, hb = ta.headings, tb.headings
    weights = np.zeros((len(ha), len(hb)))
    for i, a in enumerate(ha):
        for j, b in enumerate(hb):
            s = edit_sim(a, b)
            if s >= threshold:
                weights[i, j] = s
    return max_weight_matching_total(weights) / max(len(ha), len(hb))


def related_heading_sim(ta: RelationalTable, tb: RelationalTable) -> float:
    """Bipartite matching over heading term-vector cosines, normalized by the
    smaller heading count."""
    ha, hb = ta.headings, tb.headings
    va = [term_vector(h) for h in ha]
    vb = [term_vector(h) for h in hb]
    weights = np.array([[cosine(a, b) for b in vb] for a in va])
    return max_weight_matching_total(weights) / min(len(ha), len(hb))


def _binary_column_vector(table: RelationalTable, col: int) -> set[str]:
    terms: set[str] = set()
    for row in table.rows:
        terms.update(tokenize(row[col].raw_text))
    return terms


def _set_cosine(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return len(a & b) / sqrt(len(a) * len(b))


def related_data_sim(ta: RelationalTable, tb: RelationalTable) -> float:
    """Mean over input columns of the best binary term-vector cosine against
    any candidate column."""
    if ta.n_cols == 0 or tb.n_cols == 0:
        return 0.0
    vb = [_binary_column_vector(tb, c) for c in range(tb.n_cols)]
    best = [max(_set_cosine(_binary_column_vector(ta, c), b) for b in vb)
            for c in range(ta.n_cols)]
    return sum(best) / len(best)


def complement_scores(ta: RelationalTable, tb: RelationalTable,
                      corpus: Optional[CorpusHandle] = None) -> tuple[float, float, float]:
    """(schema benefit, entity overlap, entity relatedness) of tb for ta."""
    hb = set(tb.headings)
    benefit = len(hb - set(ta.headings)) / len(hb) if hb else 0.0

    ea, eb = ta.core_entities(), tb.core_entities()
    if not ea and not eb:
        overlap = 1.0
    elif not ea or not eb:
        overlap = 0.0
    else:
        overlap = len(ea & eb) / len(ea | eb)

    relatedness = 0.0
    if corpus is not None and ea and eb:
        by_entity = corpus.index.by_entity
        scores = []
        for e in ea:
            tables_e = {tid for tid, _ in by_entity.get(e, ())}
            best = 0.0
            for e2 in eb:
                tables_e2 = {tid for tid, _ in by_entity.get(e2, ())}
                union = tables_e | tables_e2
                if union:
                    best = max(best, len(tables_e & tables_e2) / len(union))
            scores.append(best)
        relatedness = sum(scores) / len(scores)
    return benefit, overlap, relatedness


def quality_features(table: RelationalTable, corpus: Optional[CorpusHandle] = None,
                     prefix: str = "") -> dict[str, float]:
    """Per-table quality/importance features."""
    empty = sum(1 for row in table.rows for c in row
                if c.norm is None or c.norm.is_empty)
    caption_idf = title_idf = 0.0
    if corpus is not None:
        caption_idf = sum(corpus.idf(t) for t in tokenize(table.caption))
        title_idf = sum(corpus.idf(t) for t in tokenize(table.page_title))
    m = table.page_meta
    return {
        prefix + "rows": float(table.n_rows),
        prefix + "cols": float(table.n_cols),
        prefix + "empty_cells": float(empty),
        prefix + "caption_idf": caption_idf,
        prefix + "title_idf": title_idf,
        prefix + "in_links": float(m.in_links),
        prefix + "out_links": float(m.out_links),
        prefix + "page_views": float(m.page_views),
        prefix + "inv_tables_on_page": 1.0 / m.tables_on_page,
        prefix + "size_ratio": m.table_chars / m.page_chars,
    }


def extract_match_features(ta: RelationalTable, tb: RelationalTable,
                           corpus: Optional[CorpusHandle] = None) -> dict[str, float]:
    """Full table-pair feature vector: quality of both sides plus matching."""
    features = quality_features(ta, corpus, "input_")
    features.update(quality_features(tb, corpus, "cand_"))
    ea, eb = element_texts(ta), element_texts(tb)
    for x in INFOGATHER_ELEMENTS:
        features[f"ig_{x}"] = cosine(term_vector(ea[x]), term_vector(eb[x]))
    features["msje"] = msje_heading_score(ta, tb)
    features["rel_heading"] = related_heading_sim(ta, tb)
    features["rel_data"] = related_data_sim(ta, tb)
    benefit, overlap, related = complement_scores(ta, tb, corpus)
    features["schema_benefit"] = benefit
    features["entity_overlap"] = overlap
    features["entity_relatedness"] = related
    return features


GRADE_SCALE = {0: 0.0, 1: 0.5, 2: 1.0}


def train_tmatch(pairs: Sequence[tuple[RelationalTable, RelationalTable, int]],
                 corpus: Optional[CorpusHandle] = None,
                 params: Optional[ForestParams] = None, seed: int = 0) -> ForestModel:
    """Fit the table-matching forest on graded pairs (grades in {0, 1, 2})."""
    samples = []
    for ta, tb, grade in pairs:
        if grade not in GRADE_SCALE:
            raise ValueError(f"grade must be one of {sorted(GRADE_SCALE)}")
        samples.append((extract_match_features(ta, tb, corpus), GRADE_SCALE[grade]))
    return fit(samples, params, seed)


def tmatch_score(model: ForestModel, ta: RelationalTable, tb: RelationalTable,
                 corpus: Optional[CorpusHandle] = None) -> float:
    return model.predict(extract_match_features(ta, tb, corpus))
