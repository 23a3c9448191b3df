"""Candidate value ranking: single-source scorers, the KB-first baseline,
and the feature-based learned ranker with Empty handling.

All rankings sort by descending score with ties broken by canonical string,
so repeated calls over the same artifacts agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .candidates import (
    DEFAULT_TAU_ED,
    CandidateValue,
    build_pool,
    find_kb_candidates,
)
from .embeddings import LabelEmbeddings, l2v_sim
from .forest import ForestModel, ForestParams, fit
from .kb import KbHandle
from .matching import (
    DEFAULT_IG_WEIGHTS,
    extract_match_features,
    infogather_score,
    quality_features,
)
from .stats import HeadingStats, edit_sim
from .tables import Cell, CorpusHandle, RelationalTable, annotate_table
from .typesys import (
    EMPTY,
    CellValue,
    EmptySentinel,
    ValueType,
    normalize_label,
    values_equal,
)

MATCHERS = ("infogather", "tmatch")
COMBINES = ("top", "all")
HEADSIMS = ("uni", "ed", "mp", "l2v")

AGGS = ("MAX", "AVG", "SUM")

GROUP1 = ("IS_TC", "IS_KB", "EDITDIST_PH", "MAPPINGPROB_PH", "EDITDIST_HH", "MAPPINGPROB_HH")
GROUP2 = ("NUM_E", "NUM_H", "NUM_EH", "EMPTY_RATE", "MATCH_PH_NUM", "MATCH_HH_NUM") + tuple(
    f"MATCH_{side}_{agg}" for side in ("PH", "HH") for agg in AGGS)
GROUP3 = ("TMATCH_NUM",) + tuple(f"TMATCH_{agg}" for agg in AGGS) + tuple(
    f"SCORE_{m}_{sim}_{agg}" for m in ("IG", "TMATCH") for sim in ("ED", "MP", "L2V")
    for agg in AGGS)
QUALITY_NAMES = ("rows", "cols", "empty_cells", "caption_idf", "title_idf", "in_links",
                 "out_links", "page_views", "inv_tables_on_page", "size_ratio")
GROUP_QUALITY = tuple(f"input_{n}" for n in QUALITY_NAMES) + tuple(
    f"support_{n}" for n in QUALITY_NAMES)

FEATURE_GROUPS = {"g1": GROUP1, "g2": GROUP2, "g3": GROUP3, "quality": GROUP_QUALITY}
ALL_GROUPS = ("g1", "g2", "g3", "quality")


@dataclass
class RankedSuggestion:
    candidate: CandidateValue
    score: float
    rank: int

    @property
    def value(self) -> CellValue:
        return self.candidate.value

    @property
    def canonical(self) -> str:
        return self.candidate.canonical

    @property
    def is_empty(self) -> bool:
        return self.candidate.is_empty

    def provenance(self) -> list[str]:
        tokens = {f"tc:{ev.table_id}:{ev.heading}" for ev in self.candidate.tc_evidence}
        tokens.update(f"kb:{ev.predicate}" for ev in self.candidate.kb_evidence)
        return sorted(tokens)


def _to_suggestions(scored: list[tuple[CandidateValue, float]],
                    k: Optional[int] = None) -> list[RankedSuggestion]:
    ordered = sorted(scored, key=lambda cs: (-cs[1], cs[0].canonical))
    if k is not None:
        ordered = ordered[:k]
    return [RankedSuggestion(cand, float(score), i + 1)
            for i, (cand, score) in enumerate(ordered)]


def query_table(entity: str, heading: str) -> RelationalTable:
    """Minimal one-row input table for queries given only (entity, heading)."""
    table = RelationalTable(
        table_id="__query__", page_title="", caption="",
        headings=["entity", normalize_label(heading)],
        rows=[[Cell(raw_text=entity, entity_id=entity), Cell(raw_text="")]])
    annotate_table(table)
    return table


class Ranker:
    """Scores candidate pools against immutable corpus/KB/model artifacts."""

    def __init__(self, corpus: CorpusHandle, kb: KbHandle,
                 stats: Optional[HeadingStats] = None,
                 embeddings: Optional[LabelEmbeddings] = None,
                 tmatch_model: Optional[ForestModel] = None,
                 ig_weights: Sequence[float] = DEFAULT_IG_WEIGHTS,
                 tau_ed: float = DEFAULT_TAU_ED,
                 msje_threshold: float = 0.8,
                 gamma: float = 0.5):
        self.corpus = corpus
        self.kb = kb
        self.stats = stats
        self.embeddings = embeddings
        self.tmatch_model = tmatch_model
        self.ig_weights = tuple(ig_weights)
        self.tau_ed = tau_ed
        self.msje_threshold = msje_threshold
        self.gamma = gamma
        self._empty_rates: dict[str, float] = {}

    # ------------------------------------------------------------------ pools

    def column_type_of(self, table: Optional[RelationalTable],
                       heading: str) -> Optional[ValueType]:
        if table is None:
            return None
        h = normalize_label(heading)
        for col, label in enumerate(table.headings):
            if label == h and col < len(table.column_types):
                types = {t for t in table.column_types[col] if t != ValueType.OTHER}
                if types:
                    return sorted(types, key=lambda t: t.value)[0]
        return None

    def context(self, entity: str, heading: str,
                table: Optional[RelationalTable] = None) -> "CellContext":
        return CellContext(self, entity, normalize_label(heading),
                           table if table is not None else query_table(entity, heading))

    # ------------------------------------------------------------ kb ranking

    def kb_rank(self, entity: str, heading: str, variant: str = "ed",
                gamma: Optional[float] = None,
                table: Optional[RelationalTable] = None,
                k: Optional[int] = None) -> list[RankedSuggestion]:
        """Rank KB-derived candidates; Empty scores the free parameter gamma."""
        variant = variant.lower()
        if variant not in ("ed", "mp"):
            raise ValueError("variant must be 'ed' or 'mp'")
        gamma = self.gamma if gamma is None else gamma
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("gamma must be within [0, 1]")
        h = normalize_label(heading)
        pool = find_kb_candidates(entity, h, self.kb, self.stats, self.tau_ed,
                                  self.column_type_of(table, h),
                                  self.corpus.entity_universe)
        scored: list[tuple[CandidateValue, float]] = []
        for cand in pool:
            scores = [self._predicate_score(p, h, variant)
                      for p in sorted(cand.matched_predicates())]
            scored.append((cand, max(scores) if scores else 0.0))
        scored.append((CandidateValue(EMPTY), gamma))
        return _to_suggestions(scored, k)

    def _predicate_score(self, predicate: str, heading: str, variant: str) -> float:
        if variant == "ed":
            return edit_sim(self.kb.label(predicate), heading)
        if self.stats is None:
            return 0.0
        return self.stats.p_p2h(predicate, heading)

    # ------------------------------------------------------------ tc ranking

    def _check_tc_options(self, matcher: str, combine: str, headsim: str) -> None:
        if matcher not in MATCHERS:
            raise ValueError(f"matcher must be one of {MATCHERS}")
        if combine not in COMBINES:
            raise ValueError(f"combine must be one of {COMBINES}")
        if headsim not in HEADSIMS:
            raise ValueError(f"headsim must be one of {HEADSIMS}")
        if matcher == "tmatch" and self.tmatch_model is None:
            raise ValueError("tmatch matcher requires a trained table-matching model")
        if headsim == "mp" and (self.stats is None or not self.stats.h2h):
            raise ValueError("mapping-probability heading similarity requires built stats")
        if headsim == "l2v" and self.embeddings is None:
            raise ValueError("label-embedding heading similarity requires trained embeddings")

    def tc_rank(self, entity: str, heading: str,
                table: Optional[RelationalTable] = None,
                matcher: str = "tmatch", combine: str = "top",
                headsim: str = "uni", k: Optional[int] = None,
                ctx: Optional["CellContext"] = None) -> list[RankedSuggestion]:
        """Rank corpus-derived candidates by table match x heading similarity."""
        self._check_tc_options(matcher, combine, headsim)
        ctx = ctx or self.context(entity, heading, table)
        scored = [(cand, ctx.tc_score(cand, matcher, combine, headsim))
                  for cand in ctx.tc_candidates()]
        scored.append((CandidateValue(EMPTY), 0.0))
        return _to_suggestions(scored, k)

    # ----------------------------------------------------------- otg baseline

    def otg_rank(self, entity: str, heading: str,
                 table: Optional[RelationalTable] = None,
                 k: Optional[int] = None,
                 ctx: Optional["CellContext"] = None) -> list[RankedSuggestion]:
        """KB-first baseline: KB values outrank all corpus values; Empty last.

        Block scores keep the non-increasing invariant: KB values land in
        [2, 3], corpus-only values in [1, 2), Empty at 0.
        """
        h = normalize_label(heading)
        ctx = ctx or self.context(entity, heading, table)
        kb_block = [s for s in self.kb_rank(entity, h, "ed", gamma=0.0, table=table)
                    if not s.is_empty]
        matcher = "tmatch" if self.tmatch_model is not None else "infogather"
        scored: list[tuple[CandidateValue, float]] = []
        taken: list[CandidateValue] = []
        for s in kb_block:
            scored.append((s.candidate, 2.0 + s.score))
            taken.append(s.candidate)
        for cand in ctx.tc_candidates():
            if any(values_equal(cand.value, t.value) for t in taken):
                continue
            raw = ctx.tc_score(cand, matcher, "top", "ed")
            scored.append((cand, 1.0 + raw / (1.0 + raw)))
        scored.append((CandidateValue(EMPTY), 0.0))
        return _to_suggestions(scored, k)

    # ------------------------------------------------------- learned ranking

    def empty_rate(self, heading: str) -> float:
        """Fraction of empty cells across corpus columns with this heading."""
        h = normalize_label(heading)
        if h not in self._empty_rates:
            total = empty = 0
            for tid, col in sorted(self.corpus.index.by_heading.get(h, ())):
                for cell in self.corpus.tables[tid].column_cells(col):
                    total += 1
                    if cell.norm is None or cell.norm.is_empty:
                        empty += 1
            self._empty_rates[h] = empty / total if total else 0.0
        return self._empty_rates[h]

    def extract_value_features(self, cand: CandidateValue,
                               ctx: "CellContext") -> dict[str, float]:
        """Feature vector for one candidate of a cell (see FEATURE_GROUPS)."""
        f = dict(ctx.context_features())
        if cand.is_empty:
            for name in GROUP1 + GROUP3:
                f[name] = 0.0
            for name in QUALITY_NAMES:
                f[f"support_{name}"] = 0.0
            return f
        h = ctx.heading
        f["IS_TC"] = 1.0 if cand.tc_evidence else 0.0
        f["IS_KB"] = 1.0 if cand.kb_evidence else 0.0
        preds = sorted(cand.matched_predicates())
        f["EDITDIST_PH"] = max((edit_sim(self.kb.label(p), h) for p in preds), default=0.0)
        f["MAPPINGPROB_PH"] = max((self.stats.p_p2h(p, h) if self.stats else 0.0
                                   for p in preds), default=0.0)
        heads = sorted(cand.matched_headings())
        f["EDITDIST_HH"] = max((edit_sim(hp, h) for hp in heads), default=0.0)
        f["MAPPINGPROB_HH"] = max((self.stats.p_h2h(hp, h) if self.stats else 0.0
                                   for hp in heads), default=0.0)

        tids = cand.supporting_table_ids()
        tmatch = [ctx.table_score(tid, "tmatch") for tid in tids]
        f["TMATCH_NUM"] = float(sum(1 for s in tmatch if s > 0))
        f.update(_aggregates("TMATCH", tmatch))
        for m_key, m_name in (("infogather", "IG"), ("tmatch", "TMATCH")):
            for sim in ("ed", "mp", "l2v"):
                products = [ctx.table_score(tid, m_key) * ctx.headsim(tid, sim)
                            for tid in tids]
                f.update(_aggregates(f"SCORE_{m_name}_{sim.upper()}", products))
        support = [ctx.support_quality(tid) for tid in tids]
        for name in QUALITY_NAMES:
            vals = [q[f"support_{name}"] for q in support]
            f[f"support_{name}"] = float(np.mean(vals)) if vals else 0.0
        return f

    def cell_features(self, entity: str, heading: str,
                      table: Optional[RelationalTable] = None,
                      ctx: Optional["CellContext"] = None):
        """Pool plus one feature vector per candidate (Empty included)."""
        ctx = ctx or self.context(entity, heading, table)
        return ctx.pool(), [self.extract_value_features(c, ctx) for c in ctx.pool()]

    def rank(self, entity: str, heading: str,
             table: Optional[RelationalTable] = None,
             model: Optional[ForestModel] = None,
             k: Optional[int] = 10,
             ctx: Optional["CellContext"] = None) -> list[RankedSuggestion]:
        """Rank the full candidate pool with the learned model."""
        if model is None:
            raise ValueError("rank requires a trained value-ranking model")
        pool, features = self.cell_features(entity, heading, table, ctx=ctx)
        scores = model.predict_many(features)
        return _to_suggestions(list(zip(pool, scores)), k)


def _aggregates(prefix: str, values: list[float]) -> dict[str, float]:
    if not values:
        return {f"{prefix}_MAX": 0.0, f"{prefix}_AVG": 0.0, f"{prefix}_SUM": 0.0}
    return {f"{prefix}_MAX": float(max(values)),
            f"{prefix}_AVG": float(sum(values) / len(values)),
            f"{prefix}_SUM": float(sum(values))}


class CellContext:
    """Per-cell caches: candidate pool, table-match scores, heading sims."""

    def __init__(self, ranker: Ranker, entity: str, heading: str,
                 table: RelationalTable):
        self.ranker = ranker
        self.entity = entity
        self.heading = heading
        self.table = table
        self._pool: Optional[list[CandidateValue]] = None
        self._tmatch: Optional[dict[str, float]] = None
        self._ig: dict[str, float] = {}
        self._headsims: dict[tuple[str, str], float] = {}
        self._quality: dict[str, dict[str, float]] = {}
        self._context_features: Optional[dict[str, float]] = None

    def pool(self) -> list[CandidateValue]:
        if self._pool is None:
            r = self.ranker
            self._pool = build_pool(
                self.entity, self.heading, r.corpus, r.kb, r.stats, r.tau_ed,
                r.column_type_of(self.table, self.heading),
                exclude_table_ids=[self.table.table_id])
        return self._pool

    def tc_candidates(self) -> list[CandidateValue]:
        return [c for c in self.pool() if c.tc_evidence]

    def candidate_table_ids(self) -> list[str]:
        tids: set[str] = set()
        for cand in self.pool():
            tids.update(cand.supporting_table_ids())
        return sorted(tids)

    def table_score(self, table_id: str, matcher: str) -> float:
        r = self.ranker
        if matcher == "tmatch":
            if self._tmatch is None:
                tids = self.candidate_table_ids()
                if r.tmatch_model is None:
                    self._tmatch = {tid: 0.0 for tid in tids}
                else:
                    feats = [extract_match_features(self.table, r.corpus.tables[t], r.corpus)
                             for t in tids]
                    scores = r.tmatch_model.predict_many(feats)
                    self._tmatch = {tid: float(s) for tid, s in zip(tids, scores)}
            return self._tmatch[table_id]
        if table_id not in self._ig:
            self._ig[table_id] = infogather_score(
                self.table, r.corpus.tables[table_id], r.ig_weights, self.heading)
        return self._ig[table_id]

    def headsim(self, table_id: str, estimator: str) -> float:
        """max over the supporting table's headings of sim(h', h)."""
        key = (table_id, estimator)
        if key not in self._headsims:
            r = self.ranker
            headings = r.corpus.tables[table_id].headings
            if estimator == "uni":
                sim = 1.0
            elif estimator == "ed":
                sim = max(edit_sim(hp, self.heading) for hp in headings)
            elif estimator == "mp":
                sim = max(r.stats.p_h2h(hp, self.heading) if r.stats else 0.0
                          for hp in headings)
            elif estimator == "l2v":
                sim = max(l2v_sim(hp, self.heading, r.embeddings) if r.embeddings else 0.0
                          for hp in headings)
            else:
                raise ValueError(f"unknown heading similarity estimator: {estimator}")
            self._headsims[key] = sim
        return self._headsims[key]

    def tc_score(self, cand: CandidateValue, matcher: str, combine: str,
                 headsim: str) -> float:
        products = [self.table_score(tid, matcher) * self.headsim(tid, headsim)
                    for tid in cand.supporting_table_ids()]
        if not products:
            return 0.0
        return max(products) if combine == "top" else sum(products)

    def support_quality(self, table_id: str) -> dict[str, float]:
        if table_id not in self._quality:
            r = self.ranker
            self._quality[table_id] = quality_features(
                r.corpus.tables[table_id], r.corpus, "support_")
        return self._quality[table_id]

    def context_features(self) -> dict[str, float]:
        """Group II statistics plus input-table quality (same for every candidate)."""
        if self._context_features is not None:
            return self._context_features
        r = self.ranker
        e, h = self.entity, self.heading
        idx = r.corpus.index
        f = {
            "NUM_E": float(len(idx.by_entity.get(e, ()))),
            "NUM_H": float(len(idx.by_heading.get(h, ()))),
            "NUM_EH": float(len(idx.by_entity_heading.get((e, h), ()))),
            "EMPTY_RATE": r.empty_rate(h),
        }
        ph = sorted(r.stats.matched_predicates(h).values()) if r.stats else []
        hh = sorted(r.stats.related_headings(h).values()) if r.stats else []
        f["MATCH_PH_NUM"] = float(len(ph))
        f["MATCH_HH_NUM"] = float(len(hh))
        f.update(_aggregates("MATCH_PH", [float(c) for c in ph]))
        f.update(_aggregates("MATCH_HH", [float(c) for c in hh]))
        f.update(quality_features(self.table, r.corpus, "input_"))
        self._context_features = f
        return f


def candidate_label(cand: CandidateValue, truth: Sequence[CellValue]) -> float:
    """Pointwise relevance target: 1 when the candidate is a correct value."""
    if cand.is_empty:
        return 1.0 if any(isinstance(t, EmptySentinel) for t in truth) else 0.0
    return 1.0 if any(not isinstance(t, EmptySentinel) and values_equal(cand.value, t)
                      for t in truth) else 0.0


def train_ltr(ranker: Ranker,
              labeled_cells: Sequence[tuple[str, str, Optional[RelationalTable], Sequence[CellValue]]],
              groups: Sequence[str] = ALL_GROUPS,
              params: Optional[ForestParams] = None, seed: int = 0) -> ForestModel:
    """Fit the pointwise value ranker on labeled cells.

    ``groups`` selects feature groups ("g1", "g2", "g3", "quality") so
    ablated models can be trained the same way as the full one.
    """
    keep: set[str] = set()
    for g in groups:
        keep.update(FEATURE_GROUPS[g])
    samples = []
    for entity, heading, table, truth in labeled_cells:
        pool, features = ranker.cell_features(entity, heading, table)
        for cand, f in zip(pool, features):
            filtered = {name: v for name, v in f.items() if name in keep}
            samples.append((filtered, candidate_label(cand, truth)))
    return fit(samples, params, seed)


def kfold(n: int, folds: int = 5, seed: int = 0) -> list[tuple[list[int], list[int]]]:
    """Deterministic k-fold index split."""
    if folds < 2 or n < folds:
        raise ValueError("need at least `folds` items")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    chunks = np.array_split(order, folds)
    out = []
    for i in range(folds):
        test = sorted(int(x) for x in chunks[i])
        train = sorted(int(x) for c in chunks[:i] + chunks[i + 1:] for x in c)
        out.append((train, test))
    return out
