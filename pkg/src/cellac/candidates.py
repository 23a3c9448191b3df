"""Candidate value pools for a target (entity, heading) cell.

Candidates come from two sources: corpus tables containing the entity under
the target heading or a related heading, and KB lookups through matched
predicates.  Pools always contain the Empty sentinel exactly once, and
candidates equal under value equality merge with their evidence combined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .kb import KbHandle
from .stats import HeadingStats, edit_sim
from .tables import CorpusHandle
from .typesys import (
    EMPTY,
    CellValue,
    EmptySentinel,
    NormalizedValue,
    ValueType,
    canonical_string,
    clean_text,
    normalize,
    normalize_auto,
    normalize_label,
    values_equal,
)

DEFAULT_TAU_ED = 0.8


@dataclass
class TcEvidence:
    table_id: str
    heading: str                      # matched heading h' in the source table
    cell_ref: tuple[str, int, int]    # (table_id, row, col)
    raw_text: str
    tmatch_eligible: bool = True


@dataclass
class KbEvidence:
    predicate: str
    triple_ref: tuple[str, str, str]  # (subject, predicate, raw object)


@dataclass
class CandidateValue:
    value: CellValue
    tc_evidence: list[TcEvidence] = field(default_factory=list)
    kb_evidence: list[KbEvidence] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return isinstance(self.value, EmptySentinel)

    @property
    def canonical(self) -> str:
        return canonical_string(self.value)

    def supporting_table_ids(self) -> list[str]:
        seen: list[str] = []
        for ev in self.tc_evidence:
            if ev.table_id not in seen:
                seen.append(ev.table_id)
        return sorted(seen)

    def matched_headings(self) -> set[str]:
        return {ev.heading for ev in self.tc_evidence}

    def matched_predicates(self) -> set[str]:
        return {ev.predicate for ev in self.kb_evidence}

    def display_text(self) -> str:
        """Raw-text variant for UI display; canonical form as fallback."""
        if self.is_empty:
            return ""
        for ev in self.tc_evidence:
            if ev.raw_text.strip():
                return clean_text(ev.raw_text)
        for ev in self.kb_evidence:
            if ev.triple_ref[2].strip():
                return clean_text(ev.triple_ref[2])
        return self.canonical

    def evidence_count(self) -> int:
        return len(self.tc_evidence) + len(self.kb_evidence)


def _merge_into(pool: list[CandidateValue], value: NormalizedValue,
                tc: Iterable[TcEvidence] = (), kb: Iterable[KbEvidence] = ()) -> None:
    for cand in pool:
        if not cand.is_empty and values_equal(cand.value, value):
            cand.tc_evidence.extend(tc)
            cand.kb_evidence.extend(kb)
            return
    pool.append(CandidateValue(value, list(tc), list(kb)))


def find_tc_candidates(entity: str, heading: str, corpus: CorpusHandle,
                       stats: Optional[HeadingStats] = None,
                       exclude_table_ids: Iterable[str] = ()) -> list[CandidateValue]:
    """Values the corpus holds for the entity under the heading or any
    related heading (co-occurrence count > 0)."""
    h = normalize_label(heading)
    match = {h}
    if stats is not None:
        match.update(stats.related_headings(h))
    excluded = set(exclude_table_ids)
    pool: list[CandidateValue] = []
    postings = sorted(corpus.index.by_entity.get(entity, ()))
    seen_tables = []
    for tid, _row in postings:
        if tid not in excluded and tid not in seen_tables:
            seen_tables.append(tid)
    for tid in seen_tables:
        table = corpus.tables[tid]
        for col in table.attribute_columns():
            hp = table.headings[col]
            if hp not in match:
                continue
            for r, row in enumerate(table.rows):
                if row[table.core_column].entity_id != entity:
                    continue
                cell = row[col]
                if cell.norm is None or cell.norm.is_empty:
                    continue
                ev = TcEvidence(tid, hp, (tid, r, col), cell.raw_text)
                _merge_into(pool, cell.norm, tc=[ev])
    return pool


def normalize_kb_object(obj: str, heading: str, kb: KbHandle,
                        column_type: Optional[ValueType] = None,
                        entity_universe: Optional[set[str]] = None) -> NormalizedValue:
    """Normalize a raw KB object for comparison with table values.

    Objects naming known entities (KB subjects or ids linked anywhere in
    the corpus) stay entity ids; otherwise the target column's type (when
    known) drives normalization.
    """
    if kb.is_entity(obj) or (entity_universe is not None and obj in entity_universe):
        return NormalizedValue(ValueType.ENTITY, "entity", clean_text(obj))
    if column_type == ValueType.ENTITY:
        return NormalizedValue(ValueType.ENTITY, "entity", clean_text(obj))
    if column_type is not None:
        return normalize(obj, column_type)
    return normalize_auto(obj, heading)


def find_kb_candidates(entity: str, heading: str, kb: KbHandle,
                       stats: Optional[HeadingStats] = None,
                       tau_ed: float = DEFAULT_TAU_ED,
                       column_type: Optional[ValueType] = None,
                       entity_universe: Optional[set[str]] = None) -> list[CandidateValue]:
    """Objects of <entity, p, ?> for predicates matched to the heading.

    Predicates qualify via co-occurrence (n(h, p) > 0) or via a label whose
    edit similarity to the heading reaches ``tau_ed``.
    """
    h = normalize_label(heading)
    matched: set[str] = set()
    if stats is not None:
        matched.update(stats.matched_predicates(h))
    for p in kb.predicates_of(entity):
        if p in matched:
            continue
        if edit_sim(kb.label(p), h) >= tau_ed:
            matched.add(p)
    pool: list[CandidateValue] = []
    for p in sorted(matched):
        for obj in sorted(kb.lookup(entity, p)):
            value = normalize_kb_object(obj, h, kb, column_type, entity_universe)
            if value.is_empty:
                continue
            _merge_into(pool, value, kb=[KbEvidence(p, (entity, p, obj))])
    return pool


def build_pool(entity: str, heading: str, corpus: CorpusHandle, kb: KbHandle,
               stats: Optional[HeadingStats] = None,
               tau_ed: float = DEFAULT_TAU_ED,
               column_type: Optional[ValueType] = None,
               exclude_table_ids: Iterable[str] = ()) -> list[CandidateValue]:
    """Merged candidate pool from both sources plus the Empty sentinel.

    Candidates order deterministically by canonical string; Empty goes
    last.  Evidence from merged duplicates is concatenated, never dropped.
    """
    pool = find_tc_candidates(entity, heading, corpus, stats, exclude_table_ids)
    for cand in find_kb_candidates(entity, heading, kb, stats, tau_ed, column_type,
                                   corpus.entity_universe):
        _merge_into(pool, cand.value, tc=cand.tc_evidence, kb=cand.kb_evidence)
    pool.sort(key=lambda c: c.canonical)
    pool.append(CandidateValue(EMPTY))
    return pool
