"""Heading co-occurrence statistics and label similarity.

Counts how often two heading labels (or a heading and a KB predicate) carry
the same value for the same entity, and turns the counts into conditional
match probabilities.  Also provides normalized Levenshtein similarity
between labels.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .kb import KbHandle
from .tables import CorpusHandle, RelationalTable
from .typesys import NormalizedValue, ValueType, clean_text, normalize, normalize_label, values_equal


def normalize_like(raw: str, template: NormalizedValue) -> NormalizedValue:
    """Normalize a raw string the way the template value was normalized.

    Entity-kind templates treat the raw string as an entity id, so KB
    objects compare against linked cells by id.
    """
    if template.kind == "entity":
        return NormalizedValue(ValueType.ENTITY, "entity", clean_text(raw))
    return normalize(raw, template.type)


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insert/delete/substitute edits."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[len(b)]


def edit_sim(a: str, b: str) -> float:
    """Normalized edit similarity: 1 - dist/max(len); both empty gives 1."""
    if not a and not b:
        return 1.0
    longest = max(len(a), len(b))
    return 1.0 - levenshtein(a, b) / longest


@dataclass
class HeadingStats:
    """Pair counts n(h', h) and n(h, p) with cached per-heading totals."""

    h2h: dict[tuple[str, str], int] = field(default_factory=lambda: defaultdict(int))
    h2p: dict[tuple[str, str], int] = field(default_factory=lambda: defaultdict(int))
    h2h_totals: dict[str, int] = field(default_factory=lambda: defaultdict(int))
    h2p_totals: dict[str, int] = field(default_factory=lambda: defaultdict(int))

    def add_h2h(self, ha: str, hb: str, count: int = 1) -> None:
        self.h2h[(ha, hb)] += count
        self.h2h_totals[hb] += count
        if ha != hb:
            self.h2h[(hb, ha)] += count
            self.h2h_totals[ha] += count

    def add_h2p(self, h: str, p: str, count: int = 1) -> None:
        self.h2p[(h, p)] += count
        self.h2p_totals[h] += count

    def n_h2h(self, h_prime: str, h: str) -> int:
        return self.h2h.get((normalize_label(h_prime), normalize_label(h)), 0)

    def n_h2p(self, h: str, p: str) -> int:
        return self.h2p.get((normalize_label(h), p), 0)

    def p_h2h(self, h_prime: str, h: str) -> float:
        """P(h'|h): probability that h' denotes the same attribute as h."""
        h = normalize_label(h)
        total = self.h2h_totals.get(h, 0)
        if total == 0:
            return 0.0
        return self.h2h.get((normalize_label(h_prime), h), 0) / total

    def p_p2h(self, p: str, h: str) -> float:
        """P(p|h): probability that predicate p realizes heading h."""
        h = normalize_label(h)
        total = self.h2p_totals.get(h, 0)
        if total == 0:
            return 0.0
        return self.h2p.get((h, p), 0) / total

    def related_headings(self, h: str) -> dict[str, int]:
        """Headings h' with n(h', h) > 0 and their counts."""
        h = normalize_label(h)
        return {hp: c for (hp, hh), c in self.h2h.items() if hh == h and c > 0}

    def matched_predicates(self, h: str) -> dict[str, int]:
        """Predicates p with n(h, p) > 0 and their counts."""
        h = normalize_label(h)
        return {p: c for (hh, p), c in self.h2p.items() if hh == h and c > 0}


def _entity_column_values(table: RelationalTable, entity: str) -> dict[int, list[NormalizedValue]]:
    """Non-empty normalized values per attribute column at the entity's rows."""
    rows = [r for r, row in enumerate(table.rows)
            if row[table.core_column].entity_id == entity]
    out: dict[int, list[NormalizedValue]] = {}
    for col in table.attribute_columns():
        vals = [table.rows[r][col].norm for r in rows]
        vals = [v for v in vals if v is not None and not v.is_empty]
        if vals:
            out[col] = vals
    return out


def _any_equal(avals: list[NormalizedValue], bvals: list[NormalizedValue]) -> bool:
    return any(values_equal(va, vb) for va in avals for vb in bvals)


def build_h2h(corpus: CorpusHandle, stats: Optional[HeadingStats] = None) -> HeadingStats:
    """Count heading pairs sharing a value for a shared core entity.

    One increment per (entity, unordered table pair, column pair) whose
    values match; empty cells never count, nor do column pairs within a
    single table.
    """
    stats = stats or HeadingStats()
    by_entity_tables: dict[str, set[str]] = defaultdict(set)
    for e, postings in corpus.index.by_entity.items():
        for tid, _row in postings:
            by_entity_tables[e].add(tid)
    cache: dict[tuple[str, str], dict[int, list[NormalizedValue]]] = {}

    def colvals(tid: str, e: str) -> dict[int, list[NormalizedValue]]:
        key = (tid, e)
        if key not in cache:
            cache[key] = _entity_column_values(corpus.tables[tid], e)
        return cache[key]

    for e in sorted(by_entity_tables):
        tids = sorted(by_entity_tables[e])
        for i in range(len(tids)):
            ta = corpus.tables[tids[i]]
            avals = colvals(tids[i], e)
            if not avals:
                continue
            for j in range(i + 1, len(tids)):
                tb = corpus.tables[tids[j]]
                bvals = colvals(tids[j], e)
                for ca, va in avals.items():
                    for cb, vb in bvals.items():
                        if _any_equal(va, vb):
                            stats.add_h2h(ta.headings[ca], tb.headings[cb])
    return stats


def build_h2p(corpus: CorpusHandle, kb: KbHandle,
              stats: Optional[HeadingStats] = None) -> HeadingStats:
    """Count (heading, predicate) pairs that carry the same value.

    One increment per (cell, predicate): a cell (e, h, v) matches predicate
    p when any object of <e, p, ?> normalizes to a value equal to v.
    """
    stats = stats or HeadingStats()
    for tid in sorted(corpus.tables):
        table = corpus.tables[tid]
        core = table.core_column
        for r, row in enumerate(table.rows):
            e = row[core].entity_id
            if not e:
                continue
            preds = kb.predicates_of(e)
            if not preds:
                continue
            for col in table.attribute_columns():
                v = row[col].norm
                if v is None or v.is_empty:
                    continue
                h = table.headings[col]
                for p in sorted(preds):
                    objs = kb.lookup(e, p)
                    if any(values_equal(v, normalize_like(o, v)) for o in objs):
                        stats.add_h2p(h, p)
    return stats


def build_stats(corpus: CorpusHandle, kb: KbHandle) -> HeadingStats:
    stats = HeadingStats()
    build_h2h(corpus, stats)
    build_h2p(corpus, kb, stats)
    return stats


def save_stats(stats: HeadingStats, h2h_path, h2p_path) -> None:
    with open(h2h_path, "w", encoding="utf-8") as f:
        f.write("#% cellac h2h 1\n")
        for (hp, h), c in sorted(stats.h2h.items()):
            f.write(f"{hp}\t{h}\t{c}\n")
    with open(h2p_path, "w", encoding="utf-8") as f:
        f.write("#% cellac h2p 1\n")
        for (h, p), c in sorted(stats.h2p.items()):
            f.write(f"{h}\t{p}\t{c}\n")


def load_stats(h2h_path, h2p_path) -> HeadingStats:
    stats = HeadingStats()
    with open(h2h_path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.strip() or line.startswith("#%"):
                continue
            hp, h, c = line.rstrip("\n").split("\t")
            stats.h2h[(hp, h)] += int(c)
            stats.h2h_totals[h] += int(c)
    with open(h2p_path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.strip() or line.startswith("#%"):
                continue
            h, p, c = line.rstrip("\n").split("\t")
            stats.h2p[(h, p)] += int(c)
            stats.h2p_totals[h] += int(c)
    return stats
