"""Relational table corpus: records, core-column detection, inverted indexes.

The corpus file is newline-delimited UTF-8 records, one object per line:
``{"id", "pageTitle", "caption", "headings": [...],
"rows": [[{"text", "entity"?}, ...], ...], "meta"?: {...}}``.
Lines starting with ``#%`` are artifact version headers and are skipped.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .typesys import (
    NormalizedValue,
    ValueType,
    detect_column_type,
    normalize,
    normalize_label,
)


@dataclass
class Cell:
    raw_text: str
    entity_id: Optional[str] = None
    norm: Optional[NormalizedValue] = None


@dataclass
class PageMeta:
    in_links: int = 0
    out_links: int = 0
    page_views: int = 0
    tables_on_page: int = 1
    table_chars: int = 0
    page_chars: int = 1

    @classmethod
    def from_record(cls, meta: Optional[dict]) -> "PageMeta":
        meta = meta or {}
        table_chars = int(meta.get("tableChars", 0))
        return cls(
            in_links=int(meta.get("inLinks", 0)),
            out_links=int(meta.get("outLinks", 0)),
            page_views=int(meta.get("pageViews", 0)),
            tables_on_page=max(1, int(meta.get("tablesOnPage", 1))),
            table_chars=table_chars,
            page_chars=max(1, table_chars, int(meta.get("pageChars", 0))),
        )


@dataclass
class RelationalTable:
    table_id: str
    page_title: str
    caption: str
    headings: list[str]
    rows: list[list[Cell]]
    core_column: int = 0
    page_meta: PageMeta = field(default_factory=PageMeta)
    column_types: list[set[ValueType]] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.headings)

    def column_cells(self, col: int) -> list[Cell]:
        return [row[col] for row in self.rows]

    def attribute_columns(self) -> list[int]:
        """Indexes of the non-core (attribute) columns."""
        return [c for c in range(self.n_cols) if c != self.core_column]

    def core_entities(self) -> set[str]:
        return {row[self.core_column].entity_id for row in self.rows
                if row[self.core_column].entity_id}

    def to_record(self) -> dict:
        rows = []
        for row in self.rows:
            rec_row = []
            for cell in row:
                c: dict = {"text": cell.raw_text}
                if cell.entity_id:
                    c["entity"] = cell.entity_id
                rec_row.append(c)
            rows.append(rec_row)
        m = self.page_meta
        return {
            "id": self.table_id,
            "pageTitle": self.page_title,
            "caption": self.caption,
            "headings": list(self.headings),
            "rows": rows,
            "meta": {
                "inLinks": m.in_links, "outLinks": m.out_links,
                "pageViews": m.page_views, "tablesOnPage": m.tables_on_page,
                "tableChars": m.table_chars, "pageChars": m.page_chars,
            },
        }


def entity_rate(table: RelationalTable, col: int) -> float:
    """Fraction of cells in a column that carry an entity link."""
    if col < 0 or col >= table.n_cols:
        raise ValueError(f"column {col} out of range for table {table.table_id}")
    if not table.rows:
        return 0.0
    linked = sum(1 for row in table.rows if row[col].entity_id)
    return linked / len(table.rows)


def detect_core_column(table: RelationalTable) -> int:
    """Core column = the left-most-2 column with the higher entity rate.

    Ties (and single-column tables) resolve to column 0.
    """
    if table.n_cols < 2:
        return 0
    return 1 if entity_rate(table, 1) > entity_rate(table, 0) else 0


def tokenize(text: str) -> list[str]:
    return text.lower().split()


def table_terms(table: RelationalTable) -> set[str]:
    """Distinct terms of a table across title, caption, headings, and cells."""
    terms = set(tokenize(table.page_title)) | set(tokenize(table.caption))
    for h in table.headings:
        terms.update(tokenize(h))
    for row in table.rows:
        for cell in row:
            terms.update(tokenize(cell.raw_text))
    return terms


@dataclass
class CorpusIndex:
    by_entity: dict[str, set[tuple[str, int]]] = field(default_factory=lambda: defaultdict(set))
    by_heading: dict[str, set[tuple[str, int]]] = field(default_factory=lambda: defaultdict(set))
    by_entity_heading: dict[tuple[str, str], set[tuple[str, int, int]]] = field(
        default_factory=lambda: defaultdict(set))
    doc_freqs: dict[str, int] = field(default_factory=lambda: defaultdict(int))

    def add_table(self, table: RelationalTable) -> None:
        tid = table.table_id
        core = table.core_column
        for col, heading in enumerate(table.headings):
            self.by_heading[heading].add((tid, col))
        for r, row in enumerate(table.rows):
            e = row[core].entity_id
            if not e:
                continue
            self.by_entity[e].add((tid, r))
            for col in table.attribute_columns():
                self.by_entity_heading[(e, table.headings[col])].add((tid, r, col))
        for term in table_terms(table):
            self.doc_freqs[term] += 1


class CorpusHandle:
    """Immutable view over an ingested corpus: tables by id plus indexes."""

    def __init__(self, tables: Iterable[RelationalTable], skipped_count: int = 0):
        self.tables: dict[str, RelationalTable] = {}
        self.index = CorpusIndex()
        self.skipped_count = skipped_count
        self.entity_universe: set[str] = set()
        for t in sorted(tables, key=lambda t: t.table_id):
            if t.table_id in self.tables:
                raise ValueError(f"duplicate table id: {t.table_id}")
            self.tables[t.table_id] = t
            self.index.add_table(t)
            for row in t.rows:
                for cell in row:
                    if cell.entity_id:
                        self.entity_universe.add(cell.entity_id)

    def __len__(self) -> int:
        return len(self.tables)

    def __iter__(self):
        return iter(self.tables.values())

    def get(self, table_id: str) -> Optional[RelationalTable]:
        return self.tables.get(table_id)

    def without(self, table_ids: Iterable[str]) -> "CorpusHandle":
        """A new handle with the given tables removed (indexes rebuilt)."""
        drop = set(table_ids)
        return CorpusHandle([t for t in self if t.table_id not in drop],
                            skipped_count=self.skipped_count)

    def idf(self, term: str) -> float:
        import math
        n = max(1, len(self.tables))
        df = max(1, self.index.doc_freqs.get(term.lower(), 0))
        return math.log(n / df)


def annotate_table(table: RelationalTable) -> None:
    """Detect the core column, type every column, and normalize every cell."""
    table.core_column = detect_core_column(table)
    table.column_types = []
    for col, heading in enumerate(table.headings):
        cells = table.column_cells(col)
        types = detect_column_type(
            [(c.raw_text, c.entity_id is not None) for c in cells], heading)
        table.column_types.append(types)
        # Normalize against a deterministic representative of the column type.
        rep = sorted(types, key=lambda t: t.value)[0]
        for cell in cells:
            if cell.entity_id:
                cell.norm = NormalizedValue(ValueType.ENTITY, "entity", cell.entity_id)
            else:
                cell.norm = normalize(cell.raw_text, rep)


def parse_record(rec: dict) -> RelationalTable:
    headings = [normalize_label(str(h)) for h in rec["headings"]]
    if not headings:
        raise ValueError("record has no headings")
    rows = []
    for raw_row in rec["rows"]:
        row = [Cell(raw_text=str(c.get("text", "")), entity_id=c.get("entity") or None)
               for c in raw_row]
        if len(row) != len(headings):
            raise ValueError("row length does not match headings")
        rows.append(row)
    table = RelationalTable(
        table_id=str(rec["id"]),
        page_title=str(rec.get("pageTitle", "")),
        caption=str(rec.get("caption", "")),
        headings=headings,
        rows=rows,
        page_meta=PageMeta.from_record(rec.get("meta")),
    )
    annotate_table(table)
    return table


def ingest_corpus(path) -> CorpusHandle:
    """Load a corpus file, skipping malformed records with a counter.

    A record missing ``headings``/``rows`` (or otherwise malformed) is
    counted in ``skipped_count``; an unreadable file raises.
    """
    tables: list[RelationalTable] = []
    skipped = 0
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#%"):
                continue
            try:
                rec = json.loads(line)
                if "headings" not in rec or "rows" not in rec or "id" not in rec:
                    raise ValueError("missing required field")
                table = parse_record(rec)
                if table.table_id in seen:
                    raise ValueError("duplicate table id")
            except (ValueError, KeyError, TypeError, AttributeError):
                skipped += 1
                continue
            seen.add(table.table_id)
            tables.append(table)
    return CorpusHandle(tables, skipped_count=skipped)


def write_corpus(path, tables: Iterable[RelationalTable], header: bool = True) -> None:
    """Serialize tables back to the corpus record format."""
    with open(path, "w", encoding="utf-8") as f:
        if header:
            f.write("#% cellac corpus 1\n")
        for t in tables:
            f.write(json.dumps(t.to_record(), ensure_ascii=False) + "\n")


def relational_filter(handle: CorpusHandle, min_rate: float) -> list[RelationalTable]:
    """Tables whose core-column entity rate reaches ``min_rate``."""
    if not 0.0 <= min_rate <= 1.0:
        raise ValueError("min_rate must be within [0, 1]")
    return [t for t in handle if entity_rate(t, t.core_column) >= min_rate]
