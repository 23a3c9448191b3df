"""Shared builders for corpus/KB fixtures used across the test suite."""

from __future__ import annotations

import json

from cellac.tables import CorpusHandle, PageMeta, RelationalTable, Cell, annotate_table


def cell(spec) -> Cell:
    """Build a Cell from "text" or ("text", "entity_id")."""
    if isinstance(spec, tuple):
        return Cell(raw_text=spec[0], entity_id=spec[1])
    return Cell(raw_text=spec)


def make_table(tid, headings, rows, title="", caption="", meta=None) -> RelationalTable:
    table = RelationalTable(
        table_id=tid,
        page_title=title,
        caption=caption,
        headings=[h.lower().strip() for h in headings],
        rows=[[cell(c) for c in row] for row in rows],
        page_meta=PageMeta(**(meta or {})),
    )
    annotate_table(table)
    return table


def make_corpus(*tables) -> CorpusHandle:
    return CorpusHandle(tables)


def record_for(tid, headings, rows, title="", caption="", meta=None) -> dict:
    rec_rows = []
    for row in rows:
        rec_row = []
        for c in row:
            if isinstance(c, tuple):
                rec_row.append({"text": c[0], "entity": c[1]})
            else:
                rec_row.append({"text": c})
        rec_rows.append(rec_row)
    rec = {"id": tid, "pageTitle": title, "caption": caption,
           "headings": headings, "rows": rec_rows}
    if meta:
        rec["meta"] = meta
    return rec


def write_corpus_file(path, records) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def write_kb_files(triples_path, labels_path, triples, labels) -> None:
    with open(triples_path, "w", encoding="utf-8") as f:
        for s, p, o in triples:
            f.write(f"{s}\t{p}\t{o}\n")
    with open(labels_path, "w", encoding="utf-8") as f:
        for p, label in labels:
            f.write(f"{p}\t{label}\n")
