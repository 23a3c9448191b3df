"""Test collections, qrels, run files, and NDCG evaluation.

Test collections are built by concealing cells from corpus tables via
stratified sampling over the four main column types.  Runs are scored with
binary-gain NDCG at fixed cutoffs under two conditions: with the Empty
sentinel as a rankable, gradable item, and with it excluded.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .candidates import CandidateValue
from .ranking import RankedSuggestion, Ranker
from .tables import Cell, CorpusHandle, RelationalTable, annotate_table, parse_record
from .typesys import (
    EMPTY,
    CellValue,
    EmptySentinel,
    ValueType,
    canonical_string,
    parse_canonical,
    values_equal,
)

MAIN_TYPES = (ValueType.ENTITY, ValueType.QUANTITY, ValueType.STRING, ValueType.DATETIME)

Qrels = dict[str, list[CellValue]]


@dataclass
class TestCell:
    __test__ = False  # not a pytest class, despite the name

    cell_id: str
    source_table_id: str
    entity: str
    heading: str
    column_type: str
    row: int
    col: int
    concealed_raw: str
    concealed: CellValue
    originally_empty: bool
    input_table: RelationalTable = field(repr=False, default=None)

    def to_record(self) -> dict:
        return {
            "cellId": self.cell_id,
            "sourceTableId": self.source_table_id,
            "entity": self.entity,
            "heading": self.heading,
            "columnType": self.column_type,
            "row": self.row,
            "col": self.col,
            "concealedRaw": self.concealed_raw,
            "concealed": canonical_string(self.concealed),
            "originallyEmpty": self.originally_empty,
            "inputTable": self.input_table.to_record() if self.input_table else None,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TestCell":
        table = parse_record(rec["inputTable"]) if rec.get("inputTable") else None
        return cls(rec["cellId"], rec["sourceTableId"], rec["entity"], rec["heading"],
                   rec["columnType"], rec["row"], rec["col"], rec["concealedRaw"],
                   parse_canonical(rec["concealed"]), rec["originallyEmpty"], table)


def conceal_cell(table: RelationalTable, row: int, col: int) -> RelationalTable:
    """Copy of a table with one cell blanked, for use as the input table."""
    blanked = copy.deepcopy(table)
    blanked.rows[row][col] = Cell(raw_text="")
    annotate_table(blanked)
    return blanked


def _qualifying_columns(corpus: CorpusHandle, cells_per_column: int, min_rows: int,
                        min_cols: int, min_heading_len: int, agreement: float):
    """(stratum type -> [(table_id, col, eligible_rows)]) over the corpus."""
    from .typesys import classify_cell

    out: dict[ValueType, list[tuple[str, int, list[int]]]] = {t: [] for t in MAIN_TYPES}
    for tid in sorted(corpus.tables):
        table = corpus.tables[tid]
        if table.n_rows < min_rows or table.n_cols < min_cols:
            continue
        for col in table.attribute_columns():
            heading = table.headings[col]
            if len(heading) < min_heading_len:
                continue
            votes: dict[ValueType, int] = {}
            total = 0
            for row in table.rows:
                cell = row[col]
                if not cell.raw_text.strip():
                    continue
                t = classify_cell(cell.raw_text, heading, cell.entity_id is not None)
                votes[t] = votes.get(t, 0) + 1
                total += 1
            if not votes:
                continue
            top_type = max(sorted(votes, key=lambda t: t.value), key=lambda t: votes[t])
            if top_type not in MAIN_TYPES or votes[top_type] / total < agreement:
                continue
            eligible = [r for r, row in enumerate(table.rows)
                        if row[table.core_column].entity_id]
            if len(eligible) >= cells_per_column:
                out[top_type].append((tid, col, eligible))
    return out


def build_test_collection(corpus: CorpusHandle, per_type: int = 50,
                          cells_per_column: int = 5, seed: int = 0,
                          min_rows: int = 5, min_cols: int = 3,
                          min_heading_len: int = 4, agreement: float = 0.8,
                          ) -> tuple[list[TestCell], CorpusHandle]:
    """Stratified concealed-cell sampling; returns cells plus the corpus with
    the sampled input tables removed."""
    candidates = _qualifying_columns(corpus, cells_per_column, min_rows, min_cols,
                                     min_heading_len, agreement)
    rng = np.random.default_rng(seed)
    cells: list[TestCell] = []
    used_tables: set[str] = set()
    for vtype in MAIN_TYPES:
        columns = list(candidates[vtype])
        order = rng.permutation(len(columns))
        picked = []
        for i in order:
            tid, col, eligible = columns[int(i)]
            if tid in used_tables:
                continue
            picked.append((tid, col, eligible))
            used_tables.add(tid)
            if len(picked) == per_type:
                break
        if len(picked) < per_type:
            raise ValueError(
                f"not enough qualifying {vtype.value} columns: "
                f"need {per_type}, found {len(picked)}")
        for tid, col, eligible in picked:
            table = corpus.tables[tid]
            rows = rng.choice(len(eligible), size=cells_per_column, replace=False)
            for ri in sorted(int(r) for r in rows):
                r = eligible[ri]
                cell = table.rows[r][col]
                concealed: CellValue
                if cell.norm is None or cell.norm.is_empty:
                    concealed = EMPTY
                else:
                    concealed = cell.norm
                cells.append(TestCell(
                    cell_id=f"{tid}:{r}:{col}",
                    source_table_id=tid,
                    entity=table.rows[r][table.core_column].entity_id,
                    heading=table.headings[col],
                    column_type=vtype.value,
                    row=r, col=col,
                    concealed_raw=cell.raw_text,
                    concealed=concealed,
                    originally_empty=isinstance(concealed, EmptySentinel),
                    input_table=conceal_cell(table, r, col),
                ))
    reduced = corpus.without(used_tables)
    return cells, reduced


def qrels_from_cells(cells: Iterable[TestCell]) -> Qrels:
    """Mechanical ground truth: the concealed value (or Empty) per cell."""
    return {c.cell_id: [c.concealed] for c in cells}


# --------------------------------------------------------------------- NDCG

def ndcg_at_k(ranked: Sequence[CellValue], correct: Sequence[CellValue], k: int) -> float:
    """Binary-gain NDCG@k; each correct value credits at most one rank."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not correct:
        raise ValueError("the correct set must be non-empty")
    remaining = list(correct)
    gains = []
    for item in ranked[:k]:
        hit = None
        for i, truth in enumerate(remaining):
            if isinstance(item, EmptySentinel) or isinstance(truth, EmptySentinel):
                if isinstance(item, EmptySentinel) and isinstance(truth, EmptySentinel):
                    hit = i
                    break
            elif values_equal(item, truth):
                hit = i
                break
        if hit is None:
            gains.append(0.0)
        else:
            gains.append(1.0)
            remaining.pop(hit)
    dcg = sum(g / math.log2(i + 2) for i, g in enumerate(gains))
    ideal = sum(1.0 / math.log2(i + 2) for i in range(min(k, len(correct))))
    return dcg / ideal if ideal > 0 else 0.0


# ----------------------------------------------------------- run containers

RunEntry = tuple[CellValue, float, str]   # (value, score, provenance summary)
Run = dict[str, list[RunEntry]]


def run_from_suggestions(suggestions: dict[str, list[RankedSuggestion]]) -> Run:
    run: Run = {}
    for cell_id, sugs in suggestions.items():
        run[cell_id] = [(s.value, s.score, ";".join(s.provenance())) for s in sugs]
    return run


def write_run(path, run: Run) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("#% cellac run 1\n")
        for cell_id in sorted(run):
            for rank, (value, score, prov) in enumerate(run[cell_id], start=1):
                f.write(f"{cell_id}\t{rank}\t{canonical_string(value)}\t{score!r}\t{prov}\n")


def read_run(path) -> Run:
    run: Run = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#%"):
                continue
            cell_id, rank, value, score, prov = line.split("\t")
            run.setdefault(cell_id, []).append((parse_canonical(value), float(score), prov))
    for entries in run.values():
        entries.sort(key=lambda e: -e[1])
    return run


def write_qrels(path, qrels: Qrels) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("#% cellac qrels 1\n")
        for cell_id in sorted(qrels):
            for value in qrels[cell_id]:
                f.write(f"{cell_id}\t{canonical_string(value)}\t1\n")


def read_qrels(path) -> Qrels:
    qrels: Qrels = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#%"):
                continue
            cell_id, value, _rel = line.split("\t")
            qrels.setdefault(cell_id, []).append(parse_canonical(value))
    return qrels


def _reparse(value: CellValue) -> CellValue:
    """Canonicalize through the text form so file and in-memory values agree."""
    return parse_canonical(canonical_string(value))


def evaluate(run: Run, qrels: Qrels, ks: Sequence[int] = (5, 10)) -> dict:
    """Mean NDCG at each cutoff under Empty-included and Empty-excluded
    conditions.  Every run cell must appear in the qrels."""
    for cell_id in run:
        if cell_id not in qrels:
            raise ValueError(f"run cell {cell_id} missing from qrels")
    report = {"empty_included": {}, "empty_excluded": {}, "cells": len(run)}
    per_cell: dict[str, dict[str, float]] = {}
    included_scores = {k: [] for k in ks}
    excluded_scores = {k: [] for k in ks}
    excluded_cells = 0
    for cell_id in sorted(run):
        ranked = [_reparse(v) for v, _s, _p in run[cell_id]]
        truth = [_reparse(v) for v in qrels[cell_id]]
        detail = {}
        for k in ks:
            score = ndcg_at_k(ranked, truth, k)
            included_scores[k].append(score)
            detail[f"included@{k}"] = score
        non_empty_truth = [t for t in truth if not isinstance(t, EmptySentinel)]
        if non_empty_truth:
            excluded_cells += 1
            ranked_ne = [v for v in ranked if not isinstance(v, EmptySentinel)]
            for k in ks:
                score = ndcg_at_k(ranked_ne, non_empty_truth, k)
                excluded_scores[k].append(score)
                detail[f"excluded@{k}"] = score
        per_cell[cell_id] = detail
    for k in ks:
        report["empty_included"][f"ndcg@{k}"] = (
            float(np.mean(included_scores[k])) if included_scores[k] else 0.0)
        report["empty_excluded"][f"ndcg@{k}"] = (
            float(np.mean(excluded_scores[k])) if excluded_scores[k] else 0.0)
    report["empty_excluded"]["cells"] = excluded_cells
    report["per_cell"] = per_cell
    return report


def evaluate_files(run_path, qrels_path, ks: Sequence[int] = (5, 10)) -> dict:
    return evaluate(read_run(run_path), read_qrels(qrels_path), ks)


def format_report(report: dict, label: str = "") -> str:
    lines = []
    if label:
        lines.append(label)
    lines.append(f"{'condition':<16} {'NDCG@5':>8} {'NDCG@10':>8} {'cells':>6}")
    inc, exc = report["empty_included"], report["empty_excluded"]
    lines.append(f"{'Empty included':<16} {inc['ndcg@5']:>8.4f} {inc['ndcg@10']:>8.4f} "
                 f"{report['cells']:>6}")
    lines.append(f"{'Empty excluded':<16} {exc['ndcg@5']:>8.4f} {exc['ndcg@10']:>8.4f} "
                 f"{exc['cells']:>6}")
    return "\n".join(lines)


def collection_stats(qrels: Qrels) -> dict:
    """Average number of non-empty correct values and the empty rate."""
    n = len(qrels)
    if n == 0:
        return {"cells": 0, "avg_values": 0.0, "empty_rate": 0.0}
    value_counts = []
    empties = 0
    for truth in qrels.values():
        non_empty = [t for t in truth if not isinstance(t, EmptySentinel)]
        value_counts.append(len(non_empty))
        if not non_empty:
            empties += 1
    return {"cells": n, "avg_values": float(np.mean(value_counts)),
            "empty_rate": empties / n}


def per_source_qrels(qrels: Qrels, pools: dict[str, list[CandidateValue]],
                     source: str) -> Qrels:
    """Truth restricted to values a single source can supply.

    Cells whose restricted truth is empty get Empty as their only correct
    value (the source has nothing to offer).
    """
    if source not in ("kb", "tc"):
        raise ValueError("source must be 'kb' or 'tc'")
    out: Qrels = {}
    for cell_id, truth in qrels.items():
        pool = pools.get(cell_id, [])
        kept: list[CellValue] = []
        for t in truth:
            if isinstance(t, EmptySentinel):
                continue
            for cand in pool:
                if cand.is_empty or not values_equal(_reparse(cand.value), _reparse(t)):
                    continue
                evidence = cand.kb_evidence if source == "kb" else cand.tc_evidence
                if evidence:
                    kept.append(t)
                    break
        out[cell_id] = kept if kept else [EMPTY]
    return out


def learn_gamma(ranker: Ranker, cells: Sequence[TestCell], qrels: Qrels,
                variant: str = "ed", folds: int = 5, seed: int = 0,
                k: int = 10, grid: Optional[Sequence[float]] = None) -> tuple[float, list[float]]:
    """Cross-validated grid search for the Empty score in KB-only ranking."""
    from .ranking import kfold

    grid = list(grid) if grid is not None else [round(0.05 * i, 2) for i in range(21)]
    cells = list(cells)
    fold_best: list[float] = []
    for train_idx, _test_idx in kfold(len(cells), folds, seed):
        best_gamma, best_score = grid[0], -1.0
        for gamma in grid:
            scores = []
            for i in train_idx:
                cell = cells[i]
                sugs = ranker.kb_rank(cell.entity, cell.heading, variant, gamma,
                                      table=cell.input_table)
                ranked = [s.value for s in sugs]
                scores.append(ndcg_at_k([_reparse(v) for v in ranked],
                                        [_reparse(v) for v in qrels[cell.cell_id]], k))
            mean = float(np.mean(scores)) if scores else 0.0
            if mean > best_score:
                best_score, best_gamma = mean, gamma
        fold_best.append(best_gamma)
    return float(np.mean(fold_best)), fold_best
