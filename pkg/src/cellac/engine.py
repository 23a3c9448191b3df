"""Engine facade: immutable artifact bundle behind one `suggest` entry point.

The CLI and the HTTP service both call `Engine.suggest`, which guarantees
identical results for identical inputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from .config import EngineConfig
from .embeddings import LabelEmbeddings, load_embeddings
from .forest import ForestModel
from .kb import KbHandle, load_kb
from .ranking import HEADSIMS, MATCHERS, RankedSuggestion, Ranker
from .stats import HeadingStats, load_stats
from .tables import CorpusHandle, RelationalTable, ingest_corpus, parse_record
from .typesys import normalize_label


class MissingArtifactError(Exception):
    """A required artifact is absent; carries the subcommand that produces it."""

    def __init__(self, what: str, producer: str):
        super().__init__(f"missing {what}; produce it with `cellac {producer}` first")
        self.producer = producer


class BadRequestError(Exception):
    """Invalid suggest input; carries a machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class Suggestion:
    display: str
    canonical: str
    score: float
    rank: int
    is_empty: bool
    evidence: list[dict]

    def to_dict(self) -> dict:
        return {"display": self.display, "canonical": self.canonical,
                "score": self.score, "rank": self.rank,
                "isEmpty": self.is_empty, "evidence": self.evidence}


def artifact_version(path) -> Optional[str]:
    """First #%-header line of a text artifact, if any."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            first = f.readline().strip()
        if first.startswith("#%"):
            return first[2:].strip()
        if first.startswith("{"):
            import json
            with open(path, "r", encoding="utf-8") as f:
                d = json.load(f)
            if "format" in d:
                return f"{d['format']} {d.get('version', '?')}"
    except OSError:
        return None
    return None


class Engine:
    def __init__(self, corpus: CorpusHandle, kb: KbHandle,
                 stats: Optional[HeadingStats] = None,
                 embeddings: Optional[LabelEmbeddings] = None,
                 tmatch_model: Optional[ForestModel] = None,
                 ltr_model: Optional[ForestModel] = None,
                 config: Optional[EngineConfig] = None):
        self.config = config or EngineConfig()
        self.corpus = corpus
        self.kb = kb
        self.ltr_model = ltr_model
        self.ranker = Ranker(corpus, kb, stats, embeddings, tmatch_model,
                             ig_weights=self.config.ig_weights,
                             tau_ed=self.config.tau_ed,
                             msje_threshold=self.config.msje_threshold,
                             gamma=self.config.gamma)
        self.versions: dict[str, str] = {}

    @classmethod
    def load(cls, config: EngineConfig, require_ltr: bool = False) -> "Engine":
        """Load all configured artifacts, failing actionably on missing ones."""
        def need(path, what, producer):
            if path is None or not os.path.exists(path):
                raise MissingArtifactError(what, producer)
            return path

        corpus = ingest_corpus(need(config.corpus, "corpus file", "ingest"))
        kb = load_kb(need(config.triples, "KB triples file", "ingest"),
                     config.labels if config.labels and os.path.exists(config.labels)
                     else None)
        stats = embeddings = tmatch = ltr = None
        versions = {}
        if config.h2h and config.h2p and os.path.exists(config.h2h) and os.path.exists(config.h2p):
            stats = load_stats(config.h2h, config.h2p)
            versions["stats"] = artifact_version(config.h2h) or "h2h ?"
        if config.embeddings and os.path.exists(config.embeddings):
            embeddings = load_embeddings(config.embeddings)
            versions["embeddings"] = artifact_version(config.embeddings) or "embeddings ?"
        if config.tmatch and os.path.exists(config.tmatch):
            tmatch = ForestModel.load(config.tmatch)
            versions["tmatch"] = artifact_version(config.tmatch) or "forest ?"
        if config.ltr and os.path.exists(config.ltr):
            ltr = ForestModel.load(config.ltr)
            versions["ltr"] = artifact_version(config.ltr) or "forest ?"
        if require_ltr and ltr is None:
            raise MissingArtifactError("value-ranking model", "train-ltr")
        versions["corpus"] = artifact_version(config.corpus) or "corpus raw"
        engine = cls(corpus, kb, stats, embeddings, tmatch, ltr, config)
        engine.versions = versions
        return engine

    # ----------------------------------------------------------- suggestion

    def default_method(self) -> str:
        return "ltr" if self.ltr_model is not None else "otg"

    def resolve_target(self, table: Optional[RelationalTable],
                       entity: Optional[str], row: Optional[int],
                       heading: Optional[str], column: Optional[int]) -> tuple[str, str]:
        """(entity, heading) from exactly one of row/entity and column/heading."""
        if (entity is None) == (row is None):
            raise BadRequestError("invalid_target",
                                  "exactly one of `entity` and `row` is required")
        if (heading is None) == (column is None):
            raise BadRequestError("invalid_target",
                                  "exactly one of `heading` and `column` is required")
        if (row is not None or column is not None) and table is None:
            raise BadRequestError("invalid_target",
                                  "row/column targets need an inline table")
        if row is not None:
            if not 0 <= row < table.n_rows:
                raise BadRequestError("invalid_target", f"row {row} out of range")
            entity = table.rows[row][table.core_column].entity_id
            if not entity:
                raise BadRequestError("unlinked_row",
                                      f"row {row} has no linked core-column entity")
        if column is not None:
            if not 0 <= column < table.n_cols:
                raise BadRequestError("invalid_target", f"column {column} out of range")
            heading = table.headings[column]
        return entity, normalize_label(heading)

    def suggest(self, table: Optional[RelationalTable] = None,
                entity: Optional[str] = None, row: Optional[int] = None,
                heading: Optional[str] = None, column: Optional[int] = None,
                k: int = 10, method: Optional[str] = None) -> dict:
        """Ranked, evidence-backed value suggestions for one target cell."""
        if k < 1:
            raise BadRequestError("invalid_k", "k must be >= 1")
        entity, heading = self.resolve_target(table, entity, row, heading, column)
        method = method or self.default_method()
        suggestions = self._run_method(method, entity, heading, table, k)
        return {
            "entity": entity,
            "heading": heading,
            "method": method,
            "k": k,
            "suggestions": [self._to_suggestion(s).to_dict() for s in suggestions],
        }

    def _run_method(self, method: str, entity: str, heading: str,
                    table: Optional[RelationalTable], k: int) -> list[RankedSuggestion]:
        r = self.ranker
        if method == "ltr":
            if self.ltr_model is None:
                raise MissingArtifactError("value-ranking model", "train-ltr")
            return r.rank(entity, heading, table, self.ltr_model, k)
        if method == "otg":
            return r.otg_rank(entity, heading, table, k)
        if method in ("kb-ed", "kb-mp"):
            return r.kb_rank(entity, heading, method.split("-")[1], table=table, k=k)
        if method.startswith("tc-"):
            parts = method.split("-")
            if len(parts) == 4 and parts[1] in MATCHERS and parts[3] in HEADSIMS:
                return r.tc_rank(entity, heading, table, matcher=parts[1],
                                 combine=parts[2], headsim=parts[3], k=k)
        raise BadRequestError(
            "invalid_method",
            f"unknown method {method!r}; use ltr, otg, kb-ed, kb-mp, "
            "or tc-<matcher>-<combine>-<headsim>")

    def _to_suggestion(self, s: RankedSuggestion) -> Suggestion:
        evidence = []
        for ev in s.candidate.tc_evidence:
            table = self.corpus.get(ev.table_id)
            evidence.append({
                "kind": "tc",
                "tableId": ev.table_id,
                "pageTitle": table.page_title if table else "",
                "heading": ev.heading,
                "rawText": ev.raw_text,
            })
        for ev in s.candidate.kb_evidence:
            evidence.append({
                "kind": "kb",
                "predicate": ev.predicate,
                "label": self.kb.label(ev.predicate),
                "object": ev.triple_ref[2],
            })
        return Suggestion(
            display=s.candidate.display_text(),
            canonical=s.canonical,
            score=s.score,
            rank=s.rank,
            is_empty=s.is_empty,
            evidence=evidence,
        )

    # -------------------------------------------------------------- summary

    def summary(self) -> dict:
        idx = self.corpus.index
        return {
            "tables": len(self.corpus),
            "skippedRecords": self.corpus.skipped_count,
            "entities": len(idx.by_entity),
            "headings": len(idx.by_heading),
            "triples": self.kb.triple_count,
            "predicates": len(self.kb.predicates()),
            "stats": {
                "h2hPairs": len(self.ranker.stats.h2h) if self.ranker.stats else 0,
                "h2pPairs": len(self.ranker.stats.h2p) if self.ranker.stats else 0,
            },
            "models": {
                "tmatch": self.ranker.tmatch_model is not None,
                "ltr": self.ltr_model is not None,
                "embeddings": self.ranker.embeddings is not None,
            },
            "artifacts": self.versions,
        }


def table_from_request(record: Optional[dict]) -> Optional[RelationalTable]:
    if record is None:
        return None
    try:
        return parse_record(record)
    except (ValueError, KeyError, TypeError) as exc:
        raise BadRequestError("invalid_table", f"bad inline table: {exc}") from exc
