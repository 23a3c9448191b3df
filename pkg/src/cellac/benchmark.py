"""Seeded synthetic benchmark: a two-league world with planted ground truth.

Players carry context-free attributes (position, birth date, caps), one
context-dependent attribute (their team differs between the two leagues),
and one sparse attribute (nickname, absent for most players).  The corpus
mixes heading synonyms and a fraction of noisy tables; the KB has partial
coverage, one stale predicate, and one junk predicate with an exact-match
label.  This makes room for every part of the ranking stack to earn its
keep, and the planted truth gives exact qrels for the experiment grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .embeddings import LabelEmbeddings, save_embeddings, train_label_embeddings
from .evaluation import Qrels, TestCell, qrels_from_cells, write_qrels
from .forest import ForestModel, ForestParams
from .kb import KbHandle
from .matching import train_tmatch
from .ranking import ALL_GROUPS, Ranker, _to_suggestions, train_ltr
from .stats import HeadingStats, build_stats, save_stats
from .tables import Cell, CorpusHandle, PageMeta, RelationalTable, annotate_table, write_corpus
from .typesys import EMPTY, CellValue, NormalizedValue, ValueType, normalize_auto

TOPICS = ("ruby", "opal")

SYNONYMS = {
    "team": ("team", "club"),
    "position": ("position", "role"),
    "born": ("born", "birth date"),
    "caps": ("caps", "appearances"),
    "nickname": ("nickname", "nickname"),
}

POSITIONS = ("prop", "hooker", "flanker", "scrum half", "fly half", "winger",
             "fullback", "lock")
NICKNAMES = ("the hammer", "iron door", "quick silver", "the wall", "night train",
             "sidestep", "the boot", "tin man", "magpie", "the anchor")

RUBY_TEAMS = [("E_rt%d" % i, name) for i, name in enumerate(
    ("Crimson Rovers", "Garnet Harriers", "Scarlet Athletic", "Cherry United",
     "Russet Wanderers", "Maroon County", "Redwood City", "Vermilion Town"))]
OPAL_TEAMS = [("E_ot%d" % i, name) for i, name in enumerate(
    ("Pearl Mariners", "Ivory Saints", "Frost Giants", "Moonstone Rangers",
     "Silver Herons", "Glacier Bay", "Opaline Harbour", "Chalk Hill"))]


@dataclass
class PlayerTruth:
    entity: str
    name: str
    team: dict[str, tuple[str, str]]       # topic -> (team entity, team name)
    position: str
    born: str                               # YYYY-MM-DD
    caps: int
    nickname: Optional[str]                 # None means truly empty


@dataclass
class BenchmarkWorld:
    seed: int
    players: list[PlayerTruth]
    corpus: CorpusHandle
    kb: KbHandle
    stats: HeadingStats
    embeddings: LabelEmbeddings
    tmatch_model: ForestModel
    tmatch_pairs: list[tuple[str, str, int]]
    ranker: Ranker
    train_cells: list[TestCell]
    eval_cells: list[TestCell]
    train_qrels: Qrels
    eval_qrels: Qrels
    ltr_models: dict[str, ForestModel] = field(default_factory=dict)


def _date(rng) -> str:
    return f"{rng.integers(1980, 2000)}-{rng.integers(1, 13):02d}-{rng.integers(1, 29):02d}"


def _make_players(rng, n_players: int) -> list[PlayerTruth]:
    players = []
    for i in range(n_players):
        nickname = NICKNAMES[int(rng.integers(len(NICKNAMES)))] if rng.random() < 0.4 else None
        players.append(PlayerTruth(
            entity=f"E_p{i:02d}",
            name=f"Player {chr(65 + i // 26)}{chr(65 + i % 26)}",
            team={"ruby": RUBY_TEAMS[int(rng.integers(len(RUBY_TEAMS)))],
                  "opal": OPAL_TEAMS[int(rng.integers(len(OPAL_TEAMS)))]},
            position=POSITIONS[int(rng.integers(len(POSITIONS)))],
            born=_date(rng),
            caps=int(rng.integers(1, 150)),
            nickname=nickname,
        ))
    return players


def true_value(player: PlayerTruth, attr: str, topic: str) -> CellValue:
    if attr == "team":
        return NormalizedValue(ValueType.ENTITY, "entity", player.team[topic][0])
    if attr == "position":
        return normalize_auto(player.position)
    if attr == "born":
        return normalize_auto(player.born, "born")
    if attr == "caps":
        return normalize_auto(str(player.caps), "caps")
    if attr == "nickname":
        if player.nickname is None:
            return EMPTY
        return normalize_auto(player.nickname)
    raise ValueError(f"unknown attribute: {attr}")


def _attr_cell(player: PlayerTruth, attr: str, topic: str, rng,
               scramble_pool: Optional[list[PlayerTruth]] = None,
               excluded: bool = False):
    """Raw cell spec (text or (text, entity)) for one attribute value."""
    if excluded:
        return ""
    src = player
    if scramble_pool is not None:
        src = scramble_pool[int(rng.integers(len(scramble_pool)))]
        if attr == "nickname":
            # Noisy tables invent a nickname, so sparse cells attract junk.
            return NICKNAMES[int(rng.integers(len(NICKNAMES)))]
    if attr == "team":
        eid, name = src.team[topic]
        return (name, eid)
    if attr == "position":
        return src.position
    if attr == "born":
        return src.born
    if attr == "caps":
        return str(src.caps)
    if attr == "nickname":
        return src.nickname if src.nickname is not None else ""
    raise ValueError(attr)


def _division(topic: str, rng) -> str:
    areas = ("north", "south") if topic == "ruby" else ("east", "west")
    return f"{topic} {areas[int(rng.integers(2))]}"


def _table_meta(rng) -> dict:
    table_chars = int(rng.integers(200, 2000))
    return {
        "inLinks": int(rng.integers(0, 200)),
        "outLinks": int(rng.integers(0, 100)),
        "pageViews": int(rng.integers(10, 5000)),
        "tablesOnPage": int(rng.integers(1, 5)),
        "tableChars": table_chars,
        "pageChars": table_chars + int(rng.integers(500, 8000)),
    }


def _build_table(tid: str, topic: str, players: Sequence[PlayerTruth], attrs: Sequence[str],
                 rng, all_players: list[PlayerTruth], noisy: bool,
                 kind: str, exclusions: Optional[dict[str, set[str]]] = None) -> RelationalTable:
    exclusions = exclusions or {}
    headings = ["player"]
    for attr in attrs:
        pair = SYNONYMS[attr]
        headings.append(pair[int(rng.integers(2))])
    headings.append("division")
    rows = []
    for p in players:
        row = [Cell(raw_text=p.name, entity_id=p.entity)]
        for attr in attrs:
            spec = _attr_cell(p, attr, topic, rng,
                              scramble_pool=all_players if noisy else None,
                              excluded=p.entity in exclusions.get(attr, ()))
            if isinstance(spec, tuple):
                row.append(Cell(raw_text=spec[0], entity_id=spec[1]))
            else:
                row.append(Cell(raw_text=spec))
        row.append(Cell(raw_text=_division(topic, rng)))
        rows.append(row)
    year = int(rng.integers(2015, 2023))
    table = RelationalTable(
        table_id=tid,
        page_title=f"{topic} league {kind} {year}",
        caption=f"{kind} of the {topic} league",
        headings=headings,
        rows=rows,
        page_meta=PageMeta.from_record(_table_meta(rng)),
    )
    annotate_table(table)
    return table


TABLE_KINDS = {
    "roster": ("team", "position"),
    "statistics": ("caps", "born"),
    "profiles": ("born", "position", "nickname"),
    "honours": ("team", "caps"),
}


def _make_corpus(rng, players: list[PlayerTruth], tables_per_topic: int,
                 noise_rate: float, exclusions: dict[str, set[str]]) -> CorpusHandle:
    tables = []
    kinds = sorted(TABLE_KINDS)
    for topic in TOPICS:
        for i in range(tables_per_topic):
            kind = kinds[int(rng.integers(len(kinds)))]
            attrs = list(TABLE_KINDS[kind])
            size = int(rng.integers(5, 10))
            chosen_idx = rng.choice(len(players), size=size, replace=False)
            chosen = [players[int(j)] for j in sorted(int(x) for x in chosen_idx)]
            noisy = rng.random() < noise_rate
            if "nickname" in attrs and not noisy:
                # Editors include the column mostly when the data exists, so
                # entity/heading co-occurrence tracks value presence.
                with_nick = sum(1 for p in chosen if p.nickname) / max(1, len(chosen))
                if with_nick < 0.6:
                    attrs.remove("nickname")
            tables.append(_build_table(f"{topic}_{kind}_{i:03d}", topic, chosen, attrs,
                                       rng, players, noisy, kind, exclusions))
    return CorpusHandle(tables)


def _make_kb(rng, players: list[PlayerTruth],
             exclusions: dict[str, set[str]]) -> KbHandle:
    kb = KbHandle()
    for eid, name in RUBY_TEAMS + OPAL_TEAMS:
        kb._add(eid, "kb:leagueName", name)
    for p in players:
        e = p.entity
        # Stale context: the KB only knows the ruby-league affiliation.
        kb._add(e, "kb:memberOf", p.team["ruby"][0])
        # Values the corpus lacks are guaranteed to live in the KB.
        if rng.random() < 0.65 or e in exclusions["position"]:
            kb._add(e, "kb:playingPosition", p.position)
        if rng.random() < 0.70 or e in exclusions["born"]:
            kb._add(e, "kb:dateOfBirth", p.born)
        if rng.random() < 0.40:
            # Junk predicate with an exact-match label and wrong values.
            other = players[int(rng.integers(len(players)))]
            kb._add(e, "kb:born", other.born)
        if rng.random() < 0.60 or e in exclusions["caps"]:
            kb._add(e, "kb:caps", str(p.caps))
        if p.nickname is not None and rng.random() < 0.55:
            kb._add(e, "kb:nickname", p.nickname)
    kb.labels.update({
        "kb:memberOf": "member of",
        "kb:playingPosition": "playing position",
        "kb:dateOfBirth": "date of birth",
        "kb:born": "born",
        "kb:caps": "caps",
        "kb:nickname": "nickname",
        "kb:leagueName": "league name",
    })
    return kb


ATTR_WEIGHTS = (("team", 0.24), ("born", 0.22), ("position", 0.18),
                ("caps", 0.18), ("nickname", 0.18))


def _make_cells(rng, players: list[PlayerTruth], n_cells: int, prefix: str,
                all_players: list[PlayerTruth],
                exclusions: dict[str, set[str]]) -> list[TestCell]:
    attrs = [a for a, _w in ATTR_WEIGHTS]
    weights = np.array([w for _a, w in ATTR_WEIGHTS])
    weights = weights / weights.sum()
    cells = []
    for i in range(n_cells):
        attr = attrs[int(rng.choice(len(attrs), p=weights))]
        topic = TOPICS[int(rng.integers(2))]
        player = players[int(rng.integers(len(players)))]
        others_idx = rng.choice(len(all_players), size=5, replace=False)
        others = [all_players[int(j)] for j in sorted(int(x) for x in others_idx)
                  if all_players[int(j)].entity != player.entity][:4]
        extra_attr = "position" if attr != "position" else "caps"
        table = _build_table(f"__input_{prefix}_{i:04d}__", topic, [player] + others,
                             [attr, extra_attr], rng, all_players, noisy=False,
                             kind="roster", exclusions=exclusions)
        col = 1  # the target attribute column directly follows the core column
        table.rows[0][col] = Cell(raw_text="")
        annotate_table(table)
        truth = true_value(player, attr, topic)
        from .typesys import canonical_string
        cells.append(TestCell(
            cell_id=f"{prefix}{i:04d}",
            source_table_id=table.table_id,
            entity=player.entity,
            heading=table.headings[col],
            column_type="mixed",
            row=0, col=col,
            concealed_raw="" if truth is EMPTY else canonical_string(truth),
            concealed=truth,
            originally_empty=truth is EMPTY,
            input_table=table,
        ))
    return cells


def _tmatch_pairs(rng, corpus: CorpusHandle, n_pairs: int):
    tables = sorted(corpus, key=lambda t: t.table_id)
    pairs = []
    for _ in range(n_pairs):
        ta = tables[int(rng.integers(len(tables)))]
        tb = tables[int(rng.integers(len(tables)))]
        if ta.table_id == tb.table_id:
            continue
        same_topic = ta.page_title.split()[0] == tb.page_title.split()[0]
        overlap = len(ta.core_entities() & tb.core_entities())
        grade = 2 if (same_topic and overlap) else (1 if same_topic else 0)
        pairs.append((ta, tb, grade))
    return pairs


def generate_world(seed: int = 7, n_players: int = 50, tables_per_topic: int = 55,
                   noise_rate: float = 0.12, n_train_cells: int = 330,
                   n_eval_cells: int = 240, n_tmatch_pairs: int = 150,
                   embedding_dim: int = 32,
                   tmatch_params: Optional[ForestParams] = None,
                   ltr_params: Optional[ForestParams] = None,
                   gamma: float = 0.6) -> BenchmarkWorld:
    """Build the full benchmark world with trained models, all from one seed."""
    rng = np.random.default_rng(seed)
    players = _make_players(rng, n_players)
    # Per-attribute coverage gaps: these values exist only in the KB.
    exclusions = {
        "born": {p.entity for p in players if rng.random() < 0.30},
        "caps": {p.entity for p in players if rng.random() < 0.30},
        "position": {p.entity for p in players if rng.random() < 0.25},
        "team": set(), "nickname": set(),
    }
    corpus = _make_corpus(rng, players, tables_per_topic, noise_rate, exclusions)
    kb = _make_kb(rng, players, exclusions)
    stats = build_stats(corpus, kb)
    embeddings = train_label_embeddings(corpus, dim=embedding_dim, epochs=8,
                                        seed=seed, min_count=2)
    pairs = _tmatch_pairs(rng, corpus, n_tmatch_pairs)
    tmatch_params = tmatch_params or ForestParams(n_trees=40, max_depth=8)
    tmatch_model = train_tmatch(pairs, corpus, tmatch_params, seed=seed)
    ranker = Ranker(corpus, kb, stats, embeddings, tmatch_model, gamma=gamma)
    train_cells = _make_cells(rng, players, n_train_cells, "train", players, exclusions)
    eval_cells = _make_cells(rng, players, n_eval_cells, "eval", players, exclusions)
    world = BenchmarkWorld(
        seed=seed, players=players, corpus=corpus, kb=kb, stats=stats,
        embeddings=embeddings, tmatch_model=tmatch_model,
        tmatch_pairs=[(a.table_id, b.table_id, g) for a, b, g in pairs],
        ranker=ranker, train_cells=train_cells, eval_cells=eval_cells,
        train_qrels=qrels_from_cells(train_cells),
        eval_qrels=qrels_from_cells(eval_cells),
    )
    world.ltr_models = train_ltr_variants(world, ltr_params, seed)
    return world


LTR_VARIANTS = {
    "ltr_g1": ("g1",),
    "ltr_g12": ("g1", "g2"),
    "ltr_full": ALL_GROUPS,
}


def train_ltr_variants(world: BenchmarkWorld, params: Optional[ForestParams] = None,
                       seed: int = 0) -> dict[str, ForestModel]:
    params = params or ForestParams(n_trees=60, max_depth=10)
    labeled = [(c.entity, c.heading, c.input_table, world.train_qrels[c.cell_id])
               for c in world.train_cells]
    return {name: train_ltr(world.ranker, labeled, groups=groups, params=params,
                            seed=seed)
            for name, groups in LTR_VARIANTS.items()}


TC_GRID = [(m, c, s) for m in ("infogather", "tmatch") for c in ("top", "all")
           for s in ("uni", "ed", "mp", "l2v")]


def run_grid(world: BenchmarkWorld, k: int = 10,
             methods: Optional[Sequence[str]] = None) -> dict[str, dict[str, list]]:
    """Produce per-method runs over the evaluation cells.

    Methods: kb_ed, kb_mp, tc_<matcher>_<combine>_<headsim> (16 of them),
    otg, and the three learned variants.
    """
    ranker = world.ranker
    tc_names = [f"tc_{m}_{c}_{s}" for m, c, s in TC_GRID]
    wanted = list(methods) if methods is not None else (
        ["kb_ed", "kb_mp"] + tc_names + ["otg"] + sorted(world.ltr_models))
    runs: dict[str, dict[str, list]] = {name: {} for name in wanted}
    for cell in world.eval_cells:
        ctx = ranker.context(cell.entity, cell.heading, cell.input_table)
        if "kb_ed" in runs:
            runs["kb_ed"][cell.cell_id] = ranker.kb_rank(
                cell.entity, cell.heading, "ed", table=cell.input_table, k=k)
        if "kb_mp" in runs:
            runs["kb_mp"][cell.cell_id] = ranker.kb_rank(
                cell.entity, cell.heading, "mp", table=cell.input_table, k=k)
        for (m, c, s), name in zip(TC_GRID, tc_names):
            if name in runs:
                runs[name][cell.cell_id] = ranker.tc_rank(
                    cell.entity, cell.heading, matcher=m, combine=c, headsim=s,
                    k=k, ctx=ctx)
        if "otg" in runs:
            runs["otg"][cell.cell_id] = ranker.otg_rank(
                cell.entity, cell.heading, k=k, ctx=ctx)
        pool, feats = None, None
        for name, model in world.ltr_models.items():
            if name not in runs:
                continue
            if pool is None:
                pool, feats = ranker.cell_features(cell.entity, cell.heading, ctx=ctx)
            scores = model.predict_many(feats)
            runs[name][cell.cell_id] = _to_suggestions(list(zip(pool, scores)), k)
    return runs


def write_world_files(world: BenchmarkWorld, directory) -> dict[str, str]:
    """Write the world as the on-disk artifacts the command-line tools consume."""
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": d / "corpus.jsonl",
        "triples": d / "triples.tsv",
        "labels": d / "labels.tsv",
        "pairs": d / "pairs.tsv",
        "cells": d / "cells.jsonl",
        "qrels": d / "qrels.tsv",
        "train_cells": d / "train_cells.jsonl",
        "train_qrels": d / "train_qrels.tsv",
        "h2h": d / "h2h.tsv",
        "h2p": d / "h2p.tsv",
        "embeddings": d / "embeddings.txt",
        "tmatch": d / "tmatch.json",
        "ltr": d / "ltr.json",
    }
    save_stats(world.stats, paths["h2h"], paths["h2p"])
    save_embeddings(world.embeddings, paths["embeddings"])
    world.tmatch_model.save(paths["tmatch"])
    if "ltr_full" in world.ltr_models:
        world.ltr_models["ltr_full"].save(paths["ltr"])
    write_corpus(paths["corpus"], sorted(world.corpus, key=lambda t: t.table_id))
    with open(paths["triples"], "w", encoding="utf-8") as f:
        for s in sorted(world.kb.spo):
            for p in sorted(world.kb.spo[s]):
                for o in sorted(world.kb.spo[s][p]):
                    f.write(f"{s}\t{p}\t{o}\n")
    with open(paths["labels"], "w", encoding="utf-8") as f:
        for p in sorted(world.kb.labels):
            f.write(f"{p}\t{world.kb.labels[p]}\n")
    with open(paths["pairs"], "w", encoding="utf-8") as f:
        for a, b, g in world.tmatch_pairs:
            f.write(f"{a}\t{b}\t{g}\n")
    for cells_key, qrels_key, cells in (("cells", "qrels", world.eval_cells),
                                        ("train_cells", "train_qrels", world.train_cells)):
        with open(paths[cells_key], "w", encoding="utf-8") as f:
            f.write("#% cellac testset 1\n")
            for cell in cells:
                f.write(json.dumps(cell.to_record(), ensure_ascii=False) + "\n")
        write_qrels(paths[qrels_key],
                    world.train_qrels if cells_key == "train_cells" else world.eval_qrels)
    return {k: str(v) for k, v in paths.items()}
