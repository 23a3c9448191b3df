import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cellac.embeddings import train_label_embeddings
from cellac.forest import ForestParams
from cellac.kb import KbHandle
from cellac.matching import train_tmatch
from cellac.ranking import Ranker
from cellac.stats import build_stats

from util import make_corpus, make_table


def _mini_tables():
    return [
        make_table("t_venues1", ["club", "venue"],
                   [[("Arsenal", "E_ars"), ("Emirates", "E_emi")],
                    [("Chelsea", "E_che"), ("Stamford Bridge", "E_sb")]],
                   title="London football", caption="club grounds",
                   meta={"page_views": 500, "in_links": 20}),
        make_table("t_venues2", ["team", "stadium"],
                   [[("Arsenal", "E_ars"), ("Emirates", "E_emi")],
                    [("Everton", "E_eve"), ("Goodison Park", "E_gp")]],
                   title="English stadiums", caption="grounds of teams",
                   meta={"page_views": 300}),
        make_table("t_founded1", ["club", "founded"],
                   [[("Arsenal", "E_ars"), "1886"],
                    [("Everton", "E_eve"), "1878"]],
                   title="Club history", caption="founding"),
        make_table("t_founded2", ["team", "established"],
                   [[("Arsenal", "E_ars"), "1886"],
                    [("Chelsea", "E_che"), "1905"]],
                   title="Team origins", caption="establishment"),
        make_table("t_capacity", ["club", "capacity"],
                   [[("Arsenal", "E_ars"), "60,704"],
                    [("Chelsea", "E_che"), "40,343"]],
                   title="Stadium capacity", caption="seats"),
        make_table("t_noise", ["club", "venue"],
                   [[("Arsenal", "E_ars"), ("Highbury", "E_hi")]],
                   title="Historical grounds", caption="former venues"),
    ]


def _mini_kb():
    kb = KbHandle()
    triples = [
        ("E_ars", "dbp:ground", "E_emi"),
        ("E_che", "dbp:ground", "E_sb"),
        ("E_eve", "dbp:ground", "E_gp"),
        ("E_ars", "dbp:founded", "1886"),
        ("E_che", "dbp:founded", "1905"),
        ("E_ars", "dbp:capacity", "60704"),
        ("E_ars", "dbp:venue", "E_hi"),  # stale value under an exact-label predicate
        ("E_emi", "dbp:locatedIn", "London"),
        ("E_sb", "dbp:locatedIn", "London"),
        ("E_hi", "dbp:locatedIn", "London"),
        ("E_gp", "dbp:locatedIn", "Liverpool"),
    ]
    for s, p, o in triples:
        kb._add(s, p, o)
    kb.labels.update({"dbp:ground": "ground", "dbp:founded": "founded",
                      "dbp:capacity": "capacity", "dbp:venue": "venue",
                      "dbp:locatedIn": "located in"})
    return kb


@pytest.fixture(scope="session")
def mini_world():
    """Small two-source world: corpus, KB, stats, embeddings, tmatch model."""
    corpus = make_corpus(*_mini_tables())
    kb = _mini_kb()
    stats = build_stats(corpus, kb)
    embeddings = train_label_embeddings(corpus, dim=16, epochs=10, seed=3, min_count=1)
    tables = list(corpus)
    pairs = []
    for i, ta in enumerate(tables):
        for tb in tables[i + 1:]:
            shared = len(ta.core_entities() & tb.core_entities())
            pairs.append((ta, tb, 2 if shared >= 2 else (1 if shared else 0)))
    tmatch = train_tmatch(pairs, corpus, ForestParams(n_trees=15, max_depth=5), seed=4)
    return {"corpus": corpus, "kb": kb, "stats": stats,
            "embeddings": embeddings, "tmatch": tmatch}


@pytest.fixture(scope="session")
def mini_ranker(mini_world):
    return Ranker(mini_world["corpus"], mini_world["kb"], mini_world["stats"],
                  mini_world["embeddings"], mini_world["tmatch"])


@pytest.fixture(scope="session")
def bench_world():
    """The seeded synthetic benchmark world with trained models."""
    from cellac.benchmark import generate_world
    return generate_world(seed=7)


@pytest.fixture(scope="session")
def world_files(bench_world, tmp_path_factory):
    """The benchmark world written out as on-disk artifacts."""
    from cellac.benchmark import write_world_files
    return write_world_files(bench_world, tmp_path_factory.mktemp("world"))


@pytest.fixture(scope="session")
def bench_engine(bench_world):
    from cellac.config import EngineConfig
    from cellac.engine import Engine
    return Engine(bench_world.corpus, bench_world.kb, bench_world.stats,
                  bench_world.embeddings, bench_world.tmatch_model,
                  bench_world.ltr_models["ltr_full"], EngineConfig())
