"""Candidate pools with provenance, and source-specific value rankings.

Builds a world where the knowledge base holds a stale value under an
exact-label predicate, then compares edit-distance and mapping-probability
KB scoring, corpus-only ranking, and the KB-first baseline.
"""

from cellac import Ranker, build_pool, build_stats
from cellac.forest import ForestParams
from cellac.kb import KbHandle
from cellac.matching import train_tmatch
from cellac.tables import Cell, CorpusHandle, RelationalTable, annotate_table


def table(tid, title, headings, rows):
    t = RelationalTable(table_id=tid, page_title=title, caption=title,
                        headings=headings,
                        rows=[[Cell(raw_text=c[0], entity_id=c[1]) if isinstance(c, tuple)
                               else Cell(raw_text=c) for c in row] for row in rows])
    annotate_table(t)
    return t


corpus = CorpusHandle([
    table("grounds1", "London grounds", ["club", "venue"],
          [[("Arsenal", "E_ars"), ("Emirates", "E_emi")],
           [("Chelsea", "E_che"), ("Stamford Bridge", "E_sb")]]),
    table("grounds2", "English stadiums", ["team", "stadium"],
          [[("Arsenal", "E_ars"), ("Emirates", "E_emi")],
           [("Everton", "E_eve"), ("Goodison Park", "E_gp")]]),
    table("old", "Historical grounds", ["club", "venue"],
          [[("Arsenal", "E_ars"), ("Highbury", "E_hi")]]),
])

kb = KbHandle()
for s, p, o in [("E_ars", "kb:ground", "E_emi"), ("E_che", "kb:ground", "E_sb"),
                ("E_ars", "kb:venue", "E_hi")]:
    kb._add(s, p, o)
kb.labels.update({"kb:ground": "ground", "kb:venue": "venue"})

stats = build_stats(corpus, kb)

pool = build_pool("E_ars", "venue", corpus, kb, stats)
print("candidate pool for (Arsenal, 'venue'):")
for cand in pool:
    tc = [f"{ev.table_id}:{ev.heading}" for ev in cand.tc_evidence]
    kbp = sorted(cand.matched_predicates())
    print(f"  {cand.canonical:8s} tables={tc} predicates={kbp}")

pairs = []
tables = list(corpus)
for i, ta in enumerate(tables):
    for tb in tables[i + 1:]:
        shared = len(ta.core_entities() & tb.core_entities())
        pairs.append((ta, tb, 2 if shared >= 2 else (1 if shared else 0)))
tmatch = train_tmatch(pairs, corpus, ForestParams(n_trees=15, max_depth=4), seed=0)

ranker = Ranker(corpus, kb, stats, tmatch_model=tmatch)

print("\nKB ranking, edit-distance scoring (gamma = 0.4):")
for s in ranker.kb_rank("E_ars", "venue", "ed", gamma=0.4):
    print(f"  {s.rank}. {s.canonical:8s} score={s.score:.4f}")
print("  the stale kb:venue value wins on label match alone.")

print("\nKB ranking, mapping-probability scoring:")
for s in ranker.kb_rank("E_ars", "venue", "mp", gamma=0.4):
    print(f"  {s.rank}. {s.canonical:8s} score={s.score:.4f}")
print("  corpus corroboration flips the order back to the real ground.")

print("\ncorpus-only ranking (trained matcher, sum over supporting tables):")
for s in ranker.tc_rank("E_ars", "venue", matcher="tmatch", combine="all",
                        headsim="ed"):
    print(f"  {s.rank}. {s.canonical:8s} score={s.score:.4f}")

print("\nKB-first baseline (KB block above corpus block, Empty last):")
for s in ranker.otg_rank("E_ars", "venue"):
    print(f"  {s.rank}. {s.canonical:8s} score={s.score:.4f}")

print("\nraising gamma moves Empty up the KB ranking:")
for gamma in (0.0, 0.5, 1.0):
    sugs = ranker.kb_rank("E_ars", "venue", "ed", gamma=gamma)
    empty_rank = next(s.rank for s in sugs if s.is_empty)
    print(f"  gamma={gamma:.1f} -> Empty at rank {empty_rank}")
