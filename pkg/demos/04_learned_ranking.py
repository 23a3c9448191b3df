"""End-to-end learned ranking on the synthetic benchmark world.

Generates the two-league world, trains the feature-based ranker, asks for
suggestions on a concealed cell, and prints the evidence a user would see,
plus the model's feature importances.
"""

from cellac.benchmark import generate_world
from cellac.config import EngineConfig
from cellac.engine import Engine

print("generating the benchmark world (one seed controls everything)...")
world = generate_world(seed=7, n_players=40, tables_per_topic=40,
                       n_train_cells=200, n_eval_cells=60)
print(f"  {len(world.corpus)} corpus tables, {world.kb.triple_count} KB triples, "
      f"{len(world.train_cells)} training cells")

engine = Engine(world.corpus, world.kb, world.stats, world.embeddings,
                world.tmatch_model, world.ltr_models["ltr_full"], EngineConfig())

cell = next(c for c in world.eval_cells if not c.originally_empty)
print(f"\ntarget cell: entity={cell.entity} heading={cell.heading!r} "
      f"(concealed value: {cell.concealed_raw!r})")

result = engine.suggest(table=cell.input_table, entity=cell.entity,
                        heading=cell.heading, k=5)
for s in result["suggestions"]:
    shown = "(leave empty)" if s["isEmpty"] else s["display"]
    print(f"  {s['rank']}. {shown:20s} score={s['score']:.4f}")
    for ev in s["evidence"][:2]:
        if ev["kind"] == "tc":
            print(f"       from table {ev['tableId']} ({ev['pageTitle']!r}, "
                  f"column {ev['heading']!r})")
        else:
            print(f"       from KB predicate {ev['predicate']} ({ev['label']!r})")

print("\nan empty-truth cell ranks the Empty suggestion sensibly:")
empty_cell = next(c for c in world.eval_cells if c.originally_empty)
result = engine.suggest(table=empty_cell.input_table, entity=empty_cell.entity,
                        heading=empty_cell.heading, k=5)
for s in result["suggestions"]:
    shown = "(leave empty)" if s["isEmpty"] else s["display"]
    print(f"  {s['rank']}. {shown:20s} score={s['score']:.4f}")

print("\ntop feature importances of the trained value ranker:")
imp = world.ltr_models["ltr_full"].importance()
for name, v in sorted(imp.items(), key=lambda kv: -kv[1])[:10]:
    print(f"  {name:24s} {v:.4f}")
