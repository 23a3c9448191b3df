"""Walk through corpus ingestion, core-column detection, and value typing.

Builds a three-table corpus inline, ingests it from a JSON-lines file, and
shows how cells are classified and normalized so that values from different
tables become comparable.
"""

import json
import tempfile
from pathlib import Path

from cellac import (
    ValueType,
    classify_cell,
    detect_column_type,
    entity_rate,
    ingest_corpus,
    normalize,
    values_equal,
)

records = [
    {"id": "clubs", "pageTitle": "London football clubs", "caption": "grounds",
     "headings": ["Club", "Founded", "Stadium"],
     "rows": [
         [{"text": "Arsenal", "entity": "E_arsenal"}, {"text": "1886"},
          {"text": "Emirates Stadium", "entity": "E_emirates"}],
         [{"text": "Chelsea", "entity": "E_chelsea"}, {"text": "1905"},
          {"text": "Stamford Bridge", "entity": "E_bridge"}],
         [{"text": "Fulham", "entity": "E_fulham"}, {"text": "1879"},
          {"text": "Craven Cottage", "entity": "E_cottage"}]]},
    {"id": "teams", "pageTitle": "English teams", "caption": "by establishment",
     "headings": ["Team", "Established"],
     "rows": [
         [{"text": "Arsenal", "entity": "E_arsenal"}, {"text": "1886"}],
         [{"text": "Everton", "entity": "E_everton"}, {"text": "1878"}]]},
    {"id": "seasons", "pageTitle": "League seasons", "caption": "winners",
     "headings": ["Season", "Winner"],
     "rows": [
         [{"text": "1998–99"}, {"text": "Arsenal", "entity": "E_arsenal"}],
         [{"text": "1999–00"}, {"text": "Chelsea", "entity": "E_chelsea"}]]},
]

with tempfile.TemporaryDirectory() as tmp:
    corpus_path = Path(tmp) / "corpus.jsonl"
    corpus_path.write_text("\n".join(json.dumps(r) for r in records))
    corpus = ingest_corpus(corpus_path)

print(f"ingested {len(corpus)} tables, {corpus.skipped_count} skipped")
for table in corpus:
    rate0 = entity_rate(table, 0)
    print(f"  {table.table_id}: headings={table.headings} "
          f"core_column={table.core_column} (entity rate col0={rate0:.2f})")

print("\ncell classification:")
for raw, heading in [("5 October 1987", "date"), ("100 m", "length"),
                     ("1886", "founded"), ("1886", "capacity"),
                     ("n/a", "anything")]:
    print(f"  {raw!r} under {heading!r} -> {classify_cell(raw, heading).value}")

print("\ncolumn typing by majority vote:")
seasons = corpus.get("seasons")
cells = [(c.raw_text, c.entity_id is not None) for c in seasons.column_cells(0)]
print(f"  'season' column -> {[t.value for t in detect_column_type(cells, 'season')]}")

print("\nnormalization makes cross-table values comparable:")
a = normalize("1886", ValueType.DATETIME)    # 'founded' column, date keyword
b = normalize("1886", ValueType.QUANTITY)    # 'established' column, plain number
print(f"  founded '1886'     -> {a.kind} {a.value}")
print(f"  established '1886' -> {b.kind} {b.value}")
print(f"  values_equal: {values_equal(a, b)}")

rng = normalize("1998–99", ValueType.DATETIME)
print(f"  season '1998–99'  -> {rng.kind} {rng.value}")

print("\nentity/heading index answers (entity, heading) lookups:")
for (e, h), refs in sorted(corpus.index.by_entity_heading.items()):
    if e == "E_arsenal":
        print(f"  ({e}, {h!r}) -> {sorted(refs)}")
