import pytest

from cellac.kb import default_predicate_label, load_kb

from util import write_kb_files


@pytest.fixture
def kb_paths(tmp_path):
    triples = [
        ("E_film1", "dbp:director", "E_lumet"),
        ("E_film1", "dbp:writer", "E_chayefsky"),
        ("E_film1", "dbp:director", "E_lumet"),  # duplicate
        ("E_film2", "dbp:director", "E_ashby"),
        ("E_city1", "dbp:timeZone", "CET"),
    ]
    labels = [("dbp:director", "director"), ("dbp:writer", "writer")]
    t, l = tmp_path / "triples.tsv", tmp_path / "labels.tsv"
    write_kb_files(t, l, triples, labels)
    return t, l


class TestLoad:
    def test_empty_files(self, tmp_path):
        t, l = tmp_path / "t.tsv", tmp_path / "l.tsv"
        t.write_text("")
        l.write_text("")
        kb = load_kb(t, l)
        assert kb.triple_count == 0

    def test_dedup(self, kb_paths):
        kb = load_kb(*kb_paths)
        assert kb.triple_count == 4

    def test_default_label_camel_case_split(self, kb_paths):
        kb = load_kb(*kb_paths)
        assert kb.label("dbp:timeZone") == "time zone"
        assert kb.label("dbp:director") == "director"

    def test_malformed_line_skipped(self, tmp_path):
        t = tmp_path / "t.tsv"
        t.write_text("a\tb\tc\nbroken line\nx\ty\tz\n")
        kb = load_kb(t)
        assert kb.triple_count == 2 and kb.skipped_count == 1

    def test_idempotent_loading(self, kb_paths):
        assert load_kb(*kb_paths) == load_kb(*kb_paths)

    def test_entity_filter(self, kb_paths):
        kb = load_kb(*kb_paths, entity_filter=lambda e: e != "E_city1")
        assert kb.predicates_of("E_city1") == set()
        assert kb.predicates_of("E_film1") == {"dbp:director", "dbp:writer"}


class TestLookup:
    def test_two_objects(self, tmp_path):
        t = tmp_path / "t.tsv"
        t.write_text("e\tp\tv1\ne\tp\tv2\n")
        kb = load_kb(t)
        assert kb.lookup("e", "p") == {"v1", "v2"}

    def test_unknown_entity(self, kb_paths):
        assert load_kb(*kb_paths).lookup("E_nope", "dbp:director") == set()

    def test_unknown_predicate(self, kb_paths):
        assert load_kb(*kb_paths).lookup("E_film1", "dbp:nope") == set()


class TestPredicatesOf:
    def test_set(self, kb_paths):
        kb = load_kb(*kb_paths)
        assert kb.predicates_of("E_film1") == {"dbp:director", "dbp:writer"}

    def test_unknown(self, kb_paths):
        assert load_kb(*kb_paths).predicates_of("E_zzz") == set()

    def test_dedup_single_listing(self, kb_paths):
        kb = load_kb(*kb_paths)
        assert sorted(kb.predicates_of("E_film2")) == ["dbp:director"]

    def test_lookup_iff_predicate_listed(self, kb_paths):
        kb = load_kb(*kb_paths)
        for e in ("E_film1", "E_film2", "E_city1", "E_unknown"):
            for p in kb.predicates() | {"dbp:nope"}:
                assert bool(kb.lookup(e, p)) == (p in kb.predicates_of(e))


class TestDefaultLabel:
    def test_examples(self):
        assert default_predicate_label("dbp:timeZone") == "time zone"
        assert default_predicate_label("http://x.org/ontology/birthPlace") == "birth place"
        assert default_predicate_label("snake_case_name") == "snake case name"
        assert default_predicate_label("dbo:numberOfGoals") == "number of goals"
