import pytest

from cellac.candidates import (
    CandidateValue,
    build_pool,
    find_kb_candidates,
    find_tc_candidates,
)
from cellac.typesys import EMPTY, canonical_string, values_equal


class TestTcCandidates:
    def test_unknown_entity_empty(self, mini_world):
        got = find_tc_candidates("E_nobody", "venue", mini_world["corpus"],
                                 mini_world["stats"])
        assert got == []

    def test_exact_heading_match(self, mini_world):
        got = find_tc_candidates("E_che", "venue", mini_world["corpus"],
                                 mini_world["stats"])
        assert len(got) == 1
        assert got[0].value.value == "E_sb"
        assert got[0].tc_evidence[0].table_id == "t_venues1"

    def test_related_heading_contributes(self, mini_world):
        # "stadium" relates to "venue" through shared values, so t_venues2
        # supports the same candidate under a different label.
        got = find_tc_candidates("E_ars", "venue", mini_world["corpus"],
                                 mini_world["stats"])
        by_canon = {c.canonical: c for c in got}
        emirates = by_canon["E_emi"]
        assert {ev.table_id for ev in emirates.tc_evidence} == {"t_venues1", "t_venues2"}
        assert {ev.heading for ev in emirates.tc_evidence} == {"venue", "stadium"}
        # The noise table contributes a distinct candidate with its own provenance.
        assert "E_hi" in by_canon
        assert {ev.table_id for ev in by_canon["E_hi"].tc_evidence} == {"t_noise"}

    def test_empty_cells_emit_nothing(self, mini_world):
        from util import make_corpus, make_table
        t = make_table("t", ["club", "venue"], [[("Arsenal", "E_ars"), ""]])
        got = find_tc_candidates("E_ars", "venue", make_corpus(t), None)
        assert got == []

    def test_exclusion_of_input_table(self, mini_world):
        got = find_tc_candidates("E_ars", "venue", mini_world["corpus"],
                                 mini_world["stats"],
                                 exclude_table_ids=["t_venues1"])
        emirates = [c for c in got if c.canonical == "E_emi"][0]
        assert {ev.table_id for ev in emirates.tc_evidence} == {"t_venues2"}

    def test_candidates_resolve_to_corpus_cells(self, mini_world):
        corpus = mini_world["corpus"]
        for heading in ("venue", "founded", "capacity"):
            for cand in find_tc_candidates("E_ars", heading, corpus, mini_world["stats"]):
                for ev in cand.tc_evidence:
                    tid, r, c = ev.cell_ref
                    table = corpus.get(tid)
                    row = table.rows[r]
                    assert row[table.core_column].entity_id == "E_ars"
                    assert values_equal(row[c].norm, cand.value)


class TestKbCandidates:
    def test_no_matching_predicate(self, mini_world):
        got = find_kb_candidates("E_ars", "zzzz", mini_world["kb"], mini_world["stats"])
        assert got == []

    def test_stat_matched_predicate(self, mini_world):
        got = find_kb_candidates("E_che", "venue", mini_world["kb"], mini_world["stats"])
        canons = {c.canonical for c in got}
        assert "E_sb" in canons

    def test_label_edit_admission(self, mini_world):
        # dbp:venue is admitted by its exact label even with no stats.
        got = find_kb_candidates("E_ars", "venue", mini_world["kb"], stats=None)
        assert {c.canonical for c in got} == {"E_hi"}

    def test_candidates_contained_in_lookup(self, mini_world):
        kb = mini_world["kb"]
        got = find_kb_candidates("E_ars", "venue", kb, mini_world["stats"])
        for cand in got:
            for ev in cand.kb_evidence:
                assert ev.triple_ref[2] in kb.lookup("E_ars", ev.predicate)

    def test_overlapping_predicates_merge_evidence(self):
        from cellac.kb import KbHandle
        kb = KbHandle()
        kb._add("e", "p:a", "v1")
        kb._add("e", "p:b", "v1")
        kb.labels.update({"p:a": "shape", "p:b": "shappe"})
        got = find_kb_candidates("e", "shape", kb, stats=None, tau_ed=0.8)
        assert len(got) == 1
        assert got[0].matched_predicates() == {"p:a", "p:b"}
        assert len(got[0].kb_evidence) == 2


class TestBuildPool:
    def test_both_sources_empty(self, mini_world):
        pool = build_pool("E_nobody", "zzzz", mini_world["corpus"], mini_world["kb"])
        assert len(pool) == 1 and pool[0].is_empty

    def test_merged_value_has_both_sources(self, mini_world):
        pool = build_pool("E_ars", "venue", mini_world["corpus"], mini_world["kb"],
                          mini_world["stats"])
        emirates = [c for c in pool if c.canonical == "E_emi"][0]
        assert emirates.tc_evidence and emirates.kb_evidence

    def test_single_empty_sentinel_last(self, mini_world):
        pool = build_pool("E_ars", "venue", mini_world["corpus"], mini_world["kb"],
                          mini_world["stats"])
        assert sum(1 for c in pool if c.is_empty) == 1
        assert pool[-1].is_empty

    def test_deterministic_canonical_order(self, mini_world):
        pool = build_pool("E_ars", "venue", mini_world["corpus"], mini_world["kb"],
                          mini_world["stats"])
        canons = [c.canonical for c in pool[:-1]]
        assert canons == sorted(canons)

    def test_evidence_conserved_by_merge(self, mini_world):
        tc = find_tc_candidates("E_ars", "venue", mini_world["corpus"], mini_world["stats"])
        kb = find_kb_candidates("E_ars", "venue", mini_world["kb"], mini_world["stats"])
        pool = build_pool("E_ars", "venue", mini_world["corpus"], mini_world["kb"],
                          mini_world["stats"])
        want = sum(c.evidence_count() for c in tc) + sum(c.evidence_count() for c in kb)
        got = sum(c.evidence_count() for c in pool)
        assert got == want

    def test_disjoint_sources_both_present(self, mini_world):
        # founded: corpus has 1886 under founded/established; KB also has 1886.
        pool = build_pool("E_eve", "founded", mini_world["corpus"], mini_world["kb"],
                          mini_world["stats"])
        non_empty = [c for c in pool if not c.is_empty]
        assert {c.canonical for c in non_empty} == {"1878"}
        assert non_empty[0].tc_evidence and not non_empty[0].kb_evidence


class TestCandidateValue:
    def test_display_prefers_raw_text(self, mini_world):
        pool = build_pool("E_ars", "capacity", mini_world["corpus"], mini_world["kb"],
                          mini_world["stats"])
        cap = [c for c in pool if not c.is_empty][0]
        assert cap.display_text() == "60,704"
        assert cap.canonical == "60704"

    def test_empty_display(self):
        assert CandidateValue(EMPTY).display_text() == ""
        assert CandidateValue(EMPTY).canonical == "EMPTY"
