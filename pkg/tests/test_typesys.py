import random

import pytest

from cellac.typesys import (
    EMPTY,
    NormalizedValue,
    ValueType,
    canonical_string,
    classify_cell,
    column_type_agreement,
    detect_column_type,
    export_rules,
    normalize,
    normalize_auto,
    parse_canonical,
    values_equal,
)

from fixture_columns import COLUMNS


def norm_dt(raw):
    return normalize(raw, ValueType.DATETIME)


def norm_q(raw):
    return normalize(raw, ValueType.QUANTITY)


class TestNormalizeRules:
    def test_year_range_double_hyphen(self):
        assert norm_dt("1998--99").value == (1998, 1999)
        assert norm_dt("1998--99").kind == "year_range"

    def test_year_range_en_dash(self):
        assert norm_dt("1998–99").value == (1998, 1999)
        assert norm_dt("1995–2000").value == (1995, 2000)

    def test_date_period_split_into_two_dates(self):
        v = norm_dt("5 October 1987 to 30 December 1987")
        assert v.kind == "date_range"
        assert v.value == ("1987-10-05", "1987-12-30")

    def test_quantity_with_unit(self):
        assert norm_q("100 m").value == (100, "m")

    def test_negative_quantity(self):
        assert norm_q("-54 kilograms").value == (-54, "kilograms")

    def test_composite_keeps_first_value(self):
        assert norm_q("71 kg/m² (14.5 lb/ft²)").value == (71, "kg/m²")

    def test_date_formats(self):
        assert norm_dt("5 October 1987").value == "1987-10-05"
        assert norm_dt("October 5, 1987").value == "1987-10-05"
        assert norm_dt("1987-10-05").value == "1987-10-05"
        assert norm_dt("05/10/1987").value == "1987-10-05"

    def test_times(self):
        assert norm_dt("19:45").value == "19:45:00"
        assert norm_dt("9:05:30").value == "09:05:30"

    def test_century_wrap_in_year_range(self):
        assert norm_dt("1999–01").value == (1999, 2001)

    def test_thousands_separator(self):
        assert norm_q("1,234,567").value == (1234567, "")
        assert norm_q("1,234.5 km").value == (1234.5, "km")

    def test_unparseable_falls_back_to_string(self):
        v = norm_dt("circa twelve")
        assert v.kind == "string" and v.value == "circa twelve"

    def test_bare_year_is_plain_number(self):
        # Granularity is preserved: a lone year is not promoted to a date,
        # and it matches the same text from a quantity-typed column.
        v = norm_dt("1982")
        assert v.kind == "quantity" and v.value == (1982, "")
        assert values_equal(v, norm_q("1982"))

    def test_placeholder_normalizes_to_empty(self):
        for raw in ("", "  ", "-", "n/a", "N/A"):
            assert normalize(raw, ValueType.STRING).is_empty

    def test_whitespace_collapsed(self):
        assert normalize("  two   words ", ValueType.STRING).value == "two words"


class TestNormalizeIdempotence:
    CASES = [
        ("1998--99", ValueType.DATETIME),
        ("5 October 1987 to 30 December 1987", ValueType.DATETIME),
        ("5 October 1987", ValueType.DATETIME),
        ("19:45", ValueType.DATETIME),
        ("100 m", ValueType.QUANTITY),
        ("-54 kilograms", ValueType.QUANTITY),
        ("14.5 lb/ft²", ValueType.QUANTITY),
        ("plain text", ValueType.STRING),
    ]

    @pytest.mark.parametrize("raw,vtype", CASES)
    def test_render_reparse_fixpoint(self, raw, vtype):
        v1 = normalize(raw, vtype)
        v2 = normalize(canonical_string(v1), vtype)
        assert v1.kind == v2.kind and v1.value == v2.value

    @pytest.mark.parametrize("raw,vtype", CASES)
    def test_parse_canonical_round_trip(self, raw, vtype):
        v1 = normalize(raw, vtype)
        assert values_equal(v1, parse_canonical(canonical_string(v1)))

    def test_parse_canonical_empty_sentinel(self):
        assert parse_canonical("EMPTY") is EMPTY


class TestClassifyCell:
    def test_paper_date_example(self):
        assert classify_cell("5 October 1987", "date", False) == ValueType.DATETIME

    def test_paper_quantity_example(self):
        assert classify_cell("100 m", "length", False) == ValueType.QUANTITY

    def test_empty_is_other(self):
        assert classify_cell("", "anything", False) == ValueType.OTHER
        assert classify_cell("-", "date", False) == ValueType.OTHER

    def test_linked_always_entity(self):
        assert classify_cell("", "x", True) == ValueType.ENTITY
        assert classify_cell("100 m", "length", True) == ValueType.ENTITY
        assert classify_cell("2001-01-01", "date", True) == ValueType.ENTITY

    def test_bare_year_needs_date_keyword(self):
        assert classify_cell("1998", "year", False) == ValueType.DATETIME
        assert classify_cell("1998", "founded", False) == ValueType.DATETIME
        assert classify_cell("1998", "height", False) == ValueType.QUANTITY

    def test_url(self):
        assert classify_cell("https://example.org/x", "link", False) == ValueType.URL
        assert classify_cell("www.example.org", "site", False) == ValueType.URL

    def test_geo(self):
        assert classify_cell("51.5074° N, 0.1278° W", "coordinates", False) == ValueType.GEO_COORDINATE

    def test_plain_string(self):
        assert classify_cell("Midfielder", "position", False) == ValueType.STRING


class TestDetectColumnType:
    def test_majority(self):
        cells = [("5", False), ("7", False), ("12", False), ("3", False), ("abc", False)]
        assert detect_column_type(cells, "points") == {ValueType.QUANTITY}

    def test_tie_assigns_multiple_types(self):
        cells = [("5 kg", False), ("7 kg", False),
                 ("2001-02-03", False), ("2004-05-06", False)]
        got = detect_column_type(cells, "misc")
        assert got == {ValueType.QUANTITY, ValueType.DATETIME}

    def test_all_empty_is_other(self):
        assert detect_column_type([("", False), ("  ", False)], "x") == {ValueType.OTHER}
        assert detect_column_type([], "x") == {ValueType.OTHER}

    def test_fixture_accuracy_at_least_90_percent(self):
        correct = 0
        for heading, cells, want in COLUMNS:
            got = detect_column_type(cells, heading)
            if got == {want}:
                correct += 1
        accuracy = correct / len(COLUMNS)
        assert accuracy >= 0.90, f"column typing accuracy {accuracy:.4f}"

    def test_fixture_agreement_defined(self):
        for heading, cells, _want in COLUMNS:
            assert 0.0 <= column_type_agreement(cells, heading) <= 1.0


class TestValuesEqual:
    def test_case_insensitive_units(self):
        a = NormalizedValue(ValueType.QUANTITY, "quantity", (100, "m"))
        b = NormalizedValue(ValueType.QUANTITY, "quantity", (100, "M"))
        assert values_equal(a, b)

    def test_no_unit_conversion(self):
        a = NormalizedValue(ValueType.QUANTITY, "quantity", (100, "m"))
        b = NormalizedValue(ValueType.QUANTITY, "quantity", (100, "km"))
        assert not values_equal(a, b)

    def test_date_vs_bare_year_unequal(self):
        date = norm_dt("1982-10-16")
        year = norm_dt("1982")
        assert not values_equal(date, year)

    def test_year_range_vs_single_year_unequal(self):
        rng = norm_dt("1998--99")
        year = norm_dt("1998")
        assert not values_equal(rng, year)

    def test_quantity_tolerance(self):
        a = NormalizedValue(ValueType.QUANTITY, "quantity", (1.0, "m"))
        b = NormalizedValue(ValueType.QUANTITY, "quantity", (1.0 + 1e-12, "m"))
        assert values_equal(a, b)

    def test_equivalence_relation_on_fixture_values(self):
        values = []
        for heading, cells, _ in COLUMNS:
            for raw, linked in cells:
                values.append(normalize_auto(raw, heading, "E1" if linked else None))
        rng = random.Random(7)
        sample = rng.sample(values, 60)
        for v in sample:
            assert values_equal(v, v)
        for a in sample[:30]:
            for b in sample[:30]:
                assert values_equal(a, b) == values_equal(b, a)
        # Transitivity over the sample.
        for a in sample[:20]:
            for b in sample[:20]:
                if not values_equal(a, b):
                    continue
                for c in sample[:20]:
                    if values_equal(b, c):
                        assert values_equal(a, c)


class TestRulesExport:
    def test_rules_enumerable_and_typed(self, tmp_path):
        rules = export_rules(tmp_path / "rules.json")
        assert len(rules) > 10
        valid_types = {t.value for t in ValueType}
        for rule in rules:
            assert rule["type"] in valid_types
            assert rule["name"] and rule["pattern"] and rule["canonicalizer"]
        import json
        data = json.loads((tmp_path / "rules.json").read_text())
        assert data["version"] == 1 and len(data["rules"]) == len(rules)
