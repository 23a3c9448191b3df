"""Value data types: cell classification, normalization, and value equality.

A two-layer taxonomy (entity / quantity / string / datetime / geo / url /
other) drives rule-based cell typing.  Columns are typed by majority vote
over their non-empty cells.  Normalization maps raw cell text to a
canonical form so values from different sources can be compared.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union


class ValueType(Enum):
    ENTITY = "Entity"
    QUANTITY = "Quantity"
    STRING = "String"
    DATETIME = "DateTime"
    GEO_COORDINATE = "GeoCoordinate"
    URL = "URL"
    OTHER = "Other"


# Canonical payload kinds carried by NormalizedValue.value:
#   entity     -> entity id (str)
#   quantity   -> (number, unit)
#   date       -> "YYYY-MM-DD"
#   time       -> "HH:MM:SS"
#   year_range -> (y1, y2) with y1 <= y2
#   date_range -> ("YYYY-MM-DD", "YYYY-MM-DD")
#   string     -> cleaned text
#   empty      -> None
@dataclass(frozen=True)
class NormalizedValue:
    type: ValueType
    kind: str
    value: object

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"


class EmptySentinel:
    """Designated candidate meaning "this cell should be left blank"."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"


EMPTY = EmptySentinel()

CellValue = Union[NormalizedValue, EmptySentinel]

EMPTY_CANONICAL = "EMPTY"

# Text stand-ins that web tables use for "no value".
PLACEHOLDERS = {"", "-", "--", "---", "?", "–", "—", "n/a", "n.a.", "none", "null", "tba", "tbd"}

# Heading terms that mark a column as date-bearing.
DATE_HEADING_KEYWORDS = ("year", "birth", "date", "founded", "created", "built")

MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5,
    "june": 6, "july": 7, "august": 8, "september": 9, "october": 10,
    "november": 11, "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7,
    "aug": 8, "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
}

_MONTH_RE = "|".join(sorted(MONTHS, key=len, reverse=True))

RE_ISO_DATE = re.compile(r"(\d{4})-(\d{2})-(\d{2})")
RE_DAY_MONTH_YEAR = re.compile(rf"(\d{{1,2}})\s+({_MONTH_RE})\.?\s+(\d{{4}})", re.IGNORECASE)
RE_MONTH_DAY_YEAR = re.compile(rf"({_MONTH_RE})\.?\s+(\d{{1,2}}),?\s+(\d{{4}})", re.IGNORECASE)
RE_SLASH_DATE = re.compile(r"(\d{1,2})/(\d{1,2})/(\d{4})")
RE_TIME = re.compile(r"(\d{1,2}):(\d{2})(?::(\d{2}))?")
RE_YEAR_RANGE = re.compile(r"(\d{4})(?:\s*(?:---|--|–|—|-)\s*|\s+to\s+)(\d{4}|\d{2})")
RE_BRACKET_YEARS = re.compile(r"\[\s*(\d{4})\s*,\s*(\d{4})\s*\]")
RE_BRACKET_DATES = re.compile(r"\[\s*(\d{4}-\d{2}-\d{2})\s*,\s*(\d{4}-\d{2}-\d{2})\s*\]")
RE_BARE_YEAR = re.compile(r"(\d{4})")
RE_NUMBER_PREFIX = re.compile(r"[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?")
RE_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
RE_GEO_DECIMAL = re.compile(
    r"-?\d{1,3}(?:\.\d+)?\s*°?\s*[NS]\s*[,;]?\s+-?\d{1,3}(?:\.\d+)?\s*°?\s*[EW]",
    re.IGNORECASE,
)
RE_GEO_DMS = re.compile(
    r"\d{1,3}°\s*\d{1,2}[′']\s*(?:\d{1,2}(?:\.\d+)?[″\"])?\s*[NS]"
    r"[,;]?\s*\d{1,3}°\s*\d{1,2}[′']\s*(?:\d{1,2}(?:\.\d+)?[″\"])?\s*[EW]",
    re.IGNORECASE,
)


def clean_text(s: str) -> str:
    """NFC-normalize, trim, and collapse internal whitespace."""
    return re.sub(r"\s+", " ", unicodedata.normalize("NFC", s)).strip()


def normalize_label(s: str) -> str:
    """Canonical form of a heading label: cleaned and lowercased."""
    return clean_text(s).lower()


def is_placeholder(raw: str) -> bool:
    return clean_text(raw).lower() in PLACEHOLDERS


def _heading_has_date_keyword(heading: str) -> bool:
    h = normalize_label(heading)
    return any(k in h for k in DATE_HEADING_KEYWORDS)


def _matches_datetime(raw: str) -> bool:
    s = clean_text(raw)
    for rx in (RE_BRACKET_YEARS, RE_BRACKET_DATES, RE_YEAR_RANGE, RE_ISO_DATE,
               RE_DAY_MONTH_YEAR, RE_MONTH_DAY_YEAR, RE_SLASH_DATE, RE_TIME):
        if rx.fullmatch(s):
            return True
    if _parse_date_range(s) is not None:
        return True
    return False


def classify_cell(raw: str, heading: str = "", has_entity_link: bool = False) -> ValueType:
    """Type a single cell from its text, column heading, and entity link.

    Linked cells are entities regardless of text.  Bare four-digit numbers
    count as dates only under a date-keyword heading, otherwise as
    quantities.
    """
    if has_entity_link:
        return ValueType.ENTITY
    s = clean_text(raw)
    if s.lower() in PLACEHOLDERS:
        return ValueType.OTHER
    if RE_URL.fullmatch(s):
        return ValueType.URL
    if RE_GEO_DECIMAL.fullmatch(s) or RE_GEO_DMS.fullmatch(s):
        return ValueType.GEO_COORDINATE
    if _matches_datetime(s):
        return ValueType.DATETIME
    if RE_BARE_YEAR.fullmatch(s) and _heading_has_date_keyword(heading):
        return ValueType.DATETIME
    if RE_NUMBER_PREFIX.match(s):
        return ValueType.QUANTITY
    return ValueType.STRING


def detect_column_type(cells: Sequence[tuple[str, bool]], heading: str = "") -> set[ValueType]:
    """Majority-vote column type over non-empty cells.

    ``cells`` is a sequence of (raw_text, has_entity_link) pairs.  Ties keep
    every tied type; a column with no non-empty cells is Other.
    """
    votes: dict[ValueType, int] = {}
    for raw, linked in cells:
        if not raw.strip():
            continue
        t = classify_cell(raw, heading, linked)
        votes[t] = votes.get(t, 0) + 1
    if not votes:
        return {ValueType.OTHER}
    top = max(votes.values())
    return {t for t, n in votes.items() if n == top}


def column_type_agreement(cells: Sequence[tuple[str, bool]], heading: str = "") -> float:
    """Fraction of classified cells that voted for the winning type."""
    votes: dict[ValueType, int] = {}
    total = 0
    for raw, linked in cells:
        if not raw.strip():
            continue
        t = classify_cell(raw, heading, linked)
        votes[t] = votes.get(t, 0) + 1
        total += 1
    if total == 0:
        return 0.0
    return max(votes.values()) / total


def _expand_year(y1: int, tail: str) -> int:
    if len(tail) == 4:
        return int(tail)
    y2 = (y1 // 100) * 100 + int(tail)
    if y2 < y1:
        y2 += 100
    return y2


def _valid_date(y: int, m: int, d: int) -> bool:
    return 1 <= m <= 12 and 1 <= d <= 31


def _parse_single_date(s: str) -> Optional[str]:
    m = RE_ISO_DATE.fullmatch(s)
    if m:
        y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if _valid_date(y, mo, d):
            return f"{y:04d}-{mo:02d}-{d:02d}"
        return None
    m = RE_DAY_MONTH_YEAR.fullmatch(s)
    if m:
        d, mo, y = int(m.group(1)), MONTHS[m.group(2).lower()], int(m.group(3))
        if _valid_date(y, mo, d):
            return f"{y:04d}-{mo:02d}-{d:02d}"
        return None
    m = RE_MONTH_DAY_YEAR.fullmatch(s)
    if m:
        mo, d, y = MONTHS[m.group(1).lower()], int(m.group(2)), int(m.group(3))
        if _valid_date(y, mo, d):
            return f"{y:04d}-{mo:02d}-{d:02d}"
        return None
    m = RE_SLASH_DATE.fullmatch(s)
    if m:
        d, mo, y = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if _valid_date(y, mo, d):
            return f"{y:04d}-{mo:02d}-{d:02d}"
    return None


def _parse_date_range(s: str) -> Optional[tuple[str, str]]:
    parts = re.split(r"\s+to\s+", s, flags=re.IGNORECASE)
    if len(parts) == 2:
        a = _parse_single_date(clean_text(parts[0]))
        b = _parse_single_date(clean_text(parts[1]))
        if a is not None and b is not None:
            return (a, b) if a <= b else (b, a)
    return None


def _parse_time(s: str) -> Optional[str]:
    m = RE_TIME.fullmatch(s)
    if not m:
        return None
    h, mi = int(m.group(1)), int(m.group(2))
    sec = int(m.group(3)) if m.group(3) else 0
    if mi >= 60 or sec >= 60 or h > 99:
        return None
    return f"{h:02d}:{mi:02d}:{sec:02d}"


def _parse_datetime(s: str) -> Optional[tuple[str, object]]:
    m = RE_BRACKET_DATES.fullmatch(s)
    if m:
        a, b = m.group(1), m.group(2)
        return ("date_range", (a, b) if a <= b else (b, a))
    m = RE_BRACKET_YEARS.fullmatch(s)
    if m:
        y1, y2 = int(m.group(1)), int(m.group(2))
        return ("year_range", (y1, y2) if y1 <= y2 else (y2, y1))
    rng = _parse_date_range(s)
    if rng is not None:
        return ("date_range", rng)
    m = RE_YEAR_RANGE.fullmatch(s)
    if m:
        y1 = int(m.group(1))
        y2 = _expand_year(y1, m.group(2))
        if y1 <= y2:
            return ("year_range", (y1, y2))
        return None
    d = _parse_single_date(s)
    if d is not None:
        return ("date", d)
    t = _parse_time(s)
    if t is not None:
        return ("time", t)
    # A lone year canonicalizes as a unit-less number, the same as it would
    # in a quantity column, so year values match across heading synonyms.
    m = RE_BARE_YEAR.fullmatch(s)
    if m:
        return ("quantity", (int(m.group(1)), ""))
    return None


def _parse_quantity(s: str) -> Optional[tuple[object, str]]:
    m = RE_NUMBER_PREFIX.match(s)
    if not m:
        return None
    lit = m.group(0).replace(",", "")
    number: object = float(lit) if "." in lit else int(lit)
    unit_tokens: list[str] = []
    for tok in s[m.end():].split():
        # A second value (parenthesized or numeric-leading) ends the unit:
        # composite cells keep only their first value.
        if tok.startswith("(") or RE_NUMBER_PREFIX.match(tok):
            break
        unit_tokens.append(tok)
    return number, " ".join(unit_tokens)


def normalize(raw: str, vtype: ValueType) -> NormalizedValue:
    """Canonicalize a raw cell string under the given value type.

    Dates become YYYY-MM-DD, times HH:MM:SS, year and date periods become
    ranges, quantities split into (number, unit) with no unit conversion.
    Unparseable input falls back to the cleaned string.
    """
    s = clean_text(raw)
    if vtype == ValueType.OTHER or s.lower() in PLACEHOLDERS:
        return NormalizedValue(ValueType.OTHER, "empty", None)
    if vtype == ValueType.ENTITY:
        return NormalizedValue(vtype, "entity", s)
    if vtype == ValueType.DATETIME:
        parsed = _parse_datetime(s)
        if parsed is not None:
            kind, value = parsed
            return NormalizedValue(vtype, kind, value)
        return NormalizedValue(vtype, "string", s)
    if vtype == ValueType.QUANTITY:
        q = _parse_quantity(s)
        if q is not None:
            return NormalizedValue(vtype, "quantity", q)
        return NormalizedValue(vtype, "string", s)
    return NormalizedValue(vtype, "string", s)


def normalize_auto(raw: str, heading: str = "", entity_id: Optional[str] = None) -> NormalizedValue:
    """Classify then normalize in one step; linked cells carry the entity id."""
    if entity_id:
        return NormalizedValue(ValueType.ENTITY, "entity", entity_id)
    return normalize(raw, classify_cell(raw, heading, False))


_QUANTITY_REL_TOL = 1e-9


def values_equal(a: Optional[NormalizedValue], b: Optional[NormalizedValue]) -> bool:
    """Whether two normalized values denote the same value.

    Requires matching canonical kinds.  Quantities compare numerically with
    relative tolerance and case-insensitive units; no unit conversion is
    attempted, so (100, "m") never equals (0.1, "km").
    """
    if a is None or b is None:
        return False
    if a.kind != b.kind:
        return False
    if a.kind == "quantity":
        (na, ua), (nb, ub) = a.value, b.value
        if ua.lower() != ub.lower():
            return False
        return abs(na - nb) <= _QUANTITY_REL_TOL * max(1.0, abs(na), abs(nb))
    return a.value == b.value


def canonical_string(v: CellValue) -> str:
    """Stable text rendering of a value, round-trippable by parse_canonical."""
    if isinstance(v, EmptySentinel):
        return EMPTY_CANONICAL
    if v.kind == "empty":
        return ""
    if v.kind == "quantity":
        number, unit = v.value
        num = str(int(number)) if float(number).is_integer() else repr(float(number))
        return f"{num} {unit}".strip()
    if v.kind == "year_range":
        return f"[{v.value[0]},{v.value[1]}]"
    if v.kind == "date_range":
        return f"[{v.value[0]}, {v.value[1]}]"
    return str(v.value)


def parse_canonical(s: str) -> CellValue:
    """Parse a canonical rendering back into a value.

    Kind is inferred from the text alone, so entity ids come back as plain
    strings; comparisons stay consistent as long as both sides of a
    comparison go through this same parse.
    """
    if s == EMPTY_CANONICAL:
        return EMPTY
    t = clean_text(s)
    if t.lower() in PLACEHOLDERS:
        return NormalizedValue(ValueType.OTHER, "empty", None)
    parsed = _parse_datetime(t)
    if parsed is not None:
        kind, value = parsed
        return NormalizedValue(ValueType.DATETIME, kind, value)
    if RE_NUMBER_PREFIX.match(t):
        q = _parse_quantity(t)
        if q is not None:
            return NormalizedValue(ValueType.QUANTITY, "quantity", q)
    return NormalizedValue(ValueType.STRING, "string", t)


RULES = [
    {"name": "entity-link", "pattern": "<cell has entity annotation>", "type": "Entity", "canonicalizer": "entity_id"},
    {"name": "placeholder", "pattern": "|".join(sorted(PLACEHOLDERS)), "type": "Other", "canonicalizer": "empty"},
    {"name": "url", "pattern": RE_URL.pattern, "type": "URL", "canonicalizer": "string"},
    {"name": "geo-decimal", "pattern": RE_GEO_DECIMAL.pattern, "type": "GeoCoordinate", "canonicalizer": "string"},
    {"name": "geo-dms", "pattern": RE_GEO_DMS.pattern, "type": "GeoCoordinate", "canonicalizer": "string"},
    {"name": "bracket-date-range", "pattern": RE_BRACKET_DATES.pattern, "type": "DateTime", "canonicalizer": "date_range"},
    {"name": "bracket-year-range", "pattern": RE_BRACKET_YEARS.pattern, "type": "DateTime", "canonicalizer": "year_range"},
    {"name": "date-to-date", "pattern": r"<date>\s+to\s+<date>", "type": "DateTime", "canonicalizer": "date_range"},
    {"name": "year-range", "pattern": RE_YEAR_RANGE.pattern, "type": "DateTime", "canonicalizer": "year_range"},
    {"name": "iso-date", "pattern": RE_ISO_DATE.pattern, "type": "DateTime", "canonicalizer": "date"},
    {"name": "day-month-year", "pattern": RE_DAY_MONTH_YEAR.pattern, "type": "DateTime", "canonicalizer": "date"},
    {"name": "month-day-year", "pattern": RE_MONTH_DAY_YEAR.pattern, "type": "DateTime", "canonicalizer": "date"},
    {"name": "slash-date", "pattern": RE_SLASH_DATE.pattern, "type": "DateTime", "canonicalizer": "date"},
    {"name": "time", "pattern": RE_TIME.pattern, "type": "DateTime", "canonicalizer": "time"},
    {"name": "bare-year-with-date-heading", "pattern": RE_BARE_YEAR.pattern,
     "type": "DateTime", "canonicalizer": "quantity",
     "condition": "heading contains one of " + ", ".join(DATE_HEADING_KEYWORDS)},
    {"name": "number-with-unit", "pattern": RE_NUMBER_PREFIX.pattern, "type": "Quantity", "canonicalizer": "quantity"},
    {"name": "fallback", "pattern": ".*", "type": "String", "canonicalizer": "string"},
]


def export_rules(path=None) -> list[dict]:
    """The classification/normalization rule table, optionally written as JSON."""
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"format": "cellac-type-rules", "version": 1, "rules": RULES}, f, indent=2)
    return RULES
