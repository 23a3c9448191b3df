"""Knowledge-base triple store with predicate labels.

Triples load from tab-separated ``subject<TAB>predicate<TAB>object`` lines,
labels from ``predicate<TAB>label`` lines, both UTF-8.  Lines starting with
``#%`` are version headers.
"""

from __future__ import annotations

import re
from collections import defaultdict
from typing import Callable, Optional

from .typesys import normalize_label


def default_predicate_label(predicate: str) -> str:
    """Human-readable fallback label: camel-case local name split to words."""
    local = re.split(r"[/#:]", predicate)[-1]
    words = re.sub(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])", " ", local)
    words = words.replace("_", " ")
    return normalize_label(words)


class KbHandle:
    """Immutable subject -> predicate -> objects map plus predicate labels."""

    def __init__(self):
        self.spo: dict[str, dict[str, set[str]]] = defaultdict(dict)
        self.labels: dict[str, str] = {}
        self.skipped_count = 0
        self.triple_count = 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, KbHandle):
            return NotImplemented
        return dict(self.spo) == dict(other.spo) and self.labels == other.labels

    def _add(self, s: str, p: str, o: str) -> None:
        objs = self.spo[s].setdefault(p, set())
        if o not in objs:
            objs.add(o)
            self.triple_count += 1

    def lookup(self, entity: str, predicate: str) -> set[str]:
        """Raw object values of all triples <entity, predicate, ?>."""
        return set(self.spo.get(entity, {}).get(predicate, ()))

    def predicates_of(self, entity: str) -> set[str]:
        return set(self.spo.get(entity, ()))

    def label(self, predicate: str) -> str:
        got = self.labels.get(predicate)
        if got is not None:
            return got
        return default_predicate_label(predicate)

    def predicates(self) -> set[str]:
        preds = set(self.labels)
        for pmap in self.spo.values():
            preds.update(pmap)
        return preds

    def is_entity(self, value: str) -> bool:
        """Whether a raw object string names a known KB subject."""
        return value in self.spo


def load_kb(triples_path, labels_path=None,
            entity_filter: Optional[Callable[[str], bool]] = None) -> KbHandle:
    """Load triples and labels; duplicates deduplicate, bad lines count as skipped.

    ``entity_filter``, when given, restricts the subject universe.
    """
    kb = KbHandle()
    with open(triples_path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#%"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not all(p.strip() for p in parts):
                kb.skipped_count += 1
                continue
            s, p, o = (p.strip() for p in parts)
            if entity_filter is not None and not entity_filter(s):
                continue
            kb._add(s, p, o)
    if labels_path is not None:
        with open(labels_path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#%"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not all(p.strip() for p in parts):
                    kb.skipped_count += 1
                    continue
                pred, label = (p.strip() for p in parts)
                # First label wins on duplicates.
                self_label = kb.labels.get(pred)
                if self_label is None:
                    kb.labels[pred] = normalize_label(label)
    return kb
