"""Loaders for the data files bundled with the package.

All tables are plain data (JSON/CSV/NDJSON) so that new header synonyms,
countries or chart compatibilities can be added without touching code.
Loaders are cached; the returned objects must be treated as read-only.
"""

import csv
import io
import json
from functools import lru_cache
from importlib import resources


def _read_text(name: str) -> str:
    return resources.files("scholarmetrics.data").joinpath(name).read_text("utf-8")


@lru_cache(maxsize=None)
def field_synonyms(source_kind: str) -> dict:
    """Map normalized header synonym -> canonical field, scoped by source kind."""
    raw = json.loads(_read_text("field_synonyms.json"))
    table = {}
    for scope in ("common", source_kind):
        for field, synonyms in raw.get(scope, {}).items():
            for syn in synonyms:
                table[syn] = field
    return table


@lru_cache(maxsize=None)
def country_aliases() -> dict:
    """Map lowercase alias -> canonical country display name."""
    raw = json.loads(_read_text("countries.json"))
    aliases = {}
    for canonical, extra in raw.items():
        aliases[canonical.lower()] = canonical
        for a in extra:
            aliases[a.lower()] = canonical
    return aliases


@lru_cache(maxsize=None)
def stopwords() -> frozenset:
    return frozenset(w.strip() for w in _read_text("stopwords.txt").splitlines() if w.strip())


@lru_cache(maxsize=None)
def gender_table() -> dict:
    """Map (lowercase name, country-or-None) -> (label, confidence)."""
    table = {}
    reader = csv.DictReader(io.StringIO(_read_text("gender_names.csv")))
    for row in reader:
        key = (row["name"].strip().lower(), row["country"].strip() or None)
        table[key] = (row["label"].strip(), float(row["confidence"]))
    return table


@lru_cache(maxsize=None)
def chart_compatibility() -> dict:
    """Map AnalysisResult.kind -> tuple of chart types allowed for it."""
    raw = json.loads(_read_text("chart_compat.json"))
    return {kind: tuple(types) for kind, types in raw.items()}
