"""Immutable analyzed dataset: records, overview statistics and filtering.

A :class:`Record` is one publication in canonical form; a :class:`Corpus` is
an immutable, deduplicated sequence of records. Filtering always produces a
new corpus and never mutates the source.
"""

import json
import re
from dataclasses import dataclass, field, fields, replace

from .errors import InvalidSpec

# Canonical fields, in the order they appear in the corpus CSV serialization.
CANONICAL_FIELDS = (
    "title", "authors", "author_ids", "affiliations", "countries", "year",
    "source_title", "issn", "doi", "citations", "doc_type", "publisher",
    "open_access", "language", "author_keywords", "index_keywords",
    "abstract", "funding",
)

MULTI_VALUE_FIELDS = frozenset({
    "authors", "author_ids", "affiliations", "countries", "issn",
    "author_keywords", "index_keywords", "funding",
})

YEAR_MIN, YEAR_MAX = 1500, 2100

_ISSN_RE = re.compile(r"^[0-9]{7}[0-9X]$")
_WS_RE = re.compile(r"\s+")

UNKNOWN_COUNTRY = "Unknown"


def normalize_issn(value: str) -> str | None:
    """Strip hyphens/spaces and uppercase the check digit; None if malformed."""
    cleaned = value.replace("-", "").replace(" ", "").upper()
    return cleaned if _ISSN_RE.match(cleaned) else None


def normalize_doi(value: str) -> str | None:
    doi = value.strip().lower()
    for prefix in ("https://doi.org/", "http://doi.org/", "doi.org/", "doi:"):
        if doi.startswith(prefix):
            doi = doi[len(prefix):]
    doi = doi.strip()
    return doi or None


def normalize_title_key(title: str) -> str:
    """Lowercased alphanumerics only; the title half of the dedup key."""
    return re.sub(r"[^a-z0-9]", "", title.lower())


def normalize_name(name: str) -> str:
    return _WS_RE.sub(" ", name.strip()).lower()


@dataclass(frozen=True)
class Record:
    """One publication in canonical form. All sequence fields are tuples."""

    id: str
    title: str = ""
    authors: tuple = ()
    author_ids: tuple = ()
    affiliations: tuple = ()
    countries: tuple = ()
    year: int | None = None
    source_title: str = ""
    issn: tuple = ()
    doi: str | None = None
    citations: int = 0
    doc_type: str = ""
    publisher: str = ""
    open_access: str = ""
    language: str = ""
    author_keywords: tuple = ()
    index_keywords: tuple = ()
    abstract: str = ""
    funding: tuple = ()
    source_label: str = ""

    def __post_init__(self):
        if self.citations < 0:
            raise ValueError("citations must be >= 0")
        if self.year is not None and not (YEAR_MIN <= self.year <= YEAR_MAX):
            raise ValueError(f"year {self.year} outside [{YEAR_MIN}, {YEAR_MAX}]")

    def completeness(self) -> int:
        """Number of non-absent canonical fields (citations excluded: it is
        never absent by construction and already serves as a tie-break)."""
        count = 0
        for name in CANONICAL_FIELDS:
            if name == "citations":
                continue
            value = getattr(self, name)
            if name == "countries":
                value = tuple(c for c in value if c != UNKNOWN_COUNTRY)
            if value not in (None, "", ()):
                count += 1
        return count

    def keywords(self) -> tuple:
        return self.author_keywords + self.index_keywords

    def known_countries(self) -> tuple:
        """Distinct resolvable countries, first-appearance order."""
        seen = []
        for c in self.countries:
            if c != UNKNOWN_COUNTRY and c not in seen:
                seen.append(c)
        return tuple(seen)

    def author_keys(self) -> tuple:
        """(identity key, display name) per author slot. Keyed on author_id
        when the parallel id list provides one, else on the normalized name."""
        out = []
        for i, name in enumerate(self.authors):
            if i < len(self.author_ids) and self.author_ids[i]:
                key = f"id:{self.author_ids[i]}"
            else:
                key = f"name:{normalize_name(name)}"
            out.append((key, name))
        return tuple(out)

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            d[f.name] = list(v) if isinstance(v, tuple) else v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Record":
        kwargs = dict(d)
        for f in fields(cls):
            if f.name in kwargs and isinstance(kwargs[f.name], list):
                kwargs[f.name] = tuple(kwargs[f.name])
        return cls(**kwargs)


class Corpus:
    """Immutable sequence of deduplicated records."""

    __slots__ = ("_records",)

    def __init__(self, records):
        object.__setattr__(self, "_records", tuple(records))

    @property
    def records(self) -> tuple:
        return self._records

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __getitem__(self, i):
        return self._records[i]

    def __eq__(self, other):
        return isinstance(other, Corpus) and self._records == other._records

    def __hash__(self):
        return hash(self._records)

    def __repr__(self):
        return f"Corpus({len(self._records)} records)"

    def __setattr__(self, *_):
        raise AttributeError("Corpus is immutable")

    def dated_records(self):
        return [r for r in self._records if r.year is not None]

    def year_bounds(self):
        years = [r.year for r in self._records if r.year is not None]
        return (min(years), max(years)) if years else (None, None)


@dataclass(frozen=True)
class FilterSpec:
    """User-defined corpus filter; present criteria are ANDed together."""

    year_range: tuple | None = None            # (start, end) inclusive
    doc_types: frozenset | None = None
    languages: frozenset | None = None
    countries: frozenset | None = None         # record kept if ANY author country matches
    journals: frozenset | None = None
    min_citations: int | None = None
    keyword_contains: tuple | None = None      # lowercase substrings, ANY matches ANY keyword

    def validate(self):
        if self.year_range is not None:
            start, end = self.year_range
            if start > end:
                raise InvalidSpec(f"year_range start {start} > end {end}")

    def is_empty(self) -> bool:
        return all(getattr(self, f.name) is None for f in fields(self))

    def matches(self, record: Record) -> bool:
        if self.year_range is not None:
            if record.year is None or not (self.year_range[0] <= record.year <= self.year_range[1]):
                return False
        if self.doc_types is not None and record.doc_type not in self.doc_types:
            return False
        if self.languages is not None and record.language not in self.languages:
            return False
        if self.countries is not None and not (set(record.countries) & self.countries):
            return False
        if self.journals is not None and record.source_title not in self.journals:
            return False
        if self.min_citations is not None and record.citations < self.min_citations:
            return False
        if self.keyword_contains is not None:
            kws = record.keywords()
            if not any(sub in kw for kw in kws for sub in self.keyword_contains):
                return False
        return True

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        return {
            "year_range": list(self.year_range) if self.year_range else None,
            "doc_types": sorted(self.doc_types) if self.doc_types is not None else None,
            "languages": sorted(self.languages) if self.languages is not None else None,
            "countries": sorted(self.countries) if self.countries is not None else None,
            "journals": sorted(self.journals) if self.journals is not None else None,
            "min_citations": self.min_citations,
            "keyword_contains": list(self.keyword_contains) if self.keyword_contains is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FilterSpec":
        def fset(key):
            return frozenset(d[key]) if d.get(key) is not None else None

        spec = cls(
            year_range=tuple(d["year_range"]) if d.get("year_range") else None,
            doc_types=fset("doc_types"),
            languages=fset("languages"),
            countries=fset("countries"),
            journals=fset("journals"),
            min_citations=d.get("min_citations"),
            keyword_contains=tuple(d["keyword_contains"]) if d.get("keyword_contains") else None,
        )
        spec.validate()
        return spec

    @classmethod
    def from_json(cls, text: str) -> "FilterSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CorpusStats:
    n_records: int
    n_distinct_authors: int
    n_distinct_institutions: int
    n_distinct_countries: int
    n_distinct_journals: int
    year_min: int | None
    year_max: int | None

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "n_distinct_authors": self.n_distinct_authors,
            "n_distinct_institutions": self.n_distinct_institutions,
            "n_distinct_countries": self.n_distinct_countries,
            "n_distinct_journals": self.n_distinct_journals,
            "year_min": self.year_min,
            "year_max": self.year_max,
        }


def summarize_corpus(corpus: Corpus) -> CorpusStats:
    """Overview statistics. Author identity keys on author_id when present,
    else on the normalized name; institutions are raw trimmed affiliation
    strings; the Unknown country placeholder is not counted."""
    authors = set()
    institutions = set()
    countries = set()
    journals = set()
    for r in corpus:
        authors.update(key for key, _ in r.author_keys())
        institutions.update(a.strip() for a in r.affiliations if a.strip())
        countries.update(r.known_countries())
        if r.source_title:
            journals.add(r.source_title)
    year_min, year_max = corpus.year_bounds()
    return CorpusStats(
        n_records=len(corpus),
        n_distinct_authors=len(authors),
        n_distinct_institutions=len(institutions),
        n_distinct_countries=len(countries),
        n_distinct_journals=len(journals),
        year_min=year_min,
        year_max=year_max,
    )


def filter_corpus(corpus: Corpus, spec: FilterSpec) -> Corpus:
    """New corpus with records matching every present criterion, original
    order preserved. An empty spec is the identity."""
    spec.validate()
    if spec.is_empty():
        return Corpus(corpus.records)
    return Corpus(r for r in corpus if spec.matches(r))


def combine_specs(first: FilterSpec, second: FilterSpec) -> FilterSpec:
    """Conjunction of two specs over disjoint criteria; where both define a
    criterion the second wins (used by tests for the s1∧s2 property)."""
    merged = first
    for f in fields(FilterSpec):
        v = getattr(second, f.name)
        if v is not None:
            merged = replace(merged, **{f.name: v})
    return merged
