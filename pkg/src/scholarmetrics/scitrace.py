"""Scientometric analyses: authors, team size, countries, gender,
institutes, funding.

Country crediting uses whole counting (each distinct country of a record
counts once); the lead country is the first author's. Gender prediction is
a pluggable provider: the bundled name-table provider is deterministic and
offline, the HTTP provider adapts any {name, country} -> {label, confidence}
endpoint.
"""

import itertools
import re
from dataclasses import dataclass

import httpx

from . import _data
from .corpus import UNKNOWN_COUNTRY, Corpus
from .result import AnalysisResult
from .bibtrail import top_sorted

GENDER_LABELS = ("female", "male", "unknown")


@dataclass(frozen=True)
class GenderPrediction:
    label: str
    confidence: float

    def __post_init__(self):
        if self.label not in GENDER_LABELS:
            raise ValueError(f"bad gender label {self.label!r}")
        if self.label == "unknown":
            if self.confidence != 0:
                raise ValueError("unknown predictions carry confidence 0")
        elif not 0.5 <= self.confidence <= 1:
            raise ValueError("known predictions need confidence in [0.5, 1]")


UNKNOWN_PREDICTION = GenderPrediction("unknown", 0.0)


class TableGenderProvider:
    """Deterministic lookup against the bundled given-name table. A
    (name, country) entry wins over the unconditioned (name, None) entry."""

    identifier = "bundled-table"

    def __init__(self, table: dict | None = None):
        self._table = table if table is not None else _data.gender_table()

    def predict(self, given_name: str, country: str | None = None) -> GenderPrediction:
        name = given_name.strip().lower()
        if not name:
            return UNKNOWN_PREDICTION
        hit = None
        if country:
            hit = self._table.get((name, country))
        if hit is None:
            hit = self._table.get((name, None))
        if hit is None:
            return UNKNOWN_PREDICTION
        return GenderPrediction(hit[0], hit[1])


class HttpGenderProvider:
    """POST {"name": ..., "country": ...} JSON, expect {"label", "confidence"}."""

    def __init__(self, url: str, timeout: float = 10.0, token: str | None = None):
        self.url = url
        self.timeout = timeout
        self.token = token
        self.identifier = f"http:{url}"
        self._cache = {}

    def predict(self, given_name: str, country: str | None = None) -> GenderPrediction:
        key = (given_name, country)
        if key in self._cache:
            return self._cache[key]
        headers = {"Authorization": f"Bearer {self.token}"} if self.token else {}
        resp = httpx.post(self.url, json={"name": given_name, "country": country},
                          headers=headers, timeout=self.timeout)
        resp.raise_for_status()
        body = resp.json()
        pred = GenderPrediction(body["label"], float(body["confidence"]))
        self._cache[key] = pred
        return pred


_PUNCT_EDGES = re.compile(r"^[\W_]+|[\W_]+$")


def given_name_of(author: str) -> str:
    """Given name of one author string: the token after the comma for
    'Surname, Given' forms, else the first whitespace token, punctuation
    stripped either way."""
    author = author.strip()
    if "," in author:
        after = author.split(",", 1)[1].strip()
        token = after.split()[0] if after.split() else ""
    else:
        token = author.split()[0] if author.split() else ""
    return _PUNCT_EDGES.sub("", token)


# ---------------------------------------------------------------------------
# authors

def author_analysis(corpus: Corpus, mode: str = "top_authors", n: int = 10) -> AnalysisResult:
    """Author-level production statistics; identities key on author_id when
    available, else normalized name."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode == "papers_per_author_count":
        papers = _papers_per_author(corpus)
        histogram = {}
        for count in papers.values():
            histogram[count] = histogram.get(count, 0) + 1
        rows = [(str(k), histogram[k]) for k in sorted(histogram)]
        return AnalysisResult("author_paper_histogram", ["authors"], rows,
                              "papers", {"mode": mode})
    if mode == "top_authors":
        papers = _papers_per_author(corpus)
        display = _display_names(corpus)
        counts = {display[key]: count for key, count in papers.items()}
        return AnalysisResult("author_top", ["papers"], top_sorted(counts)[:n],
                              "author", {"mode": mode, "n": n})
    if mode == "team_size":
        histogram = {}
        for r in corpus:
            if r.authors:
                histogram[len(r.authors)] = histogram.get(len(r.authors), 0) + 1
        rows = [(str(k), histogram[k]) for k in sorted(histogram)]
        return AnalysisResult("author_team_size", ["papers"], rows,
                              "team_size", {"mode": mode})
    if mode == "pair_collaboration":
        display = _display_names(corpus)
        pairs = {}
        for r in corpus:
            keys = sorted({k for k, _ in r.author_keys()})
            for a, b in itertools.combinations(keys, 2):
                pair = tuple(sorted((display[a], display[b])))
                pairs[pair] = pairs.get(pair, 0) + 1
        counts = {f"{a} & {b}": c for (a, b), c in pairs.items()}
        return AnalysisResult("author_pairs", ["papers"], top_sorted(counts),
                              "pair", {"mode": mode})
    raise ValueError(f"unknown mode {mode!r}")


def _papers_per_author(corpus: Corpus) -> dict:
    papers = {}
    for r in corpus:
        for key in {k for k, _ in r.author_keys()}:
            papers[key] = papers.get(key, 0) + 1
    return papers


def _display_names(corpus: Corpus) -> dict:
    """Identity key -> first-seen display name (disambiguated on collision)."""
    display = {}
    taken = {}
    for r in corpus:
        for key, name in r.author_keys():
            if key in display:
                continue
            label = name.strip()
            if taken.get(label, key) != key:
                label = f"{label} [{key.split(':', 1)[1]}]"
            display[key] = label
            taken[label] = key
    return display


# ---------------------------------------------------------------------------
# countries

def country_analysis(corpus: Corpus, mode: str = "counts") -> AnalysisResult:
    """Country-level statistics under whole counting. The Unknown
    placeholder never appears; meta reports how many records resolved no
    country at all."""
    unresolved = sum(1 for r in corpus if not r.known_countries())
    meta = {"mode": mode, "counting": "whole", "records_without_country": unresolved}
    if mode == "counts":
        counts = {}
        for r in corpus:
            for c in r.known_countries():
                counts[c] = counts.get(c, 0) + 1
        return AnalysisResult("country_counts", ["papers"], top_sorted(counts),
                              "country", meta)
    if mode == "lead_counts":
        counts = {}
        for r in corpus:
            if r.countries and r.countries[0] != UNKNOWN_COUNTRY:
                counts[r.countries[0]] = counts.get(r.countries[0], 0) + 1
        return AnalysisResult("country_lead_counts", ["papers"], top_sorted(counts),
                              "country", meta)
    if mode == "team_size":
        histogram = {}
        for r in corpus:
            k = len(r.known_countries())
            if k:
                histogram[k] = histogram.get(k, 0) + 1
        rows = [(str(k), histogram[k]) for k in sorted(histogram)]
        return AnalysisResult("country_team_size", ["papers"], rows, "team_size", meta)
    if mode == "pair_collaboration":
        pairs = {}
        for r in corpus:
            for a, b in itertools.combinations(sorted(r.known_countries()), 2):
                pairs[(a, b)] = pairs.get((a, b), 0) + 1
        counts = {f"{a} & {b}": c for (a, b), c in pairs.items()}
        return AnalysisResult("country_pairs", ["papers"], top_sorted(counts),
                              "pair", meta)
    if mode == "papers_vs_citations":
        papers = {}
        cites = {}
        for r in corpus:
            for c in r.known_countries():
                papers[c] = papers.get(c, 0) + 1
                cites[c] = cites.get(c, 0) + r.citations
        order = top_sorted(papers)
        rows = [(c, n, cites[c]) for c, n in order]
        return AnalysisResult("country_papers_citations", ["papers", "citations"],
                              rows, "country", meta)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# gender

def gender_analysis(corpus: Corpus, provider, mode: str = "totals",
                    top_k: int = 10) -> AnalysisResult:
    """Gender composition of author slots. A single-author paper counts as
    both first and last position; slot countries come from the parallel
    country list where derivable."""
    if provider is None:
        raise ValueError("gender_analysis needs a provider")
    cache = {}

    def predict(name, country):
        key = (name, country)
        if key not in cache:
            cache[key] = provider.predict(name, country)
        return cache[key]

    slots = []                  # (record, index, label)
    for r in corpus:
        countries = r.countries
        for i, author in enumerate(r.authors):
            country = countries[i] if i < len(countries) and countries[i] != UNKNOWN_COUNTRY else None
            pred = predict(given_name_of(author), country)
            slots.append((r, i, country, pred.label))

    meta = {"mode": mode, "provider": getattr(provider, "identifier", "custom"),
            "author_slots": len(slots),
            "single_author_positions": "first and last"}

    if mode == "totals":
        counts = {g: 0 for g in GENDER_LABELS}
        for _, _, _, label in slots:
            counts[label] += 1
        total = len(slots) or 1
        rows = [(g, counts[g], counts[g] / total) for g in GENDER_LABELS]
        return AnalysisResult("gender_totals", ["count", "proportion"], rows,
                              "gender", meta)

    if mode == "by_position":
        counts = {p: {g: 0 for g in GENDER_LABELS} for p in ("first", "middle", "last")}
        for r, i, _, label in slots:
            n = len(r.authors)
            if i == 0:
                counts["first"][label] += 1
            if i == n - 1:
                counts["last"][label] += 1
            if 0 < i < n - 1:
                counts["middle"][label] += 1
        rows = [(p, *[counts[p][g] for g in GENDER_LABELS])
                for p in ("first", "middle", "last")]
        return AnalysisResult("gender_by_position", list(GENDER_LABELS), rows,
                              "position", meta)

    if mode == "by_country":
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        paper_counts = {}
        for r in corpus:
            for c in r.known_countries():
                paper_counts[c] = paper_counts.get(c, 0) + 1
        top = [c for c, _ in top_sorted(paper_counts)[:top_k]]
        per_country = {c: {g: 0 for g in GENDER_LABELS} for c in top}
        for _, _, country, label in slots:
            if country in per_country:
                per_country[country][label] += 1
        rows = []
        for c in top:
            total = sum(per_country[c].values()) or 1
            rows.append((c, *[per_country[c][g] / total for g in GENDER_LABELS]))
        meta["top_k"] = top_k
        return AnalysisResult("gender_by_country", list(GENDER_LABELS), rows,
                              "country", meta)

    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# institutes + funding

def top_entities(corpus: Corpus, field: str, n: int = 10) -> AnalysisResult:
    """Top institutes (full normalized affiliation strings) or funding
    agencies by record count."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if field not in ("institutes", "funding"):
        raise ValueError("field must be institutes or funding")
    attr = "affiliations" if field == "institutes" else "funding"
    counts = {}
    covered = 0
    for r in corpus:
        values = {v.strip() for v in getattr(r, attr) if v.strip()}
        if values:
            covered += 1
        for v in values:
            counts[v] = counts.get(v, 0) + 1
    kind = "top_institutes" if field == "institutes" else "top_funding"
    coverage = covered / len(corpus) if len(corpus) else 0.0
    return AnalysisResult(kind, ["papers"], top_sorted(counts)[:n],
                          "institute" if field == "institutes" else "agency",
                          {"field": field, "n": n, "coverage": coverage})
