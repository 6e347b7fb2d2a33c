"""Bibliometric analyses: publications, citations, document types,
journals with Scimago quartiles, publishers, open access, language.

All operations are pure functions from an immutable corpus to an
AnalysisResult. Top-N lists share one tie-break: count descending, then
label ascending.
"""

import csv
import io
from dataclasses import dataclass

from .corpus import Corpus, normalize_issn
from .errors import MalformedScimagoFile, MissingQuartileIndex
from .result import AnalysisResult

UNSPECIFIED = "Unspecified"
UNRANKED = "Unranked"
QUARTILES = ("Q1", "Q2", "Q3", "Q4")


@dataclass(frozen=True)
class QuartileIndex:
    """Normalized ISSN -> best quartile, from one Scimago journal-rank file."""

    entries: dict
    source_year: int = 0

    def lookup(self, record) -> str:
        for issn in record.issn:
            q = self.entries.get(issn)
            if q:
                return q
        return UNRANKED


def top_sorted(counts: dict) -> list:
    """Count desc, label asc: the deterministic order of every top list."""
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def year_bins(years, gap: int):
    """Contiguous [y, y+gap-1] bins from the minimum year; returns
    (bin starts, label function)."""
    lo, hi = min(years), max(years)
    starts = list(range(lo, hi + 1, gap))

    def label(start):
        return str(start) if gap == 1 else f"{start}-{start + gap - 1}"

    return starts, label


def publications_series(corpus: Corpus, mode: str = "total", year_gap: int = 1) -> AnalysisResult:
    """Publication counts per year bin: total, cumulative, or proportion of
    all dated records. Records without a year are excluded and counted in
    meta."""
    if mode not in ("total", "cumulative", "proportion"):
        raise ValueError(f"unknown mode {mode!r}")
    if not 1 <= year_gap <= 5:
        raise ValueError("year_gap must be in 1..5")
    dated = corpus.dated_records()
    meta = {
        "mode": mode,
        "year_gap": year_gap,
        "records_without_year": len(corpus) - len(dated),
        "label_kind": "year" if year_gap == 1 else "year_bin",
    }
    if not dated:
        return AnalysisResult("publications_series", [mode], [], "year", meta)
    starts, label = year_bins([r.year for r in dated], year_gap)
    counts = {s: 0 for s in starts}
    lo = starts[0]
    for r in dated:
        counts[lo + ((r.year - lo) // year_gap) * year_gap] += 1
    rows = []
    running = 0
    total = len(dated)
    for s in starts:
        running += counts[s]
        if mode == "total":
            rows.append((label(s), counts[s]))
        elif mode == "cumulative":
            rows.append((label(s), running))
        else:
            rows.append((label(s), counts[s] / total))
    meta["rebin"] = "last" if mode == "cumulative" else "sum"
    return AnalysisResult("publications_series", [mode], rows, "year", meta)


def citations_series(corpus: Corpus, mode: str = "total") -> AnalysisResult:
    """Citation statistics grouped by publication year. total/cumulative/
    proportion fill empty years with zero; average/median/yearwise
    distribution only cover years that have papers."""
    modes = ("total", "average", "cumulative", "proportion", "median", "yearwise_distribution")
    if mode not in modes:
        raise ValueError(f"unknown mode {mode!r}")
    dated = corpus.dated_records()
    meta = {
        "mode": mode,
        "records_without_year": len(corpus) - len(dated),
        "label_kind": "year",
    }
    kind = "citations_distribution" if mode == "yearwise_distribution" else "citations_series"
    if not dated:
        return AnalysisResult(kind, [mode], [], "year", meta)

    per_year = {}
    for r in dated:
        per_year.setdefault(r.year, []).append(r.citations)
    grand_total = sum(sum(v) for v in per_year.values())
    lo, hi = min(per_year), max(per_year)

    rows = []
    if mode in ("total", "cumulative", "proportion"):
        if mode == "proportion":
            meta["denominator"] = "all_citations"
            if grand_total == 0:
                meta["warning"] = "corpus has zero citations; proportions are all zero"
        running = 0
        for y in range(lo, hi + 1):
            total = sum(per_year.get(y, []))
            running += total
            if mode == "total":
                rows.append((str(y), total))
            elif mode == "cumulative":
                rows.append((str(y), running))
            else:
                rows.append((str(y), total / grand_total if grand_total else 0.0))
        meta["rebin"] = "last" if mode == "cumulative" else "sum"
    elif mode == "average":
        meta["rebin"] = "mean"
        for y in sorted(per_year):
            values = per_year[y]
            rows.append((str(y), sum(values) / len(values)))
    elif mode == "median":
        meta["rebin"] = "mean"
        for y in sorted(per_year):
            rows.append((str(y), _median(per_year[y])))
    else:
        meta["list_valued"] = True
        for y in sorted(per_year):
            rows.append((str(y), [float(c) for c in sorted(per_year[y])]))
    return AnalysisResult(kind, [mode if mode != "yearwise_distribution" else "citations"],
                          rows, "year", meta)


def _median(values) -> float:
    s = sorted(values)
    n = len(s)
    mid = n // 2
    return float(s[mid]) if n % 2 else (s[mid - 1] + s[mid]) / 2


def doc_type_analysis(corpus: Corpus, mode: str = "total") -> AnalysisResult:
    """Document-type breakdowns. Empty types map to Unspecified; decades
    are floor(year/10)*10."""
    if mode == "total":
        counts = {}
        for r in corpus:
            counts[r.doc_type or UNSPECIFIED] = counts.get(r.doc_type or UNSPECIFIED, 0) + 1
        return AnalysisResult("doc_type_counts", ["count"], top_sorted(counts),
                              "doc_type", {"mode": mode})
    if mode in ("yearwise", "decadewise"):
        dated = corpus.dated_records()
        types = sorted({r.doc_type or UNSPECIFIED for r in dated})
        cells = {}
        for r in dated:
            period = r.year if mode == "yearwise" else (r.year // 10) * 10
            key = (period, r.doc_type or UNSPECIFIED)
            cells[key] = cells.get(key, 0) + 1
        periods = sorted({p for p, _ in cells})
        rows = [(str(p), *[cells.get((p, t), 0) for t in types]) for p in periods]
        kind = "doc_type_yearwise" if mode == "yearwise" else "doc_type_decadewise"
        return AnalysisResult(kind, types, rows, "year" if mode == "yearwise" else "decade",
                              {"mode": mode, "records_without_year": len(corpus) - len(dated),
                               "label_kind": "year" if mode == "yearwise" else "decade"})
    if mode == "vs_citations":
        groups = {}
        for r in corpus:
            groups.setdefault(r.doc_type or UNSPECIFIED, []).append(float(r.citations))
        rows = [(t, sorted(groups[t])) for t in sorted(groups)]
        return AnalysisResult("doc_type_citations", ["citations"], rows, "doc_type",
                              {"mode": mode, "list_valued": True})
    raise ValueError(f"unknown mode {mode!r}")


def load_scimago(data: bytes) -> QuartileIndex:
    """Parse a Scimago journal-rank CSV (semicolon-delimited). Multi-ISSN
    cells split on comma; a journal's quartile is the best one listed;
    quartile '-' rows are skipped."""
    text = data.decode("utf-8-sig", errors="replace")
    reader = csv.reader(io.StringIO(text), delimiter=";")
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedScimagoFile("empty file") from None
    lower = [h.strip().lower() for h in header]
    try:
        issn_i = lower.index("issn")
        quart_i = lower.index("sjr best quartile")
    except ValueError:
        raise MalformedScimagoFile(
            "required columns missing (need Issn and SJR Best Quartile)"
        ) from None
    year_i = lower.index("year") if "year" in lower else None

    entries = {}
    source_year = 0
    for row in reader:
        if len(row) <= max(issn_i, quart_i):
            continue
        quartile = row[quart_i].strip().upper()
        if quartile not in QUARTILES:
            continue
        if year_i is not None and row[year_i].strip().isdigit():
            source_year = max(source_year, int(row[year_i]))
        for token in row[issn_i].split(","):
            issn = normalize_issn(token.strip().strip('"'))
            if not issn:
                continue
            old = entries.get(issn)
            if old is None or quartile < old:
                entries[issn] = quartile
    return QuartileIndex(entries=entries, source_year=source_year)


def journal_analysis(corpus: Corpus, index: QuartileIndex | None = None,
                     mode: str = "top_journals", quartile: str | None = None,
                     top_n: int = 10) -> AnalysisResult:
    """Journal rankings and Scimago-quartile breakdowns. A record's quartile
    comes from its first ISSN found in the index, else Unranked."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    quartile_modes = ("quartile_counts", "quartile_yearly", "top_in_quartile")
    if mode in quartile_modes and index is None:
        raise MissingQuartileIndex(f"mode {mode!r} needs a Scimago quartile index")

    if mode == "top_journals":
        counts = {}
        for r in corpus:
            counts[r.source_title or UNSPECIFIED] = counts.get(r.source_title or UNSPECIFIED, 0) + 1
        return AnalysisResult("journal_top", ["count"], top_sorted(counts)[:top_n],
                              "journal", {"mode": mode, "top_n": top_n})

    if mode == "journals_per_publisher":
        journals = {}
        for r in corpus:
            journals.setdefault(r.publisher or UNSPECIFIED, set()).add(
                r.source_title or UNSPECIFIED)
        counts = {p: len(js) for p, js in journals.items()}
        return AnalysisResult("journals_per_publisher", ["journals"],
                              top_sorted(counts)[:top_n], "publisher",
                              {"mode": mode, "top_n": top_n})

    if mode == "quartile_counts":
        counts = {q: 0 for q in QUARTILES + (UNRANKED,)}
        for r in corpus:
            counts[index.lookup(r)] += 1
        rows = [(q, counts[q]) for q in QUARTILES + (UNRANKED,)]
        return AnalysisResult("journal_quartile_counts", ["count"], rows, "quartile",
                              {"mode": mode, "scimago_year": index.source_year})

    if mode == "quartile_yearly":
        dated = corpus.dated_records()
        cells = {}
        for r in dated:
            cells[(r.year, index.lookup(r))] = cells.get((r.year, index.lookup(r)), 0) + 1
        years = sorted({y for y, _ in cells})
        cols = list(QUARTILES + (UNRANKED,))
        rows = [(str(y), *[cells.get((y, q), 0) for q in cols]) for y in years]
        return AnalysisResult("journal_quartile_yearly", cols, rows, "year",
                              {"mode": mode, "label_kind": "year",
                               "records_without_year": len(corpus) - len(dated)})

    if mode == "top_in_quartile":
        if quartile not in QUARTILES:
            raise ValueError(f"quartile must be one of {QUARTILES}, got {quartile!r}")
        counts = {}
        for r in corpus:
            if index.lookup(r) == quartile:
                counts[r.source_title or UNSPECIFIED] = counts.get(
                    r.source_title or UNSPECIFIED, 0) + 1
        return AnalysisResult("journal_top_in_quartile", ["count"],
                              top_sorted(counts)[:top_n], "journal",
                              {"mode": mode, "quartile": quartile, "top_n": top_n})

    raise ValueError(f"unknown mode {mode!r}")


_CATEGORY_FIELDS = {"publisher": "publisher", "open_access": "open_access",
                    "language": "language"}
_CATEGORY_KINDS = {"publisher": "publisher", "open_access": "open_access",
                   "language": "language"}


def categorical_counts(corpus: Corpus, field: str, vs_citations: bool = False) -> AnalysisResult:
    """Counts (or per-category citation distributions) for publisher, open
    access, or language. Empty category cells map to Unspecified."""
    if field not in _CATEGORY_FIELDS:
        raise ValueError(f"field must be one of {sorted(_CATEGORY_FIELDS)}")
    attr = _CATEGORY_FIELDS[field]
    if vs_citations:
        if field == "language":
            raise ValueError("vs_citations applies to publisher and open_access only")
        groups = {}
        for r in corpus:
            groups.setdefault(getattr(r, attr) or UNSPECIFIED, []).append(float(r.citations))
        rows = [(c, sorted(groups[c])) for c in sorted(groups)]
        return AnalysisResult(f"{_CATEGORY_KINDS[field]}_citations", ["citations"], rows,
                              field, {"field": field, "list_valued": True})
    counts = {}
    for r in corpus:
        key = getattr(r, attr) or UNSPECIFIED
        counts[key] = counts.get(key, 0) + 1
    return AnalysisResult(f"{_CATEGORY_KINDS[field]}_counts", ["count"],
                          top_sorted(counts), field, {"field": field})
