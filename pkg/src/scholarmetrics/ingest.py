"""Parse bibliographic export files, infer field mappings, and merge
multiple files into one deduplicated corpus.

Supported inputs: Scopus CSV (RFC 4180), generic CSV, Web of Science
tab-separated or field-tagged plain text. Output: canonical corpus CSV plus
a JSON dedup report.
"""

import csv
import io
import json
import re
from dataclasses import dataclass, field, replace

from . import _data
from .corpus import (
    CANONICAL_FIELDS,
    MULTI_VALUE_FIELDS,
    UNKNOWN_COUNTRY,
    YEAR_MAX,
    YEAR_MIN,
    Corpus,
    Record,
    normalize_doi,
    normalize_issn,
    normalize_title_key,
)
from .errors import (
    EmptyInput,
    MappingRejected,
    MissingMandatoryField,
    NoHeaderRow,
    UndecodableBytes,
)

SOURCE_KINDS = ("scopus", "wos", "generic_csv")

ABSENT = None

# Default multi-value delimiters per source kind. Scopus joins with
# semicolon+space; bare generic CSVs usually use a bare semicolon.
DEFAULT_DELIMITERS = {"scopus": "; ", "wos": "; ", "generic_csv": ";"}

# WoS tags whose continuation lines are list items, not wrapped prose.
_WOS_LIST_TAGS = {"AU", "AF", "BA", "BE", "CR", "C1", "C3", "EM", "RI", "OI"}

_WS_RE = re.compile(r"\s+")
_YEAR_PARSE_RATE = 0.90


@dataclass(frozen=True)
class RawTable:
    headers: tuple
    rows: tuple                 # tuple of row tuples, all len(headers) wide
    source_label: str
    source_kind: str

    def __len__(self):
        return len(self.rows)


@dataclass
class FieldMapping:
    """Canonical field -> source column assignment plus per-field
    multi-value delimiters."""

    assignments: dict = field(default_factory=dict)   # canonical -> column or None
    delimiters: dict = field(default_factory=dict)    # canonical -> split string

    def __post_init__(self):
        for name in CANONICAL_FIELDS:
            self.assignments.setdefault(name, ABSENT)
        used = [c for c in self.assignments.values() if c is not None]
        if len(used) != len(set(used)):
            raise MappingRejected("a source column is assigned to more than one field")

    def delimiter_for(self, fieldname: str) -> str:
        return self.delimiters.get(fieldname, ";")

    def to_dict(self) -> dict:
        return {"assignments": dict(self.assignments), "delimiters": dict(self.delimiters)}

    @classmethod
    def from_dict(cls, d: dict) -> "FieldMapping":
        return cls(assignments=dict(d.get("assignments", {})),
                   delimiters=dict(d.get("delimiters", {})))


@dataclass(frozen=True)
class DedupReport:
    input_count: int
    kept: int
    duplicate_groups: tuple     # (kept_id, (dropped_ids...), match_basis)

    def to_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "kept": self.kept,
            "duplicate_groups": [
                {"kept": kept, "dropped": list(dropped), "match_basis": basis}
                for kept, dropped, basis in self.duplicate_groups
            ],
        }


# ---------------------------------------------------------------------------
# parsing

def parse_delimited(data: bytes, source_kind: str, source_label: str = "") -> RawTable:
    """Parse CSV/TSV/WoS-tagged bytes into a rectangular table.

    UTF-8 with optional BOM. WoS input is sniffed: a tab in the first line
    means tab-separated, otherwise the field-tagged layout is assumed and
    each record (ending at ER) becomes one row with tags as headers.
    """
    if source_kind not in SOURCE_KINDS:
        raise ValueError(f"unknown source kind {source_kind!r}")
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise UndecodableBytes(f"{source_label or 'input'}: not valid UTF-8 ({e})") from None

    if source_kind == "wos":
        first = next((ln for ln in text.splitlines() if ln.strip()), "")
        if "\t" in first:
            headers, rows = _parse_csv_text(text, "\t", source_label)
        else:
            headers, rows = _parse_wos_tagged(text, source_label)
    else:
        headers, rows = _parse_csv_text(text, ",", source_label)

    headers = _unique_headers(headers)
    width = len(headers)
    fixed = []
    for row in rows:
        row = list(row[:width])             # overlong rows: overflow truncated
        row += [""] * (width - len(row))
        fixed.append(tuple(row))
    return RawTable(headers=tuple(headers), rows=tuple(fixed),
                    source_label=source_label, source_kind=source_kind)


def _parse_csv_text(text: str, delimiter: str, source_label: str):
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    rows = [row for row in reader]
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()                          # trailing blank lines
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise NoHeaderRow(f"{source_label or 'input'}: first row empty or all blank")
    return rows[0], rows[1:]


def _parse_wos_tagged(text: str, source_label: str):
    """Field-tagged WoS plain text: two-letter tags, indented continuation
    lines, records closed by ER. FN/VR/EF are file-level and skipped."""
    records = []
    current = {}
    order = []                              # headers in first-appearance order
    tag = None
    for line in text.splitlines():
        if not line.strip():
            continue
        head, rest = line[:2], line[3:] if len(line) > 3 else ""
        if head == "ER":
            if current:
                records.append(current)
            current, tag = {}, None
            continue
        if head in ("FN", "VR", "EF"):
            tag = None
            continue
        if head.strip() and not line.startswith(" "):
            tag = head
            if tag not in order:
                order.append(tag)
            current.setdefault(tag, []).append(rest.strip())
        elif tag is not None:
            current[tag].append(line.strip())
    if current:
        records.append(current)
    if not records:
        raise NoHeaderRow(f"{source_label or 'input'}: no tagged records found")

    rows = []
    for rec in records:
        row = []
        for tag in order:
            parts = rec.get(tag, [])
            joiner = "; " if tag in _WOS_LIST_TAGS else " "
            row.append(joiner.join(p for p in parts if p))
        rows.append(row)
    return order, rows


def _unique_headers(headers):
    out, seen, counts = [], set(), {}
    for h in headers:
        base = _WS_RE.sub(" ", str(h)).strip()
        name = base
        while name in seen:
            counts[base] = counts.get(base, 1) + 1
            name = f"{base}.{counts[base]}"
        seen.add(name)
        out.append(name)
    return out


def serialize_table(table: RawTable) -> bytes:
    """RawTable back to RFC-4180 CSV; parse_delimited inverts this."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.headers)
    writer.writerows(table.rows)
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# field mapping

def infer_field_mapping(table: RawTable) -> FieldMapping:
    """Assign canonical fields by case-insensitive header synonym lookup.
    Unmatched fields stay absent; validation happens in apply_mapping."""
    synonyms = _data.field_synonyms(table.source_kind)
    assignments = {}
    for column in table.headers:
        fieldname = synonyms.get(_WS_RE.sub(" ", column).strip().lower())
        if fieldname and fieldname not in assignments:
            assignments[fieldname] = column
    default = DEFAULT_DELIMITERS[table.source_kind]
    delimiters = {name: default for name in MULTI_VALUE_FIELDS}
    return FieldMapping(assignments=assignments, delimiters=delimiters)


def apply_mapping(table: RawTable, mapping: FieldMapping) -> list:
    """Turn each row into a Record. Raises MissingMandatoryField when the
    mapping has neither title nor doi, and MappingRejected when assigned
    year/citations columns parse as integers for <90% of non-empty cells."""
    if mapping.assignments.get("title") is ABSENT and mapping.assignments.get("doi") is ABSENT:
        raise MissingMandatoryField("mapping assigns neither title nor doi")

    index = {h: i for i, h in enumerate(table.headers)}
    for fieldname, column in mapping.assignments.items():
        if column is not None and column not in index:
            raise MappingRejected(f"{fieldname}: column {column!r} not in table")

    _check_integer_rate(table, mapping, index, "year")
    _check_integer_rate(table, mapping, index, "citations")

    records = []
    for i, row in enumerate(table.rows):
        records.append(_row_to_record(row, i, table, mapping, index))
    return records


def _check_integer_rate(table, mapping, index, fieldname):
    column = mapping.assignments.get(fieldname)
    if column is None or not table.rows:
        return
    col_i = index[column]
    nonempty = parsed = 0
    for row in table.rows:
        cell = row[col_i].strip()
        if not cell:
            continue
        nonempty += 1
        if _parse_int(cell) is not None:
            parsed += 1
    if nonempty and parsed / nonempty < _YEAR_PARSE_RATE:
        raise MappingRejected(
            f"{fieldname} column {column!r}: only {parsed}/{nonempty} cells parse as integers"
        )


def _parse_int(cell: str):
    cell = cell.strip().replace(",", "")
    try:
        return int(cell)
    except ValueError:
        return None


def _row_to_record(row, row_index, table, mapping, index) -> Record:
    def cell(fieldname) -> str:
        column = mapping.assignments.get(fieldname)
        return row[index[column]].strip() if column is not None else ""

    def multi(fieldname) -> tuple:
        raw = cell(fieldname)
        if not raw:
            return ()
        parts = [p.strip() for p in raw.split(mapping.delimiter_for(fieldname))]
        return tuple(p for p in parts if p)

    year = _parse_int(cell("year"))
    if year is not None and not (YEAR_MIN <= year <= YEAR_MAX):
        year = None                          # column-shift garbage guard

    citations = _parse_int(cell("citations"))
    if citations is None or citations < 0:
        citations = 0

    issn = tuple(n for n in (normalize_issn(v) for v in multi("issn")) if n)
    affiliations = multi("affiliations")
    explicit = multi("countries")
    if explicit:
        countries = tuple(canonical_country(c) or c for c in explicit)
    else:
        countries = extract_countries(affiliations)

    return Record(
        id=f"{table.source_label or table.source_kind}#{row_index}",
        title=cell("title"),
        authors=multi("authors"),
        author_ids=multi("author_ids"),
        affiliations=affiliations,
        countries=countries,
        year=year,
        source_title=cell("source_title"),
        issn=issn,
        doi=normalize_doi(cell("doi")),
        citations=citations,
        doc_type=cell("doc_type"),
        publisher=cell("publisher"),
        open_access=cell("open_access"),
        language=cell("language"),
        author_keywords=tuple(k.lower() for k in multi("author_keywords")),
        index_keywords=tuple(k.lower() for k in multi("index_keywords")),
        abstract=cell("abstract"),
        funding=multi("funding"),
        source_label=table.source_label,
    )


def canonical_country(token: str) -> str | None:
    aliases = _data.country_aliases()
    t = token.strip().lower()
    return aliases.get(t) or aliases.get(t.rstrip("."))


def extract_countries(affiliations) -> tuple:
    """Country per affiliation: the last comma-separated token matched
    against the bundled ISO-3166 alias list; unmatched come back Unknown."""
    out = []
    for aff in affiliations:
        tail = aff.rsplit(",", 1)[-1]
        out.append(canonical_country(tail) or UNKNOWN_COUNTRY)
    return tuple(out)


# ---------------------------------------------------------------------------
# merge + dedup

def merge_and_dedup(record_lists) -> tuple:
    """Merge record lists into one deduplicated Corpus plus a DedupReport.

    Two records are duplicates when their normalized DOIs are equal (both
    present), or failing that when their normalized titles and years are
    equal. Within a group the record with the most non-absent fields wins,
    ties broken by higher citations then earlier input position; the kept
    record inherits the group's maximum citation count.
    """
    record_lists = list(record_lists)
    flat = [r for lst in record_lists for r in lst]
    if not flat:
        raise EmptyInput("merge_and_dedup needs at least one nonempty record list")

    parent = list(range(len(flat)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    by_doi = {}
    for i, r in enumerate(flat):
        if r.doi:
            by_doi.setdefault(r.doi, []).append(i)
    for group in by_doi.values():
        for j in group[1:]:
            union(group[0], j)

    # Title+year applies only to pairs where at least one side lacks a DOI;
    # records with distinct DOIs are different papers even if titles match.
    by_title = {}
    for i, r in enumerate(flat):
        key = (normalize_title_key(r.title), r.year)
        if key[0]:
            by_title.setdefault(key, []).append(i)
    for group in by_title.values():
        without_doi = [i for i in group if not flat[i].doi]
        if not without_doi:
            continue                        # all carry DOIs: DOI evidence decides
        anchor = without_doi[0]
        for i in group:
            union(anchor, i)

    groups = {}
    for i in range(len(flat)):
        groups.setdefault(find(i), []).append(i)

    kept_records = []
    duplicate_groups = []
    for root in sorted(groups):
        members = groups[root]
        best = min(members, key=lambda i: (-flat[i].completeness(), -flat[i].citations, i))
        kept = flat[best]
        max_citations = max(flat[i].citations for i in members)
        if max_citations != kept.citations:
            kept = replace(kept, citations=max_citations)
        kept_records.append((best, kept))
        if len(members) > 1:
            dois = {flat[i].doi for i in members}
            basis = "doi" if (None not in dois and len(dois) == 1) else "title_year"
            dropped = tuple(flat[i].id for i in members if i != best)
            duplicate_groups.append((kept.id, dropped, basis))

    kept_records.sort(key=lambda pair: pair[0])       # stable input order
    corpus = Corpus(rec for _, rec in kept_records)
    report = DedupReport(
        input_count=len(flat),
        kept=len(corpus),
        duplicate_groups=tuple(duplicate_groups),
    )
    return corpus, report


# ---------------------------------------------------------------------------
# corpus CSV round-trip

_CORPUS_COLUMNS = ("id",) + CANONICAL_FIELDS + ("source_label",)
_JOIN = "; "


def corpus_to_csv(corpus: Corpus) -> bytes:
    """Canonical corpus CSV: one column per canonical field, multi-values
    re-joined with '; '. corpus_from_csv inverts this byte-stably."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(_CORPUS_COLUMNS)
    for r in corpus:
        row = []
        for name in _CORPUS_COLUMNS:
            v = getattr(r, name)
            if isinstance(v, tuple):
                row.append(_JOIN.join(v))
            elif v is None:
                row.append("")
            else:
                row.append(str(v))
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def corpus_from_csv(data: bytes) -> Corpus:
    text = data.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or tuple(rows[0]) != _CORPUS_COLUMNS:
        raise EmptyInput("not a canonical corpus CSV")
    records = []
    for row in rows[1:]:
        d = dict(zip(_CORPUS_COLUMNS, row))
        kwargs = {"id": d["id"], "source_label": d["source_label"]}
        for name in CANONICAL_FIELDS:
            raw = d[name]
            if name in MULTI_VALUE_FIELDS:
                kwargs[name] = tuple(p for p in raw.split(_JOIN) if p) if raw else ()
            elif name == "year":
                kwargs[name] = int(raw) if raw else None
            elif name == "citations":
                kwargs[name] = int(raw) if raw else 0
            elif name == "doi":
                kwargs[name] = raw or None
            else:
                kwargs[name] = raw
        records.append(Record(**kwargs))
    return Corpus(records)
