import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scholarmetrics import (
    apply_mapping,
    corpus_from_csv,
    corpus_to_csv,
    infer_field_mapping,
    merge_and_dedup,
    parse_delimited,
)
from scholarmetrics.corpus import Record
from scholarmetrics.errors import (
    EmptyInput,
    MappingRejected,
    MissingMandatoryField,
    NoHeaderRow,
    UndecodableBytes,
)
from scholarmetrics.ingest import DEFAULT_DELIMITERS, FieldMapping, RawTable, serialize_table

from conftest import T5_HEADERS, T5_ROWS, build_t5_corpus, rows_to_csv_bytes


# ---------------------------------------------------------------------------
# parse_delimited

def test_minimal_csv():
    table = parse_delimited(b"a,b\n1,2", "generic_csv", "x")
    assert table.headers == ("a", "b")
    assert table.rows == (("1", "2"),)


def test_rfc4180_quoted_comma():
    table = parse_delimited(b'a,b\n"x, y",2', "scopus", "x")
    assert table.rows[0][0] == "x, y"


def test_bom_tolerated():
    table = parse_delimited("﻿a,b\n1,2".encode("utf-8"), "scopus", "x")
    assert table.headers == ("a", "b")


def test_undecodable_bytes():
    with pytest.raises(UndecodableBytes):
        parse_delimited(b"\xff\xfe\x99a,b", "scopus", "x")


def test_no_header_row():
    with pytest.raises(NoHeaderRow):
        parse_delimited(b"", "scopus", "x")
    with pytest.raises(NoHeaderRow):
        parse_delimited(b",,\n1,2,3", "scopus", "x")


def test_short_rows_padded_long_rows_truncated():
    table = parse_delimited(b"a,b,c\n1\n1,2,3,4", "generic_csv", "x")
    assert table.rows[0] == ("1", "", "")
    assert table.rows[1] == ("1", "2", "3")


def test_duplicate_headers_suffixed():
    table = parse_delimited(b"a, a ,a\n1,2,3", "generic_csv", "x")
    assert table.headers == ("a", "a.2", "a.3")


def test_wos_tagged_single_record():
    text = b"FN Clarivate\nVR 1.0\nPT J\nAU Smith, J\nTI A tiny paper\nPY 2020\nER\nEF\n"
    table = parse_delimited(text, "wos", "w")
    assert len(table.rows) == 1
    assert "AU" in table.headers and "PY" in table.headers
    row = dict(zip(table.headers, table.rows[0]))
    assert row["AU"] == "Smith, J"
    assert row["PY"] == "2020"


def test_wos_tagged_multiline_authors_and_title():
    text = (b"PT J\nAU Smith, J\n   Lee, K\nTI A very long title that\n"
            b"   wraps onto another line\nPY 2021\nER\n")
    table = parse_delimited(text, "wos", "w")
    row = dict(zip(table.headers, table.rows[0]))
    assert row["AU"] == "Smith, J; Lee, K"
    assert row["TI"] == "A very long title that wraps onto another line"


def test_wos_tab_separated():
    text = b"PT\tAU\tPY\nJ\tSmith, J\t2020\n"
    table = parse_delimited(text, "wos", "w")
    assert table.headers == ("PT", "AU", "PY")
    assert table.rows[0] == ("J", "Smith, J", "2020")


def test_serialize_parse_round_trip(t5_csv):
    table = parse_delimited(t5_csv, "scopus", "t5")
    again = parse_delimited(serialize_table(table), "scopus", "t5")
    assert again == table


# ---------------------------------------------------------------------------
# infer_field_mapping

def test_infer_exact_synonyms():
    table = RawTable(("Authors", "Year", "Cited by"), (), "x", "scopus")
    mapping = infer_field_mapping(table)
    assert mapping.assignments["authors"] == "Authors"
    assert mapping.assignments["year"] == "Year"
    assert mapping.assignments["citations"] == "Cited by"
    assert mapping.assignments["title"] is None


def test_infer_wos_tags():
    table = RawTable(("PY", "AU", "SO"), (), "x", "wos")
    mapping = infer_field_mapping(table)
    assert mapping.assignments["year"] == "PY"
    assert mapping.assignments["authors"] == "AU"
    assert mapping.assignments["source_title"] == "SO"


def test_infer_wos_tags_inactive_for_csv():
    table = RawTable(("PY", "AU", "SO"), (), "x", "generic_csv")
    mapping = infer_field_mapping(table)
    assert all(v is None for v in mapping.assignments.values())


def test_infer_no_synonyms_all_absent():
    table = RawTable(("colA", "colB"), (), "x", "scopus")
    mapping = infer_field_mapping(table)
    assert all(v is None for v in mapping.assignments.values())


def test_default_delimiters():
    for kind, delim in DEFAULT_DELIMITERS.items():
        table = RawTable(("Title",), (), "x", kind)
        assert infer_field_mapping(table).delimiter_for("authors") == delim


# ---------------------------------------------------------------------------
# apply_mapping

def _tiny_table(rows, headers=("Title", "Authors", "Year", "Cited by")):
    return RawTable(tuple(headers), tuple(tuple(r) for r in rows), "tiny", "scopus")


def _tiny_records(rows, **kwargs):
    table = _tiny_table(rows, **kwargs)
    return apply_mapping(table, infer_field_mapping(table))


def test_author_split_and_trim():
    records = _tiny_records([["T", "Smith J.; Lee K.", "2020", "1"]])
    assert records[0].authors == ("Smith J.", "Lee K.")


def test_empty_citations_default_zero():
    records = _tiny_records([["T", "A", "2020", ""]])
    assert records[0].citations == 0


def test_unparsable_year_absent_record_kept():
    # one bad cell among many good ones: the 90% rate rule passes and the
    # bad row keeps its record with year absent
    rows = [["T", "A", "2020", "1"]] * 9 + [["T", "A", "n/a", "3"]]
    records = _tiny_records(rows)
    assert records[-1].year is None
    assert records[-1].citations == 3


def test_year_window_guard():
    records = _tiny_records([["T", "A", "987", "0"], ["T2", "A", "2500", "0"]])
    assert records[0].year is None and records[1].year is None


def test_keywords_lowercased():
    headers = ("Title", "Author Keywords")
    records = _tiny_records([["T", "ml; ML; NLP"]], headers=headers)
    assert records[0].author_keywords == ("ml", "ml", "nlp")


def test_mapping_rejected_on_bad_year_column():
    rows = [["T", "A", "bad", "1"]] * 9 + [["T", "A", "2020", "1"]]
    with pytest.raises(MappingRejected):
        _tiny_records(rows)


def test_mapping_accepted_at_90_percent():
    rows = [["T", "A", "2020", "1"]] * 9 + [["T", "A", "bad", "1"]]
    records = _tiny_records(rows)
    assert len(records) == 10
    assert records[-1].year is None


def test_missing_mandatory_field():
    table = RawTable(("Authors",), (("A",),), "x", "scopus")
    with pytest.raises(MissingMandatoryField):
        apply_mapping(table, infer_field_mapping(table))


def test_mapping_rejects_unknown_column():
    table = RawTable(("Title",), (("T",),), "x", "scopus")
    mapping = FieldMapping(assignments={"title": "Nope"})
    with pytest.raises(MappingRejected):
        apply_mapping(table, mapping)


def test_mapping_rejects_double_assignment():
    with pytest.raises(MappingRejected):
        FieldMapping(assignments={"title": "A", "abstract": "A"})


def test_countries_from_affiliations(t5):
    assert t5[0].countries == ("India", "Singapore")
    assert t5[3].countries == ("Singapore", "India", "United States")


def test_unmatched_affiliation_tail_unknown():
    headers = ("Title", "Affiliations")
    records = _tiny_records([["T", "Lab 1, Atlantis"]], headers=headers)
    assert records[0].countries == ("Unknown",)


def test_issn_normalized():
    headers = ("Title", "ISSN")
    records = _tiny_records([["T", "1111-2222; 333x"]], headers=headers)
    assert records[0].issn == ("11112222",)


# ---------------------------------------------------------------------------
# merge_and_dedup

def _record(i, title="Paper", year=2020, doi=None, citations=0, **kwargs):
    return Record(id=f"r#{i}", title=title, year=year, doi=doi,
                  citations=citations, **kwargs)


def test_doi_case_insensitive_duplicate():
    a = _record(0, doi="10.1000/abc")
    b = _record(1, title="Other Title", doi="10.1000/ABC".lower())
    corpus, report = merge_and_dedup([[a], [b]])
    assert len(corpus) == 1
    assert report.duplicate_groups[0][2] == "doi"


def test_doi_prefix_stripped_at_ingest():
    headers = ("Title", "DOI")
    table = RawTable(headers, (("T", "https://doi.org/10.1/X"),), "x", "scopus")
    records = apply_mapping(table, infer_field_mapping(table))
    assert records[0].doi == "10.1/x"


def test_title_year_normalized_duplicate():
    a = _record(0, title="Graph Mining", year=2020)
    b = _record(1, title="graph mining!", year=2020)
    corpus, report = merge_and_dedup([[a, b]])
    assert len(corpus) == 1
    assert report.duplicate_groups[0][2] == "title_year"


def test_different_year_not_duplicate():
    a = _record(0, title="Graph Mining", year=2020)
    b = _record(1, title="Graph Mining", year=2021)
    corpus, _ = merge_and_dedup([[a, b]])
    assert len(corpus) == 2


def test_distinct_dois_not_merged_despite_title():
    a = _record(0, doi="10.1/a")
    b = _record(1, doi="10.1/b")
    corpus, _ = merge_and_dedup([[a, b]])
    assert len(corpus) == 2


def test_three_files_cross_duplicates():
    # 4 + 3 + 3 records, two cross-file duplicates -> 8 kept of 10
    f1 = [_record(i, title=f"P{i}", doi=f"10.1/{i}") for i in range(4)]
    f2 = [_record(10 + i, title=f"Q{i}", doi=f"10.2/{i}") for i in range(2)]
    f2.append(_record(12, title="P0 again", doi="10.1/0"))
    f3 = [_record(20, title="R0", doi="10.3/0"),
          _record(21, title="p1", year=2020, doi=None),
          _record(22, title="R2", doi="10.3/2")]
    # f3[1] duplicates f1[1] (title "P1" normalized, same year, f1 has doi, f3 not)
    f1[1] = _record(1, title="P1", doi=None)
    corpus, report = merge_and_dedup([f1, f2, f3])
    assert report.input_count == 10
    assert report.kept == len(corpus) == 8
    assert len(report.duplicate_groups) == 2


def test_kept_record_most_complete_then_citations():
    sparse = _record(0, doi="10.1/x", citations=9)
    rich = Record(id="r#1", title="Paper", year=2020, doi="10.1/x", citations=2,
                  authors=("A",), source_title="J", publisher="P")
    corpus, report = merge_and_dedup([[sparse, rich]])
    kept = corpus[0]
    assert kept.id == "r#1"                 # richer record wins
    assert kept.citations == 9              # max citations over the group
    assert report.duplicate_groups[0][0] == "r#1"
    assert report.duplicate_groups[0][1] == ("r#0",)


def test_tie_broken_by_citations_then_order():
    a = _record(0, doi="10.1/x", citations=1)
    b = _record(1, doi="10.1/x", citations=5)
    corpus, _ = merge_and_dedup([[a, b]])
    assert corpus[0].id == "r#1"
    c = _record(0, doi="10.1/x", citations=5)
    d = _record(1, doi="10.1/x", citations=5)
    corpus, _ = merge_and_dedup([[c, d]])
    assert corpus[0].id == "r#0"            # earlier input wins exact ties


def test_empty_input():
    with pytest.raises(EmptyInput):
        merge_and_dedup([])
    with pytest.raises(EmptyInput):
        merge_and_dedup([[], []])


def test_report_accounting(t5_csv):
    corpus = build_t5_corpus(t5_csv)
    again, report = merge_and_dedup([list(corpus.records)])
    assert report.kept + sum(len(d) for _, d, _ in report.duplicate_groups) \
        == report.input_count


def test_idempotent(t5_csv):
    corpus = build_t5_corpus(t5_csv)
    again, report = merge_and_dedup([list(corpus.records)])
    assert again == corpus
    assert report.duplicate_groups == ()


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(6)))
def test_permutation_invariant_count(perm):
    pool = [
        _record(0, title="Alpha", doi="10.1/a", citations=3),
        _record(1, title="ALPHA!", year=2020, doi=None),
        _record(2, title="Beta", doi="10.1/b"),
        _record(3, title="Gamma", doi=None, year=2021),
        _record(4, title="beta", year=2020, doi="10.1/b"),
        _record(5, title="Gamma", doi=None, year=2021, citations=2),
    ]
    base_count = len(merge_and_dedup([pool])[0])
    shuffled = [pool[i] for i in perm]
    assert len(merge_and_dedup([shuffled])[0]) == base_count


# ---------------------------------------------------------------------------
# corpus CSV round-trip

def test_corpus_csv_round_trip(t5):
    data = corpus_to_csv(t5)
    again = corpus_from_csv(data)
    assert again == t5
    assert corpus_to_csv(again) == data     # byte-stable


def test_record_invariants(t5, syn50):
    for corpus in (t5, syn50):
        for r in corpus:
            assert r.citations >= 0
            assert r.year is None or 1500 <= r.year <= 2100
            assert all(kw == kw.lower().strip() for kw in r.keywords())
