import copy
import xml.etree.ElementTree as ET

import pytest

from scholarmetrics import bibtrail, colabrix, scitrace, themantix
from scholarmetrics._data import chart_compatibility
from scholarmetrics.errors import IncompatibleChartType, InvalidOptions
from scholarmetrics.result import AnalysisResult
from scholarmetrics.scitrace import TableGenderProvider
from scholarmetrics.viz import (
    ChartOptions,
    ChartSpec,
    build_chart_spec,
    export_csv,
    render_svg,
    result_from_csv,
)

from conftest import make_gn6


def sample_results(t5, sci3):
    """One representative AnalysisResult per chartable kind."""
    index = bibtrail.load_scimago(sci3)
    gender = TableGenderProvider()
    gn6 = make_gn6()
    partition = colabrix.detect_communities(gn6, "leiden", seed=1)
    degree = colabrix.centrality(gn6, "degree")
    separable = __import__("test_themantix").__dict__["_separable_corpus"]()
    results = [
        bibtrail.publications_series(t5, "total"),
        bibtrail.citations_series(t5, "total"),
        bibtrail.citations_series(t5, "yearwise_distribution"),
        bibtrail.doc_type_analysis(t5, "total"),
        bibtrail.doc_type_analysis(t5, "yearwise"),
        bibtrail.doc_type_analysis(t5, "decadewise"),
        bibtrail.doc_type_analysis(t5, "vs_citations"),
        bibtrail.journal_analysis(t5, mode="top_journals"),
        bibtrail.journal_analysis(t5, index, mode="quartile_counts"),
        bibtrail.journal_analysis(t5, index, mode="quartile_yearly"),
        bibtrail.journal_analysis(t5, index, mode="top_in_quartile", quartile="Q1"),
        bibtrail.journal_analysis(t5, mode="journals_per_publisher"),
        bibtrail.categorical_counts(t5, "publisher"),
        bibtrail.categorical_counts(t5, "publisher", vs_citations=True),
        bibtrail.categorical_counts(t5, "open_access"),
        bibtrail.categorical_counts(t5, "open_access", vs_citations=True),
        bibtrail.categorical_counts(t5, "language"),
        scitrace.author_analysis(t5, "papers_per_author_count"),
        scitrace.author_analysis(t5, "top_authors"),
        scitrace.author_analysis(t5, "team_size"),
        scitrace.author_analysis(t5, "pair_collaboration"),
        scitrace.country_analysis(t5, "counts"),
        scitrace.country_analysis(t5, "lead_counts"),
        scitrace.country_analysis(t5, "team_size"),
        scitrace.country_analysis(t5, "pair_collaboration"),
        scitrace.country_analysis(t5, "papers_vs_citations"),
        scitrace.gender_analysis(t5, gender, "totals"),
        scitrace.gender_analysis(t5, gender, "by_position"),
        scitrace.gender_analysis(t5, gender, "by_country", top_k=3),
        scitrace.top_entities(t5, "institutes"),
        scitrace.top_entities(t5, "funding"),
        colabrix.centrality_distribution(degree, bins=4),
        colabrix.centrality_result(degree),
        colabrix.graph_result(gn6, partition),
        themantix.keyword_frequencies(t5, "both", n=8),
        themantix.keyword_mapping(t5, "country", 4, 3),
        themantix.cluster_documents(separable, k=2, seed=3),
        themantix.evolution_result(themantix.thematic_evolution(t5, 2, 5)),
        AnalysisResult("table", ["value"], [("row", 1)], "label", {}),
    ]
    return results


def test_every_kind_has_sample_and_rendering(t5, sci3):
    compat = chart_compatibility()
    results = {r.kind: r for r in sample_results(t5, sci3)}
    assert set(results) == set(compat), "sample coverage must match the matrix"
    for kind, chart_types in sorted(compat.items()):
        result = results[kind]
        for chart_type in chart_types:
            spec = build_chart_spec(result, ChartOptions(chart_type=chart_type))
            for bg in ("white", "transparent"):
                svg = render_svg(spec, background=bg)
                root = ET.fromstring(svg)          # well-formed XML
                assert root.tag.endswith("svg")
            assert render_svg(spec) == render_svg(spec)


def test_orientation_and_scale_matrix(t5):
    result = bibtrail.publications_series(t5, "total")
    for orientation in ("vertical", "horizontal"):
        for y_scale in ("linear", "log"):
            spec = build_chart_spec(result, ChartOptions(
                chart_type="bar", orientation=orientation, y_scale=y_scale))
            ET.fromstring(render_svg(spec))


def test_incompatible_chart_type(t5):
    result = bibtrail.publications_series(t5, "total")
    with pytest.raises(IncompatibleChartType):
        build_chart_spec(result, ChartOptions(chart_type="worldmap"))


def test_box_accepted_for_citations(t5):
    result = bibtrail.citations_series(t5, "yearwise_distribution")
    spec = build_chart_spec(result, ChartOptions(chart_type="box"))
    assert spec.options.chart_type == "box"


def test_top_count_truncation():
    rows = [(f"r{i:02d}", 25 - i) for i in range(25)]
    result = AnalysisResult("table", ["value"], rows, "label", {})
    spec = build_chart_spec(result, ChartOptions(chart_type="bar", top_count=10))
    assert len(spec.data.rows) == 10
    assert spec.data.rows == rows[:10]


def test_year_window_slicing_equals_cropping(t5):
    result = bibtrail.publications_series(t5, "total")
    windowed = build_chart_spec(result, ChartOptions(
        chart_type="bar", start_year=2020, end_year=2021))
    unwindowed = build_chart_spec(result, ChartOptions(chart_type="bar"))
    cropped = [r for r in unwindowed.data.rows if 2020 <= int(r[0]) <= 2021]
    assert windowed.data.rows == cropped


def test_gap_rebin_in_chart(t5):
    result = bibtrail.publications_series(t5, "total")
    spec = build_chart_spec(result, ChartOptions(chart_type="bar", year_gap=2))
    assert spec.data.rows == [("2019-2020", 3), ("2021-2022", 2)]


def test_decade_rebin_in_chart(t5):
    result = bibtrail.publications_series(t5, "total")
    spec = build_chart_spec(result, ChartOptions(chart_type="bar", period="decadewise"))
    assert spec.data.rows == [("2010", 1), ("2020", 4)]


def test_cumulative_rebin_takes_last(t5):
    result = bibtrail.publications_series(t5, "cumulative")
    spec = build_chart_spec(result, ChartOptions(chart_type="line", year_gap=2))
    assert spec.data.rows == [("2019-2020", 3), ("2021-2022", 5)]


def test_log_scale_drops_nonpositive(t5):
    result = bibtrail.citations_series(t5, "total")   # includes no zero years here
    rows = result.rows + [("2023", 0)]
    padded = AnalysisResult(result.kind, result.columns, rows,
                            result.label_name, result.meta)
    spec = build_chart_spec(padded, ChartOptions(chart_type="bar", y_scale="log"))
    assert all(v > 0 for _, v in spec.data.rows)
    assert any("log" in w for w in spec.warnings)


def test_build_spec_does_not_mutate(t5):
    result = bibtrail.publications_series(t5, "total")
    snapshot = copy.deepcopy(result.rows)
    build_chart_spec(result, ChartOptions(chart_type="bar", year_gap=3, top_count=1))
    assert result.rows == snapshot


def test_empty_data_renders_no_data_note(t5):
    result = AnalysisResult("publications_series", ["total"], [], "year",
                            {"label_kind": "year"})
    spec = build_chart_spec(result, ChartOptions(chart_type="bar"))
    svg = render_svg(spec)
    assert b"no data" in svg
    ET.fromstring(svg)


def test_transparent_background_omits_rect(t5):
    result = bibtrail.publications_series(t5, "total")
    spec = build_chart_spec(result, ChartOptions(chart_type="bar"))
    white = render_svg(spec, "white")
    transparent = render_svg(spec, "transparent")
    assert b'fill="#ffffff"' in white
    assert b'fill="#ffffff"' not in transparent


def test_options_validation():
    with pytest.raises(InvalidOptions):
        ChartOptions(chart_type="sparkline").validate()
    with pytest.raises(InvalidOptions):
        ChartOptions(chart_type="bar", start_year=2021, end_year=2020).validate()
    with pytest.raises(InvalidOptions):
        ChartOptions(chart_type="bar", year_gap=9).validate()
    with pytest.raises(InvalidOptions):
        ChartOptions(chart_type="bar", top_count=0).validate()
    from scholarmetrics.viz import ColorOptions
    with pytest.raises(InvalidOptions):
        ChartOptions(chart_type="bar", colors=ColorOptions(bar="red")).validate()


def test_options_json_round_trip():
    opts = ChartOptions(chart_type="line", start_year=2010, top_count=7,
                        orientation="horizontal", y_scale="log")
    again = ChartOptions.from_dict(opts.to_dict())
    assert again == opts


def test_chart_spec_json_round_trip(t5):
    result = bibtrail.publications_series(t5, "total")
    spec = build_chart_spec(result, ChartOptions(chart_type="bar"))
    again = ChartSpec.from_json_dict(spec.to_json_dict())
    assert again.options == spec.options
    assert again.data.rows == spec.data.rows
    assert render_svg(again) == render_svg(spec)


def test_cosmetic_options_land_in_svg(t5):
    result = bibtrail.publications_series(t5, "total")
    from scholarmetrics.viz import ColorOptions, LabelOptions, TickOptions, TitleOptions
    spec = build_chart_spec(result, ChartOptions(
        chart_type="bar",
        labels=LabelOptions(x_label="Publication year", y_label="Papers", fontsize=16),
        title=TitleOptions(text="Output per year", fontsize=22),
        ticks=TickOptions(fontsize=9, rotation_degrees=45),
        colors=ColorOptions(bar="#A1B2C3", border="#000000",
                            line="#111111", marker="#222222"),
        grid_visible=False,
    ))
    svg = render_svg(spec).decode()
    assert "Publication year" in svg and "Papers" in svg
    assert "Output per year" in svg
    assert "#a1b2c3" in svg                     # colors normalized to lowercase
    assert "rotate(-45" in svg
    assert 'stroke="#dddddd"' not in svg        # grid hidden


def test_title_hidden(t5):
    result = bibtrail.publications_series(t5, "total")
    from scholarmetrics.viz import TitleOptions
    spec = build_chart_spec(result, ChartOptions(
        chart_type="bar", title=TitleOptions(text="SECRET", visible=False)))
    assert b"SECRET" not in render_svg(spec)


# ---------------------------------------------------------------------------
# CSV export

def test_export_one_row():
    result = AnalysisResult("table", ["value"], [("x", 1)], "label", {})
    data = export_csv(result)
    assert data == b"label,value\r\nx,1\r\n"


def test_export_quotes_commas():
    result = AnalysisResult("table", ["value"], [("a, b", 1)], "label", {})
    assert b'"a, b",1' in export_csv(result)


def test_export_round_trip_all_kinds(t5, sci3):
    for result in sample_results(t5, sci3):
        data = export_csv(result)
        again = result_from_csv(data, kind=result.kind, meta=result.meta)
        assert again.columns == result.columns, result.kind
        assert again.label_name == result.label_name, result.kind
        assert len(again.rows) == len(result.rows), result.kind
        for got, want in zip(again.rows, result.rows):
            assert str(got[0]) == str(want[0]), result.kind
            assert list(got[1:]) == list(want[1:]), result.kind
