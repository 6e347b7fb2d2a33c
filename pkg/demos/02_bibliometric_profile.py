"""Bibliometric profile: publication growth, citation statistics, document
types, journal quartiles, and customizable SVG charts.

Run from the repository root:  python demos/02_bibliometric_profile.py
"""

from pathlib import Path

from sample_data import SCIMAGO_SAMPLE, sample_export

from scholarmetrics import apply_mapping, infer_field_mapping, merge_and_dedup, parse_delimited
from scholarmetrics.bibtrail import (
    categorical_counts,
    citations_series,
    doc_type_analysis,
    journal_analysis,
    load_scimago,
    publications_series,
)
from scholarmetrics.summarize import summarize_result
from scholarmetrics.viz import ChartOptions, ColorOptions, TitleOptions, build_chart_spec, export_csv, render_svg

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

table = parse_delimited(sample_export(), "scopus", source_label="demo-export")
corpus, _ = merge_and_dedup([apply_mapping(table, infer_field_mapping(table))])

# Publications per year, then re-binned to two-year windows at chart time.
pubs = publications_series(corpus, "total")
print("publications per year:", dict((l, v) for l, v in pubs.rows))
spec = build_chart_spec(pubs, ChartOptions(
    chart_type="bar",
    year_gap=2,
    title=TitleOptions(text="Publications in two-year windows"),
    colors=ColorOptions(bar="#4c72b0", border="#20354f",
                        line="#dd8452", marker="#55a868"),
))
(OUT / "publications_2y.svg").write_bytes(render_svg(spec, "white"))

# Citation statistics: averages and the per-year distribution for box plots.
avg = citations_series(corpus, "average")
print("average citations, first 3 years:", avg.rows[:3])
dist = citations_series(corpus, "yearwise_distribution")
box = build_chart_spec(dist, ChartOptions(chart_type="box",
                                          title=TitleOptions(text="Citations per year")))
(OUT / "citations_box.svg").write_bytes(render_svg(box, "white"))

# Document types and a doughnut view.
types = doc_type_analysis(corpus, "total")
doughnut = build_chart_spec(types, ChartOptions(chart_type="doughnut"))
(OUT / "doc_types.svg").write_bytes(render_svg(doughnut, "transparent"))

# Scimago quartiles: ISSN lookup against a rank file.
index = load_scimago(SCIMAGO_SAMPLE)
quartiles = journal_analysis(corpus, index, mode="quartile_counts")
print("quartile distribution:", dict((l, v) for l, v in quartiles.rows))
(OUT / "quartiles.csv").write_bytes(export_csv(quartiles))

top_q1 = journal_analysis(corpus, index, mode="top_in_quartile", quartile="Q1")
print("Q1 journals:", [l for l, _ in top_q1.rows])

publishers = categorical_counts(corpus, "publisher")
print("publishers:", dict((l, v) for l, v in publishers.rows))

# Every result feeds the deterministic summarizer.
print("\nsummary of the publication series:")
print(" ", summarize_result(pubs))
print(f"\ncharts and CSVs written to {OUT}/")
