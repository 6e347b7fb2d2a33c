"""Thematic landscape: keyword frequencies, co-occurrence networks,
thematic evolution across year slices, LDA topics, document clusters.

Run from the repository root:  python demos/04_thematic_landscape.py
"""

from pathlib import Path

from sample_data import sample_export

from scholarmetrics import apply_mapping, infer_field_mapping, merge_and_dedup, parse_delimited
from scholarmetrics.colabrix import detect_communities
from scholarmetrics.themantix import (
    cluster_documents,
    cooccurrence_graph,
    keyword_frequencies,
    keyword_mapping,
    lda_topics,
    thematic_evolution,
)
from scholarmetrics.viz import ChartOptions, build_chart_spec, render_svg

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

table = parse_delimited(sample_export(), "scopus", source_label="demo-export")
corpus, _ = merge_and_dedup([apply_mapping(table, infer_field_mapping(table))])

# Keyword frequencies feed the word cloud.
freqs = keyword_frequencies(corpus, "both", n=8)
print("top keywords:", dict((l, v) for l, v in freqs.rows))
cloud = build_chart_spec(freqs, ChartOptions(chart_type="wordcloud"))
(OUT / "wordcloud.svg").write_bytes(render_svg(cloud, "white"))

# Keyword x country mapping.
mapping = keyword_mapping(corpus, "country", top_keywords=5, top_axis=4)
print("keyword x country columns:", mapping.columns)

# Keyword co-occurrence graph; all of colabrix applies to it.
graph = cooccurrence_graph(corpus, min_edge_weight=2)
print(f"co-occurrence graph: {len(graph)} keywords, {len(graph.edges())} edges "
      f"(weight >= 2)")
communities = detect_communities(graph, "leiden", seed=3)
print(f"keyword communities: {len(communities.communities())}, "
      f"Q={communities.modularity:.3f}")

# Thematic evolution: top terms per year slice, flows where a term stays hot.
evolution = thematic_evolution(corpus, slice_width=5, top_terms=6)
for (start, end), themes in zip(evolution.slices, evolution.themes_per_slice):
    top3 = ", ".join(f"{t} ({n})" for t, n in themes[:3])
    print(f"  {start}-{end}: {top3}")
print(f"  {len(evolution.flows)} flows between consecutive slices")

# LDA topics over titles+abstracts (collapsed Gibbs, seed-reproducible).
model = lda_topics(corpus, k=3, iterations=300, seed=5, alpha=0.2)
for t, terms in enumerate(model.top_terms(5)):
    print(f"  topic {t}: " + ", ".join(w for w, _ in terms))

# Document clusters with PCA coordinates for the scatter plot.
clusters = cluster_documents(corpus, k=3, seed=5)
scatter = build_chart_spec(clusters, ChartOptions(chart_type="scatter"))
(OUT / "clusters.svg").write_bytes(render_svg(scatter, "white"))
print(f"\nwrote {OUT / 'wordcloud.svg'} and {OUT / 'clusters.svg'}")
