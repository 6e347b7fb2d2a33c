"""Dispatch table from (module, operation) wire names to library calls,
plus JSON and CSV serializers for every result type.

The HTTP service and the CLI both route through this table, which is what
keeps their outputs byte-identical to direct library calls.
"""

import csv
import io
import json

from . import bibtrail, colabrix, scitrace, themantix
from .corpus import Corpus
from .errors import MissingQuartileIndex, ScholarmetricsError
from .result import AnalysisResult, format_cell


class UnknownOperation(ScholarmetricsError):
    pass


def _graph_for(corpus: Corpus, params: dict) -> colabrix.Graph:
    graph = colabrix.build_graph(corpus, level=params.get("level", "author"))
    scope = params.get("scope", "full")
    if scope == "giant":
        graph = colabrix.giant_component(graph, rank=int(params.get("rank", 1)))
    elif scope != "full":
        raise ValueError(f"unknown scope {scope!r}")
    return graph


def _centrality(corpus, params, context):
    measure = params.get("measure", "degree")
    scope = params.get("scope", "giant" if measure == "eigenvector" else "full")
    graph = _graph_for(corpus, {**params, "scope": scope})
    return colabrix.centrality(graph, measure)


def _centrality_distribution(corpus, params, context):
    scores = _centrality(corpus, params, context)
    return colabrix.centrality_distribution(scores, bins=int(params.get("bins", 10)))


def _communities(corpus, params, context):
    graph = _graph_for(corpus, params)
    return colabrix.detect_communities(
        graph, method=params.get("method", "leiden"), seed=int(params.get("seed", 0)))


def _community_graph(corpus, params, context):
    graph = _graph_for(corpus, params)
    partition = colabrix.detect_communities(
        graph, method=params.get("method", "leiden"), seed=int(params.get("seed", 0)))
    return colabrix.graph_result(graph, partition)


def _modularity(corpus, params, context):
    graph = _graph_for(corpus, params)
    q = colabrix.modularity(graph, dict(params["assignment"]))
    return AnalysisResult("table", ["modularity"], [("Q", q)], "metric",
                          {"operation": "modularity"})


def _quartile_index(context):
    index = context.get("quartile_index")
    if index is None:
        raise MissingQuartileIndex("no Scimago file loaded; upload one with kind=scimago")
    return index


OPERATIONS = {
    ("bibtrail", "publications_series"): lambda c, p, ctx: bibtrail.publications_series(
        c, mode=p.get("mode", "total"), year_gap=int(p.get("year_gap", 1))),
    ("bibtrail", "citations_series"): lambda c, p, ctx: bibtrail.citations_series(
        c, mode=p.get("mode", "total")),
    ("bibtrail", "doc_type_analysis"): lambda c, p, ctx: bibtrail.doc_type_analysis(
        c, mode=p.get("mode", "total")),
    ("bibtrail", "journal_analysis"): lambda c, p, ctx: bibtrail.journal_analysis(
        c,
        index=_quartile_index(ctx) if p.get("mode", "top_journals") in
        ("quartile_counts", "quartile_yearly", "top_in_quartile") else ctx.get("quartile_index"),
        mode=p.get("mode", "top_journals"),
        quartile=p.get("quartile"),
        top_n=int(p.get("top_n", 10))),
    ("bibtrail", "categorical_counts"): lambda c, p, ctx: bibtrail.categorical_counts(
        c, field=p.get("field", "publisher"), vs_citations=bool(p.get("vs_citations", False))),
    ("scitrace", "author_analysis"): lambda c, p, ctx: scitrace.author_analysis(
        c, mode=p.get("mode", "top_authors"), n=int(p.get("n", 10))),
    ("scitrace", "country_analysis"): lambda c, p, ctx: scitrace.country_analysis(
        c, mode=p.get("mode", "counts")),
    ("scitrace", "gender_analysis"): lambda c, p, ctx: scitrace.gender_analysis(
        c, provider=ctx.get("gender_provider") or scitrace.TableGenderProvider(),
        mode=p.get("mode", "totals"), top_k=int(p.get("top_k", 10))),
    ("scitrace", "top_entities"): lambda c, p, ctx: scitrace.top_entities(
        c, field=p.get("field", "institutes"), n=int(p.get("n", 10))),
    ("colabrix", "build_graph"): lambda c, p, ctx: colabrix.build_graph(
        c, level=p.get("level", "author")),
    ("colabrix", "giant_component"): lambda c, p, ctx: colabrix.giant_component(
        colabrix.build_graph(c, level=p.get("level", "author")),
        rank=int(p.get("rank", 1))),
    ("colabrix", "centrality"): _centrality,
    ("colabrix", "centrality_distribution"): _centrality_distribution,
    ("colabrix", "detect_communities"): _communities,
    ("colabrix", "community_graph"): _community_graph,
    ("colabrix", "modularity"): _modularity,
    ("themantix", "keyword_frequencies"): lambda c, p, ctx: themantix.keyword_frequencies(
        c, source=p.get("source", "both"), n=int(p.get("n", 10))),
    ("themantix", "keyword_mapping"): lambda c, p, ctx: themantix.keyword_mapping(
        c, axis=p.get("axis", "country"), top_keywords=int(p.get("top_keywords", 10)),
        top_axis=int(p.get("top_axis", 10))),
    ("themantix", "cooccurrence_graph"): lambda c, p, ctx: themantix.cooccurrence_graph(
        c, min_edge_weight=int(p.get("min_edge_weight", 1))),
    ("themantix", "thematic_evolution"): lambda c, p, ctx: themantix.thematic_evolution(
        c, slice_width=int(p.get("slice_width", 5)), top_terms=int(p.get("top_terms", 10))),
    ("themantix", "lda_topics"): lambda c, p, ctx: themantix.lda_topics(
        c, k=int(p.get("k", 5)), iterations=int(p.get("iterations", 200)),
        seed=int(p.get("seed", 0)),
        alpha=float(p["alpha"]) if p.get("alpha") is not None else None,
        beta=float(p.get("beta", 0.01))),
    ("themantix", "cluster_documents"): lambda c, p, ctx: themantix.cluster_documents(
        c, k=int(p.get("k", 5)), seed=int(p.get("seed", 0))),
}


def run_operation(module: str, operation: str, corpus: Corpus, params: dict | None = None,
                  context: dict | None = None):
    try:
        fn = OPERATIONS[(module, operation)]
    except KeyError:
        raise UnknownOperation(f"no operation {module}/{operation}") from None
    return fn(corpus, dict(params or {}), dict(context or {}))


def list_operations() -> list:
    return sorted(f"{m}/{o}" for m, o in OPERATIONS)


# ---------------------------------------------------------------------------
# serialization of heterogeneous results

def to_json_obj(value) -> dict:
    if isinstance(value, AnalysisResult):
        return value.to_dict()
    if hasattr(value, "to_json_dict"):
        return value.to_json_dict()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def to_csv_bytes(obj: dict) -> bytes:
    """CSV rendering per result type (graph: edge list; partition: node to
    community; centrality: node scores; evolution: flows; topic model: top
    terms per topic; table: the standard export)."""
    from .viz import export_csv          # local import avoids a cycle

    kind = obj.get("type")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    if kind == "table":
        return export_csv(AnalysisResult.from_dict(obj))
    if kind == "graph":
        writer.writerow(["source", "target", "weight"])
        for link in obj["links"]:
            writer.writerow([link["source"], link["target"], link["weight"]])
    elif kind == "centrality":
        writer.writerow(["node", obj["measure"]])
        for node, score in obj["scores"]:
            writer.writerow([node, format_cell(score)])
    elif kind == "partition":
        writer.writerow(["node", "community"])
        for node, cid in obj["assignment"].items():
            writer.writerow([node, cid])
    elif kind == "evolution":
        writer.writerow(["slice_from", "term_from", "slice_to", "term_to", "weight"])
        slices = ["{}-{}".format(*s) for s in obj["slices"]]
        for (a, b, w), i in zip(obj["flows"], obj["flow_slices"]):
            writer.writerow([slices[i], a, slices[i + 1], b, w])
    elif kind == "topic_model":
        writer.writerow(["topic", "rank", "term", "probability"])
        for t, terms in enumerate(obj["top_terms"]):
            for rank, (term, prob) in enumerate(terms, start=1):
                writer.writerow([t, rank, term, format_cell(prob)])
    elif kind == "chart_spec":
        return to_csv_bytes(obj["data"])
    else:
        raise TypeError(f"no CSV rendering for {kind!r}")
    return buf.getvalue().encode("utf-8")
