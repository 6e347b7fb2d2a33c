"""Scholarly-data analysis over merged Scopus/Web of Science exports.

Four analysis engines (bibliometric, scientometric, collaboration-network,
thematic) over a deduplicated corpus, with chart-spec/SVG output, CSV
export, text summaries, a CLI, and an HTTP service.
"""

__version__ = "0.1.0"

from .corpus import Corpus, CorpusStats, FilterSpec, Record, filter_corpus, summarize_corpus
from .ingest import (
    DedupReport,
    FieldMapping,
    RawTable,
    apply_mapping,
    corpus_from_csv,
    corpus_to_csv,
    infer_field_mapping,
    merge_and_dedup,
    parse_delimited,
)
from .result import AnalysisResult

__all__ = [
    "AnalysisResult",
    "Corpus",
    "CorpusStats",
    "DedupReport",
    "FieldMapping",
    "FilterSpec",
    "RawTable",
    "Record",
    "apply_mapping",
    "corpus_from_csv",
    "corpus_to_csv",
    "filter_corpus",
    "infer_field_mapping",
    "merge_and_dedup",
    "parse_delimited",
    "summarize_corpus",
]
