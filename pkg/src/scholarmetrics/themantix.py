"""Thematic analyses: keyword frequencies and mappings, co-occurrence
networks, thematic evolution over time slices, LDA topic modeling, and
document clustering.

One tokenizer serves every operation here: lowercase alphabetic runs of
length >= 3, filtered against the bundled stop-word list. Keywords enter
as whole terms. LDA is collapsed Gibbs sampling and is bit-reproducible
for a fixed seed.
"""

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from . import _data
from .bibtrail import top_sorted
from .colabrix import Graph
from .corpus import Corpus
from .errors import (
    EmptyVocabulary,
    KExceedsDocuments,
    NoDatedRecords,
    TooFewDocuments,
)
from .result import AnalysisResult

_TOKEN_RE = re.compile(r"[a-z]+")
MIN_TOKEN_LEN = 3


def tokenize(text: str) -> list:
    """Lowercase alphabetic tokens of length >= 3 minus stop words."""
    stops = _data.stopwords()
    return [t for t in _TOKEN_RE.findall(text.lower())
            if len(t) >= MIN_TOKEN_LEN and t not in stops]


# ---------------------------------------------------------------------------
# keyword statistics

def keyword_frequencies(corpus: Corpus, source: str = "both", n: int = 10) -> AnalysisResult:
    """Top-n keyword frequencies after lowercase/trim normalization;
    'both' sums author and index keyword occurrences."""
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = _keyword_counts(corpus, source)
    rows = top_sorted(counts)[:n]
    return AnalysisResult("keyword_frequencies", ["count"], rows, "keyword",
                          {"source": source, "n": n})


def _keyword_counts(corpus: Corpus, source: str) -> dict:
    if source not in ("author_keywords", "index_keywords", "both"):
        raise ValueError(f"unknown keyword source {source!r}")
    counts = {}
    for r in corpus:
        if source in ("author_keywords", "both"):
            for kw in r.author_keywords:
                counts[kw] = counts.get(kw, 0) + 1
        if source in ("index_keywords", "both"):
            for kw in r.index_keywords:
                counts[kw] = counts.get(kw, 0) + 1
    return counts


def record_keyword_set(record) -> set:
    return set(record.author_keywords) | set(record.index_keywords)


def keyword_mapping(corpus: Corpus, axis: str = "country", top_keywords: int = 10,
                    top_axis: int = 10) -> AnalysisResult:
    """Bipartite count table keyword x axis value (country or doc_type),
    restricted to the top keywords and top axis values."""
    if axis not in ("country", "doc_type"):
        raise ValueError("axis must be country or doc_type")
    if top_keywords < 1 or top_axis < 1:
        raise ValueError("top_keywords and top_axis must be >= 1")

    def axis_values(record):
        if axis == "country":
            return record.known_countries()
        return (record.doc_type or "Unspecified",)

    kw_counts = _keyword_counts(corpus, "both")
    keywords = [k for k, _ in top_sorted(kw_counts)[:top_keywords]]
    axis_counts = {}
    for r in corpus:
        for v in set(axis_values(r)):
            axis_counts[v] = axis_counts.get(v, 0) + 1
    axes = [a for a, _ in top_sorted(axis_counts)[:top_axis]]

    cells = {}
    for r in corpus:
        kws = record_keyword_set(r) & set(keywords)
        vals = set(axis_values(r)) & set(axes)
        for kw in kws:
            for v in vals:
                cells[(kw, v)] = cells.get((kw, v), 0) + 1
    rows = [(kw, *[cells.get((kw, v), 0) for v in axes]) for kw in keywords]
    return AnalysisResult("keyword_mapping", axes, rows, "keyword",
                          {"axis": axis, "top_keywords": top_keywords, "top_axis": top_axis})


def cooccurrence_graph(corpus: Corpus, min_edge_weight: int = 1) -> Graph:
    """Keyword co-occurrence graph: nodes are keywords, edge weight is the
    number of records where both appear. Edges under min_edge_weight are
    dropped; isolated nodes stay."""
    if min_edge_weight < 1:
        raise ValueError("min_edge_weight must be >= 1")
    nodes = set()
    weights = {}
    for r in corpus:
        kws = sorted(record_keyword_set(r))
        nodes.update(kws)
        for a, b in itertools.combinations(kws, 2):
            weights[(a, b)] = weights.get((a, b), 0) + 1
    edges = [(a, b, w) for (a, b), w in sorted(weights.items()) if w >= min_edge_weight]
    return Graph(nodes=sorted(nodes), edges=edges)


# ---------------------------------------------------------------------------
# thematic evolution

@dataclass(frozen=True)
class EvolutionMap:
    slices: tuple               # ((start, end), ...)
    themes_per_slice: tuple     # per slice: ((term, frequency), ...)
    flows: tuple                # (term in slice i, term in slice i+1, weight)
    flow_slices: tuple = ()     # left slice index i of each flow, parallel to flows

    def to_json_dict(self) -> dict:
        return {
            "type": "evolution",
            "slices": [list(s) for s in self.slices],
            "themes_per_slice": [[[t, f] for t, f in themes]
                                 for themes in self.themes_per_slice],
            "flows": [[a, b, w] for a, b, w in self.flows],
            "flow_slices": list(self.flow_slices),
        }


def record_terms(record) -> set:
    """Term set of one record: title+abstract unigrams plus keywords."""
    return set(tokenize(f"{record.title} {record.abstract}")) | record_keyword_set(record)


def thematic_evolution(corpus: Corpus, slice_width: int = 5,
                       top_terms: int = 10) -> EvolutionMap:
    """Track top terms across consecutive year windows. Term frequency is
    document frequency within the slice; a term appearing in two
    consecutive top lists flows with weight min(freq_i, freq_{i+1})."""
    if slice_width < 1:
        raise ValueError("slice_width must be >= 1")
    if top_terms < 1:
        raise ValueError("top_terms must be >= 1")
    dated = corpus.dated_records()
    if not dated:
        raise NoDatedRecords("thematic evolution needs year-bearing records")

    lo = min(r.year for r in dated)
    hi = max(r.year for r in dated)
    slices = []
    start = lo
    while start <= hi:
        slices.append((start, start + slice_width - 1))
        start += slice_width

    themes = []
    for s, e in slices:
        freqs = {}
        for r in dated:
            if s <= r.year <= e:
                for term in record_terms(r):
                    freqs[term] = freqs.get(term, 0) + 1
        themes.append(tuple(top_sorted(freqs)[:top_terms]))

    flows = []
    flow_slices = []
    for i in range(len(slices) - 1):
        left = dict(themes[i])
        right = dict(themes[i + 1])
        for term in sorted(set(left) & set(right)):
            flows.append((term, term, min(left[term], right[term])))
            flow_slices.append(i)
    return EvolutionMap(slices=tuple(slices), themes_per_slice=tuple(themes),
                        flows=tuple(flows), flow_slices=tuple(flow_slices))


def evolution_result(evolution: EvolutionMap) -> AnalysisResult:
    """Flow-edge view of an EvolutionMap for charting/CSV."""
    def slice_label(i):
        return "{}-{}".format(*evolution.slices[i])

    rows = []
    for (term_a, term_b, w), i in zip(evolution.flows, evolution.flow_slices):
        rows.append((f"{term_a} [{slice_label(i)}] -- {term_b} [{slice_label(i + 1)}]", w))
    meta = {
        "slices": [slice_label(i) for i in range(len(evolution.slices))],
        "edge_separator": " -- ",
        "nodes": sorted({f"{t} [{slice_label(i)}]"
                         for i, themes in enumerate(evolution.themes_per_slice)
                         for t, _ in themes}),
    }
    return AnalysisResult("evolution_flows", ["weight"], rows, "flow", meta)


# ---------------------------------------------------------------------------
# LDA topic modeling

@dataclass(frozen=True)
class TopicModel:
    k: int
    topic_word: np.ndarray      # k x V, rows sum to 1
    doc_topic: np.ndarray       # D x k, rows sum to 1
    vocabulary: tuple
    doc_ids: tuple              # record ids for the D modeled documents
    seed: int
    iterations: int

    def top_terms(self, n: int = 20) -> list:
        out = []
        for t in range(self.k):
            order = np.argsort(-self.topic_word[t], kind="stable")[:n]
            out.append([(self.vocabulary[i], float(self.topic_word[t, i])) for i in order])
        return out

    def to_json_dict(self) -> dict:
        return {
            "type": "topic_model",
            "k": self.k,
            "vocabulary": list(self.vocabulary),
            "doc_ids": list(self.doc_ids),
            "topic_word": [[float(x) for x in row] for row in self.topic_word],
            "doc_topic": [[float(x) for x in row] for row in self.doc_topic],
            "top_terms": [[[w, p] for w, p in terms] for terms in self.top_terms()],
            "seed": self.seed,
            "iterations": self.iterations,
        }


def lda_documents(corpus: Corpus) -> tuple:
    """(record ids, token lists) for records whose title+abstract yields
    at least one token."""
    ids, docs = [], []
    for r in corpus:
        tokens = tokenize(f"{r.title} {r.abstract}")
        if tokens:
            ids.append(r.id)
            docs.append(tokens)
    return tuple(ids), docs


def lda_topics(corpus: Corpus, k: int, iterations: int = 200, seed: int = 0,
               alpha: float | None = None, beta: float = 0.01) -> TopicModel:
    """Collapsed Gibbs LDA over title+abstract tokens with symmetric priors
    (alpha defaults to 50/k). Deterministic for a fixed seed; matrices are
    estimated from the final sweep's counts with prior smoothing."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    doc_ids, docs = lda_documents(corpus)
    if len(docs) < k:
        raise TooFewDocuments(f"{len(docs)} usable documents for k={k}")
    vocabulary = sorted({t for doc in docs for t in doc})
    if not vocabulary:
        raise EmptyVocabulary("no tokens survive tokenization")
    if alpha is None:
        alpha = 50.0 / k

    word_id = {w: i for i, w in enumerate(vocabulary)}
    v = len(vocabulary)
    d = len(docs)

    token_doc = []
    token_word = []
    for di, doc in enumerate(docs):
        for t in doc:
            token_doc.append(di)
            token_word.append(word_id[t])
    n_tokens = len(token_doc)

    rng = np.random.RandomState(seed)
    z = rng.randint(0, k, size=n_tokens)

    n_tw = [[0] * v for _ in range(k)]
    n_t = [0] * k
    n_dt = [[0] * k for _ in range(d)]
    for i in range(n_tokens):
        t = int(z[i])
        n_tw[t][token_word[i]] += 1
        n_t[t] += 1
        n_dt[token_doc[i]][t] += 1

    vbeta = v * beta
    assignments = [int(x) for x in z]
    for _ in range(iterations):
        uniforms = rng.random_sample(n_tokens)
        for i in range(n_tokens):
            di = token_doc[i]
            wi = token_word[i]
            t = assignments[i]
            n_tw[t][wi] -= 1
            n_t[t] -= 1
            n_dt[di][t] -= 1

            total = 0.0
            cumulative = []
            row = n_dt[di]
            for tt in range(k):
                total += (n_tw[tt][wi] + beta) / (n_t[tt] + vbeta) * (row[tt] + alpha)
                cumulative.append(total)
            target = uniforms[i] * total
            t = 0
            while cumulative[t] < target:
                t += 1

            assignments[i] = t
            n_tw[t][wi] += 1
            n_t[t] += 1
            n_dt[di][t] += 1

    topic_word = np.array(n_tw, dtype=float) + beta
    topic_word /= topic_word.sum(axis=1, keepdims=True)
    doc_topic = np.array(n_dt, dtype=float) + alpha
    doc_topic /= doc_topic.sum(axis=1, keepdims=True)
    return TopicModel(k=k, topic_word=topic_word, doc_topic=doc_topic,
                      vocabulary=tuple(vocabulary), doc_ids=doc_ids,
                      seed=seed, iterations=iterations)


# ---------------------------------------------------------------------------
# document clustering

def cluster_documents(corpus: Corpus, k: int, seed: int = 0) -> AnalysisResult:
    """Spherical k-means over TF-IDF vectors of title+abstract+keywords,
    with seeded farthest-point initialization. Rows carry the two leading
    principal-component coordinates for scatter plotting."""
    if k < 1:
        raise ValueError("k must be >= 1")
    docs = []
    ids = []
    for r in corpus:
        ids.append(r.id)
        docs.append(tokenize(f"{r.title} {r.abstract}") + sorted(record_keyword_set(r)))
    if k > len(docs):
        raise KExceedsDocuments(f"k={k} exceeds {len(docs)} documents")

    vocabulary = sorted({t for doc in docs for t in doc})
    index = {w: i for i, w in enumerate(vocabulary)}
    n_docs, n_terms = len(docs), len(vocabulary)
    tf = np.zeros((n_docs, max(n_terms, 1)))
    for di, doc in enumerate(docs):
        for t in doc:
            tf[di, index[t]] += 1.0
    df = (tf > 0).sum(axis=0)
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    x = tf * idf
    norms = np.linalg.norm(x, axis=1)
    unit = np.divide(x, norms[:, None], out=np.zeros_like(x), where=norms[:, None] > 0)

    labels = _spherical_kmeans(unit, k, seed)
    coords = _pca_2d(x)

    rows = [(ids[i], int(labels[i]), float(coords[i, 0]), float(coords[i, 1]))
            for i in range(n_docs)]
    return AnalysisResult("document_clusters", ["cluster", "x", "y"], rows, "record",
                          {"k": k, "seed": seed, "vocabulary_size": n_terms})


def _spherical_kmeans(unit: np.ndarray, k: int, seed: int, max_iter: int = 100):
    """K-means under cosine similarity on L2-normalized rows. Ties go to the
    lowest cluster index; emptied clusters steal the point farthest from
    its center."""
    n = unit.shape[0]
    rng = np.random.RandomState(seed)
    centers = [int(rng.randint(n))]
    while len(centers) < k:
        sims = unit @ unit[centers].T            # n x chosen
        nearest = sims.max(axis=1)
        nearest[centers] = np.inf                # never re-pick a center
        centers.append(int(np.argmin(nearest)))
    c = unit[centers].copy()

    labels = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        sims = unit @ c.T
        new_labels = np.argmax(sims, axis=1)     # argmax takes the first max
        for cid in range(k):
            members = unit[new_labels == cid]
            if len(members) == 0:
                assigned = sims[np.arange(n), new_labels]
                worst = int(np.argmin(assigned))
                new_labels[worst] = cid
                c[cid] = unit[worst]
                continue
            mean = members.mean(axis=0)
            norm = np.linalg.norm(mean)
            c[cid] = mean / norm if norm > 0 else mean
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels


def _pca_2d(x: np.ndarray) -> np.ndarray:
    """Two leading principal-component coordinates with a deterministic
    sign convention (largest-magnitude loading positive)."""
    centered = x - x.mean(axis=0, keepdims=True)
    if min(centered.shape) == 0:
        return np.zeros((x.shape[0], 2))
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    coords = np.zeros((x.shape[0], 2))
    for pc in range(min(2, vt.shape[0])):
        component = vt[pc]
        pivot = int(np.argmax(np.abs(component)))
        if component[pivot] < 0:
            component = -component
        coords[:, pc] = centered @ component
    return coords
