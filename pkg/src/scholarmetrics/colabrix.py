"""Collaboration-network construction and analysis.

Weighted undirected graphs over authors or countries (edge weight = number
of joint papers), connected components, four node centralities, and three
community-detection methods under one weighted-modularity definition.

Centrality conventions: degree is the neighbor count; betweenness (via
Brandes' algorithm) and closeness use unweighted hop-count shortest paths,
each unordered pair counted once and endpoints excluded; closeness is
restricted to the nodes reachable from v and is 0 for isolated nodes;
eigenvector centrality is the principal eigenvector of the weighted
adjacency matrix, nonnegative with unit Euclidean norm.
"""

import itertools
import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus
from .errors import DisconnectedGraph, EmptyGraph, NoSuchComponent, PartitionMismatch
from .result import AnalysisResult

POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_MAX = 10_000


class Graph:
    """Immutable weighted undirected graph without self-loops."""

    __slots__ = ("_nodes", "_adj")

    def __init__(self, nodes=(), edges=()):
        adj = {n: {} for n in nodes}
        for u, v, w in edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if w <= 0:
                raise ValueError(f"edge ({u!r}, {v!r}) has non-positive weight {w}")
            adj.setdefault(u, {})
            adj.setdefault(v, {})
            adj[u][v] = adj[u].get(v, 0) + w
            adj[v][u] = adj[v].get(u, 0) + w
        object.__setattr__(self, "_nodes", tuple(sorted(adj)))
        object.__setattr__(self, "_adj", adj)

    def __setattr__(self, *_):
        raise AttributeError("Graph is immutable")

    @property
    def nodes(self) -> tuple:
        return self._nodes

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, n):
        return n in self._adj

    def neighbors(self, n) -> dict:
        return self._adj[n]

    def weight(self, u, v) -> int:
        return self._adj[u].get(v, 0)

    def degree(self, n) -> int:
        return len(self._adj[n])

    def edges(self):
        """Unordered edges as (u, v, w) with u < v, sorted."""
        out = []
        for u in self._nodes:
            for v, w in self._adj[u].items():
                if u < v:
                    out.append((u, v, w))
        out.sort()
        return out

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges())

    def subgraph(self, keep) -> "Graph":
        keep = set(keep)
        edges = [(u, v, w) for u, v, w in self.edges() if u in keep and v in keep]
        return Graph(nodes=sorted(keep), edges=edges)

    def without_edge(self, u, v) -> "Graph":
        edges = [(a, b, w) for a, b, w in self.edges() if {a, b} != {u, v}]
        return Graph(nodes=self._nodes, edges=edges)

    def components(self):
        """Connected components sorted by size desc, then smallest node label."""
        seen = set()
        comps = []
        for start in self._nodes:
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v in self._adj[u]:
                    if v not in comp:
                        comp.add(v)
                        queue.append(v)
            seen |= comp
            comps.append(comp)
        return sorted(comps, key=lambda c: (-len(c), min(c)))

    def is_connected(self) -> bool:
        return len(self) <= 1 or len(self.components()[0]) == len(self)

    def adjacency_matrix(self):
        """(nodes, dense weighted adjacency) in sorted node order."""
        n = len(self._nodes)
        pos = {node: i for i, node in enumerate(self._nodes)}
        a = np.zeros((n, n))
        for u, v, w in self.edges():
            a[pos[u], pos[v]] = w
            a[pos[v], pos[u]] = w
        return self._nodes, a

    def to_json_dict(self) -> dict:
        return {
            "type": "graph",
            "nodes": list(self._nodes),
            "links": [{"source": u, "target": v, "weight": w} for u, v, w in self.edges()],
        }


@dataclass(frozen=True)
class CentralityScores:
    measure: str
    scores: dict
    eigenvalue: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "type": "centrality",
            "measure": self.measure,
            "scores": [[n, self.scores[n]] for n in sorted(self.scores)],
            "eigenvalue": self.eigenvalue,
        }


@dataclass(frozen=True)
class Partition:
    assignment: dict            # node -> community id (0..k-1)
    modularity: float

    def communities(self):
        groups = {}
        for node, cid in self.assignment.items():
            groups.setdefault(cid, set()).add(node)
        return [groups[cid] for cid in sorted(groups)]

    def to_json_dict(self) -> dict:
        return {
            "type": "partition",
            "assignment": {n: self.assignment[n] for n in sorted(self.assignment)},
            "modularity": self.modularity,
        }


# ---------------------------------------------------------------------------
# graph construction

def build_graph(corpus: Corpus, level: str = "author") -> Graph:
    """Collaboration graph at author or country level. Each record with k
    distinct entities contributes one weight unit to every pair; records
    with fewer than two entities only add isolated nodes."""
    if level not in ("author", "country"):
        raise ValueError(f"unknown level {level!r}")
    nodes = {}
    weights = {}
    label_of = {}               # identity key -> display label
    for record in corpus:
        if level == "author":
            entities = []
            for key, name in record.author_keys():
                if key not in label_of:
                    label = name.strip()
                    if label in nodes and nodes[label] != key:
                        label = f"{label} [{key.split(':', 1)[1]}]"
                    label_of[key] = label
                    nodes[label_of[key]] = key
                if key not in entities:
                    entities.append(key)
            labels = [label_of[k] for k in entities]
        else:
            labels = list(record.known_countries())
            for c in labels:
                nodes.setdefault(c, c)
        for u, v in itertools.combinations(sorted(set(labels)), 2):
            weights[(u, v)] = weights.get((u, v), 0) + 1
    return Graph(nodes=sorted(nodes), edges=[(u, v, w) for (u, v), w in sorted(weights.items())])


def giant_component(graph: Graph, rank: int = 1) -> Graph:
    """Induced subgraph of the rank-th largest connected component (size
    ties broken by smallest contained node label)."""
    if rank not in (1, 2):
        raise ValueError("rank must be 1 or 2")
    comps = graph.components()
    if len(comps) < rank:
        raise NoSuchComponent(f"graph has {len(comps)} component(s), rank {rank} requested")
    return graph.subgraph(comps[rank - 1])


# ---------------------------------------------------------------------------
# centralities

def centrality(graph: Graph, measure: str) -> CentralityScores:
    if len(graph) == 0:
        raise EmptyGraph("centrality of an empty graph")
    if measure == "degree":
        scores = {n: float(graph.degree(n)) for n in graph.nodes}
        return CentralityScores("degree", scores)
    if measure == "betweenness":
        return CentralityScores("betweenness", _brandes_betweenness(graph))
    if measure == "closeness":
        return CentralityScores("closeness", _closeness(graph))
    if measure == "eigenvector":
        if not graph.is_connected():
            raise DisconnectedGraph("eigenvector centrality needs a connected graph")
        scores, lam = _eigenvector_power(graph)
        return CentralityScores("eigenvector", scores, eigenvalue=lam)
    raise ValueError(f"unknown measure {measure!r}")


def _single_source_paths(graph: Graph, source):
    """BFS giving visit stack, predecessor lists and path counts (Brandes)."""
    dist = {source: 0}
    sigma = {n: 0 for n in graph.nodes}
    sigma[source] = 1
    preds = {n: [] for n in graph.nodes}
    stack = []
    queue = deque([source])
    while queue:
        u = queue.popleft()
        stack.append(u)
        for v in graph.neighbors(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
            if dist[v] == dist[u] + 1:
                sigma[v] += sigma[u]
                preds[v].append(u)
    return stack, preds, sigma, dist


def _brandes_betweenness(graph: Graph) -> dict:
    """Unnormalized betweenness; each unordered pair counted once,
    endpoints excluded (hop-count shortest paths)."""
    bc = {n: 0.0 for n in graph.nodes}
    for source in graph.nodes:
        stack, preds, sigma, _ = _single_source_paths(graph, source)
        delta = {n: 0.0 for n in graph.nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1 + delta[w])
            if w != source:
                bc[w] += delta[w]
    # the undirected accumulation visits each pair from both endpoints
    return {n: bc[n] / 2 for n in graph.nodes}


def _closeness(graph: Graph) -> dict:
    scores = {}
    for source in graph.nodes:
        _, _, _, dist = _single_source_paths(graph, source)
        total = sum(dist.values())
        scores[source] = 1.0 / total if total > 0 else 0.0
    return scores


def _eigenvector_power(graph: Graph):
    """Power iteration on A+I (same eigenvectors as A; the shift makes the
    dominant eigenvalue strictly largest in magnitude, so bipartite graphs
    converge too). Reported eigenvalue is the Rayleigh quotient of A."""
    nodes, a = graph.adjacency_matrix()
    n = len(nodes)
    shifted = a + np.eye(n)
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(POWER_ITERATION_MAX):
        nxt = shifted @ x
        norm = np.linalg.norm(nxt)
        if norm == 0:
            break
        nxt /= norm
        if np.max(np.abs(nxt - x)) < POWER_ITERATION_TOL:
            x = nxt
            break
        x = nxt
    x = np.abs(x)
    x /= np.linalg.norm(x)
    lam = float(x @ a @ x)
    return {node: float(x[i]) for i, node in enumerate(nodes)}, lam


def centrality_distribution(scores: CentralityScores, bins: int) -> AnalysisResult:
    """Equal-width probability histogram of the scores over [min, max]."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if not scores.scores:
        raise EmptyGraph("no scores to bin")
    values = np.array(sorted(scores.scores.values()), dtype=float)
    lo, hi = float(values[0]), float(values[-1])
    if lo == hi:
        rows = [(f"{lo:g}", 1.0)]
        edges = [lo, hi]
    else:
        counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
        probs = counts / counts.sum()
        rows = [
            (f"{edges[i]:g}-{edges[i + 1]:g}", float(probs[i]))
            for i in range(len(counts))
        ]
        edges = [float(e) for e in edges]
    return AnalysisResult(
        kind="centrality_distribution",
        columns=["probability"],
        rows=rows,
        label_name="score_range",
        meta={"measure": scores.measure, "bins": bins, "bin_edges": list(edges)},
    )


# ---------------------------------------------------------------------------
# modularity + communities

def modularity(graph: Graph, assignment: dict) -> float:
    """Weighted Newman modularity Q = sum_c [Sigma_in/(2m) - (Sigma_tot/(2m))^2],
    where Sigma_in counts intra-community weight from both endpoints."""
    if set(assignment) != set(graph.nodes):
        raise PartitionMismatch("partition does not cover exactly the graph's nodes")
    m = graph.total_weight()
    if m == 0:
        return 0.0
    internal = {}
    strength_tot = {}
    strength = {n: sum(graph.neighbors(n).values()) for n in graph.nodes}
    for n in graph.nodes:
        cid = assignment[n]
        strength_tot[cid] = strength_tot.get(cid, 0) + strength[n]
    for u, v, w in graph.edges():
        if assignment[u] == assignment[v]:
            internal[assignment[u]] = internal.get(assignment[u], 0) + 2 * w
    q = 0.0
    for cid, tot in strength_tot.items():
        q += internal.get(cid, 0) / (2 * m) - (tot / (2 * m)) ** 2
    return q


def _canonical_partition(graph: Graph, assignment: dict) -> Partition:
    """Renumber community ids by first appearance in sorted node order."""
    renumber = {}
    canon = {}
    for n in graph.nodes:
        cid = assignment[n]
        if cid not in renumber:
            renumber[cid] = len(renumber)
        canon[n] = renumber[cid]
    return Partition(assignment=canon, modularity=modularity(graph, canon))


def detect_communities(graph: Graph, method: str, seed: int = 0,
                       resolution: float = 1.0) -> Partition:
    if len(graph) == 0:
        raise EmptyGraph("community detection on an empty graph")
    if method == "girvan_newman":
        assignment = _girvan_newman(graph)
    elif method == "greedy_modularity":
        assignment = _greedy_modularity(graph)
    elif method == "leiden":
        assignment = _leiden(graph, seed=seed, resolution=resolution)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _canonical_partition(graph, assignment)


def _components_assignment(graph: Graph) -> dict:
    assignment = {}
    for cid, comp in enumerate(graph.components()):
        for n in comp:
            assignment[n] = cid
    return assignment


def _edge_betweenness(graph: Graph) -> dict:
    """Unweighted edge betweenness, each unordered pair counted once."""
    eb = {(u, v): 0.0 for u, v, _ in graph.edges()}
    for source in graph.nodes:
        stack, preds, sigma, _ = _single_source_paths(graph, source)
        delta = {n: 0.0 for n in graph.nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                c = sigma[v] / sigma[w] * (1 + delta[w])
                key = (v, w) if v < w else (w, v)
                eb[key] += c
                delta[v] += c
    return {e: b / 2 for e, b in eb.items()}


def _girvan_newman(graph: Graph) -> dict:
    """Remove the highest-betweenness edge (ties: lexicographically smallest
    edge) until no edges remain; return the dendrogram partition with
    maximum modularity, evaluated on the original graph."""
    best = _components_assignment(graph)
    best_q = modularity(graph, best)
    work = graph
    while work.edges():
        eb = _edge_betweenness(work)
        top = max(eb.values())
        u, v = min(e for e, b in eb.items() if b == top)
        work = work.without_edge(u, v)
        assignment = _components_assignment(work)
        q = modularity(graph, assignment)
        if q > best_q + 1e-15:
            best, best_q = assignment, q
    return best


def _greedy_modularity(graph: Graph) -> dict:
    """Agglomerative modularity maximization: start from singletons and
    repeatedly merge the community pair with the largest positive gain
    (ties: lexicographically smallest pair of community anchors)."""
    assignment = {n: i for i, n in enumerate(graph.nodes)}
    m = graph.total_weight()
    if m == 0:
        return assignment

    strength = {n: sum(graph.neighbors(n).values()) for n in graph.nodes}
    comm_nodes = {i: {n} for n, i in assignment.items()}
    comm_strength = {assignment[n]: strength[n] for n in graph.nodes}
    # inter-community edge weights
    between = {}
    for u, v, w in graph.edges():
        cu, cv = assignment[u], assignment[v]
        if cu != cv:
            key = (min(cu, cv), max(cu, cv))
            between[key] = between.get(key, 0) + w

    anchor = {i: min(nodes) for i, nodes in comm_nodes.items()}
    while True:
        best = None                          # (negated gain, anchor pair, (ci, cj))
        for (ci, cj), w in between.items():
            # merging ci,cj changes Q by w/m - strength_i*strength_j/(2m^2)
            gain = w / m - comm_strength[ci] * comm_strength[cj] / (2 * m * m)
            key = (-gain, tuple(sorted((anchor[ci], anchor[cj]))))
            if best is None or key < best[:2]:
                best = key + ((ci, cj),)
        if best is None or -best[0] <= 1e-15:
            break
        ci, cj = best[2]
        keep, drop = min(ci, cj), max(ci, cj)
        comm_nodes[keep] |= comm_nodes.pop(drop)
        comm_strength[keep] += comm_strength.pop(drop)
        anchor[keep] = min(anchor[keep], anchor.pop(drop))
        merged = {}
        for (a, b), w in between.items():
            if {a, b} == {ci, cj}:
                continue
            a = keep if a == drop else a
            b = keep if b == drop else b
            key = (min(a, b), max(a, b))
            merged[key] = merged.get(key, 0) + w
        between = merged
        for n in comm_nodes[keep]:
            assignment[n] = keep
    return assignment


def _leiden(graph: Graph, seed: int, resolution: float = 1.0) -> dict:
    """Leiden community detection: seeded local move, refinement within the
    moved communities, aggregation over the refined groups (which inherit
    their parent community as the next level's starting partition). Weighted
    modularity is the quality function; the seed fixes traversal order."""
    rng = random.Random(seed)
    m = graph.total_weight()
    if m == 0:
        return {n: i for i, n in enumerate(graph.nodes)}

    nodes = list(graph.nodes)
    adj = {n: dict(graph.neighbors(n)) for n in nodes}
    self_w = {n: 0 for n in nodes}              # 2x intra weight folded into a node
    node_members = {n: {n} for n in nodes}      # aggregate node -> original nodes
    init_comm = {n: i for i, n in enumerate(nodes)}

    while True:
        strength = {n: self_w[n] + sum(adj[n].values()) for n in nodes}
        comm = _leiden_local_move(nodes, adj, strength, init_comm, m, resolution, rng)

        communities = {}
        for n in nodes:
            communities.setdefault(comm[n], []).append(n)

        if all(len(ns) == 1 for ns in communities.values()):
            break

        refined = _leiden_refine(communities, adj, strength, comm, m, resolution, rng)

        # aggregation: each refined group becomes one node of the next level
        new_nodes = list(range(len(refined)))
        owner = {}
        for rid, (_, group) in enumerate(refined):
            for n in group:
                owner[n] = rid
        new_adj = {r: {} for r in new_nodes}
        new_self = {r: 0 for r in new_nodes}
        for rid, (_, group) in enumerate(refined):
            new_self[rid] = sum(self_w[n] for n in group)
        for u in nodes:
            for v, w in adj[u].items():
                if u < v:
                    ru, rv = owner[u], owner[v]
                    if ru == rv:
                        new_self[ru] += 2 * w
                    else:
                        new_adj[ru][rv] = new_adj[ru].get(rv, 0) + w
                        new_adj[rv][ru] = new_adj[rv].get(ru, 0) + w
        new_members = {}
        for rid, (_, group) in enumerate(refined):
            merged = set()
            for n in group:
                merged |= node_members[n]
            new_members[rid] = merged

        if len(new_nodes) == len(nodes):     # refinement split nothing new: stable
            break
        nodes, adj, self_w, node_members = new_nodes, new_adj, new_self, new_members
        init_comm = {rid: parent for rid, (parent, _) in enumerate(refined)}

    final = {}
    for n in nodes:
        for original in node_members[n]:
            final[original] = comm[n]
    return final


def _leiden_local_move(nodes, adj, strength, init_comm, m, resolution, rng):
    comm = dict(init_comm)
    comm_strength = {}
    for n in nodes:
        comm_strength[comm[n]] = comm_strength.get(comm[n], 0) + strength[n]

    queue = deque(_shuffled(nodes, rng))
    in_queue = set(queue)
    while queue:
        n = queue.popleft()
        in_queue.discard(n)
        old = comm[n]
        comm_strength[old] -= strength[n]
        weights = {}
        for v, w in adj[n].items():
            weights[comm[v]] = weights.get(comm[v], 0) + w

        def gain(target):
            return (weights.get(target, 0) / m
                    - resolution * comm_strength.get(target, 0) * strength[n] / (2 * m * m))

        best_comm, best_gain = old, gain(old)
        for target in sorted(weights):
            g = gain(target)
            if g > best_gain + 1e-15:
                best_comm, best_gain = target, g
        comm[n] = best_comm
        comm_strength[best_comm] = comm_strength.get(best_comm, 0) + strength[n]
        if best_comm != old:
            for v in adj[n]:
                if comm[v] != best_comm and v not in in_queue:
                    queue.append(v)
                    in_queue.add(v)
    return comm


def _leiden_refine(communities, adj, strength, comm, m, resolution, rng):
    """Split each local-move community into refined groups by greedily
    merging singleton members with positive modularity gain. Returns a list
    of (parent community id, member nodes)."""
    refined = []
    for cid in sorted(communities):
        members = communities[cid]
        sub_comm = {n: i for i, n in enumerate(members)}
        sub_size = {i: 1 for i in range(len(members))}
        sub_strength = {sub_comm[n]: strength[n] for n in members}
        for n in _shuffled(members, rng):
            if sub_size[sub_comm[n]] > 1:
                continue                     # only singleton nodes move
            weights = {}
            for v, w in adj[n].items():
                if comm.get(v) == cid and v != n:
                    weights[sub_comm[v]] = weights.get(sub_comm[v], 0) + w
            old_sub = sub_comm[n]
            sub_strength[old_sub] -= strength[n]
            best_sub, best_gain = old_sub, 0.0
            for target in sorted(weights):
                g = (weights[target] / m
                     - resolution * sub_strength.get(target, 0) * strength[n] / (2 * m * m))
                if g > best_gain + 1e-15:
                    best_sub, best_gain = target, g
            sub_comm[n] = best_sub
            sub_strength[best_sub] = sub_strength.get(best_sub, 0) + strength[n]
            if best_sub != old_sub:
                sub_size[old_sub] -= 1
                sub_size[best_sub] += 1
        for sub_id in sorted(set(sub_comm.values())):
            group = [n for n in members if sub_comm[n] == sub_id]
            refined.append((cid, group))
    return refined


def _shuffled(items, rng):
    out = list(items)
    rng.shuffle(out)
    return out


# ---------------------------------------------------------------------------
# result adapters

def centrality_result(scores: CentralityScores) -> AnalysisResult:
    rows = sorted(scores.scores.items(), key=lambda kv: (-kv[1], kv[0]))
    meta = {"measure": scores.measure}
    if scores.eigenvalue is not None:
        meta["eigenvalue"] = scores.eigenvalue
    return AnalysisResult(
        kind="centrality_scores",
        columns=["score"],
        rows=[(n, float(s)) for n, s in rows],
        label_name="node",
        meta=meta,
    )


def graph_result(graph: Graph, partition: Partition | None = None) -> AnalysisResult:
    """Edge-list view of a graph (weight per edge) for charting/CSV; node
    list and optional community assignment ride along in meta."""
    rows = [(f"{u} -- {v}", w) for u, v, w in graph.edges()]
    meta = {"nodes": list(graph.nodes), "edge_separator": " -- "}
    if partition is not None:
        meta["communities"] = {n: partition.assignment[n] for n in sorted(partition.assignment)}
        meta["modularity"] = partition.modularity
    return AnalysisResult(
        kind="network_edges",
        columns=["weight"],
        rows=rows,
        label_name="edge",
        meta=meta,
    )
