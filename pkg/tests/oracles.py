"""Independent brute-force oracles for the network measures.

Everything here recomputes results from first principles (path enumeration
over BFS layers, dense eigendecomposition, exhaustive partition search) and
must never import the algorithms under test.
"""

import itertools
import random
from collections import deque

import numpy as np


def bfs(adj, source):
    """(distance, shortest-path count) maps from source over hop counts."""
    dist = {source: 0}
    sigma = {source: 1}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                sigma[v] = 0
                queue.append(v)
            if dist[v] == dist[u] + 1:
                sigma[v] += sigma[u]
    return dist, sigma


def brute_degree(adj):
    return {v: float(len(adj[v])) for v in adj}


def brute_closeness(adj):
    out = {}
    for v in adj:
        dist, _ = bfs(adj, v)
        total = sum(dist.values())
        out[v] = 1.0 / total if total > 0 else 0.0
    return out


def brute_betweenness(adj):
    """C_B(v) = sum over unordered pairs s<t of sigma_st(v)/sigma_st, using
    sigma_st(v) = sigma_s(v) * sigma_v(t) when v lies on a shortest path."""
    nodes = sorted(adj)
    dist = {}
    sigma = {}
    for v in nodes:
        dist[v], sigma[v] = bfs(adj, v)
    bc = {v: 0.0 for v in nodes}
    for s, t in itertools.combinations(nodes, 2):
        if t not in dist[s]:
            continue
        d_st = dist[s][t]
        total = sigma[s][t]
        for v in nodes:
            if v in (s, t) or v not in dist[s] or t not in dist[v]:
                continue
            if dist[s][v] + dist[v][t] == d_st:
                bc[v] += sigma[s][v] * sigma[v][t] / total
    return bc


def brute_eigenvector(adj, weights):
    """Principal eigenvector of the weighted adjacency matrix by dense
    symmetric eigendecomposition; nonnegative, unit Euclidean norm."""
    nodes = sorted(adj)
    pos = {n: i for i, n in enumerate(nodes)}
    a = np.zeros((len(nodes), len(nodes)))
    for (u, v), w in weights.items():
        a[pos[u], pos[v]] = w
        a[pos[v], pos[u]] = w
    eigenvalues, vectors = np.linalg.eigh(a)
    principal = np.abs(vectors[:, -1])
    principal /= np.linalg.norm(principal)
    return {n: float(principal[pos[n]]) for n in nodes}, float(eigenvalues[-1])


def modularity_of(adj_weights, assignment, nodes):
    """Q = sum_c [Sigma_in/(2m) - (Sigma_tot/(2m))^2]; Sigma_in counts each
    intra edge from both endpoints."""
    m = sum(adj_weights.values())
    if m == 0:
        return 0.0
    strength = {n: 0.0 for n in nodes}
    for (u, v), w in adj_weights.items():
        strength[u] += w
        strength[v] += w
    internal = {}
    tot = {}
    for n in nodes:
        tot[assignment[n]] = tot.get(assignment[n], 0) + strength[n]
    for (u, v), w in adj_weights.items():
        if assignment[u] == assignment[v]:
            internal[assignment[u]] = internal.get(assignment[u], 0) + 2 * w
    return sum(internal.get(c, 0) / (2 * m) - (tot[c] / (2 * m)) ** 2 for c in tot)


def all_partitions(items):
    """Every set partition (restricted-growth enumeration)."""
    items = list(items)
    if not items:
        yield {}
        return

    def rec(i, groups):
        if i == len(items):
            yield {item: gi for gi, group in enumerate(groups) for item in group}
            return
        for g in groups:
            g.append(items[i])
            yield from rec(i + 1, groups)
            g.pop()
        groups.append([items[i]])
        yield from rec(i + 1, groups)
        groups.pop()

    yield from rec(0, [])


def brute_max_modularity(adj_weights, nodes):
    best_q = float("-inf")
    best = None
    for assignment in all_partitions(nodes):
        q = modularity_of(adj_weights, assignment, nodes)
        if q > best_q:
            best_q, best = q, dict(assignment)
    return best_q, best


def random_connected_graph(rng: random.Random, n_nodes: int, extra_edge_prob=0.3,
                           max_weight=3):
    """Random connected weighted graph: a random spanning tree plus random
    extra edges. Returns (adjacency sets, edge weights keyed (u, v) u<v)."""
    nodes = [f"n{i}" for i in range(n_nodes)]
    adj = {v: set() for v in nodes}
    weights = {}

    def add(u, v):
        if u == v or (min(u, v), max(u, v)) in weights:
            return
        adj[u].add(v)
        adj[v].add(u)
        weights[(min(u, v), max(u, v))] = rng.randint(1, max_weight)

    shuffled = nodes[:]
    rng.shuffle(shuffled)
    for i in range(1, len(shuffled)):
        add(shuffled[i], shuffled[rng.randrange(i)])
    for u, v in itertools.combinations(nodes, 2):
        if rng.random() < extra_edge_prob:
            add(u, v)
    return adj, weights
