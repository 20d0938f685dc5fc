"""Small graph builders shared by the test modules."""

from __future__ import annotations

import random

import numpy as np

from interlock.graph import Graph, from_arrays

import oracles


def int_graph(n, edges, labels_of=None, attributes=None) -> Graph:
    """Graph over nodes 0..n-1 with ids v00, v01, ... (sorting keeps index order)."""
    width = len(str(max(n - 1, 0)))
    ids = [f"v{i:0{width}d}" for i in range(n)]
    src = np.array([u for u, _ in edges], dtype=np.int64)
    dst = np.array([v for _, v in edges], dtype=np.int64)
    codes, labels = None, ()
    if labels_of is not None:
        labels = sorted({x for x in labels_of if x is not None})
        codes = np.array([-1 if x is None else labels.index(x) for x in labels_of], dtype=np.int32)
    return from_arrays(n, src, dst, None, ids, codes, labels, attributes)


def path(n):
    return int_graph(n, [(i, i + 1) for i in range(n - 1)])


def star(n):
    return int_graph(n, [(0, i) for i in range(1, n)])


def complete(n):
    return int_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_connected(seed, n, extra=0.15):
    rng = random.Random(seed)
    edges = oracles.random_connected_edges(rng, n, extra)
    return int_graph(n, edges), oracles.adjacency(n, edges)


def random_partitioned(seed, n, parts=3, p_in=0.3, p_out=0.05):
    """Random labeled graph (not necessarily connected) plus its oracle adjacency."""
    rng = random.Random(seed)
    labels_of = [f"P{rng.randrange(parts)}" for _ in range(n)]
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < (p_in if labels_of[u] == labels_of[v] else p_out)
    ]
    return int_graph(n, edges, labels_of), oracles.adjacency(n, edges), labels_of
