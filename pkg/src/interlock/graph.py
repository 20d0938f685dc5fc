"""Immutable compressed-adjacency graph with partition labels and node attributes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc


class GraphError(ValueError):
    pass


class DisconnectedGraphError(GraphError):
    """Raised by distance-based operations that need a single component."""

    def __init__(self, what: str = "operation"):
        super().__init__(
            f"{what} requires a connected graph; call extract_giant() first"
        )


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Undirected simple graph in CSR form.

    Edge multiplicity lives in ``weights`` (aligned with ``indices``); no
    centrality or distance routine reads it. ``partition`` holds integer codes
    into ``labels`` with -1 for unlabeled nodes. Attribute arrays use NaN for
    missing values. ``parent`` maps nodes back to the graph this one was cut
    from, if any.
    """

    def __init__(
        self,
        indptr: np.ndarray,
        indices: np.ndarray,
        weights: np.ndarray,
        ids: Sequence[str],
        partition: np.ndarray | None = None,
        labels: Sequence[str] = (),
        attributes: Mapping[str, np.ndarray] | None = None,
        parent: np.ndarray | None = None,
    ):
        n = len(indptr) - 1
        if len(ids) != n:
            raise GraphError(f"{len(ids)} ids for {n} nodes")
        self.indptr = _readonly(np.ascontiguousarray(indptr, dtype=np.int64))
        self.indices = _readonly(np.ascontiguousarray(indices, dtype=np.int32))
        self.weights = _readonly(np.ascontiguousarray(weights, dtype=np.int64))
        self.ids = tuple(ids)
        if partition is None:
            partition = np.full(n, -1, dtype=np.int32)
        self.partition = _readonly(np.ascontiguousarray(partition, dtype=np.int32))
        self.labels = tuple(labels)
        self.attributes = {
            k: _readonly(np.asarray(v, dtype=np.float64).copy())
            for k, v in (attributes or {}).items()
        }
        for k, v in self.attributes.items():
            if len(v) != n:
                raise GraphError(f"attribute {k!r} has {len(v)} entries for {n} nodes")
        self.parent = None if parent is None else _readonly(np.asarray(parent, dtype=np.int64))

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        return _readonly(np.diff(self.indptr))

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.ids)}

    def node(self, external_id: str) -> int:
        try:
            return self.index[external_id]
        except KeyError:
            raise GraphError(f"unknown node id {external_id!r}") from None

    @cached_property
    def sources(self) -> np.ndarray:
        """Row index of every CSR entry (the source of each directed half-edge)."""
        return _readonly(np.repeat(np.arange(self.n, dtype=np.int32), self.degrees))

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once as (u, v, weight) arrays with u < v."""
        src = self.sources
        keep = src < self.indices
        return src[keep], self.indices[keep], self.weights[keep]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def label_of(self, v: int) -> str | None:
        code = self.partition[v]
        return None if code < 0 else self.labels[code]

    def label_code(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise GraphError(f"unknown partition label {label!r}") from None

    def nodes_in(self, label: str) -> np.ndarray:
        return np.flatnonzero(self.partition == self.label_code(label))

    def present_labels(self) -> list[str]:
        """Labels carried by at least one node, sorted."""
        codes = np.unique(self.partition[self.partition >= 0])
        return sorted(self.labels[c] for c in codes)

    def adjacency(self) -> csr_matrix:
        """Unweighted symmetric adjacency matrix (float64, ones)."""
        data = np.ones(len(self.indices), dtype=np.float64)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def subgraph(self, nodes: Iterable[int]) -> Graph:
        """Node-induced subgraph; ``parent`` of the result indexes into self."""
        if not isinstance(nodes, np.ndarray):
            nodes = np.fromiter(nodes, dtype=np.int64)
        nodes = np.unique(nodes.astype(np.int64))
        if len(nodes) and (nodes[0] < 0 or nodes[-1] >= self.n):
            raise GraphError("subgraph node index out of range")
        k = len(nodes)
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[nodes] = np.arange(k)
        src = self.sources
        keep = (remap[src] >= 0) & (remap[self.indices] >= 0)
        # remap is monotone, so CSR row order and sorted neighbor lists survive
        new_src = remap[src[keep]]
        indptr = np.zeros(k + 1, dtype=np.int64)
        np.cumsum(np.bincount(new_src, minlength=k), out=indptr[1:])
        return Graph(
            indptr,
            remap[self.indices[keep]],
            self.weights[keep],
            [self.ids[i] for i in nodes],
            self.partition[nodes],
            self.labels,
            {name: a[nodes] for name, a in self.attributes.items()},
            parent=nodes,
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, partitions={len(self.present_labels())})"


def from_arrays(
    n: int,
    src: np.ndarray,
    dst: np.ndarray,
    weight: np.ndarray | None = None,
    ids: Sequence[str] | None = None,
    partition: np.ndarray | None = None,
    labels: Sequence[str] = (),
    attributes: Mapping[str, np.ndarray] | None = None,
) -> Graph:
    """Build from integer endpoint arrays. Parallel entries are merged by summing weight."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    weight = np.ones(len(src), dtype=np.int64) if weight is None else np.asarray(weight, dtype=np.int64)
    if not (len(src) == len(dst) == len(weight)):
        raise GraphError("endpoint and weight arrays differ in length")
    if ids is None:
        ids = [str(i) for i in range(n)]
    loops = np.flatnonzero(src == dst)
    if len(loops):
        raise GraphError(f"self-loop on node {ids[src[loops[0]]]!r}")
    if len(weight) and weight.min() < 1:
        bad = int(np.argmin(weight))
        raise GraphError(
            f"multiplicity {weight[bad]} < 1 on edge ({ids[src[bad]]!r}, {ids[dst[bad]]!r})"
        )
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    key, inverse = np.unique(lo * n + hi, return_inverse=True)
    w = np.bincount(inverse, weights=weight, minlength=len(key)).astype(np.int64)
    u, v = key // n, key % n
    # both directions, sorted by (row, col)
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    ww = np.concatenate([w, w])
    order = np.lexsort((cols, rows))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return Graph(indptr, cols[order], ww[order], ids, partition, labels, attributes)


def build_graph(
    edges: Iterable[tuple[str, str, int]],
    nodes: Iterable[str] = (),
    partition: Mapping[str, str | None] | None = None,
    attributes: Mapping[str, Mapping[str, float | None]] | None = None,
) -> Graph:
    """Build a graph from (id, id, multiplicity) triples.

    ``nodes`` are interned first, in the given order, so isolated nodes can be
    kept and the index order pinned; remaining ids are interned on first
    appearance. ``partition`` maps id -> label, ``attributes`` maps
    attribute name -> {id: value}.
    """
    index: dict[str, int] = {}
    ids: list[str] = []

    def intern(s: str) -> int:
        i = index.get(s)
        if i is None:
            i = index[s] = len(ids)
            ids.append(s)
        return i

    for s in nodes:
        intern(s)
    src, dst, wt = [], [], []
    for a, b, mult in edges:
        if a == b:
            raise GraphError(f"self-loop on node {a!r}")
        if mult < 1:
            raise GraphError(f"multiplicity {mult} < 1 on edge ({a!r}, {b!r})")
        src.append(intern(a))
        dst.append(intern(b))
        wt.append(mult)
    n = len(ids)

    codes = None
    labels: list[str] = []
    if partition:
        labels = sorted({p for p in partition.values() if p is not None})
        lookup = {p: i for i, p in enumerate(labels)}
        codes = np.array(
            [lookup.get(partition.get(s)) if partition.get(s) is not None else -1 for s in ids],
            dtype=np.int32,
        )
    attrs = {}
    for name, values in (attributes or {}).items():
        attrs[name] = np.array(
            [np.nan if values.get(s) is None else float(values[s]) for s in ids]
        )
    return from_arrays(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                       np.array(wt, dtype=np.int64), ids, codes, labels, attrs)


def induced_subgraph(g: Graph, label: str) -> Graph:
    """Nodes carrying ``label`` and only the edges between them."""
    return g.subgraph(g.nodes_in(label))


@dataclass(frozen=True)
class ComponentLabeling:
    component_id: np.ndarray
    component_sizes: np.ndarray
    giant_id: int

    @property
    def count(self) -> int:
        return len(self.component_sizes)

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.component_id == cid)

    def size_histogram(self) -> dict[int, int]:
        sizes, counts = np.unique(self.component_sizes, return_counts=True)
        return {int(s): int(c) for s, c in zip(sizes, counts)}


def connected_components(g: Graph) -> ComponentLabeling:
    """Component ids are numbered by each component's lowest node index."""
    if g.n == 0:
        return ComponentLabeling(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), -1)
    _, raw = _cc(g.adjacency(), directed=False)
    _, first = np.unique(raw, return_index=True)
    relabel = np.empty(len(first), dtype=np.int64)
    relabel[raw[np.sort(first)]] = np.arange(len(first))
    cid = relabel[raw]
    sizes = np.bincount(cid)
    # argmax returns the first maximum, i.e. the lowest id on ties
    return ComponentLabeling(cid, sizes, int(np.argmax(sizes)))


def giant_nodes(g: Graph) -> np.ndarray:
    lab = connected_components(g)
    return lab.members(lab.giant_id)


def extract_giant(g: Graph) -> Graph:
    if g.n < 1:
        raise GraphError("extract_giant needs at least one node")
    return g.subgraph(giant_nodes(g))


def is_connected(g: Graph) -> bool:
    return g.n > 0 and connected_components(g).count == 1
