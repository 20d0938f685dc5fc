"""Structural statistics: density, clustering, distances, eccentricities, partition tables."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels as K
from .graph import DisconnectedGraphError, Graph, connected_components, extract_giant, is_connected

log = logging.getLogger(__name__)

# above this many unordered pairs, sample with replacement instead
EXACT_SAMPLING_LIMIT = 10**8


def density(g: Graph) -> float | None:
    if g.n < 2:
        return None
    return 2.0 * g.m / (g.n * (g.n - 1))


def average_degree(g: Graph) -> float | None:
    return 2.0 * g.m / g.n if g.n else None


def degree_histogram(g: Graph) -> dict[int, int]:
    deg, cnt = np.unique(g.degrees, return_counts=True)
    return {int(d): int(c) for d, c in zip(deg, cnt)}


def local_clustering(g: Graph) -> np.ndarray:
    """Per-node clustering coefficient; NaN where degree < 2."""
    tri = K.local_triangles(g.indptr, g.indices).astype(np.float64)
    deg = g.degrees.astype(np.float64)
    pairs = deg * (deg - 1) / 2
    out = np.full(g.n, np.nan)
    ok = deg >= 2
    out[ok] = tri[ok] / pairs[ok]
    return out


def clustering_coefficient(g: Graph) -> float | None:
    """Mean local clustering over nodes of degree >= 2."""
    c = local_clustering(g)
    c = c[~np.isnan(c)]
    return float(c.mean()) if len(c) else None


def transitivity(g: Graph) -> float | None:
    """Global clustering: 3 x triangles / connected triples."""
    tri = K.local_triangles(g.indptr, g.indices)
    deg = g.degrees
    triples = int((deg * (deg - 1) // 2).sum())
    return float(tri.sum()) / triples if triples else None


@dataclass
class DistanceDistribution:
    histogram: dict[int, int]
    mean: float
    pairs: int
    exhaustive: bool


def _pair_from_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Decode row-major indices of the strict upper triangle into (i, j), i < j."""
    k = np.asarray(k, dtype=np.int64)
    total = n * (n - 1) // 2
    # number of pairs with first index >= i is (n-i)(n-i-1)/2; invert via sqrt
    rem = total - 1 - k
    t = np.floor((np.sqrt(8.0 * rem + 1.0) - 1.0) / 2.0).astype(np.int64)
    # guard float rounding
    t = np.where((t + 1) * (t + 2) // 2 <= rem, t + 1, t)
    t = np.where(t * (t + 1) // 2 > rem, t - 1, t)
    i = n - 2 - t
    start = total - (n - i) * (n - i - 1) // 2
    j = i + 1 + (k - start)
    return i, j


def sample_node_pairs(n: int, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform unordered node pairs (u < v).

    Without replacement while the pair space is at most EXACT_SAMPLING_LIMIT,
    with replacement above it.
    """
    rng = np.random.default_rng(seed)
    total = n * (n - 1) // 2
    if total <= EXACT_SAMPLING_LIMIT:
        k = np.sort(rng.choice(total, size=count, replace=False))
        return _pair_from_index(k, n)
    u = rng.integers(0, n, size=count)
    v = rng.integers(0, n - 1, size=count)
    v = np.where(v >= u, v + 1, v)  # uniform over v != u
    return np.minimum(u, v), np.maximum(u, v)


def distance_distribution(g: Graph, sample_pairs: int, seed: int) -> DistanceDistribution:
    """Shortest-path length distribution over sampled (or all) node pairs."""
    if sample_pairs < 1:
        raise ValueError("sample_pairs must be >= 1")
    if g.n < 2:
        raise ValueError("distance distribution needs at least two nodes")
    if not is_connected(g):
        raise DisconnectedGraphError("distance_distribution")
    total = g.n * (g.n - 1) // 2
    if sample_pairs >= total:
        raw = K.all_pairs_histogram(g.indptr, g.indices)
        hist = {int(d): int(c) for d, c in enumerate(raw) if c and d > 0}
        pairs = total
        exhaustive = True
    else:
        u, v = sample_node_pairs(g.n, sample_pairs, seed)
        d = K.pair_distances(g.indptr, g.indices, u.astype(np.int32), v.astype(np.int32))
        vals, cnt = np.unique(d, return_counts=True)
        hist = {int(a): int(c) for a, c in zip(vals, cnt)}
        pairs = len(d)
        exhaustive = False
    mean = sum(d * c for d, c in hist.items()) / pairs
    return DistanceDistribution(hist, mean, pairs, exhaustive)


@dataclass
class Eccentricities:
    values: np.ndarray
    radius: int
    diameter: int
    bfs_runs: int

    def histogram(self) -> dict[int, int]:
        e, c = np.unique(self.values, return_counts=True)
        return {int(a): int(b) for a, b in zip(e, c)}


def eccentricity_all(g: Graph) -> Eccentricities:
    if g.n < 1:
        raise ValueError("eccentricity needs at least one node")
    if not is_connected(g):
        raise DisconnectedGraphError("eccentricity_all")
    ecc, runs = K.bounded_eccentricities(g.indptr, g.indices)
    return Eccentricities(ecc, int(ecc.min()), int(ecc.max()), int(runs))


def edge_label_counts(g: Graph, label: str) -> tuple[int, int]:
    """(internal edges, cross edges) for one partition label."""
    code = g.label_code(label)
    u, v, _ = g.edges()
    pu = g.partition[u] == code
    pv = g.partition[v] == code
    return int(np.count_nonzero(pu & pv)), int(np.count_nonzero(pu ^ pv))


def transnational_factor(g: Graph, label: str) -> float | None:
    """Cross-partition edges of ``label`` divided by its internal edges."""
    internal, cross = edge_label_counts(g, label)
    if internal == 0:
        log.warning("partition %r has no internal edges; transnational factor undefined", label)
        return None
    return cross / internal


@dataclass
class TopologyReport:
    n: int
    m: int
    density: float | None
    avg_degree: float | None
    clustering: float | None
    transitivity: float | None
    degree_histogram: dict[int, int]
    component_size_histogram: dict[int, int]
    components: int
    giant_n: int
    giant_m: int
    avg_distance: float | None = None
    distance_pairs: int = 0
    distance_exhaustive: bool = False
    distance_histogram: dict[int, int] = field(default_factory=dict)
    eccentricity_histogram: dict[int, int] = field(default_factory=dict)
    radius: int | None = None
    diameter: int | None = None
    eccentricity_bfs_runs: int = 0
    # per-node, giant component only; serialized separately
    eccentricities: dict[str, int] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("eccentricities")
        return d


def topology_report(
    g: Graph, sample_pairs: int, seed: int, eccentricities: bool = True
) -> TopologyReport:
    """Whole-graph statistics; distances and eccentricities use the giant component."""
    lab = connected_components(g)
    rep = TopologyReport(
        n=g.n,
        m=g.m,
        density=density(g),
        avg_degree=average_degree(g),
        clustering=clustering_coefficient(g),
        transitivity=transitivity(g),
        degree_histogram=degree_histogram(g),
        component_size_histogram=lab.size_histogram(),
        components=lab.count,
        giant_n=0,
        giant_m=0,
    )
    if g.n == 0:
        return rep
    giant = g.subgraph(lab.members(lab.giant_id))
    rep.giant_n, rep.giant_m = giant.n, giant.m
    if giant.n >= 2:
        dd = distance_distribution(giant, sample_pairs, seed)
        rep.avg_distance = dd.mean
        rep.distance_pairs = dd.pairs
        rep.distance_exhaustive = dd.exhaustive
        rep.distance_histogram = dd.histogram
    if eccentricities:
        ecc = eccentricity_all(giant)
        rep.eccentricity_histogram = ecc.histogram()
        rep.radius, rep.diameter = ecc.radius, ecc.diameter
        rep.eccentricity_bfs_runs = ecc.bfs_runs
        rep.eccentricities = {giant.ids[i]: int(e) for i, e in enumerate(ecc.values)}
    return rep


@dataclass
class PartitionRow:
    partition: str
    nodes: int
    giant_nodes: int
    giant_edges: int
    density: float | None
    clustering: float | None
    avg_distance: float | None
    internal_edges: int
    cross_edges: int
    transnational_factor: float | None


def partition_table(g: Graph, sample_pairs: int, seed: int) -> list[PartitionRow]:
    """Per-partition rows computed on the giant component of each induced subgraph."""
    rows = []
    for label in g.present_labels():
        members = g.nodes_in(label)
        induced = g.subgraph(members)
        giant = extract_giant(induced)
        internal, cross = edge_label_counts(g, label)
        avg = None
        if giant.n >= 2:
            avg = distance_distribution(giant, sample_pairs, seed).mean
        rows.append(PartitionRow(
            partition=label,
            nodes=len(members),
            giant_nodes=giant.n,
            giant_edges=giant.m,
            density=density(giant),
            clustering=clustering_coefficient(giant),
            avg_distance=avg,
            internal_edges=internal,
            cross_edges=cross,
            transnational_factor=cross / internal if internal else None,
        ))
    return rows
