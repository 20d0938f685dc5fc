"""Tie-aware ranking, rank correlation, and partition-vs-full ranking comparison.

Three comparisons between a partition's ranking and the full network's:

* top-k overlap: shared members of the two top-k lists, divided by k;
* persistence: Spearman correlation between the partition-scope and the
  full-scope centrality of the partition's nodes;
* ranking dominance: 1/2 minus the partition's mean full-network rank over
  (|V| + 1); positive when the partition sits above the middle.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .centrality import CentralityVector, Measure, centrality_at_scope, scoped_vectors
from .graph import Graph, GraphError
from .topology import edge_label_counts

log = logging.getLogger(__name__)

MIN_SCOPE = 3


@dataclass(frozen=True)
class RankVector:
    """Fractional ranks (1 = most central) for the nodes in ``nodes``."""

    nodes: np.ndarray
    ranks: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    def as_array(self, n: int) -> np.ndarray:
        out = np.full(n, np.nan)
        out[self.nodes] = self.ranks
        return out


def rank_with_ties(values: Sequence[float], nodes: Sequence[int] | None = None) -> RankVector:
    """Descending ranks; tied values share the mean of the positions they span."""
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("rank_with_ties needs a non-empty 1-D vector")
    if np.isnan(a).any():
        raise ValueError("rank_with_ties got null values")
    n = a.size
    order = np.argsort(-a, kind="mergesort")
    s = a[order]
    breaks = np.flatnonzero(s[1:] != s[:-1]) + 1
    starts = np.concatenate(([0], breaks))
    ends = np.concatenate((breaks, [n]))
    ranks = np.empty(n)
    ranks[order] = np.repeat((starts + ends + 1) / 2.0, ends - starts)
    nodes = np.arange(n) if nodes is None else np.asarray(nodes, dtype=np.int64)
    return RankVector(nodes, ranks)


def ranks_of(cv: CentralityVector) -> RankVector:
    nodes = cv.nodes
    return rank_with_ties(cv.values[nodes], nodes)


def _overlap(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"vectors differ in length: {a.shape} vs {b.shape}")
    ok = ~(np.isnan(a) | np.isnan(b))
    return a[ok], b[ok]


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    x = x - x.mean()
    y = y - y.mean()
    sxx = float(np.dot(x, x))
    syy = float(np.dot(y, y))
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(np.dot(x, y)) / np.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman(a, b) -> float | None:
    """Pearson correlation of average-tie ranks over entries non-null in both.

    None when fewer than three entries overlap or either side is constant.
    """
    x, y = _overlap(a, b)
    if len(x) < MIN_SCOPE:
        log.info("spearman: only %d overlapping entries", len(x))
        return None
    return _pearson(rank_with_ties(x).ranks, rank_with_ties(y).ranks)


def _tied_pairs(*cols: np.ndarray) -> int:
    _, counts = np.unique(np.stack(cols, axis=1), axis=0, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def kendall_tau(a, b) -> float | None:
    """Kendall's tau-b over entries non-null in both."""
    x, y = _overlap(a, b)
    n = len(x)
    if n < MIN_SCOPE:
        log.info("kendall_tau: only %d overlapping entries", n)
        return None
    n0 = n * (n - 1) // 2
    tx = _tied_pairs(x)
    ty = _tied_pairs(y)
    txy = _tied_pairs(x, y)
    order = np.lexsort((y, x))
    codes = np.unique(y, return_inverse=True)[1].reshape(-1)[order]
    # after sorting by (x, y) every inversion in y is a strictly discordant pair
    discordant = int(K.inversions(codes.astype(np.int64)))
    concordant = n0 - tx - ty + txy - discordant
    denom = np.sqrt(float(n0 - tx) * float(n0 - ty))
    if denom == 0.0:
        return None
    return float((concordant - discordant) / denom)


def top_k(rank: RankVector, k: int, keys: np.ndarray | None = None) -> tuple[np.ndarray, bool]:
    """The k best-ranked nodes and whether the cut splits a tie group.

    Inside a tie group, nodes are taken in ascending ``keys`` order (indexed
    by node; defaults to the node index itself).
    """
    if not 0 < k <= len(rank):
        raise ValueError(f"k={k} outside [1, {len(rank)}]")
    tiebreak = rank.nodes if keys is None else np.asarray(keys)[rank.nodes]
    order = np.lexsort((tiebreak, rank.ranks))
    straddles = k < len(rank) and rank.ranks[order[k - 1]] == rank.ranks[order[k]]
    return rank.nodes[order[:k]], bool(straddles)


def top_k_overlap(
    full: RankVector, partition: RankVector, k: int, keys: np.ndarray | None = None
) -> float:
    """Fraction of the partition's top-k that also appears in the full top-k."""
    if not 0 < k <= len(partition):
        raise ValueError(f"k={k} outside [1, {len(partition)}]")
    a, _ = top_k(full, min(k, len(full)), keys)
    b, _ = top_k(partition, k, keys)
    return len(np.intersect1d(a, b)) / k


def dominance_from_ranks(ranks: Sequence[float], n_full: int) -> float:
    r = np.asarray(ranks, dtype=np.float64)
    if r.size == 0:
        raise ValueError("ranking dominance of an empty set")
    return 0.5 - float(r.sum()) / (r.size * (n_full + 1))


def extend_dominance(rd: float, size: int, rank: float, n_full: int) -> float:
    """Dominance of S + {s} from that of S: the size-weighted mean of per-node terms."""
    return (size * rd + (0.5 - rank / (n_full + 1))) / (size + 1)


def ranking_dominance(full_values, scope) -> float:
    """rd(S, V) with V the non-null entries of ``full_values`` and S = ``scope``."""
    full_values = np.asarray(full_values, dtype=np.float64)
    scope = np.asarray(scope, dtype=np.int64)
    if scope.size == 0:
        raise ValueError("ranking dominance of an empty set")
    if np.isnan(full_values[scope]).any():
        raise ValueError("scope contains nodes without a full-network value")
    rv = rank_with_ties(full_values[~np.isnan(full_values)], np.flatnonzero(~np.isnan(full_values)))
    return dominance_from_ranks(rv.as_array(len(full_values))[scope], len(rv))


def persistence(
    g: Graph,
    label: str,
    measure: Measure | str,
    *,
    full: CentralityVector | None = None,
    part: CentralityVector | None = None,
    **options,
) -> float | None:
    """Spearman between national (induced giant) and full-network centrality.

    None, with a logged reason, when either scope is degenerate or fewer than
    three nodes are comparable.
    """
    try:
        if full is None:
            full = centrality_at_scope(g, None, measure, **options)
        if part is None:
            part = centrality_at_scope(g, label, measure, **options)
    except GraphError as exc:
        log.warning("persistence %s/%s undefined: %s", label, measure, exc)
        return None
    return spearman(part.values, full.values)


def attribute_correlation(
    g: Graph,
    measure: Measure | str,
    attribute: str,
    label: str | None = None,
    *,
    vector: CentralityVector | None = None,
    **options,
) -> float | None:
    """Spearman between scoped centrality and a node attribute, nulls dropped pairwise."""
    if attribute not in g.attributes:
        raise KeyError(f"unknown attribute {attribute!r}")
    if vector is None:
        vector = centrality_at_scope(g, label, measure, **options)
    return spearman(vector.values, g.attributes[attribute])


@dataclass
class EmbeddednessRecord:
    partition: str
    measure: str
    persistence: float | None
    dominance: float | None
    top_k_overlap: dict[int, float | None] = field(default_factory=dict)
    top_k_straddle: dict[int, bool] = field(default_factory=dict)
    transnational_factor: float | None = None
    n_partition: int = 0
    n_scope: int = 0
    n_full: int = 0
    reasons: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def id_order_keys(g: Graph) -> np.ndarray:
    """Position of each node in ascending external-id order (tie-break key)."""
    keys = np.empty(g.n, dtype=np.int64)
    keys[sorted(range(g.n), key=g.ids.__getitem__)] = np.arange(g.n)
    return keys


def embeddedness_report(
    g: Graph,
    measures: Sequence[Measure | str],
    ks: Sequence[int] = (10,),
    *,
    vectors: dict | None = None,
    failures: dict | None = None,
    **options,
) -> list[EmbeddednessRecord]:
    """Persistence, dominance and top-k overlap per (partition, measure).

    Sorted by partition label, then by the order of ``measures``. Degenerate
    cases leave the field None and add a reason code.
    """
    labels = g.present_labels()
    if vectors is None:
        vectors, failures = scoped_vectors(g, measures, labels, **options)
    failures = failures or {}
    keys = id_order_keys(g)
    # full-network rankings and top-k lists do not depend on the partition
    full_info = {}
    for measure in map(Measure, measures):
        full = vectors.get((None, measure))
        if full is None:
            continue
        fr = ranks_of(full)
        tops = {k: top_k(fr, min(k, len(fr)), keys) for k in ks}
        full_info[measure] = (full, fr, fr.as_array(g.n), tops)

    records = []
    for label in labels:
        members = g.nodes_in(label)
        internal, cross = edge_label_counts(g, label)
        factor = cross / internal if internal else None
        for measure in map(Measure, measures):
            rec = EmbeddednessRecord(
                partition=label,
                measure=measure.value,
                persistence=None,
                dominance=None,
                top_k_overlap={k: None for k in ks},
                top_k_straddle={k: False for k in ks},
                transnational_factor=factor,
                n_partition=len(members),
            )
            if factor is None:
                rec.reasons.append("no_internal_edges")
            records.append(rec)
            if measure not in full_info:
                rec.reasons.append("no_full_scope")
                continue
            full, full_ranks, rank_arr, full_tops = full_info[measure]
            rec.n_full = len(full_ranks)

            in_full = members[~np.isnan(full.values[members])]
            if len(in_full) >= MIN_SCOPE:
                rec.dominance = dominance_from_ranks(rank_arr[in_full], len(full_ranks))
            else:
                rec.reasons.append("dominance_scope_lt_3")

            part = vectors.get((label, measure))
            if part is None:
                rec.reasons.append("no_partition_scope")
                continue
            rec.n_scope = part.size
            comparable = np.count_nonzero(~np.isnan(part.values) & ~np.isnan(full.values))
            if comparable >= MIN_SCOPE:
                rec.persistence = spearman(part.values, full.values)
                if rec.persistence is None:
                    rec.reasons.append("zero_variance")
            else:
                rec.reasons.append("persistence_scope_lt_3")

            part_ranks = ranks_of(part)
            for k in ks:
                if k > len(part_ranks):
                    rec.reasons.append(f"k{k}_gt_scope")
                    continue
                top_full, s_full = full_tops[k]
                top_part, s_part = top_k(part_ranks, k, keys)
                rec.top_k_overlap[k] = len(np.intersect1d(top_full, top_part)) / k
                rec.top_k_straddle[k] = s_full or s_part
    for (label, measure), why in failures.items():
        log.info("scope %s/%s skipped: %s", label, measure, why)
    return records


def measure_matrix(
    vectors: dict[Measure, CentralityVector]
) -> dict[str, dict[str, float | None]]:
    """Pairwise Spearman correlation among measures on a shared scope."""
    names = list(vectors)
    return {
        Measure(a).value: {Measure(b).value: spearman(vectors[a].values, vectors[b].values) for b in names}
        for a in names
    }
