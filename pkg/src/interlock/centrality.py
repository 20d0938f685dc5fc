"""Degree, closeness, betweenness and eigenvector centrality at full and partition scope."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import _kernels as K
from .graph import DisconnectedGraphError, Graph, GraphError, connected_components, is_connected

log = logging.getLogger(__name__)

GLOBAL = "global"

# betweenness "auto" policy: exact below this scope size, pivot-sampled above
AUTO_EXACT_LIMIT = 50_000
AUTO_PIVOTS = 10_000


class Measure(str, Enum):
    DEGREE = "degree"
    CLOSENESS = "closeness"
    BETWEENNESS = "betweenness"
    EIGENVECTOR = "eigenvector"

    def __str__(self) -> str:
        return self.value


MEASURES = tuple(Measure)

# float results are rounded to this many significant digits so that values
# equal in exact arithmetic (symmetric nodes) also tie when ranked
SIGNIFICANT_DIGITS = 12


def snap(values: np.ndarray, digits: int = SIGNIFICANT_DIGITS) -> np.ndarray:
    out = np.array(values, dtype=np.float64)
    nz = (out != 0) & np.isfinite(out)
    scale = 10.0 ** (digits - 1 - np.floor(np.log10(np.abs(out[nz]))))
    out[nz] = np.round(out[nz] * scale) / scale
    return out


@dataclass(frozen=True)
class CentralityVector:
    """One measure over one scope, aligned to a graph's node indices.

    ``values`` is NaN for nodes outside ``scope`` ("global" or a partition
    label). ``mode`` records how betweenness was obtained; ``converged`` and
    ``iterations`` are set by the eigenvector iteration.
    """

    measure: Measure
    scope: str
    values: np.ndarray
    normalized: bool = False
    mode: str = "exact"
    converged: bool = True
    iterations: int = 0

    @property
    def nodes(self) -> np.ndarray:
        return np.flatnonzero(~np.isnan(self.values))

    @property
    def size(self) -> int:
        return int(np.count_nonzero(~np.isnan(self.values)))

    def normalize(self) -> CentralityVector:
        """Divide by the largest in-scope value (left as is when that is 0)."""
        if self.normalized:
            return self
        vals = self.values.copy()
        ok = ~np.isnan(vals)
        if ok.any():
            top = vals[ok].max()
            if top > 0:
                vals[ok] /= top
            else:
                log.warning("%s/%s: all values are 0, not rescaled", self.measure, self.scope)
        return replace(self, values=vals, normalized=True)

    def lift(self, parent: np.ndarray, n: int) -> CentralityVector:
        """Re-index onto an enclosing graph of ``n`` nodes via a ``parent`` map."""
        vals = np.full(n, np.nan)
        vals[parent] = self.values
        return replace(self, values=vals)


def _require_connected(g: Graph, what: str) -> None:
    if not is_connected(g):
        raise DisconnectedGraphError(what)


def degree_centrality(g: Graph) -> CentralityVector:
    if g.n < 2:
        raise GraphError("degree centrality needs n >= 2")
    return CentralityVector(Measure.DEGREE, GLOBAL, g.degrees / (g.n - 1.0))


def closeness_centrality(g: Graph) -> CentralityVector:
    """Reciprocal of the summed distance to every other node."""
    _require_connected(g, "closeness centrality")
    if g.n < 2:
        raise GraphError("closeness centrality needs n >= 2")
    sums, _ = K.distance_sums(g.indptr, g.indices)
    return CentralityVector(Measure.CLOSENESS, GLOBAL, 1.0 / sums)


def betweenness_centrality(
    g: Graph, pivots: int | None = None, seed: int | None = None
) -> CentralityVector:
    """Brandes betweenness over unordered pairs.

    With ``pivots`` the dependencies of that many uniformly drawn sources are
    scaled by n / pivots. Sources are processed in ascending order either way,
    so pivots == n reproduces the exact result bit for bit. Values are rounded
    to SIGNIFICANT_DIGITS.
    """
    if pivots is None:
        sources = np.arange(g.n, dtype=np.int32)
        mode = "exact"
    else:
        if not 1 <= pivots <= g.n:
            raise GraphError(f"pivots must lie in [1, {g.n}], got {pivots}")
        rng = np.random.default_rng(0 if seed is None else seed)
        sources = np.sort(rng.choice(g.n, size=pivots, replace=False)).astype(np.int32)
        mode = f"pivots={pivots}"
    if g.n == 0:
        return CentralityVector(Measure.BETWEENNESS, GLOBAL, np.zeros(0), mode=mode)
    partial = K.brandes_partials(g.indptr, g.indices, sources)
    total = np.zeros(g.n)
    for row in partial:
        total += row
    scale = 0.5 * g.n / len(sources)
    return CentralityVector(Measure.BETWEENNESS, GLOBAL, snap(total * scale), mode=mode)


def eigenvector_centrality(
    g: Graph, tol: float = 1e-10, max_iters: int = 1000
) -> CentralityVector:
    """Leading adjacency eigenvector by power iteration, max-normalized.

    Starts proportional to degree and iterates x <- (A + I) x, rescaling to a
    unit maximum after every sweep. The unit shift keeps the iteration from
    oscillating on bipartite graphs without moving the fixed point. Stops once
    the largest per-node change is <= tol; ``converged`` is False if max_iters
    ran out first.
    """
    _require_connected(g, "eigenvector centrality")
    if g.n == 1:
        return CentralityVector(Measure.EIGENVECTOR, GLOBAL, np.ones(1), converged=True)
    a = g.adjacency()
    x = g.degrees.astype(np.float64)
    x /= x.max()
    converged = False
    it = 0
    while it < max_iters:
        it += 1
        y = a @ x
        y += x
        y /= y.max()
        change = np.abs(y - x).max()
        x = y
        if change <= tol:
            converged = True
            break
    if not converged:
        log.warning("eigenvector iteration stopped after %d sweeps (change %.3g)", it, change)
    return CentralityVector(Measure.EIGENVECTOR, GLOBAL, snap(x), converged=converged, iterations=it)


def compute(
    g: Graph,
    measure: Measure | str,
    *,
    pivots: int | None = None,
    seed: int | None = None,
    tol: float = 1e-10,
    max_iters: int = 1000,
) -> CentralityVector:
    """Raw (unnormalized) centrality of every node of ``g``."""
    measure = Measure(measure)
    if measure is Measure.DEGREE:
        return degree_centrality(g)
    if measure is Measure.CLOSENESS:
        return closeness_centrality(g)
    if measure is Measure.BETWEENNESS:
        return betweenness_centrality(g, pivots, seed)
    return eigenvector_centrality(g, tol, max_iters)


def resolve_pivots(pivots: int | str | None, n: int) -> int | None:
    """Pivot count to use on a scope of ``n`` nodes; None means exact.

    Accepts None/0 (exact), a count (clamped to n) or "auto".
    """
    if pivots == "auto":
        return None if n < AUTO_EXACT_LIMIT else min(AUTO_PIVOTS, n)
    if not pivots:
        return None
    return min(int(pivots), n)


def scope_nodes(g: Graph, label: str | None = None) -> np.ndarray:
    """Giant component of ``g`` (label None) or of the subgraph induced by ``label``."""
    if label is None:
        members, sub = np.arange(g.n), g
    else:
        members = g.nodes_in(label)
        sub = g.subgraph(members)
    lab = connected_components(sub)
    if lab.count == 0:
        return members[:0]
    return members[lab.members(lab.giant_id)]


def centrality_at_scope(
    g: Graph,
    label: str | None,
    measure: Measure | str,
    *,
    normalize: bool = False,
    **options,
) -> CentralityVector:
    """Measure computed on the giant component of the scope, indexed like ``g``.

    ``label=None`` means the full network. Every node outside that giant
    component (including members of the partition in smaller pieces) is NaN.
    """
    nodes = scope_nodes(g, label)
    if len(nodes) < 2:
        raise GraphError(
            f"scope {label or GLOBAL!r} has a giant component of {len(nodes)} node(s)"
        )
    sub = g if len(nodes) == g.n else g.subgraph(nodes)
    if "pivots" in options:
        options = dict(options, pivots=resolve_pivots(options["pivots"], sub.n))
    cv = compute(sub, measure, **options)
    cv = replace(cv, scope=GLOBAL if label is None else label).lift(nodes, g.n)
    return cv.normalize() if normalize else cv


def scoped_vectors(
    g: Graph,
    measures,
    labels: list[str] | None = None,
    **options,
) -> tuple[dict[tuple[str | None, Measure], CentralityVector], dict[tuple[str | None, Measure], str]]:
    """Raw vectors for the full network and each partition label.

    Returns ``(vectors, failures)`` keyed by (label, measure), label None for
    the full network; a failure maps to the reason the scope was degenerate.
    """
    vectors: dict = {}
    failures: dict = {}
    labels = g.present_labels() if labels is None else labels
    for measure in map(Measure, measures):
        for label in [None, *labels]:
            key = (label, measure)
            try:
                vectors[key] = centrality_at_scope(g, label, measure, **options)
            except GraphError as exc:
                failures[key] = str(exc)
    return vectors, failures
