"""Compiled traversal kernels over CSR arrays (indptr: int64, indices: int32).

Parallel loops split work into a fixed number of contiguous chunks whose
outputs are either disjoint or reduced in chunk order, so results do not
depend on the thread schedule.
"""

import numba as nb
import numpy as np

# the bundled TBB is too old for numba and only produces a warning
nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

BLOCKS = 16


@nb.njit(cache=True, nogil=True)
def _bfs(indptr, indices, source, dist, queue):
    """Fill ``dist`` (pre-set to -1) from ``source``; return the visit count.

    ``queue[:count]`` holds visited nodes in BFS order, which callers use to
    reset ``dist``.
    """
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = dv
                queue[tail] = w
                tail += 1
    return tail


@nb.njit(cache=True)
def bfs_distances(indptr, indices, source):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    _bfs(indptr, indices, source, dist, queue)
    return dist


@nb.njit(cache=True)
def _chunk(i, nchunks, total):
    return (i * total) // nchunks, ((i + 1) * total) // nchunks


@nb.njit(parallel=True, cache=True)
def distance_sums(indptr, indices):
    """Per-source sum of BFS distances and number of nodes reached."""
    n = len(indptr) - 1
    sums = np.zeros(n, dtype=np.int64)
    reached = np.zeros(n, dtype=np.int64)
    nchunks = min(n, BLOCKS)
    for c in nb.prange(nchunks):
        lo, hi = _chunk(c, nchunks, n)
        dist = np.full(n, -1, dtype=np.int32)
        queue = np.empty(n, dtype=np.int32)
        for s in range(lo, hi):
            cnt = _bfs(indptr, indices, s, dist, queue)
            total = 0
            for i in range(cnt):
                total += dist[queue[i]]
                dist[queue[i]] = -1
            sums[s] = total
            reached[s] = cnt
    return sums, reached


@nb.njit(parallel=True, cache=True)
def all_pairs_histogram(indptr, indices):
    """Histogram of d(u, v) over unordered pairs u < v in the same component."""
    n = len(indptr) - 1
    nchunks = max(1, min(n, BLOCKS))
    parts = np.zeros((nchunks, n + 1), dtype=np.int64)
    for c in nb.prange(nchunks):
        lo, hi = _chunk(c, nchunks, n)
        dist = np.full(n, -1, dtype=np.int32)
        queue = np.empty(n, dtype=np.int32)
        for s in range(lo, hi):
            cnt = _bfs(indptr, indices, s, dist, queue)
            for i in range(cnt):
                w = queue[i]
                if w > s:
                    parts[c, dist[w]] += 1
                dist[w] = -1
    hist = np.zeros(n + 1, dtype=np.int64)
    for c in range(nchunks):
        hist += parts[c]
    return hist


@nb.njit(cache=True, nogil=True)
def _bidirectional(indptr, indices, u, v, df, db, qf, qb):
    if u == v:
        return 0
    df[u] = 0
    qf[0] = u
    fh, ft = 0, 1
    db[v] = 0
    qb[0] = v
    bh, bt = 0, 1
    best = -1
    while best < 0 and fh < ft and bh < bt:
        # grow the side with the smaller frontier by one whole level
        if ft - fh <= bt - bh:
            end = ft
            for i in range(fh, end):
                x = qf[i]
                dx = df[x] + 1
                for k in range(indptr[x], indptr[x + 1]):
                    y = indices[k]
                    if db[y] >= 0:
                        cand = dx + db[y]
                        if best < 0 or cand < best:
                            best = cand
                    if df[y] < 0:
                        df[y] = dx
                        qf[ft] = y
                        ft += 1
            fh = end
        else:
            end = bt
            for i in range(bh, end):
                x = qb[i]
                dx = db[x] + 1
                for k in range(indptr[x], indptr[x + 1]):
                    y = indices[k]
                    if df[y] >= 0:
                        cand = dx + df[y]
                        if best < 0 or cand < best:
                            best = cand
                    if db[y] < 0:
                        db[y] = dx
                        qb[bt] = y
                        bt += 1
            bh = end
    for i in range(ft):
        df[qf[i]] = -1
    for i in range(bt):
        db[qb[i]] = -1
    return best


@nb.njit(parallel=True, cache=True)
def pair_distances(indptr, indices, us, vs):
    """Exact d(us[i], vs[i]) by bidirectional BFS; -1 when unreachable."""
    n = len(indptr) - 1
    npairs = len(us)
    out = np.empty(npairs, dtype=np.int32)
    nchunks = max(1, min(npairs, BLOCKS))
    for c in nb.prange(nchunks):
        lo, hi = _chunk(c, nchunks, npairs)
        df = np.full(n, -1, dtype=np.int32)
        db = np.full(n, -1, dtype=np.int32)
        qf = np.empty(n, dtype=np.int32)
        qb = np.empty(n, dtype=np.int32)
        for i in range(lo, hi):
            out[i] = _bidirectional(indptr, indices, us[i], vs[i], df, db, qf, qb)
    return out


@nb.njit(cache=True)
def bounded_eccentricities(indptr, indices):
    """Exact eccentricities of a connected graph with bound-based pruning.

    Each BFS from a chosen node v tightens, for every unresolved w,
        lower(w) >= max(ecc(v) - d(v, w), d(v, w)),  upper(w) <= ecc(v) + d(v, w),
    and w is resolved once the bounds meet. Sources alternate between the
    unresolved node with the largest upper bound and the one with the smallest
    lower bound (higher degree, then lower index, wins ties).
    Returns (eccentricities, number of BFS runs).
    """
    n = len(indptr) - 1
    ecc = np.full(n, -1, dtype=np.int64)
    lower = np.zeros(n, dtype=np.int64)
    upper = np.full(n, n, dtype=np.int64)
    active = np.ones(n, dtype=np.bool_)
    remaining = n
    dist = np.full(n, -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    pick_upper = True
    runs = 0
    while remaining > 0:
        best = -1
        for w in range(n):
            if not active[w]:
                continue
            if best < 0:
                best = w
                continue
            if pick_upper:
                better = upper[w] > upper[best] or (
                    upper[w] == upper[best]
                    and indptr[w + 1] - indptr[w] > indptr[best + 1] - indptr[best]
                )
            else:
                better = lower[w] < lower[best] or (
                    lower[w] == lower[best]
                    and indptr[w + 1] - indptr[w] > indptr[best + 1] - indptr[best]
                )
            if better:
                best = w
        pick_upper = not pick_upper
        v = best
        cnt = _bfs(indptr, indices, v, dist, queue)
        runs += 1
        ev = dist[queue[cnt - 1]]
        for w in range(n):
            if active[w]:
                d = dist[w]
                lo = max(ev - d, d)
                if lo > lower[w]:
                    lower[w] = lo
                hi = ev + d
                if hi < upper[w]:
                    upper[w] = hi
                if lower[w] == upper[w]:
                    ecc[w] = lower[w]
                    active[w] = False
                    remaining -= 1
        for i in range(cnt):
            dist[queue[i]] = -1
    return ecc, runs


@nb.njit(parallel=True, cache=True)
def brandes_partials(indptr, indices, sources):
    """Brandes dependency sums over ordered pairs, one row per source block.

    Blocks are contiguous slices of ``sources``; callers add the rows in order.
    The backward sweep pulls from successors: delta(v) = sigma(v) * sum of
    (1 + delta(w)) / sigma(w) over w one level further from the source.
    """
    n = len(indptr) - 1
    ns = len(sources)
    nblocks = max(1, min(ns, BLOCKS))
    partial = np.zeros((nblocks, n), dtype=np.float64)
    for b in nb.prange(nblocks):
        lo, hi = _chunk(b, nblocks, ns)
        dist = np.full(n, -1, dtype=np.int32)
        sigma = np.zeros(n, dtype=np.float64)
        coeff = np.zeros(n, dtype=np.float64)
        order = np.empty(n, dtype=np.int32)
        for i in range(lo, hi):
            s = sources[i]
            dist[s] = 0
            sigma[s] = 1.0
            order[0] = s
            head = 0
            tail = 1
            while head < tail:
                v = order[head]
                head += 1
                dv = dist[v] + 1
                sv = sigma[v]
                for k in range(indptr[v], indptr[v + 1]):
                    w = indices[k]
                    if dist[w] < 0:
                        dist[w] = dv
                        order[tail] = w
                        tail += 1
                    if dist[w] == dv:
                        sigma[w] += sv
            # successors of v come later in BFS order, so their coeff is final
            for j in range(tail - 1, 0, -1):
                v = order[j]
                dv = dist[v] + 1
                acc = 0.0
                for k in range(indptr[v], indptr[v + 1]):
                    w = indices[k]
                    if dist[w] == dv:
                        acc += coeff[w]
                delta = sigma[v] * acc
                coeff[v] = (1.0 + delta) / sigma[v]
                partial[b, v] += delta
            for j in range(tail):
                w = order[j]
                dist[w] = -1
                sigma[w] = 0.0
    return partial


@nb.njit(parallel=True, cache=True)
def local_triangles(indptr, indices):
    """Number of edges among the neighbors of each node."""
    n = len(indptr) - 1
    tri = np.zeros(n, dtype=np.int64)
    nchunks = max(1, min(n, BLOCKS))
    for c in nb.prange(nchunks):
        lo, hi = _chunk(c, nchunks, n)
        mark = np.full(n, -1, dtype=np.int64)
        for v in range(lo, hi):
            for k in range(indptr[v], indptr[v + 1]):
                mark[indices[k]] = v
            t = 0
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                for j in range(indptr[u], indptr[u + 1]):
                    w = indices[j]
                    if w > u and mark[w] == v:
                        t += 1
            tri[v] = t
    return tri


@nb.njit(cache=True)
def inversions(b):
    """Count pairs i < j with b[i] > b[j] for integer codes 0 <= b < len(b)."""
    n = len(b)
    tree = np.zeros(n + 1, dtype=np.int64)
    inv = 0
    for i in range(n - 1, -1, -1):
        # elements already inserted (to the right) that are strictly smaller
        k = b[i]
        s = 0
        while k > 0:
            s += tree[k]
            k -= k & (-k)
        inv += s
        k = b[i] + 1
        while k <= n:
            tree[k] += 1
            k += k & (-k)
    return inv
