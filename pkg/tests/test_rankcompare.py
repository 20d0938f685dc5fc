import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from interlock.centrality import Measure, centrality_at_scope
from interlock.rankcompare import (
    RankVector,
    attribute_correlation,
    dominance_from_ranks,
    embeddedness_report,
    extend_dominance,
    kendall_tau,
    measure_matrix,
    persistence,
    rank_with_ties,
    ranking_dominance,
    spearman,
    top_k,
    top_k_overlap,
)

import oracles
from fixtures import int_graph, random_partitioned, star

values = st.lists(st.integers(0, 6).map(float), min_size=1, max_size=40)


def test_rank_with_ties_average():
    assert rank_with_ties([10, 20, 20, 5]).ranks.tolist() == [3.0, 1.5, 1.5, 4.0]
    assert rank_with_ties([1, 1, 1]).ranks.tolist() == [2.0, 2.0, 2.0]
    with pytest.raises(ValueError):
        rank_with_ties([])
    with pytest.raises(ValueError):
        rank_with_ties([1.0, math.nan])


@settings(max_examples=200, deadline=None)
@given(values)
def test_ranks_match_oracle_and_keep_rank_sum(v):
    r = rank_with_ties(v).ranks
    assert r.tolist() == oracles.average_ranks(v)
    n = len(v)
    assert r.sum() == n * (n + 1) / 2


def test_spearman_and_kendall_examples():
    assert spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5]) == pytest.approx(0.8, abs=1e-12)
    assert kendall_tau([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(2 / 3, abs=1e-12)
    assert spearman([1, 2, 3], [1, 2, 3]) == 1.0
    assert spearman([1, 2, 3], [3, 2, 1]) == -1.0
    assert kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0


def test_correlation_nulls():
    assert spearman([1, 2], [1, 2]) is None
    assert spearman([1, 2, math.nan, 4], [1, 2, 3, math.nan]) is None
    assert spearman([1, 1, 1], [1, 2, 3]) is None
    assert kendall_tau([1, 1, 1], [1, 2, 3]) is None
    with pytest.raises(ValueError):
        spearman([1, 2, 3], [1, 2])


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 30).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 4).map(float), min_size=n, max_size=n),
    st.lists(st.integers(0, 4).map(float), min_size=n, max_size=n))))
def test_correlations_match_oracles_with_heavy_ties(ab):
    a, b = ab
    for ours, ref in ((spearman, oracles.spearman), (kendall_tau, oracles.kendall_tau_b)):
        got, want = ours(a, b), ref(a, b)
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(want, abs=1e-12)


def test_top_k_straddle_and_id_tiebreak():
    rv = rank_with_ties([5, 3, 3, 3, 1])
    nodes, straddles = top_k(rv, 2)
    assert nodes.tolist() == [0, 1] and straddles
    # reversed id order puts node 3 first inside the tie group
    nodes, _ = top_k(rv, 2, keys=np.array([0, 9, 8, 7, 1]))
    assert nodes.tolist() == [0, 3]
    assert not top_k(rv, 4)[1]
    with pytest.raises(ValueError):
        top_k(rv, 6)


def test_top_k_overlap_basic():
    full = rank_with_ties([9, 8, 7, 6, 5, 4])
    part = RankVector(np.array([0, 2, 4]), np.array([1.0, 2.0, 3.0]))
    assert top_k_overlap(full, part, 2) == 0.5
    assert top_k_overlap(full, full, 3) == 1.0
    disjoint = RankVector(np.array([4, 5]), np.array([1.0, 2.0]))
    assert top_k_overlap(full, disjoint, 2) == 0.0
    with pytest.raises(ValueError):
        top_k_overlap(full, part, 4)


def test_dominance_worked_values():
    assert dominance_from_ranks([3, 4, 6, 8], 8) == pytest.approx(-1 / 12, abs=1e-12)
    assert dominance_from_ranks([1, 2], 8) == pytest.approx(1 / 3, abs=1e-12)
    with pytest.raises(ValueError):
        dominance_from_ranks([], 8)


@settings(max_examples=100, deadline=None)
@given(values, st.randoms())
def test_dominance_properties(v, rnd):
    v = np.array(v)
    n = len(v)
    assert ranking_dominance(v, np.arange(n)) == 0.0
    if n >= 2:
        s = rnd.sample(range(n), rnd.randint(1, n - 1))
        rd = ranking_dominance(v, s)
        assert -0.5 < rd < 0.5
        # monotone transforms leave it unchanged
        assert ranking_dominance(np.exp(v) * 3 + 1, s) == pytest.approx(rd, abs=1e-15)


def test_extend_dominance_matches_recompute():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randint(3, 40)
        ranks = rank_with_ties([rng.randint(0, 5) for _ in range(n)]).ranks
        s = rng.sample(range(n), rng.randint(1, n - 1))
        extra = rng.choice([x for x in range(n) if x not in s])
        rd = dominance_from_ranks(ranks[s], n)
        assert extend_dominance(rd, len(s), ranks[extra], n) == pytest.approx(
            dominance_from_ranks(ranks[s + [extra]], n), abs=1e-12)


def test_ranking_dominance_rejects_null_scope():
    with pytest.raises(ValueError):
        ranking_dominance([1.0, math.nan, 2.0], [1])


def test_single_partition_record():
    g = int_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)], ["A"] * 5)
    recs = embeddedness_report(g, [Measure.DEGREE, Measure.BETWEENNESS], ks=(2, 10))
    assert [r.measure for r in recs] == ["degree", "betweenness"]
    for r in recs:
        assert r.persistence == pytest.approx(1.0) and r.dominance == 0.0
        assert r.top_k_overlap[2] == 1.0 and r.top_k_overlap[10] is None
        assert "k10_gt_scope" in r.reasons and "no_internal_edges" not in r.reasons
        assert r.transnational_factor == 0.0


def test_mirror_symmetric_partitions_have_zero_dominance():
    # two identical 4-cycles joined by a single bridge between their node 0s
    half = [(0, 1), (1, 2), (2, 3), (3, 0)]
    edges = half + [(a + 4, b + 4) for a, b in half] + [(0, 4)]
    g = int_graph(8, edges, ["A"] * 4 + ["B"] * 4)
    for r in embeddedness_report(g, list(Measure)):
        assert r.dominance == pytest.approx(0.0, abs=1e-12)


def test_hub_partition_dominates():
    rng = random.Random(5)
    labels = ["H"] * 10 + ["X"] * 20 + ["Y"] * 20
    edges = set()
    for block in (range(0, 10), range(10, 30), range(30, 50)):
        block = list(block)
        for i in range(1, len(block)):
            edges.add((block[rng.randrange(i)], block[i]))
    # every cross edge touches the hub partition
    for v in range(10, 50):
        edges.add((rng.randrange(10), v))
    g = int_graph(50, sorted(edges), labels)
    for m in Measure:
        recs = {r.partition: r for r in embeddedness_report(g, [m])}
        assert recs["H"].dominance == max(r.dominance for r in recs.values())


def test_degenerate_partitions_give_null_with_reasons():
    # C has two members with no internal edge; B has a 2-node giant
    g = int_graph(7, [(0, 1), (1, 2), (2, 0), (3, 4), (2, 3), (4, 5), (5, 6)],
                  ["A", "A", "A", "B", "B", "C", "C"])
    recs = {r.partition: r for r in embeddedness_report(g, [Measure.DEGREE], ks=(2,))}
    assert recs["B"].persistence is None and "persistence_scope_lt_3" in recs["B"].reasons
    assert recs["B"].dominance is None and "dominance_scope_lt_3" in recs["B"].reasons
    assert recs["C"].transnational_factor == 1.0  # 5-6 internal, 4-5 cross
    # the triangle's internal degrees are all equal
    assert recs["A"].persistence is None and recs["A"].reasons == ["zero_variance"]
    assert recs["A"].dominance == pytest.approx(0.125)


def test_persistence_matches_oracle_composition():
    g, adj, labels_of = random_partitioned(11, 45)
    full_nodes = oracles.largest_component(adj)
    sub, order = oracles.relabel(oracles.induced(adj, full_nodes))
    full = np.full(g.n, np.nan)
    full[order] = oracles.closeness(sub)
    for label in sorted(set(labels_of)):
        members = [v for v in range(g.n) if labels_of[v] == label]
        giant = oracles.largest_component(oracles.induced(adj, members))
        psub, porder = oracles.relabel(oracles.induced(adj, giant))
        part = np.full(g.n, np.nan)
        if len(giant) >= 2:
            part[porder] = oracles.closeness(psub)
        want = oracles.spearman(part.tolist(), full.tolist())
        got = persistence(g, label, Measure.CLOSENESS)
        assert (got is None) == (want is None)
        if want is not None:
            assert got == pytest.approx(want, abs=1e-9)


def test_attribute_correlation():
    deg = np.array([5.0, 1, 1, 1, 1, 1])
    attrs = {"deg": deg, "neg": -deg, "gappy": np.array([5.0, 1, np.nan, 2, np.nan, 3])}
    g = int_graph(6, [(0, i) for i in range(1, 6)], attributes=attrs)
    assert attribute_correlation(g, Measure.DEGREE, "deg") == pytest.approx(1.0)
    assert attribute_correlation(g, Measure.DEGREE, "neg") == pytest.approx(-1.0)
    cv = centrality_at_scope(g, None, Measure.DEGREE)
    want = oracles.spearman(cv.values.tolist(), attrs["gappy"].tolist())
    assert attribute_correlation(g, Measure.DEGREE, "gappy") == pytest.approx(want)
    with pytest.raises(KeyError):
        attribute_correlation(g, Measure.DEGREE, "missing")


def test_measure_matrix_diagonal():
    g, _, _ = random_partitioned(3, 40, parts=1, p_in=0.15)
    vectors = {m: centrality_at_scope(g, None, m) for m in Measure}
    mat = measure_matrix(vectors)
    assert list(mat) == [m.value for m in Measure]
    for a in mat:
        assert mat[a][a] == pytest.approx(1.0)
        for b in mat:
            assert mat[a][b] == mat[b][a]
