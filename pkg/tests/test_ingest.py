import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from interlock.ingest import (
    AffiliationList,
    IngestError,
    filter_interlocking,
    load_dataset,
    project,
    read_edgelist,
    read_metadata,
    write_edgelist,
    write_metadata,
)

import oracles


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def as_map(edges):
    return {(a, b): w for a, b, w in edges}


def test_project_definition_cases():
    assert as_map(project(AffiliationList([("P", "A"), ("P", "B"), ("P", "C")]))) == {
        ("A", "B"): 1, ("A", "C"): 1, ("B", "C"): 1}
    assert as_map(project(AffiliationList([("P", "A"), ("P", "B"), ("Q", "A"), ("Q", "B")]))) == {("A", "B"): 2}
    assert as_map(project(AffiliationList([("P", "A"), ("P", "B"), ("Q", "B"), ("Q", "C")]))) == {
        ("A", "B"): 1, ("B", "C"): 1}
    assert project(AffiliationList([])) == []


def test_duplicate_seat_counts_once():
    aff = AffiliationList([("P", "A"), ("P", "A"), ("P", "B")])
    assert as_map(project(aff)) == {("A", "B"): 1}


def test_max_boards_cap():
    aff = AffiliationList([("P", x) for x in "ABCD"] + [("Q", "A"), ("Q", "B")])
    assert as_map(project(aff, max_boards=3)) == {("A", "B"): 1}
    assert as_map(project(aff))[("A", "B")] == 2


def test_filter_interlocking():
    res = filter_interlocking([("A", "B", 1)], {"A", "B", "C"})
    assert (res.kept, res.dropped) == (["A", "B"], ["C"])
    assert filter_interlocking([], {"A", "B"}).dropped == ["A", "B"]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("pqrstu"), st.sampled_from("ABCDEFG")), max_size=40), st.randoms())
def test_projection_matches_oracle_and_is_order_free(records, rnd):
    want = oracles.projection(records)
    assert as_map(project(AffiliationList(records))) == want
    shuffled = list(records)
    rnd.shuffle(shuffled)
    assert as_map(project(AffiliationList(shuffled))) == want
    # k boards -> k(k-1)/2 contributions
    boards = {}
    for p, e in records:
        boards.setdefault(p, set()).add(e)
    assert sum(want.values()) == sum(len(b) * (len(b) - 1) // 2 for b in boards.values())


FIXTURE = """person_id,entity_id
# three people, four firms
p1,F1
p1,F2
p1,F3
p2,F2
p2,F3
p3,F3
p3,F4
p3,F4
"""


def test_three_person_four_firm_fixture(tmp_path):
    g, stats = load_dataset(write(tmp_path, "aff.csv", FIXTURE))
    # hand projection: p1 -> F1F2, F1F3, F2F3; p2 -> F2F3; p3 -> F3F4
    assert g.ids == ("F1", "F2", "F3", "F4")
    u, v, w = g.edges()
    got = {(g.ids[a], g.ids[b]): int(c) for a, b, c in zip(u, v, w)}
    assert got == {("F1", "F2"): 1, ("F1", "F3"): 1, ("F2", "F3"): 2, ("F3", "F4"): 1}
    assert stats.records == 8 and stats.warnings


def test_affiliation_and_edgelist_modes_agree(tmp_path):
    ga, _ = load_dataset(write(tmp_path, "aff.csv", FIXTURE))
    ge, _ = load_dataset(write(tmp_path, "e.csv", "src,dst,weight\nF3,F2,2\nF1,F2,1\nF1,F3,1\nF4,F3,1\n"),
                         mode="edgelist")
    assert ga.ids == ge.ids
    for attr in ("indptr", "indices", "weights"):
        assert np.array_equal(getattr(ga, attr), getattr(ge, attr))


def test_non_interlocking_firms_are_dropped(tmp_path):
    g, stats = load_dataset(write(tmp_path, "a.csv", "person_id,entity_id\np,A\np,B\nq,C\n"))
    assert g.ids == ("A", "B")
    assert stats.dropped_non_interlocking == 1


def test_metadata_join_and_missing(tmp_path):
    edges = write(tmp_path, "e.csv", "src,dst\nA,B\nB,C\nC,D\n")
    meta = write(tmp_path, "m.csv", "entity_id,partition,revenue\nA,GB,10\nB,GB,\nC,US,3.5\nZ,US,1\n")
    g, stats = load_dataset(edges, "edgelist", meta)
    assert stats.missing_metadata == 1 and stats.unused_metadata == 1
    d = g.index["D"]
    assert g.label_of(d) is None and np.isnan(g.attributes["revenue"][d])
    assert np.isnan(g.attributes["revenue"][g.index["B"]])
    assert g.nodes_in("GB").tolist() == [g.index["A"], g.index["B"]]
    assert d not in g.nodes_in("US")


@pytest.mark.parametrize("text, line, msg", [
    ("src,dst\nA,B\nA,B,C\n", 3, "columns"),
    ("src,dst,weight\nA,B,x\n", 2, "integer"),
    ("src,dst,weight\nA,B,0\n", 2, "< 1"),
    ("src,dst\n\n# c\nA,A\n", 4, "self-loop"),
    ("from,to\nA,B\n", 1, "header"),
])
def test_edgelist_errors_carry_line_numbers(tmp_path, text, line, msg):
    with pytest.raises(IngestError, match=msg) as exc:
        read_edgelist(write(tmp_path, "e.csv", text))
    assert exc.value.line == line
    assert f":{line}" in str(exc.value)


def test_metadata_errors(tmp_path):
    with pytest.raises(IngestError, match="duplicate") as exc:
        read_metadata(write(tmp_path, "m.csv", "entity_id,partition\nA,GB\nA,US\n"))
    assert exc.value.line == 3
    with pytest.raises(IngestError, match="not a number"):
        read_metadata(write(tmp_path, "m2.csv", "entity_id,partition,rev\nA,GB,abc\n"))


def test_edgelist_and_metadata_round_trip(tmp_path):
    rng = random.Random(3)
    edges = oracles.random_connected_edges(rng, 20, 0.2)
    lines = ["src,dst,weight"] + [f"n{a:02d},n{b:02d},{rng.randint(1, 3)}" for a, b in edges]
    meta = ["entity_id,partition,x"] + [f"n{i:02d},{'AB'[i % 2]},{i * 0.1!r}" for i in range(20)]
    g, _ = load_dataset(write(tmp_path, "e.csv", "\n".join(lines)), "edgelist",
                        write(tmp_path, "m.csv", "\n".join(meta)))
    write_edgelist(tmp_path / "e2.csv", g)
    write_metadata(tmp_path / "m2.csv", g)
    h, _ = load_dataset(tmp_path / "e2.csv", "edgelist", tmp_path / "m2.csv")
    assert g.ids == h.ids and g.labels == h.labels
    assert np.array_equal(g.weights, h.weights) and np.array_equal(g.indices, h.indices)
    assert np.array_equal(g.partition, h.partition)
    assert np.array_equal(g.attributes["x"], h.attributes["x"])


def test_metadata_without_any_partition_label(tmp_path):
    edges = write(tmp_path, "e.csv", "src,dst\nA,B\n")
    meta = write(tmp_path, "m.csv", "entity_id,partition\nA,\nB,\n")
    g, _ = load_dataset(edges, "edgelist", meta)
    assert g.present_labels() == [] and g.partition.tolist() == [-1, -1]
