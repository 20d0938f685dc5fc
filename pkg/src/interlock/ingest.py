"""CSV readers/writers, one-mode projection of affiliations, dataset assembly."""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .graph import Graph, GraphError, from_arrays

log = logging.getLogger(__name__)

AFFILIATION_HEADER = ["person_id", "entity_id"]
EDGELIST_HEADER = ["src", "dst", "weight"]


class IngestError(ValueError):
    def __init__(self, path, line: int | None, message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


def _rows(path: str | Path) -> Iterator[tuple[int, list[str]]]:
    """(physical line number, fields) for each non-comment, non-blank CSV row."""
    state = [0]

    def lines(fh):
        for lineno, line in enumerate(fh, 1):
            state[0] = lineno
            if line.startswith("#") or not line.strip():
                continue
            yield line

    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(lines(fh)):
            yield state[0], row


def _read_table(path, required: list[str], optional_tail: bool = False):
    """Yield (line, row) after validating the header; returns header via first item."""
    it = _rows(path)
    try:
        line, header = next(it)
    except StopIteration:
        raise IngestError(path, None, "empty file (missing header)") from None
    header = [h.strip() for h in header]
    if header[: len(required)] != required:
        raise IngestError(path, line, f"expected header starting {','.join(required)}, got {','.join(header)}")
    if not optional_tail and len(header) != len(required):
        raise IngestError(path, line, f"expected header {','.join(required)}, got {','.join(header)}")
    width = len(header)

    def body():
        for lineno, row in it:
            if len(row) != width:
                raise IngestError(path, lineno, f"expected {width} columns, got {len(row)}")
            yield lineno, [c.strip() for c in row]

    return header, body()


@dataclass
class AffiliationList:
    records: list[tuple[str, str]]

    def deduplicated(self) -> AffiliationList:
        return AffiliationList(sorted(set(self.records)))

    def boards(self) -> dict[str, list[str]]:
        """person -> sorted distinct entities."""
        out: dict[str, set[str]] = defaultdict(set)
        for person, entity in self.records:
            out[person].add(entity)
        return {p: sorted(es) for p, es in out.items()}

    def entities(self) -> set[str]:
        return {e for _, e in self.records}


def read_affiliations(path) -> AffiliationList:
    _, body = _read_table(path, AFFILIATION_HEADER)
    recs = []
    for lineno, (person, entity) in body:
        if not person or not entity:
            raise IngestError(path, lineno, "empty person_id or entity_id")
        recs.append((person, entity))
    return AffiliationList(recs)


def project(aff: AffiliationList, max_boards: int | None = None) -> list[tuple[str, str, int]]:
    """One-mode projection onto entities.

    Each person adds 1 to every distinct pair of the boards they sit on, so
    the multiplicity of a pair is the number of people the two share.
    Duplicate (person, entity) records count once. ``max_boards`` drops
    persons sitting on more boards than that (off by default).
    Output is sorted, with the smaller id first in each pair.
    """
    counts: dict[tuple[str, str], int] = defaultdict(int)
    for person, boards in aff.boards().items():
        if max_boards is not None and len(boards) > max_boards:
            continue
        for a, b in combinations(boards, 2):
            counts[a, b] += 1
    return [(a, b, c) for (a, b), c in sorted(counts.items())]


@dataclass
class FilterResult:
    kept: list[str]
    dropped: list[str]

    @property
    def counts(self) -> tuple[int, int]:
        return len(self.kept), len(self.dropped)


def filter_interlocking(edges: Iterable[tuple[str, str, int]], all_entities: Iterable[str]) -> FilterResult:
    """Keep only entities that touch at least one projected edge."""
    touched = set()
    for a, b, _ in edges:
        touched.add(a)
        touched.add(b)
    everything = set(all_entities) | touched
    return FilterResult(sorted(touched), sorted(everything - touched))


def read_edgelist(path) -> list[tuple[str, str, int]]:
    header, body = _read_table(path, EDGELIST_HEADER[:2], optional_tail=True)
    if header not in (EDGELIST_HEADER[:2], EDGELIST_HEADER):
        raise IngestError(path, 1, f"expected header src,dst[,weight], got {','.join(header)}")
    weighted = len(header) == 3
    out = []
    for lineno, row in body:
        src, dst = row[0], row[1]
        if not src or not dst:
            raise IngestError(path, lineno, "empty endpoint")
        if src == dst:
            raise IngestError(path, lineno, f"self-loop on {src!r}")
        w = 1
        if weighted and row[2] != "":
            try:
                w = int(row[2])
            except ValueError:
                raise IngestError(path, lineno, f"weight {row[2]!r} is not an integer") from None
            if w < 1:
                raise IngestError(path, lineno, f"weight {w} < 1")
        out.append((src, dst, w))
    return out


@dataclass
class Metadata:
    partition: dict[str, str | None]
    attributes: dict[str, dict[str, float | None]]

    @property
    def attribute_names(self) -> list[str]:
        return list(self.attributes)


def read_metadata(path) -> Metadata:
    header, body = _read_table(path, ["entity_id", "partition"], optional_tail=True)
    names = header[2:]
    if len(set(names)) != len(names) or any(not a for a in names):
        raise IngestError(path, 1, "attribute columns must be non-empty and distinct")
    partition: dict[str, str | None] = {}
    attrs: dict[str, dict[str, float | None]] = {a: {} for a in names}
    for lineno, row in body:
        eid = row[0]
        if not eid:
            raise IngestError(path, lineno, "empty entity_id")
        if eid in partition:
            raise IngestError(path, lineno, f"duplicate entity_id {eid!r}")
        partition[eid] = row[1] or None
        for name, cell in zip(names, row[2:]):
            if cell == "":
                attrs[name][eid] = None
                continue
            try:
                val = float(cell)
            except ValueError:
                raise IngestError(path, lineno, f"{name}={cell!r} is not a number") from None
            attrs[name][eid] = None if math.isnan(val) else val
    return Metadata(partition, attrs)


@dataclass
class LoadStats:
    mode: str
    records: int = 0
    entities_seen: int = 0
    nodes: int = 0
    edges: int = 0
    dropped_non_interlocking: int = 0
    missing_metadata: int = 0
    unused_metadata: int = 0
    warnings: list[str] = field(default_factory=list)


def assemble(
    edges: list[tuple[str, str, int]],
    metadata: Metadata | None,
    nodes: Iterable[str] | None = None,
) -> tuple[Graph, int, int]:
    """Graph with nodes in ascending id order plus (missing, unused) metadata counts."""
    ids = sorted({x for a, b, _ in edges for x in (a, b)} | set(nodes or ()))
    index = {s: i for i, s in enumerate(ids)}
    src = np.fromiter((index[a] for a, _, _ in edges), dtype=np.int64, count=len(edges))
    dst = np.fromiter((index[b] for _, b, _ in edges), dtype=np.int64, count=len(edges))
    wt = np.fromiter((w for _, _, w in edges), dtype=np.int64, count=len(edges))
    codes = None
    labels: list[str] = []
    attrs = {}
    missing = unused = 0
    if metadata is not None:
        labels = sorted({p for p in metadata.partition.values() if p is not None})
        lookup = {p: i for i, p in enumerate(labels)}
        codes = np.full(len(ids), -1, dtype=np.int32)
        for i, s in enumerate(ids):
            if s not in metadata.partition:
                missing += 1
                continue
            p = metadata.partition[s]
            if p is not None:
                codes[i] = lookup[p]
        unused = len(set(metadata.partition) - set(ids))
        for name, values in metadata.attributes.items():
            attrs[name] = np.array(
                [np.nan if values.get(s) is None else values[s] for s in ids], dtype=np.float64
            )
        # keep only labels still carried by some node
        present = np.unique(codes[codes >= 0])
        remap = np.full(max(len(labels), 1), -1, dtype=np.int32)
        remap[present] = np.arange(len(present))
        labels = [labels[c] for c in present]
        codes = np.where(codes >= 0, remap[np.maximum(codes, 0)], -1).astype(np.int32)
    try:
        g = from_arrays(len(ids), src, dst, wt, ids, codes, labels, attrs)
    except GraphError as exc:
        raise IngestError("<edges>", None, str(exc)) from None
    return g, missing, unused


def load_dataset(
    path,
    mode: str = "affiliation",
    metadata_path=None,
    max_boards: int | None = None,
) -> tuple[Graph, LoadStats]:
    """Read an affiliation or edge-list CSV (plus optional metadata) into a Graph.

    Affiliation input is projected and non-interlocking entities are dropped.
    Entities absent from the metadata get no partition and null attributes.
    """
    stats = LoadStats(mode=mode)
    if mode == "affiliation":
        aff = read_affiliations(path)
        stats.records = len(aff.records)
        dedup = aff.deduplicated()
        if len(dedup.records) != len(aff.records):
            stats.warnings.append(f"{len(aff.records) - len(dedup.records)} duplicate affiliation rows collapsed")
        edges = project(dedup, max_boards)
        kept = filter_interlocking(edges, dedup.entities())
        stats.entities_seen = len(kept.kept) + len(kept.dropped)
        stats.dropped_non_interlocking = len(kept.dropped)
    elif mode == "edgelist":
        edges = read_edgelist(path)
        stats.records = len(edges)
        stats.entities_seen = len({x for a, b, _ in edges for x in (a, b)})
    else:
        raise ValueError(f"unknown input mode {mode!r}")
    meta = read_metadata(metadata_path) if metadata_path is not None else None
    g, stats.missing_metadata, stats.unused_metadata = assemble(edges, meta)
    stats.nodes, stats.edges = g.n, g.m
    if meta is not None and stats.missing_metadata:
        msg = f"{stats.missing_metadata} entities have no metadata row (null partition)"
        stats.warnings.append(msg)
        log.warning(msg)
    return g, stats


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return "" if math.isnan(x) else repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def write_csv(path, header: list[str], rows: Iterable[Iterable]) -> None:
    """UTF-8 CSV; None and NaN become empty cells, floats use repr (exact round trip)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(c) for c in row])


def write_edgelist(path, g: Graph) -> None:
    u, v, w = g.edges()
    ids = g.ids
    write_csv(path, EDGELIST_HEADER, ((ids[a], ids[b], int(c)) for a, b, c in zip(u, v, w)))


def write_metadata(path, g: Graph) -> None:
    names = list(g.attributes)
    cols = [g.attributes[a] for a in names]
    rows = (
        [g.ids[i], g.label_of(i) or "", *(float(c[i]) for c in cols)]
        for i in range(g.n)
    )
    write_csv(path, ["entity_id", "partition", *names], rows)


def read_centrality_csv(path, g: Graph):
    """Parse a centrality CSV back into {(scope, measure): values aligned to ``g``}."""
    from .centrality import Measure

    header, body = _read_table(path, ["entity_id", "measure", "scope", "value", "normalized"])
    out: dict[tuple[str, Measure], np.ndarray] = {}
    flags: dict[tuple[str, Measure], bool] = {}
    for lineno, (eid, measure, scope, value, normalized) in body:
        try:
            key = (scope, Measure(measure))
        except ValueError:
            raise IngestError(path, lineno, f"unknown measure {measure!r}") from None
        vals = out.setdefault(key, np.full(g.n, np.nan))
        flags[key] = normalized == "true"
        if eid not in g.index:
            raise IngestError(path, lineno, f"unknown entity {eid!r}")
        vals[g.index[eid]] = float(value) if value else np.nan
    return out, flags


def read_embeddedness_csv(path) -> list[dict]:
    """Parse an embeddedness CSV into plain dicts (empty cells -> None)."""
    it = _rows(path)
    _, header = next(it)

    def conv(col: str, cell: str):
        if cell == "":
            return None
        if col in ("partition", "measure", "reasons", "straddled_k"):
            return cell
        if col.startswith("n_"):
            return int(cell)
        return float(cell)

    return [{c: conv(c, x) for c, x in zip(header, row)} for _, row in it]
