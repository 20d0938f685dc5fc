"""Reproducible runs: topology, centrality, compare, synth and bench stages."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import platform
import resource
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from importlib import metadata as importlib_metadata
from pathlib import Path

import numba
import numpy as np
import scipy

from . import ingest, rankcompare, synth, topology
from .centrality import GLOBAL, MEASURES, Measure, centrality_at_scope, scoped_vectors
from .graph import Graph, GraphError, extract_giant

log = logging.getLogger(__name__)

MANIFEST = "run.json"


class DegenerateResult(RuntimeError):
    """Every requested output came out null."""


@dataclass
class RunConfig:
    input: str | None = None
    mode: str = "affiliation"
    metadata: str | None = None
    out: str = "out"
    format: str = "csv"
    seed: int = 0
    threads: int | None = None
    sample_pairs: int = 100_000
    pivots: int | str = "auto"
    measures: list[str] = field(default_factory=lambda: [m.value for m in MEASURES])
    k_list: list[int] = field(default_factory=lambda: [10, 100])
    max_boards: int | None = None
    eccentricities: bool = True
    eig_tol: float = 1e-10
    eig_max_iters: int = 1000

    def validate(self) -> None:
        if self.mode not in ("affiliation", "edgelist"):
            raise ValueError(f"mode must be affiliation or edgelist, not {self.mode!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, not {self.format!r}")
        if self.pivots != "auto" and (not isinstance(self.pivots, int) or self.pivots < 0):
            raise ValueError("pivots must be 'auto', 0 (exact) or a positive count")
        if self.sample_pairs < 1:
            raise ValueError("sample_pairs must be >= 1")
        for m in self.measures:
            Measure(m)
        if any(k < 1 for k in self.k_list):
            raise ValueError("k values must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        """Accept a bare config or a run manifest (its "config" member)."""
        if "config" in d and isinstance(d["config"], dict):
            d = d["config"]
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**d)

    def centrality_options(self) -> dict:
        return {"pivots": self.pivots, "seed": self.seed,
                "tol": self.eig_tol, "max_iters": self.eig_max_iters}


def set_threads(threads: int | None) -> int:
    if threads:
        numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))
    return numba.get_num_threads()


def versions() -> dict:
    try:
        pkg = importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        pkg = "unknown"
    return {
        "interlock": pkg,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


class Timer:
    def __init__(self):
        self.stages: dict[str, dict] = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        yield
        self.stages[name] = {
            "seconds": round(time.perf_counter() - t0, 6),
            "peak_rss_mb": round(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024, 1),
        }


def _clean(x):
    """JSON-safe copy: NaN -> None, numpy scalars -> Python, dict keys -> str."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return None if math.isnan(x) else float(x)
    return x


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n", encoding="utf-8")


def write_manifest(out: Path, command: str, config: dict, timer: Timer, extra: dict | None = None) -> None:
    doc = {
        "command": command,
        "config": config,
        "seed": config.get("seed"),
        "threads": numba.get_num_threads(),
        "versions": versions(),
        "timings": timer.stages,
        "wall_seconds": round(sum(s["seconds"] for s in timer.stages.values()), 6),
    }
    doc.update(extra or {})
    write_json(out / MANIFEST, doc)


def load(config: RunConfig) -> tuple[Graph, ingest.LoadStats]:
    if not config.input:
        raise ValueError("--input is required")
    return ingest.load_dataset(config.input, config.mode, config.metadata, config.max_boards)


def _histogram_rows(h: dict) -> list[tuple[int, int]]:
    return sorted((int(k), int(v)) for k, v in h.items())


def cmd_topology(config: RunConfig) -> dict:
    """Global report, per-partition table and histograms."""
    config.validate()
    set_threads(config.threads)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    timer = Timer()
    with timer.stage("load"):
        g, stats = load(config)
    with timer.stage("global"):
        rep = topology.topology_report(g, config.sample_pairs, config.seed, config.eccentricities)
    with timer.stage("partitions"):
        rows = topology.partition_table(g, config.sample_pairs, config.seed)

    scalars = {k: v for k, v in rep.to_dict().items() if not isinstance(v, dict)}
    hists = {
        "degree_histogram": ("degree", rep.degree_histogram),
        "component_sizes": ("size", rep.component_size_histogram),
        "distance_histogram": ("distance", rep.distance_histogram),
        "eccentricity_histogram": ("eccentricity", rep.eccentricity_histogram),
    }
    if config.format == "csv":
        ingest.write_csv(out / "topology.csv", ["field", "value"], scalars.items())
        for name, (col, h) in hists.items():
            ingest.write_csv(out / f"{name}.csv", [col, "count"], _histogram_rows(h))
        ingest.write_csv(out / "eccentricity.csv", ["entity_id", "eccentricity"], rep.eccentricities.items())
        cols = [f.name for f in fields(topology.PartitionRow)]
        ingest.write_csv(out / "partitions.csv", cols, ([getattr(r, c) for c in cols] for r in rows))
    else:
        write_json(out / "topology.json", {
            "global": rep.to_dict(),
            "partitions": [asdict(r) for r in rows],
            "eccentricities": rep.eccentricities,
        })
    write_manifest(out, "topology", config.to_dict(), timer, {"load": asdict(stats)})
    return {"report": rep, "partitions": rows, "stats": stats}


def _scope_rows(g: Graph, cv, members: np.ndarray):
    for i in members:
        yield g.ids[i], cv.measure.value, cv.scope, float(cv.values[i]), "true" if cv.normalized else "false"


def cmd_centrality(config: RunConfig) -> dict:
    """Normalized vectors per measure for the full network and every partition."""
    config.validate()
    set_threads(config.threads)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    timer = Timer()
    with timer.stage("load"):
        g, stats = load(config)
    labels = g.present_labels()
    modes: dict[str, dict[str, str]] = {}
    failures: dict[str, dict[str, str]] = {}
    produced = 0
    for measure in map(Measure, config.measures):
        with timer.stage(measure.value):
            vectors, failed = scoped_vectors(g, [measure], labels, **config.centrality_options())
        modes[measure.value] = {(k[0] or GLOBAL): v.mode for k, v in vectors.items()}
        failures[measure.value] = {(k[0] or GLOBAL): why for k, why in failed.items()}
        produced += len(vectors)
        scoped = []
        for label in [None, *labels]:
            members = np.arange(g.n) if label is None else g.nodes_in(label)
            cv = vectors.get((label, measure))
            if cv is None:
                continue
            scoped.append((members, cv.normalize()))
        if config.format == "csv":
            ingest.write_csv(
                out / f"centrality_{measure.value}.csv",
                ["entity_id", "measure", "scope", "value", "normalized"],
                (row for members, cv in scoped for row in _scope_rows(g, cv, members)),
            )
        else:
            write_json(out / f"centrality_{measure.value}.json", [
                {"measure": measure.value, "scope": cv.scope, "mode": cv.mode,
                 "converged": cv.converged, "normalized": cv.normalized,
                 "values": {g.ids[i]: cv.values[i] for i in members}}
                for members, cv in scoped
            ])
    write_manifest(out, "centrality", config.to_dict(), timer,
                   {"load": asdict(stats), "betweenness_mode": modes.get("betweenness"),
                    "modes": modes, "failures": failures})
    if produced == 0:
        raise DegenerateResult("no scope produced a centrality vector")
    return {"modes": modes, "failures": failures}


EMBEDDEDNESS_TAIL = ["transnational_factor", "n_partition", "n_full", "n_scope", "straddled_k", "reasons"]


def embeddedness_columns(ks) -> list[str]:
    return ["partition", "measure", "persistence", "dominance",
            *(f"top{k}_overlap" for k in ks), *EMBEDDEDNESS_TAIL]


def embeddedness_row(rec: rankcompare.EmbeddednessRecord, ks) -> list:
    straddled = ";".join(str(k) for k in ks if rec.top_k_straddle.get(k))
    return [rec.partition, rec.measure, rec.persistence, rec.dominance,
            *(rec.top_k_overlap.get(k) for k in ks),
            rec.transnational_factor, rec.n_partition, rec.n_full, rec.n_scope,
            straddled, ";".join(rec.reasons)]


def cmd_compare(config: RunConfig) -> dict:
    """Embeddedness records, measure-vs-measure matrix and attribute correlations."""
    config.validate()
    set_threads(config.threads)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    timer = Timer()
    with timer.stage("load"):
        g, stats = load(config)
    labels = g.present_labels()
    measures = [Measure(m) for m in config.measures]
    with timer.stage("centrality"):
        vectors, failures = scoped_vectors(g, measures, labels, **config.centrality_options())
    with timer.stage("embeddedness"):
        records = rankcompare.embeddedness_report(
            g, measures, config.k_list, vectors=vectors, failures=failures
        )
    with timer.stage("correlations"):
        full = {m: vectors[(None, m)] for m in measures if (None, m) in vectors}
        matrix = rankcompare.measure_matrix(full)
        attr_rows = []
        for attr in g.attributes:
            for label in [None, *labels]:
                for m in measures:
                    cv = vectors.get((label, m))
                    n_pairs = 0
                    rho = None
                    if cv is not None:
                        n_pairs = int(np.count_nonzero(~np.isnan(cv.values) & ~np.isnan(g.attributes[attr])))
                        rho = rankcompare.attribute_correlation(g, m, attr, label, vector=cv)
                    attr_rows.append([label or GLOBAL, m.value, attr, rho, n_pairs])

    ks = config.k_list
    if config.format == "csv":
        ingest.write_csv(out / "embeddedness.csv", embeddedness_columns(ks),
                         (embeddedness_row(r, ks) for r in records))
        names = list(matrix)
        ingest.write_csv(out / "measure_correlation.csv", ["measure", *names],
                         ([a, *(matrix[a][b] for b in names)] for a in names))
        ingest.write_csv(out / "attribute_correlation.csv",
                         ["scope", "measure", "attribute", "spearman", "n_pairs"], attr_rows)
    else:
        write_json(out / "embeddedness.json", [r.to_dict() for r in records])
        write_json(out / "measure_correlation.json", matrix)
        write_json(out / "attribute_correlation.json", [
            dict(zip(["scope", "measure", "attribute", "spearman", "n_pairs"], r)) for r in attr_rows
        ])
    modes = {m.value: {(k[0] or GLOBAL): v.mode for k, v in vectors.items() if k[1] is m}
             for m in measures}
    write_manifest(out, "compare", config.to_dict(), timer,
                   {"load": asdict(stats), "betweenness_mode": modes.get("betweenness"),
                    "failures": {f"{k[0] or GLOBAL}/{k[1].value}": v for k, v in failures.items()}})
    values = [x for r in records for x in (r.persistence, r.dominance, *r.top_k_overlap.values())]
    values += [r[3] for r in attr_rows]
    values += [v for row in matrix.values() for v in row.values()]
    if all(v is None for v in values):
        raise DegenerateResult("every comparison output is null")
    return {"records": records, "matrix": matrix, "attributes": attr_rows}


def cmd_synth(spec: synth.SyntheticSpec, out_dir) -> Graph:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    timer = Timer()
    with timer.stage("generate"):
        g = synth.generate(spec)
    with timer.stage("write"):
        ingest.write_edgelist(out / "edges.csv", g)
        ingest.write_metadata(out / "metadata.csv", g)
    mean, var = synth.expected_edges(spec)
    write_manifest(out, "synth", spec.to_dict(), timer,
                   {"nodes": g.n, "edges": g.m, "expected_edges": mean, "edge_sd": math.sqrt(var)})
    return g


def _digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


def run_bench(
    g: Graph | None = None,
    *,
    config: RunConfig | None = None,
    spec: synth.SyntheticSpec | None = None,
    bench_pivots: int = 10_000,
    measures=(Measure.DEGREE, Measure.EIGENVECTOR),
) -> dict:
    """Time the full-scale stages: degree, eigenvector, sampled distances,
    per-partition persistence/dominance and (optionally) pivot betweenness."""
    config = config or RunConfig()
    set_threads(config.threads)
    timer = Timer()
    digests: dict[str, str] = {}
    if g is None:
        if spec is not None:
            with timer.stage("generate"):
                g = synth.generate(spec)
        else:
            with timer.stage("load"):
                g, _ = load(config)
    with timer.stage("giant"):
        giant_n = extract_giant(g).n
    vectors: dict = {}
    with timer.stage("degree"):
        cv = centrality_at_scope(g, None, Measure.DEGREE)
        vectors[(None, Measure.DEGREE)] = cv
        digests["degree"] = _digest(cv.values)
    with timer.stage("eigenvector"):
        cv = centrality_at_scope(g, None, Measure.EIGENVECTOR, tol=config.eig_tol,
                                 max_iters=config.eig_max_iters)
        vectors[(None, Measure.EIGENVECTOR)] = cv
        digests["eigenvector"] = _digest(cv.values)
    with timer.stage("distances"):
        dd = topology.distance_distribution(extract_giant(g), config.sample_pairs, config.seed)
        digests["distances"] = _digest(np.array(sorted(dd.histogram.items()), dtype=np.int64))
    with timer.stage("persistence_dominance"):
        labels = g.present_labels()
        for m in measures:
            for label in labels:
                try:
                    vectors[(label, m)] = centrality_at_scope(
                        g, label, m, tol=config.eig_tol, max_iters=config.eig_max_iters)
                except GraphError:
                    pass
        records = rankcompare.embeddedness_report(g, list(measures), config.k_list, vectors=vectors)
        digests["embeddedness"] = hashlib.sha256(
            json.dumps(_clean([r.to_dict() for r in records])).encode()).hexdigest()
    if bench_pivots:
        with timer.stage("betweenness_pivots"):
            cv = centrality_at_scope(g, None, Measure.BETWEENNESS, pivots=bench_pivots, seed=config.seed)
            digests["betweenness"] = _digest(cv.values)
    core = ("degree", "eigenvector", "distances", "persistence_dominance")
    return {
        "nodes": g.n,
        "edges": g.m,
        "giant_nodes": giant_n,
        "partitions": len(g.present_labels()),
        "sample_pairs": config.sample_pairs,
        "avg_distance": dd.mean,
        "bench_pivots": bench_pivots,
        "threads": numba.get_num_threads(),
        "stages": timer.stages,
        "core_seconds": round(sum(timer.stages[s]["seconds"] for s in core), 6),
        "digests": digests,
    }


def cmd_bench(config: RunConfig, spec: synth.SyntheticSpec | None = None, bench_pivots: int = 10_000) -> dict:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    res = run_bench(config=config, spec=spec, bench_pivots=bench_pivots)
    write_json(out / "bench.json", res)
    timer = Timer()
    timer.stages = res["stages"]
    write_manifest(out, "bench", config.to_dict(), timer,
                   {"synthetic": spec.to_dict() if spec else None, "bench_pivots": bench_pivots})
    return res
