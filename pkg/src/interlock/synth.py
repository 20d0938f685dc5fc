"""Seeded planted-partition graphs with a degree-driven attribute."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .graph import Graph, from_arrays
from .topology import _pair_from_index


@dataclass
class SyntheticSpec:
    """Block sizes, intra/cross edge probabilities and attribute noise.

    ``p_intra`` is one probability per block (a scalar applies to all);
    ``p_cross`` is a symmetric block matrix (a scalar applies to every pair).
    The attribute is exp(log(1 + degree) + noise * N(0, 1)), so noise 0
    makes it a monotone function of degree.
    """

    sizes: list[int]
    p_intra: list[float] | float = 0.1
    p_cross: list[list[float]] | float = 0.0
    noise: float = 0.5
    seed: int = 0
    attribute: str = "revenue"
    labels: list[str] | None = None

    def intra(self) -> list[float]:
        if isinstance(self.p_intra, (int, float)):
            return [float(self.p_intra)] * len(self.sizes)
        return [float(p) for p in self.p_intra]

    def cross(self) -> np.ndarray:
        b = len(self.sizes)
        if isinstance(self.p_cross, (int, float)):
            return np.full((b, b), float(self.p_cross))
        return np.asarray(self.p_cross, dtype=np.float64)

    def block_labels(self) -> list[str]:
        if self.labels is not None:
            return list(self.labels)
        width = len(str(max(len(self.sizes) - 1, 0)))
        return [f"P{j:0{width}d}" for j in range(len(self.sizes))]

    def validate(self) -> None:
        b = len(self.sizes)
        if b == 0 or any(s < 1 for s in self.sizes):
            raise ValueError("sizes must be a non-empty list of positive integers")
        intra = self.intra()
        cross = self.cross()
        if len(intra) != b:
            raise ValueError(f"p_intra has {len(intra)} entries for {b} blocks")
        if cross.shape != (b, b):
            raise ValueError(f"p_cross must be {b}x{b}")
        if not np.allclose(cross, cross.T):
            raise ValueError("p_cross must be symmetric")
        for p in [*intra, *cross.ravel()]:
            if not 0.0 <= p <= 1.0 or np.isnan(p):
                raise ValueError(f"probability {p} outside [0, 1]")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")
        if len(self.block_labels()) != b or len(set(self.block_labels())) != b:
            raise ValueError("labels must be distinct, one per block")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> SyntheticSpec:
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> SyntheticSpec:
        return cls.from_dict(json.loads(Path(path).read_text()))


def expected_edges(spec: SyntheticSpec) -> tuple[float, float]:
    """Binomial mean and variance of the total edge count."""
    sizes = np.asarray(spec.sizes, dtype=np.float64)
    intra, cross = spec.intra(), spec.cross()
    mean = var = 0.0
    for a in range(len(sizes)):
        for b in range(a, len(sizes)):
            p = intra[a] if a == b else cross[a, b]
            pairs = sizes[a] * (sizes[a] - 1) / 2 if a == b else sizes[a] * sizes[b]
            mean += pairs * p
            var += pairs * p * (1 - p)
    return mean, var


def generate(spec: SyntheticSpec) -> Graph:
    """Each block pair receives Binomial(pairs, p) edges placed uniformly without repetition."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    sizes = np.asarray(spec.sizes, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    n = int(offsets[-1])
    intra, cross = spec.intra(), spec.cross()
    src, dst = [], []
    for a in range(len(sizes)):
        for b in range(a, len(sizes)):
            p = intra[a] if a == b else cross[a, b]
            pairs = int(sizes[a] * (sizes[a] - 1) // 2 if a == b else sizes[a] * sizes[b])
            if p == 0.0 or pairs == 0:
                continue
            m = int(rng.binomial(pairs, p))
            if m == 0:
                continue
            idx = np.sort(rng.choice(pairs, size=m, replace=False))
            if a == b:
                u, v = _pair_from_index(idx, int(sizes[a]))
                src.append(u + offsets[a])
                dst.append(v + offsets[a])
            else:
                src.append(idx // sizes[b] + offsets[a])
                dst.append(idx % sizes[b] + offsets[b])
    src_a = np.concatenate(src) if src else np.zeros(0, dtype=np.int64)
    dst_a = np.concatenate(dst) if dst else np.zeros(0, dtype=np.int64)
    width = len(str(max(n - 1, 0)))
    ids = [f"n{i:0{width}d}" for i in range(n)]
    codes = np.repeat(np.arange(len(sizes), dtype=np.int32), sizes)
    deg = np.bincount(src_a, minlength=n) + np.bincount(dst_a, minlength=n)
    attr = np.exp(np.log1p(deg) + spec.noise * rng.standard_normal(n))
    return from_arrays(n, src_a, dst_a, None, ids, codes, spec.block_labels(),
                       {spec.attribute: attr})


def reference_shape_spec(
    n: int = 400_000,
    m: int = 1_700_000,
    partitions: int = 34,
    cross_fraction: float = 0.2,
    noise: float = 0.5,
    seed: int = 0,
) -> SyntheticSpec:
    """Skewed block sizes with about ``m`` edges, ``cross_fraction`` of them between blocks.

    Every block gets the same expected internal degree.
    """
    w = 1.0 / np.arange(1, partitions + 1) ** 0.8
    sizes = np.floor(w / w.sum() * n).astype(np.int64)
    sizes[0] += n - sizes.sum()
    intra_edges = (1 - cross_fraction) * m * sizes / n
    p_intra = intra_edges / (sizes * (sizes - 1) / 2)
    cross_pairs = (n * n - float((sizes**2).sum())) / 2
    p_cross = cross_fraction * m / cross_pairs
    return SyntheticSpec(
        sizes=[int(s) for s in sizes],
        p_intra=[float(p) for p in np.minimum(p_intra, 1.0)],
        p_cross=float(p_cross),
        noise=noise,
        seed=seed,
    )
