"""Shot post-processing: stabilizer means, region fidelity bounds and witness maps.

A setting that measures X on sublattice S and Z on the other sublattice makes
every g_i with i in S diagonal at once, so per shot the projector
prod_{i in Omega ∩ S} (1 + g_i)/2 is just the indicator "all those g_i read +1".
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lattice import LatticeGraph, RegionSpec, SiteId, stabilizer_support
from .sampler import PAIR_XX, PAIR_YZ, PAIR_ZY, S_A, S_B, ShotBatch

DETECTION_SIGMAS = 4.0


class ProvenanceError(ValueError):
    """Shot batches that do not come from the same lattice and scenario."""


@dataclass(frozen=True)
class WitnessEstimate:
    region: RegionSpec
    p_a_hat: float
    p_b_hat: float
    p_tilde_hat: float
    w_hat: float
    stderr: float
    n_shots_a: int
    n_shots_b: int
    defect_adjacent: bool = False
    certified_sites: tuple[SiteId, ...] = ()

    @classmethod
    def from_parts(cls, region, p_a, p_b, stderr, n_a, n_b, defect_adjacent=False, certified=()):
        p_tilde = p_a + p_b - 1.0
        return cls(region, p_a, p_b, p_tilde, 0.5 - p_tilde, stderr, n_a, n_b, defect_adjacent, tuple(certified))

    @property
    def entangled(self) -> bool:
        """Witness negative by more than DETECTION_SIGMAS standard errors."""
        return self.w_hat + DETECTION_SIGMAS * self.stderr < 0.0

    def to_json(self) -> dict:
        doc = self.region.to_json()
        doc.update(
            value=self.w_hat,
            stderr=self.stderr,
            p_a=self.p_a_hat,
            p_b=self.p_b_hat,
            n_shots_a=self.n_shots_a,
            n_shots_b=self.n_shots_b,
            flags={"defect_adjacent": self.defect_adjacent, "entangled": self.entangled},
            certified_sites=[s.to_json() for s in self.certified_sites],
        )
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "WitnessEstimate":
        region = RegionSpec(doc["kind"], tuple(SiteId.from_json(s) for s in doc["sites"]), tuple(doc["centroid"]))
        return cls.from_parts(
            region, doc["p_a"], doc["p_b"], doc["stderr"], doc["n_shots_a"], doc["n_shots_b"],
            doc["flags"]["defect_adjacent"], (SiteId.from_json(s) for s in doc["certified_sites"]),
        )


@dataclass
class WitnessMap:
    source: str
    region_kind: str
    entries: list[WitnessEstimate]
    lattice: dict = field(default_factory=dict)

    @classmethod
    def collect(cls, source: str, entries: list[WitnessEstimate], graph: LatticeGraph) -> "WitnessMap":
        kinds = {e.region.kind for e in entries}
        kind = kinds.pop() if len(kinds) == 1 else ("mixed" if kinds else "none")
        return cls(source, kind, list(entries), graph.descriptor())

    def values(self) -> np.ndarray:
        return np.array([e.w_hat for e in self.entries])

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "region_kind": self.region_kind,
            "lattice": self.lattice,
            "entries": [e.to_json() for e in self.entries],
        }

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["kind", "centroid_x", "centroid_y", "value", "stderr"])
            for e in self.entries:
                writer.writerow([e.region.kind, repr(e.region.centroid[0]), repr(e.region.centroid[1]),
                                 repr(e.w_hat), repr(e.stderr)])

    @classmethod
    def read_json(cls, path) -> "WitnessMap":
        doc = json.loads(Path(path).read_text())
        return cls(doc["source"], doc["region_kind"], [WitnessEstimate.from_json(e) for e in doc["entries"]],
                   doc["lattice"])


def region_flags(graph: LatticeGraph, region: RegionSpec) -> tuple[bool, tuple[SiteId, ...]]:
    """(touches a declared hole, certified qubit set = union of stabilizer supports)."""
    support = stabilizer_support(graph, region)
    return any(s in graph.holes for s in support), support


def _popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def stabilizer_words(batch: ShotBatch) -> tuple[dict[SiteId, int], np.ndarray]:
    """Bit-packed g_i outcomes for every X-measured site, plus a trailing zero row."""
    cached = batch._cache.get("g")
    if cached is not None:
        return cached
    graph = batch.graph
    xb = batch.setting.x_sublattice
    sites = [s for s in graph.sites if s.basis == xb]
    n = graph.n_sites
    rows = [[graph.index(s)] + [graph.index(j) for j in graph.neighbors(s)] for s in sites]
    width = max((len(r) for r in rows), default=1)
    idx = np.full((len(rows), width), n, dtype=np.intp)
    for k, r in enumerate(rows):
        idx[k, : len(r)] = r
    padded = np.concatenate([batch.words, np.zeros((1, batch.words.shape[1]), dtype=batch.words.dtype)])
    g = np.concatenate([np.bitwise_xor.reduce(padded[idx], axis=1),
                        np.zeros((1, batch.words.shape[1]), dtype=batch.words.dtype)])
    result = ({s: k for k, s in enumerate(sites)}, g)
    batch._cache["g"] = result
    return result


def _check_graph_setting(batch: ShotBatch, setting) -> None:
    if batch.setting != setting:
        raise ValueError(f"expected a {setting.label} batch, got {batch.setting.label}")


def estimate_stabilizer(batch: ShotBatch, site: SiteId) -> tuple[float, float]:
    if batch.setting not in (S_A, S_B):
        raise ValueError("stabilizer estimates need a graph-state setting")
    if site.basis != batch.setting.x_sublattice:
        raise ValueError(f"setting {batch.setting.label} does not measure X on {site}")
    pos, g = stabilizer_words(batch)
    fails = int(_popcount(g[pos[site]]))
    n = batch.n_shots
    mean = 1.0 - 2.0 * fails / n
    return mean, math.sqrt(max(0.0, 1.0 - mean * mean) / n)


def check_provenance(*batches: ShotBatch) -> None:
    first = batches[0].header
    for b in batches[1:]:
        for key in ("lattice", "scenario_digest"):
            if b.header.get(key) != first.get(key):
                raise ProvenanceError(f"shot batches disagree on {key}")


def _indicator_stats(fails: int, n: int) -> tuple[float, float]:
    p = (n - fails) / n
    var = p * (1.0 - p) * n / (n - 1) if n > 1 else 0.0
    return p, var


def _estimate(region, fails_a, n_a, fails_b, n_b, graph) -> WitnessEstimate:
    p_a, var_a = _indicator_stats(fails_a, n_a)
    p_b, var_b = _indicator_stats(fails_b, n_b)
    stderr = math.sqrt(var_a / n_a + var_b / n_b)
    return WitnessEstimate.from_parts(region, p_a, p_b, stderr, n_a, n_b, *region_flags(graph, region))


def _region_fails(batch: ShotBatch, region: RegionSpec, basis: str) -> int:
    pos, g = stabilizer_words(batch)
    members = region.part(basis)
    if not members:
        return 0
    acc = np.bitwise_or.reduce(g[[pos[s] for s in members]], axis=0)
    return int(_popcount(acc))


def estimate_region(batch_a: ShotBatch, batch_b: ShotBatch, region: RegionSpec) -> WitnessEstimate:
    _check_graph_setting(batch_a, S_A)
    _check_graph_setting(batch_b, S_B)
    check_provenance(batch_a, batch_b)
    return _estimate(region, _region_fails(batch_a, region, "A"), batch_a.n_shots,
                     _region_fails(batch_b, region, "B"), batch_b.n_shots, batch_a.graph)


_REGION_CHUNK = 4096


def _all_fails(batch: ShotBatch, regions: list[RegionSpec], basis: str) -> np.ndarray:
    pos, g = stabilizer_words(batch)
    zero = g.shape[0] - 1
    parts = [[pos[s] for s in r.part(basis)] for r in regions]
    width = max((len(p) for p in parts), default=1) or 1
    idx = np.full((len(parts), width), zero, dtype=np.intp)
    for k, p in enumerate(parts):
        idx[k, : len(p)] = p
    fails = np.empty(len(regions), dtype=np.int64)
    for r0 in range(0, len(regions), _REGION_CHUNK):
        block = np.bitwise_or.reduce(g[idx[r0 : r0 + _REGION_CHUNK]], axis=1)
        fails[r0 : r0 + _REGION_CHUNK] = _popcount(block)
    return fails


def build_map(batch_a: ShotBatch, batch_b: ShotBatch, regions: list[RegionSpec]) -> WitnessMap:
    """Every region's witness from one sweep over the two batches."""
    _check_graph_setting(batch_a, S_A)
    _check_graph_setting(batch_b, S_B)
    check_provenance(batch_a, batch_b)
    fa = _all_fails(batch_a, regions, "A")
    fb = _all_fails(batch_b, regions, "B")
    graph = batch_a.graph
    entries = [
        _estimate(r, int(a), batch_a.n_shots, int(b), batch_b.n_shots, graph)
        for r, a, b in zip(regions, fa, fb)
    ]
    return WitnessMap.collect("sampled", entries, graph)


def _product_mean(batch: ShotBatch, a: SiteId, b: SiteId) -> tuple[float, float]:
    fails = int(_popcount(batch.site_words(a) ^ batch.site_words(b)))
    n = batch.n_shots
    m = 1.0 - 2.0 * fails / n
    return m, max(0.0, 1.0 - m * m) / n


def estimate_pair_projector(batch_xx: ShotBatch, batch_yz: ShotBatch, batch_zy: ShotBatch,
                            pair: tuple[SiteId, SiteId]) -> tuple[float, float]:
    """<(1 + XX + YZ + ZY)/4> from the three pair settings."""
    for batch, setting in ((batch_xx, PAIR_XX), (batch_yz, PAIR_YZ), (batch_zy, PAIR_ZY)):
        if batch is None:
            raise ValueError(f"missing {setting.label} batch")
        _check_graph_setting(batch, setting)
    check_provenance(batch_xx, batch_yz, batch_zy)
    a, b = pair
    means, variances = zip(*(_product_mean(bt, a, b) for bt in (batch_xx, batch_yz, batch_zy)))
    return 0.25 * (1.0 + sum(means)), 0.25 * math.sqrt(sum(variances))
