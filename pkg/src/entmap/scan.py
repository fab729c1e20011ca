"""Witness threshold scans under a single uniform noise channel."""
from __future__ import annotations

import csv
from dataclasses import dataclass

from .analytic import exact_region_bound
from .estimator import estimate_region
from .lattice import LatticeGraph, RegionSpec, build_lattice, central_region, minimal_patch
from .noise import uniform_scenario
from .sampler import S_A, S_B, sample

SCAN_LATTICE = ("honeycomb", 4, 4)


@dataclass(frozen=True)
class ScanRow:
    param: float
    analytic: float
    sampled: float | None = None
    stderr: float | None = None


@dataclass(frozen=True)
class ScanResult:
    kind: str
    channel: str
    region: RegionSpec
    rows: tuple[ScanRow, ...]

    @property
    def crossing(self) -> float | None:
        return zero_crossing([r.param for r in self.rows], [r.analytic for r in self.rows])


def zero_crossing(params, values) -> float | None:
    """First parameter where the witness turns non-negative, linearly interpolated."""
    for k in range(1, len(values)):
        lo, hi = values[k - 1], values[k]
        if lo < 0.0 <= hi:
            t = -lo / (hi - lo)
            return params[k - 1] + t * (params[k] - params[k - 1])
    return None


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` (inclusive linspace) or a comma-separated list."""
    if ":" in text:
        start, stop, count = text.split(":")
        n = int(count)
        if n < 2:
            raise ValueError("grid needs at least two points")
        a, b = float(start), float(stop)
        return [a + (b - a) * k / (n - 1) for k in range(n)]
    return [float(x) for x in text.split(",") if x.strip()]


def threshold_scan(kind: str, channel: str, grid, graph: LatticeGraph | None = None,
                   n_shots: int = 0, seed: int = 0, gate_mode: str = "derived") -> ScanResult:
    """Scan the interior region of ``kind`` nearest the lattice center.

    Sampling (when ``n_shots`` > 0) runs on the region's minimal patch, which
    carries the same witness statistics as the full lattice.
    """
    graph = graph or build_lattice(*SCAN_LATTICE)
    region = central_region(graph, kind)
    patch = minimal_patch(graph, region) if n_shots else None
    rows = []
    for k, value in enumerate(grid):
        scenario = uniform_scenario(graph, channel, value)
        w = exact_region_bound(graph, scenario, region, gate_mode).w
        if patch is None:
            rows.append(ScanRow(value, w))
            continue
        patch_scenario = uniform_scenario(patch, channel, value)
        ba = sample(patch, patch_scenario, S_A, n_shots, seed + k)
        bb = sample(patch, patch_scenario, S_B, n_shots, seed + k)
        est = estimate_region(ba, bb, region)
        rows.append(ScanRow(value, w, est.w_hat, est.stderr))
    return ScanResult(kind, channel, region, tuple(rows))


def write_scan_csv(path, results: list[ScanResult]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "channel", "parameter", "analytic_w", "sampled_w", "stderr"])
        for res in results:
            for r in res.rows:
                writer.writerow([
                    res.kind, res.channel, repr(r.param), repr(r.analytic),
                    "" if r.sampled is None else repr(r.sampled),
                    "" if r.stderr is None else repr(r.stderr),
                ])
        for res in results:
            crossing = res.crossing
            writer.writerow([res.kind, res.channel, "crossing", "" if crossing is None else repr(crossing), "", ""])
