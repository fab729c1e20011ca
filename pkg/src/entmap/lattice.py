"""Bipartite lattice graphs with a 2D embedding and region catalogs.

Honeycomb convention: A(u, v) is bonded to B(u, v), B(u-1, v) and B(u, v-1)
(open boundaries). A(u, v) sits at u*a1 + v*a2 with a1 = (1, 0),
a2 = (1/2, sqrt(3)/2); B(u, v) sits at A(u, v) + (a1 + a2)/3.

The ``chain`` kind drops the B(u, v-1) bond, leaving one zigzag linear
cluster per row v; ``pairs`` keeps only the B(u, v) bond.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

KINDS = ("honeycomb", "chain", "pairs")
REGION_KINDS = ("alpha", "beta", "gamma")

COORDINATION = {"honeycomb": 3, "chain": 2, "pairs": 1}

A1 = (1.0, 0.0)
A2 = (0.5, math.sqrt(3.0) / 2.0)


class SiteId(NamedTuple):
    """A lattice site. Tuple order (basis, u, v) is the global site order."""

    basis: str
    u: int
    v: int

    def to_json(self) -> list:
        return [self.u, self.v, self.basis]

    @classmethod
    def from_json(cls, item: Sequence) -> "SiteId":
        u, v, basis = item
        if basis not in ("A", "B"):
            raise ValueError(f"invalid basis label {basis!r}")
        return cls(str(basis), int(u), int(v))

    def __str__(self) -> str:
        return f"{self.basis}({self.u},{self.v})"


Edge = tuple  # (SiteId on A, SiteId on B)


def _position(site: SiteId) -> tuple[float, float]:
    x = site.u * A1[0] + site.v * A2[0]
    y = site.u * A1[1] + site.v * A2[1]
    if site.basis == "B":
        x += (A1[0] + A2[0]) / 3.0
        y += (A1[1] + A2[1]) / 3.0
    return (x, y)


def _a_neighbors(kind: str, u: int, v: int) -> list[tuple[int, int]]:
    cells = [(u, v)]
    if kind in ("honeycomb", "chain"):
        cells.append((u - 1, v))
    if kind == "honeycomb":
        cells.append((u, v - 1))
    return cells


@dataclass(frozen=True)
class LatticeGraph:
    kind: str
    n_u: int
    n_v: int
    sites: tuple[SiteId, ...]
    adjacency: dict[SiteId, tuple[SiteId, ...]] = field(repr=False)
    holes: frozenset[SiteId] = frozenset()
    positions: dict[SiteId, tuple[float, float]] = field(default_factory=dict, repr=False)
    # True when the site set is a strict subset of the full n_u x n_v lattice.
    restricted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: k for k, s in enumerate(self.sites)})
        edges = []
        for s in self.sites:
            if s.basis == "A":
                edges.extend((s, t) for t in self.adjacency[s])
        object.__setattr__(self, "_edges", tuple(sorted(edges)))

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def coordination(self) -> int:
        return COORDINATION[self.kind]

    def index(self, site: SiteId) -> int:
        return self._index[site]

    def __contains__(self, site) -> bool:
        return site in self._index

    def neighbors(self, site: SiteId) -> tuple[SiteId, ...]:
        return self.adjacency[site]

    def degree(self, site: SiteId) -> int:
        return len(self.adjacency[site])

    def sublattice(self, basis: str) -> tuple[SiteId, ...]:
        return tuple(s for s in self.sites if s.basis == basis)

    def descriptor(self) -> dict:
        """JSON-ready description; restricted graphs also list their sites."""
        d = {
            "kind": self.kind,
            "n_u": self.n_u,
            "n_v": self.n_v,
            "holes": [h.to_json() for h in sorted(self.holes)],
        }
        if self.restricted:
            d["sites"] = [s.to_json() for s in self.sites]
        return d

    def subgraph(self, sites: Iterable[SiteId]) -> "LatticeGraph":
        """Induced subgraph on ``sites`` (used for minimal patches)."""
        keep = set(sites)
        missing = keep - set(self.sites)
        if missing:
            raise ValueError(f"sites not in graph: {sorted(missing)}")
        ordered = tuple(sorted(keep))
        adjacency = {s: tuple(t for t in self.adjacency[s] if t in keep) for s in ordered}
        return LatticeGraph(
            kind=self.kind,
            n_u=self.n_u,
            n_v=self.n_v,
            sites=ordered,
            adjacency=adjacency,
            holes=frozenset(h for h in self.holes if h in keep),
            positions={s: self.positions[s] for s in ordered},
            restricted=len(ordered) < len(self.sites) or self.restricted,
        )

    def center(self) -> tuple[float, float]:
        xs = [self.positions[s][0] for s in self.sites]
        ys = [self.positions[s][1] for s in self.sites]
        return (sum(xs) / len(xs), sum(ys) / len(ys))


@dataclass(frozen=True)
class RegionSpec:
    kind: str
    sites: tuple[SiteId, ...]
    centroid: tuple[float, float]

    def part(self, basis: str) -> tuple[SiteId, ...]:
        return tuple(s for s in self.sites if s.basis == basis)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "sites": [s.to_json() for s in self.sites],
            "centroid": list(self.centroid),
        }


def build_lattice(kind: str, n_u: int, n_v: int, holes: Iterable = ()) -> LatticeGraph:
    if kind not in KINDS:
        raise ValueError(f"unknown lattice kind {kind!r}; expected one of {KINDS}")
    if n_u < 1 or n_v < 1:
        raise ValueError(f"lattice dimensions must be positive, got {n_u}x{n_v}")
    sites = sorted(
        SiteId(b, u, v) for b in ("A", "B") for u in range(n_u) for v in range(n_v)
    )
    site_set = set(sites)
    adj: dict[SiteId, list[SiteId]] = {s: [] for s in sites}
    for u in range(n_u):
        for v in range(n_v):
            a = SiteId("A", u, v)
            for cu, cv in _a_neighbors(kind, u, v):
                b = SiteId("B", cu, cv)
                if b in site_set:
                    adj[a].append(b)
                    adj[b].append(a)

    hole_list = [h if isinstance(h, SiteId) else SiteId.from_json(h) for h in holes]
    if len(set(hole_list)) != len(hole_list):
        raise ValueError("duplicate hole entries")
    for h in hole_list:
        if h not in site_set:
            raise ValueError(f"hole {h} outside the {n_u}x{n_v} lattice")

    return LatticeGraph(
        kind=kind,
        n_u=n_u,
        n_v=n_v,
        sites=tuple(sites),
        adjacency={s: tuple(sorted(ns)) for s, ns in adj.items()},
        holes=frozenset(hole_list),
        positions={s: _position(s) for s in sites},
    )


def lattice_from_descriptor(desc: dict) -> LatticeGraph:
    graph = build_lattice(desc["kind"], int(desc["n_u"]), int(desc["n_v"]), desc.get("holes", []))
    if "sites" in desc:
        graph = graph.subgraph(SiteId.from_json(s) for s in desc["sites"])
    return graph


def _centroid(graph: LatticeGraph, sites: Sequence[SiteId]) -> tuple[float, float]:
    n = len(sites)
    return (
        sum(graph.positions[s][0] for s in sites) / n,
        sum(graph.positions[s][1] for s in sites) / n,
    )


def hexagon_sites(u: int, v: int) -> tuple[SiteId, ...]:
    """Plaquette cycle anchored at A(u, v), listed in cycle order."""
    return (
        SiteId("A", u, v),
        SiteId("B", u, v),
        SiteId("A", u, v + 1),
        SiteId("B", u - 1, v + 1),
        SiteId("A", u - 1, v + 1),
        SiteId("B", u - 1, v),
    )


def enumerate_regions(graph: LatticeGraph, kind: str) -> list[RegionSpec]:
    if kind not in REGION_KINDS:
        raise ValueError(f"unknown region kind {kind!r}")
    regions = []
    if kind == "alpha":
        for a, b in graph.edges:
            regions.append(RegionSpec("alpha", (a, b), _centroid(graph, (a, b))))
    elif kind == "beta":
        # Pairs-kind stars coincide with the alpha edges, so none are listed.
        if graph.kind == "pairs":
            return []
        full = graph.coordination
        for s in graph.sites:
            if graph.degree(s) == full:
                members = tuple(sorted((s,) + graph.neighbors(s)))
                regions.append(RegionSpec("beta", members, _centroid(graph, members)))
    else:
        if graph.kind != "honeycomb":
            return []
        for u in range(1, graph.n_u):
            for v in range(graph.n_v - 1):
                cycle = hexagon_sites(u, v)
                if not all(s in graph for s in cycle):
                    continue
                if not all(cycle[(k + 1) % 6] in graph.neighbors(cycle[k]) for k in range(6)):
                    continue
                members = tuple(sorted(cycle))
                regions.append(RegionSpec("gamma", members, _centroid(graph, members)))
    return regions


def is_connected(graph: LatticeGraph, sites: Sequence[SiteId]) -> bool:
    pool = set(sites)
    if not pool:
        return False
    start = next(iter(pool))
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for t in graph.neighbors(s):
            if t in pool and t not in seen:
                seen.add(t)
                queue.append(t)
    return seen == pool


def custom_region(graph: LatticeGraph, sites: Iterable[SiteId]) -> RegionSpec:
    members = tuple(sorted(set(sites)))
    for s in members:
        if s not in graph:
            raise ValueError(f"site {s} not in graph")
    if not is_connected(graph, members):
        raise ValueError("custom region must induce a connected subgraph")
    return RegionSpec("custom", members, _centroid(graph, members))


def stabilizer_support(graph: LatticeGraph, region: RegionSpec) -> tuple[SiteId, ...]:
    """Region sites plus every neighbor: the qubits touched by its witness."""
    support = set(region.sites)
    for s in region.sites:
        support.update(graph.neighbors(s))
    return tuple(sorted(support))


def minimal_patch(graph: LatticeGraph, region: RegionSpec) -> LatticeGraph:
    return graph.subgraph(stabilizer_support(graph, region))


def central_region(graph: LatticeGraph, kind: str) -> RegionSpec:
    """Region of ``kind`` nearest the lattice center whose sites all have full degree."""
    cx, cy = graph.center()
    full = graph.coordination
    candidates = [
        r for r in enumerate_regions(graph, kind)
        if all(graph.degree(s) == full for s in r.sites)
    ]
    if not candidates:
        raise ValueError(f"no interior {kind} region in a {graph.n_u}x{graph.n_v} lattice")
    return min(candidates, key=lambda r: ((r.centroid[0] - cx) ** 2 + (r.centroid[1] - cy) ** 2, r.sites))
