"""Stabilizer algebra of bipartite graph states and of the two-qubit pair state."""
from __future__ import annotations

from dataclasses import dataclass

from .lattice import LatticeGraph, RegionSpec, SiteId
from .pauli import PauliString


@dataclass(frozen=True)
class ProjectorExpansion:
    """Expansion of prod_{i in region ∩ sublattice} (1 + g_i)/2 into Pauli terms."""

    terms: tuple[tuple[float, PauliString], ...]
    region: RegionSpec
    sublattice: str

    @property
    def k(self) -> int:
        return len(self.generator_sites)

    @property
    def generator_sites(self) -> tuple[SiteId, ...]:
        return self.region.part(self.sublattice)


def generator(graph: LatticeGraph, site: SiteId) -> PauliString:
    """g_i = X_i prod_{j in N(i)} Z_j with the graph's (boundary-reduced) neighbor set."""
    letters = {site: "X"}
    for j in graph.neighbors(site):
        letters[j] = "Z"
    return PauliString(letters)


def graph_generators(graph: LatticeGraph) -> dict[SiteId, PauliString]:
    return {s: generator(graph, s) for s in graph.sites}


def product(strings) -> PauliString:
    out = PauliString.identity()
    for p in strings:
        out = out * p
    return out


def pair_generators(graph: LatticeGraph) -> dict[tuple[SiteId, SiteId], tuple[PauliString, PauliString]]:
    """Generators {X X, Y Z} on each (A, B) = (Cs, Li) pair."""
    if graph.kind != "pairs":
        raise ValueError(f"pair generators need a 'pairs' lattice, got {graph.kind!r}")
    return {
        (a, b): (PauliString({a: "X", b: "X"}), PauliString({a: "Y", b: "Z"}))
        for a, b in graph.edges
    }


def pair_group(a: SiteId, b: SiteId) -> tuple[PauliString, ...]:
    """Group elements I, XX, YZ and their product ZY (all with sign +1)."""
    xx = PauliString({a: "X", b: "X"})
    yz = PauliString({a: "Y", b: "Z"})
    return (PauliString.identity(), xx, yz, xx * yz)


def expand_region_projector(graph: LatticeGraph, region: RegionSpec, sublattice: str) -> ProjectorExpansion:
    gens = [generator(graph, s) for s in region.part(sublattice)]
    terms = [PauliString.identity()]
    # Doubling keeps the subset order binary: term m holds generators of set bits in m.
    for g in gens:
        terms = terms + [t * g for t in terms]
    coef = 0.5 ** len(gens)
    return ProjectorExpansion(tuple((coef, t) for t in terms), region, sublattice)


_PAIR_ALLOWED = {(None, None), ("X", "X"), ("Y", "Z"), ("Z", "Y")}


def _phase_value(rel: int) -> int:
    if rel == 0:
        return 1
    if rel == 2:
        return -1
    raise ValueError("expectation of a non-Hermitian Pauli string (sign ±i) is imaginary")


def ideal_expectation(graph: LatticeGraph, P: PauliString) -> int:
    """<G|P|G> on the ideal state: +1, -1 or 0."""
    for s in P.letters:
        if s not in graph:
            raise ValueError(f"Pauli support site {s} not in graph")
    if graph.kind == "pairs":
        for a, b in graph.edges:
            if (P.letters.get(a), P.letters.get(b)) not in _PAIR_ALLOWED:
                return 0
        return _phase_value(P.phase)

    # Each generator is the only one with X at its own vertex, so the X/Y
    # support fixes the single candidate group element.
    cand = PauliString.identity()
    for i in P.x_support:
        cand = cand * generator(graph, i)
    if cand.letters != P.letters:
        return 0
    return _phase_value((P.phase - cand.phase) % 4)
