"""Dense density-matrix reference simulator for patches of at most 12 qubits.

Qubit k of a patch is axis k of the row index (most significant bit first);
basis bit 0 means Z = +1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product as iproduct
from pathlib import Path

import numpy as np

from .graphstate import ProjectorExpansion, expand_region_projector
from .lattice import LatticeGraph, RegionSpec, SiteId
from .noise import NoiseScenario
from .pauli import PauliString

MAX_QUBITS = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.diag([1.0, -1j])


@dataclass(eq=False)
class DensePatch:
    sites: tuple[SiteId, ...]
    rho: np.ndarray = field(repr=False)
    graph: LatticeGraph = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.sites)

    def index(self, site: SiteId) -> int:
        return self.graph.index(site)

    def check(self, tol: float = 1e-12) -> None:
        if abs(np.trace(self.rho) - 1.0) > tol:
            raise AssertionError("trace deviates from 1")
        if np.max(np.abs(self.rho - self.rho.conj().T)) > tol:
            raise AssertionError("density matrix not Hermitian")


def _sl(n: int, fixed: dict[int, int]) -> tuple:
    return tuple(fixed.get(ax, slice(None)) for ax in range(2 * n))


def z_flip(T: np.ndarray, n: int, k: int, q: float) -> None:
    """rho -> (1-q) rho + q Z rho Z on qubit k, in place on the tensor view."""
    f = 1.0 - 2.0 * q
    T[_sl(n, {k: 0, n + k: 1})] *= f
    T[_sl(n, {k: 1, n + k: 0})] *= f


def zz_flip(T: np.ndarray, n: int, j: int, k: int, q: float) -> None:
    f = 1.0 - 2.0 * q
    for rj, rk, cj, ck in iproduct((0, 1), repeat=4):
        if (rj ^ rk) != (cj ^ ck):
            T[_sl(n, {j: rj, k: rk, n + j: cj, n + k: ck})] *= f


def depolarize(T: np.ndarray, n: int, k: int, p: float) -> None:
    """rho -> (1-p) rho + p (I/2) ⊗ tr_k rho."""
    T[_sl(n, {k: 0, n + k: 1})] *= 1.0 - p
    T[_sl(n, {k: 1, n + k: 0})] *= 1.0 - p
    d0, d1 = _sl(n, {k: 0, n + k: 0}), _sl(n, {k: 1, n + k: 1})
    a, b = T[d0].copy(), T[d1].copy()
    T[d0] = (1.0 - 0.5 * p) * a + 0.5 * p * b
    T[d1] = 0.5 * p * a + (1.0 - 0.5 * p) * b


def reset(T: np.ndarray, n: int, k: int, p: float) -> None:
    """rho -> (1-p) rho + p |0><0| ⊗ tr_k rho."""
    T[_sl(n, {k: 0, n + k: 1})] *= 1.0 - p
    T[_sl(n, {k: 1, n + k: 0})] *= 1.0 - p
    d0, d1 = _sl(n, {k: 0, n + k: 0}), _sl(n, {k: 1, n + k: 1})
    T[d0] += p * T[d1]
    T[d1] *= 1.0 - p


# Operator-sum forms, used to cross-check the in-place channels.

def kraus_dephasing(q: float) -> list[np.ndarray]:
    return [np.sqrt(1 - q) * _I2, np.sqrt(q) * _Z]


def kraus_depolarizing(p: float) -> list[np.ndarray]:
    return [np.sqrt(1 - 0.75 * p) * _I2] + [np.sqrt(p / 4) * P for P in (_X, _Y, _Z)]


def kraus_reset(p: float) -> list[np.ndarray]:
    return [
        np.sqrt(1 - p) * _I2,
        np.sqrt(p) * np.array([[1, 0], [0, 0]], dtype=complex),
        np.sqrt(p) * np.array([[0, 1], [0, 0]], dtype=complex),
    ]


def apply_kraus(rho: np.ndarray, n: int, k: int, ops: list[np.ndarray]) -> np.ndarray:
    T = rho.reshape((2,) * (2 * n))
    out = np.zeros_like(T)
    for K in ops:
        t = np.tensordot(K, T, axes=([1], [k]))
        t = np.moveaxis(t, 0, k)
        t = np.tensordot(t, K.conj(), axes=([n + k], [1]))
        out += np.moveaxis(t, -1, n + k)
    return out.reshape(rho.shape)


def averaged_unitary_channel(rho: np.ndarray, G: np.ndarray, eps: float, nodes: int = 64) -> np.ndarray:
    """Average of exp(-i t G) rho exp(i t G) over t uniform on [-eps, eps] (G^2 = 1).

    Gauss-Legendre quadrature; the integrand is a trigonometric polynomial of
    degree 2, so this is exact to rounding.
    """
    if eps == 0.0:
        return rho.copy()
    x, w = np.polynomial.legendre.leggauss(nodes)
    eye = np.eye(G.shape[0])
    out = np.zeros_like(rho, dtype=complex)
    for t, wt in zip(eps * x, w):
        U = np.cos(t) * eye - 1j * np.sin(t) * G
        out += 0.5 * wt * (U @ rho @ U.conj().T)
    return out


def _graph_state(graph: LatticeGraph, entangler: str) -> np.ndarray:
    n = graph.n_sites
    m = np.arange(1 << n)
    bits = [(m >> (n - 1 - k)) & 1 for k in range(n)]
    phase = np.ones(1 << n, dtype=complex)
    for a, b in graph.edges:
        ba, bb = bits[graph.index(a)], bits[graph.index(b)]
        if entangler == "cz":
            phase *= 1 - 2 * (ba & bb)
        elif entangler == "zz":
            phase *= np.exp(-0.25j * np.pi * (1 - 2 * ba) * (1 - 2 * bb))
        else:
            raise ValueError(f"unknown entangler {entangler!r}")
    return phase / np.sqrt(1 << n)


def prepare(graph_patch: LatticeGraph, scenario: NoiseScenario, entangler: str | None = None) -> DensePatch:
    """Noisy state: |+>^n, entangle every edge (with its ZZ-flip error), then
    dephasing, depolarizing, loss and spontaneous emission on each site.

    The default entangler is CZ, except ``exp(-i pi/4 Z Z)`` on pairs lattices.
    """
    n = graph_patch.n_sites
    if n > MAX_QUBITS:
        raise ValueError(f"patch has {n} qubits; the dense oracle is capped at {MAX_QUBITS}")
    if entangler is None:
        entangler = "zz" if graph_patch.kind == "pairs" else "cz"
    psi = _graph_state(graph_patch, entangler)
    rho = np.outer(psi, psi.conj())
    T = rho.reshape((2,) * (2 * n))
    desc = scenario.descriptor
    for a, b in graph_patch.edges:
        q = desc.edge_q.get((a, b), 0.0)
        if q:
            zz_flip(T, n, graph_patch.index(a), graph_patch.index(b), q)
    for k, s in enumerate(graph_patch.sites):
        ch = desc.site(s)
        if ch.dephase_flip:
            z_flip(T, n, k, ch.dephase_flip)
        if ch.depol:
            depolarize(T, n, k, ch.depol)
        if ch.loss:
            reset(T, n, k, ch.loss)
        if ch.se:
            reset(T, n, k, ch.se)
    return DensePatch(graph_patch.sites, rho, graph_patch)


def _pauli_action(P: PauliString, graph: LatticeGraph) -> tuple[int, np.ndarray]:
    """(x mask, c) with P|m> = c[m] |m ^ x>."""
    n = graph.n_sites
    m = np.arange(1 << n)
    xmask = 0
    sign = np.ones(1 << n, dtype=np.int8)
    phase = P.phase
    for site, letter in P.letters.items():
        if site not in graph:
            raise ValueError(f"operator support site {site} outside the patch")
        shift = n - 1 - graph.index(site)
        if letter != "Z":
            xmask |= 1 << shift
        if letter != "X":
            sign *= (1 - 2 * ((m >> shift) & 1)).astype(np.int8)
        if letter == "Y":
            phase += 1
    return xmask, (1j ** (phase % 4)) * sign


def _terms(op) -> list[tuple[float, PauliString]]:
    if isinstance(op, PauliString):
        return [(1.0, op)]
    if isinstance(op, ProjectorExpansion):
        return list(op.terms)
    if hasattr(op, "terms"):
        return list(op.terms)
    return list(op)


def expectation(patch: DensePatch, op) -> float:
    """tr(op rho) for a Pauli string, weighted Pauli sum or projector expansion."""
    m = np.arange(1 << patch.n)
    total = 0.0 + 0.0j
    for coef, P in _terms(op):
        x, c = _pauli_action(P, patch.graph)
        total += coef * np.dot(c, patch.rho[m, m ^ x])
    if abs(total.imag) > 1e-9:
        raise ValueError("operator expectation is not real; operator not Hermitian?")
    return float(total.real)


def region_values(patch: DensePatch, graph: LatticeGraph, region: RegionSpec) -> tuple[float, float, float]:
    """(<P_A>, <P_B>, <W~>) for a region, generators taken from ``graph``."""
    p_a = expectation(patch, expand_region_projector(graph, region, "A"))
    p_b = expectation(patch, expand_region_projector(graph, region, "B"))
    return p_a, p_b, 1.5 - p_a - p_b


def _rotation(letter: str) -> np.ndarray:
    if letter == "X":
        return _H
    if letter == "Y":
        return _H @ _SDG
    return _I2


def outcome_distribution(patch: DensePatch, setting) -> np.ndarray:
    """Born probabilities of measuring every site in the setting's basis.

    Entry j: bit (n-1-k) of j is 1 when site k reads -1.
    """
    n = patch.n
    if n > MAX_QUBITS:
        raise ValueError("patch too large")
    T = patch.rho.reshape((2,) * (2 * n))
    for k, s in enumerate(patch.sites):
        U = _rotation(setting.basis[s.basis])
        if U is _I2:
            continue
        T = np.moveaxis(np.tensordot(U, T, axes=([1], [k])), 0, k)
        T = np.moveaxis(np.tensordot(T, U.conj(), axes=([n + k], [1])), -1, n + k)
    probs = np.real(np.diagonal(T.reshape(1 << n, 1 << n))).copy()
    probs[probs < 0] = 0.0
    return probs / probs.sum()


def dense_matrix(op, graph: LatticeGraph) -> np.ndarray:
    n = graph.n_sites
    m = np.arange(1 << n)
    M = np.zeros((1 << n, 1 << n), dtype=complex)
    for coef, P in _terms(op):
        x, c = _pauli_action(P, graph)
        M[m ^ x, m] += coef * c
    return M


def max_eigenvalue(op, graph: LatticeGraph) -> float:
    """Largest eigenvalue of a Hermitian Pauli sum, exactly.

    The operator only connects basis states differing by an element of the
    GF(2) span of its X masks, so it is block diagonal over the cosets of
    that span; each block is diagonalized densely.
    """
    n = graph.n_sites
    terms = [(coef, *_pauli_action(P, graph)) for coef, P in _terms(op)]
    basis: list[int] = []
    for _, x, _ in terms:
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis = [min(b, b ^ x) if (b >> (x.bit_length() - 1)) & 1 else b for b in basis]
            basis.append(x)
    pivots = [b.bit_length() - 1 for b in basis]
    m = np.arange(1 << n)
    red = m.copy()
    pos = np.zeros_like(m)
    for idx, (b, p) in enumerate(zip(basis, pivots)):
        has = (m >> p) & 1
        pos |= has << idx
        red ^= has * b
    _, block = np.unique(red, return_inverse=True)
    size = 1 << len(basis)
    H = np.zeros(((1 << n) // size, size, size), dtype=complex)
    for coef, x, c in terms:
        H[block, pos[m ^ x], pos] += coef * c
    return float(np.linalg.eigvalsh(H).max())


def export_golden(records: list[dict], path) -> None:
    """Golden file: list of {patch, scenario, region, value}."""
    Path(path).write_text(json.dumps(records, indent=1, sort_keys=True) + "\n")


def load_golden(path) -> list[dict]:
    return json.loads(Path(path).read_text())
