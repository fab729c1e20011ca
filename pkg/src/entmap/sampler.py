"""Monte Carlo measurement records for the two-setting and pair protocols.

Shots are held site-major and bit-packed: ``words[k, w]`` carries shots
64*w .. 64*w + 63 of site k, bit 1 meaning outcome -1. Shots are generated in
blocks of ``BLOCK_SHOTS``; every block draws from its own Philox counter
streams keyed by (seed, setting), so a shot's value depends only on the seed,
setting, scenario and shot index, never on how blocks are scheduled.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .lattice import LatticeGraph, SiteId, lattice_from_descriptor
from .noise import NoiseScenario

ENGINE_VERSION = f"entmap-{__version__}"
FILE_VERSION = 1
BLOCK_WORDS = 64
BLOCK_SHOTS = 64 * BLOCK_WORDS

(_LATENT, _GATE, _DEPHASE, _DEPOL_MASK, _DEPOL_BITS,
 _LOSS_MASK, _LOSS_BITS, _SE_MASK, _SE_BITS) = range(9)


@dataclass(frozen=True)
class MeasurementSetting:
    label: str
    basis: dict
    code: int

    @property
    def x_sublattice(self) -> str:
        """Sublattice measured in X (graph-state settings only)."""
        return "A" if self.basis["A"] == "X" else "B"


S_A = MeasurementSetting("S_A", {"A": "X", "B": "Z"}, 1)
S_B = MeasurementSetting("S_B", {"A": "Z", "B": "X"}, 2)
PAIR_XX = MeasurementSetting("PAIR_XX", {"A": "X", "B": "X"}, 3)
PAIR_YZ = MeasurementSetting("PAIR_YZ", {"A": "Y", "B": "Z"}, 4)
PAIR_ZY = MeasurementSetting("PAIR_ZY", {"A": "Z", "B": "Y"}, 5)

GRAPH_SETTINGS = (S_A, S_B)
PAIR_SETTINGS = (PAIR_XX, PAIR_YZ, PAIR_ZY)
SETTINGS = {s.label: s for s in GRAPH_SETTINGS + PAIR_SETTINGS}


@dataclass(eq=False)
class ShotBatch:
    setting: MeasurementSetting
    n_shots: int
    words: np.ndarray
    header: dict
    graph: LatticeGraph = field(repr=False)

    def __post_init__(self):
        n_words = -(-self.n_shots // 64)
        if self.words.shape != (self.graph.n_sites, n_words):
            raise ValueError(f"word array shape {self.words.shape} does not match "
                             f"{self.graph.n_sites} sites x {self.n_shots} shots")
        self._cache = {}

    @property
    def site_order(self) -> tuple[SiteId, ...]:
        return self.graph.sites

    def site_words(self, site: SiteId) -> np.ndarray:
        return self.words[self.graph.index(site)]

    @property
    def bits(self) -> np.ndarray:
        """(n_shots, n_sites) uint8 array, 1 meaning outcome -1."""
        raw = np.unpackbits(self.words.view(np.uint8), axis=1, bitorder="little")
        return np.ascontiguousarray(raw[:, : self.n_shots].T)

    @property
    def outcomes(self) -> np.ndarray:
        return (1 - 2 * self.bits.astype(np.int8)).astype(np.int8)


@dataclass
class _Plan:
    n_sites: int
    n_latent: int
    ideal_idx: np.ndarray          # (n_sites, k) indices into latent rows, n_latent = zero row
    xy: np.ndarray                 # bool per site: measured letter anticommutes with Z
    gate_ends: np.ndarray          # (m, 2) site indices
    gate_q: np.ndarray
    dephase_idx: np.ndarray
    dephase_q: np.ndarray
    depol_idx: np.ndarray
    depol_p: np.ndarray
    loss_idx: np.ndarray
    loss_p: np.ndarray
    se_idx: np.ndarray
    se_p: np.ndarray


def _pad(rows: list[list[int]], fill: int) -> np.ndarray:
    width = max(1, max((len(r) for r in rows), default=1))
    out = np.full((len(rows), width), fill, dtype=np.intp)
    for k, r in enumerate(rows):
        out[k, : len(r)] = r
    return out


def _noise_plan(graph: LatticeGraph, scenario: NoiseScenario, setting: MeasurementSetting,
                ideal_rows: list[list[int]], n_latent: int) -> _Plan:
    desc = scenario.descriptor
    xy = np.array([setting.basis[s.basis] != "Z" for s in graph.sites], dtype=bool)

    ends, qs = [], []
    for (a, b) in graph.edges:
        q = desc.edge_q.get((a, b), 0.0)
        if q > 0.0:
            ends.append((graph.index(a), graph.index(b)))
            qs.append(q)

    def site_list(attr, only_xy=False):
        idx, ps = [], []
        for s, ch in sorted(desc.sites.items()):
            if s not in graph:
                continue
            p = getattr(ch, attr)
            k = graph.index(s)
            if p > 0.0 and (xy[k] or not only_xy):
                idx.append(k)
                ps.append(p)
        return np.array(idx, dtype=np.intp), np.array(ps, dtype=float)

    dephase_idx, dephase_q = site_list("dephase_flip", only_xy=True)
    depol_idx, depol_p = site_list("depol")
    loss_idx, loss_p = site_list("loss")
    se_idx, se_p = site_list("se")
    return _Plan(
        n_sites=graph.n_sites,
        n_latent=n_latent,
        ideal_idx=_pad(ideal_rows, n_latent),
        xy=xy,
        gate_ends=np.array(ends, dtype=np.intp).reshape(-1, 2),
        gate_q=np.array(qs, dtype=float),
        dephase_idx=dephase_idx, dephase_q=dephase_q,
        depol_idx=depol_idx, depol_p=depol_p,
        loss_idx=loss_idx, loss_p=loss_p,
        se_idx=se_idx, se_p=se_p,
    )


def _stream(seed: int, code: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, code], counter=[0, 0, stream, block]))


def _random_words(gen: np.random.Generator, rows: int) -> np.ndarray:
    return gen.bit_generator.random_raw((rows, BLOCK_WORDS)).astype("<u8", copy=False)


def _bernoulli_words(gen: np.random.Generator, probs: np.ndarray) -> np.ndarray:
    u = gen.random((len(probs), BLOCK_SHOTS))
    bits = u < probs[:, None]
    return np.packbits(bits, axis=1, bitorder="little").view("<u8")


def _replace(out: np.ndarray, idx: np.ndarray, mask: np.ndarray, new: np.ndarray) -> None:
    out[idx] = (out[idx] & ~mask) | (new & mask)


def _sample_block(plan: _Plan, seed: int, code: int, block: int) -> np.ndarray:
    latent = np.zeros((plan.n_latent + 1, BLOCK_WORDS), dtype="<u8")
    latent[: plan.n_latent] = _random_words(_stream(seed, code, _LATENT, block), plan.n_latent)
    out = np.bitwise_xor.reduce(latent[plan.ideal_idx], axis=1)

    if len(plan.gate_q):
        flips = _bernoulli_words(_stream(seed, code, _GATE, block), plan.gate_q)
        for end in (0, 1):
            sel = plan.xy[plan.gate_ends[:, end]]
            if sel.any():
                np.bitwise_xor.at(out, plan.gate_ends[sel, end], flips[sel])
    if len(plan.dephase_q):
        out[plan.dephase_idx] ^= _bernoulli_words(_stream(seed, code, _DEPHASE, block), plan.dephase_q)
    if len(plan.depol_p):
        mask = _bernoulli_words(_stream(seed, code, _DEPOL_MASK, block), plan.depol_p)
        fresh = _random_words(_stream(seed, code, _DEPOL_BITS, block), len(plan.depol_p))
        _replace(out, plan.depol_idx, mask, fresh)
    # Reset: Z-measured sites report +1, X/Y-measured sites report a fair coin.
    # The latent bits already fed the neighbors' ideal parities and are kept.
    for idx, p, mstream, bstream in ((plan.loss_idx, plan.loss_p, _LOSS_MASK, _LOSS_BITS),
                                     (plan.se_idx, plan.se_p, _SE_MASK, _SE_BITS)):
        if len(p):
            mask = _bernoulli_words(_stream(seed, code, mstream, block), p)
            fresh = _random_words(_stream(seed, code, bstream, block), len(p))
            fresh[~plan.xy[idx]] = 0
            _replace(out, idx, mask, fresh)
    return out


def _run(plan: _Plan, seed: int, code: int, n_shots: int, workers: int) -> np.ndarray:
    n_words = -(-n_shots // 64)
    n_blocks = -(-n_words // BLOCK_WORDS)
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda b: _sample_block(plan, seed, code, b), range(n_blocks)))
    else:
        blocks = [_sample_block(plan, seed, code, b) for b in range(n_blocks)]
    words = np.ascontiguousarray(np.concatenate(blocks, axis=1)[:, :n_words])
    tail = n_shots % 64
    if tail:
        words[:, -1] &= np.uint64((1 << tail) - 1)
    return words


def _check_args(n_shots: int, seed: int) -> None:
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")


def _header(graph, scenario, setting, n_shots, seed) -> dict:
    return {
        "version": FILE_VERSION,
        "engine": ENGINE_VERSION,
        "lattice": graph.descriptor(),
        "scenario_digest": scenario.digest(),
        "setting": setting.label,
        "n_shots": n_shots,
        "n_sites": graph.n_sites,
        "seed": seed,
        "site_order": [s.to_json() for s in graph.sites],
    }


def sample(graph: LatticeGraph, scenario: NoiseScenario, setting: MeasurementSetting, n_shots: int,
           seed: int, workers: int = 1) -> ShotBatch:
    """Two-setting graph-state sampling.

    In setting S_A each B site draws a fair latent Z outcome and each A site
    reports the parity of its neighbors' latents (g_i = +1); noise then flips
    or replaces the reported outcomes. S_B is the mirror image.
    """
    if graph.kind == "pairs":
        raise ValueError("pairs lattices use sample_pairs")
    if setting not in GRAPH_SETTINGS:
        raise ValueError(f"setting {setting.label} is not a graph-state setting")
    _check_args(n_shots, seed)
    xb = setting.x_sublattice
    zsites = [s for s in graph.sites if s.basis != xb]
    zpos = {s: k for k, s in enumerate(zsites)}
    rows = [[zpos[j] for j in graph.neighbors(s)] if s.basis == xb else [zpos[s]] for s in graph.sites]
    plan = _noise_plan(graph, scenario, setting, rows, len(zsites))
    words = _run(plan, seed, setting.code, n_shots, workers)
    return ShotBatch(setting, n_shots, words, _header(graph, scenario, setting, n_shots, seed), graph)


def sample_pairs(graph: LatticeGraph, scenario: NoiseScenario, setting: MeasurementSetting, n_shots: int,
                 seed: int, workers: int = 1) -> ShotBatch:
    """Pair-protocol sampling: both members share one fair latent bit,
    since every measured pair stabilizer (XX, YZ, ZY) has value +1."""
    if graph.kind != "pairs":
        raise ValueError("sample_pairs needs a 'pairs' lattice")
    if setting not in PAIR_SETTINGS:
        raise ValueError(f"setting {setting.label} is not a pair setting")
    _check_args(n_shots, seed)
    pair_of = {}
    for k, (a, b) in enumerate(graph.edges):
        pair_of[a] = pair_of[b] = k
    rows = [[pair_of[s]] if s in pair_of else [] for s in graph.sites]
    plan = _noise_plan(graph, scenario, setting, rows, len(graph.edges))
    words = _run(plan, seed, setting.code, n_shots, workers)
    return ShotBatch(setting, n_shots, words, _header(graph, scenario, setting, n_shots, seed), graph)


# -- shot files ---------------------------------------------------------------

_IO_WORDS = 64


def write_shots(path, batch: ShotBatch) -> None:
    """JSON header line, then one row of ceil(n_sites/8) bytes per shot."""
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(json.dumps(batch.header, sort_keys=True).encode("utf-8") + b"\n")
        n_words = batch.words.shape[1]
        for w0 in range(0, n_words, _IO_WORDS):
            chunk = np.ascontiguousarray(batch.words[:, w0 : w0 + _IO_WORDS])
            bits = np.unpackbits(chunk.view(np.uint8), axis=1, bitorder="little")
            n_valid = min(batch.n_shots - 64 * w0, bits.shape[1])
            rows = np.packbits(bits[:, :n_valid].T, axis=1, bitorder="little")
            fh.write(rows.tobytes())


def read_shots(path) -> ShotBatch:
    path = Path(path)
    with path.open("rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        payload = fh.read()
    if header.get("version") != FILE_VERSION:
        raise ValueError(f"{path}: unsupported shot file version {header.get('version')!r}")
    graph = lattice_from_descriptor(header["lattice"])
    n_sites, n_shots = int(header["n_sites"]), int(header["n_shots"])
    if n_sites != graph.n_sites or [s.to_json() for s in graph.sites] != header["site_order"]:
        raise ValueError(f"{path}: site order does not match the lattice descriptor")
    row_bytes = -(-n_sites // 8)
    if len(payload) != n_shots * row_bytes:
        raise ValueError(f"{path}: expected {n_shots * row_bytes} payload bytes, found {len(payload)}")
    rows = np.frombuffer(payload, dtype=np.uint8).reshape(n_shots, row_bytes)
    n_words = -(-n_shots // 64)
    words = np.zeros((n_sites, n_words), dtype="<u8")
    step = 64 * _IO_WORDS
    for s0 in range(0, n_shots, step):
        part = rows[s0 : s0 + step]
        bits = np.unpackbits(part, axis=1, bitorder="little")[:, :n_sites].T
        pad = (-bits.shape[1]) % 64
        if pad:
            bits = np.concatenate([bits, np.zeros((n_sites, pad), dtype=np.uint8)], axis=1)
        packed = np.ascontiguousarray(np.packbits(bits, axis=1, bitorder="little")).view("<u8")
        words[:, s0 // 64 : s0 // 64 + packed.shape[1]] = packed
    setting = SETTINGS[header["setting"]]
    return ShotBatch(setting, n_shots, words, header, graph)
