"""Noise channels, spatial parameter fields and their stochastic-Pauli forms.

Channels act in a fixed order: gate errors during the entangling step, then
dephasing, depolarizing, atom loss and spontaneous emission. Phase angles are
uniform on [-eps, eps].
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from scipy.optimize import brentq

from .lattice import Edge, LatticeGraph, SiteId

CHANNELS = ("dephasing", "gate_error", "loss", "spont_emission", "depolarizing")
GATE_MODES = ("derived", "paper")


def phase_sinc(eps: float) -> float:
    """sin(2 eps) / (2 eps), the X attenuation of a uniform random phase on [-eps, eps]."""
    if eps == 0.0:
        return 1.0
    return math.sin(2.0 * eps) / (2.0 * eps)


def flip_probability(eps: float) -> float:
    return 0.5 * (1.0 - phase_sinc(eps))


def eps_for_attenuation(target: float, mode: str = "derived") -> float:
    """Half-width eps whose per-gate attenuation equals ``target``.

    ``derived`` inverts sinc(2 eps); ``paper`` inverts (1 + sinc(2 eps)) / 2.
    """
    if mode == "paper":
        target = 2.0 * target - 1.0
    elif mode != "derived":
        raise ValueError(f"unknown gate mode {mode!r}")
    if not 0.0 < target <= 1.0:
        raise ValueError("attenuation target must lie in (0, 1]")
    if target == 1.0:
        return 0.0
    return brentq(lambda e: phase_sinc(e) - target, 1e-12, math.pi / 2, xtol=1e-15)


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float
    value: float


@dataclass(frozen=True)
class Ramp:
    cx: float
    cy: float
    r_in: float
    r_out: float
    edge_value: float

    def __call__(self, x: float, y: float) -> float:
        d = math.hypot(x - self.cx, y - self.cy)
        if d <= self.r_in:
            return 0.0
        if d >= self.r_out:
            return self.edge_value
        return self.edge_value * (d - self.r_in) / (self.r_out - self.r_in)


@dataclass(frozen=True)
class FieldSpec:
    """base value, overridden inside any disk (first match wins), plus a radial ramp."""

    base: float = 0.0
    disks: tuple[Disk, ...] = ()
    ramp: Ramp | None = None

    def __post_init__(self):
        for d in self.disks:
            if d.r < 0:
                raise ValueError("disk radius must be non-negative")
        if self.ramp is not None and not self.ramp.r_out > self.ramp.r_in >= 0:
            raise ValueError("ramp radii must satisfy 0 <= r_in < r_out")

    def __call__(self, x: float, y: float) -> float:
        value = self.base
        for d in self.disks:
            if math.hypot(x - d.cx, y - d.cy) <= d.r:
                value = d.value
                break
        if self.ramp is not None:
            value += self.ramp(x, y)
        return value

    @classmethod
    def from_json(cls, doc) -> "FieldSpec":
        if isinstance(doc, FieldSpec):
            return doc
        if isinstance(doc, (int, float)):
            return cls(base=float(doc))
        unknown = set(doc) - {"base", "disks", "ramp"}
        if unknown:
            raise ValueError(f"unknown field keys {sorted(unknown)}")
        disks = tuple(
            Disk(float(d["cx"]), float(d["cy"]), float(d["r"]), float(d["value"]))
            for d in doc.get("disks", [])
        )
        ramp = doc.get("ramp")
        if ramp is not None:
            ramp = Ramp(
                float(ramp["cx"]), float(ramp["cy"]), float(ramp["r_in"]),
                float(ramp["r_out"]), float(ramp["edge_value"]),
            )
        return cls(base=float(doc.get("base", 0.0)), disks=disks, ramp=ramp)

    def to_json(self) -> dict:
        doc = {"base": self.base, "disks": [vars(d) for d in self.disks]}
        if self.ramp is not None:
            doc["ramp"] = vars(self.ramp)
        return doc


@dataclass(frozen=True)
class SiteChannel:
    """Single-site noise in stochastic form, applied in this field order."""

    dephase_flip: float = 0.0
    depol: float = 0.0
    loss: float = 0.0
    se: float = 0.0

    @property
    def reset(self) -> float:
        return 1.0 - (1.0 - self.loss) * (1.0 - self.se)

    @property
    def f_z(self) -> float:
        return (1.0 - self.depol) * (1.0 - self.reset)

    @property
    def f_x(self) -> float:
        return (1.0 - 2.0 * self.dephase_flip) * self.f_z

    f_y = f_x

    def factor(self, letter: str) -> float:
        return self.f_z if letter == "Z" else self.f_x


_CLEAN = SiteChannel()


@dataclass(frozen=True, eq=False)
class ChannelDescriptor:
    """Per-site attenuation/reset data and per-edge ZZ-flip probabilities."""

    graph: LatticeGraph = field(repr=False)
    sites: Mapping[SiteId, SiteChannel]
    edge_q: Mapping[Edge, float]

    def site(self, s: SiteId) -> SiteChannel:
        return self.sites.get(s, _CLEAN)

    def gate_factor(self, edge: Edge, mode: str = "derived") -> float:
        q = self.edge_q.get(edge, 0.0)
        if mode == "derived":
            return 1.0 - 2.0 * q
        if mode == "paper":
            return 1.0 - q
        raise ValueError(f"unknown gate mode {mode!r}")


@dataclass(frozen=True, eq=False)
class NoiseScenario:
    graph: LatticeGraph = field(repr=False)
    dephase_eps: Mapping[SiteId, float]
    gate_eps: Mapping[Edge, float]
    loss_p: Mapping[SiteId, float]
    se_p: Mapping[SiteId, float]
    depol_p: Mapping[SiteId, float]

    def __post_init__(self):
        for name in ("dephase_eps", "gate_eps"):
            for key, value in getattr(self, name).items():
                if not value >= 0.0:
                    raise ValueError(f"{name}[{key}] = {value} must be non-negative")
        for name in ("loss_p", "se_p", "depol_p"):
            for key, value in getattr(self, name).items():
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"{name}[{key}] = {value} outside [0, 1]")
        for h in self.graph.holes:
            if self.loss_p.get(h, 0.0) != 1.0:
                raise ValueError(f"hole {h} must carry loss probability 1")

    @cached_property
    def descriptor(self) -> ChannelDescriptor:
        return pauliize(self)

    def digest(self) -> str:
        def site_items(m):
            return [[s.to_json(), v] for s, v in sorted(m.items()) if v != 0.0]

        doc = {
            "lattice": self.graph.descriptor(),
            "dephase_eps": site_items(self.dephase_eps),
            "gate_eps": [[a.to_json(), b.to_json(), v] for (a, b), v in sorted(self.gate_eps.items()) if v != 0.0],
            "loss_p": site_items(self.loss_p),
            "se_p": site_items(self.se_p),
            "depol_p": site_items(self.depol_p),
        }
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def pauliize(scenario: NoiseScenario) -> ChannelDescriptor:
    sites = {}
    for s in scenario.graph.sites:
        ch = SiteChannel(
            dephase_flip=flip_probability(scenario.dephase_eps.get(s, 0.0)),
            depol=scenario.depol_p.get(s, 0.0),
            loss=scenario.loss_p.get(s, 0.0),
            se=scenario.se_p.get(s, 0.0),
        )
        if ch != _CLEAN:
            sites[s] = ch
    edge_q = {e: flip_probability(eps) for e, eps in scenario.gate_eps.items() if eps != 0.0}
    return ChannelDescriptor(scenario.graph, sites, edge_q)


def make_scenario(graph: LatticeGraph, dephase_eps=None, gate_eps=None, loss_p=None,
                  se_p=None, depol_p=None) -> NoiseScenario:
    """Scenario from explicit maps; holes are forced to loss probability 1."""
    loss = dict(loss_p or {})
    for h in graph.holes:
        loss[h] = 1.0
    return NoiseScenario(
        graph,
        dict(dephase_eps or {}),
        dict(gate_eps or {}),
        loss,
        dict(se_p or {}),
        dict(depol_p or {}),
    )


def identity_scenario(graph: LatticeGraph) -> NoiseScenario:
    return make_scenario(graph)


def uniform_scenario(graph: LatticeGraph, channel: str, value: float) -> NoiseScenario:
    """One channel at the same parameter on every site (or every edge for gate_error)."""
    if channel == "gate_error":
        return make_scenario(graph, gate_eps={e: value for e in graph.edges})
    key = {"dephasing": "dephase_eps", "loss": "loss_p", "spont_emission": "se_p",
           "depolarizing": "depol_p"}.get(channel)
    if key is None:
        raise ValueError(f"unknown channel {channel!r}")
    return make_scenario(graph, **{key: {s: value for s in graph.sites}})


def build_scenario(graph: LatticeGraph, config: Mapping | None = None) -> NoiseScenario:
    """Materialize per-site and per-edge parameters from FieldSpecs.

    Edges are evaluated at the midpoint of their endpoints.
    """
    config = dict(config or {})
    unknown = set(config) - set(CHANNELS)
    if unknown:
        raise ValueError(f"unknown noise channels {sorted(unknown)}")
    fields = {name: FieldSpec.from_json(config[name]) for name in config}

    def on_sites(name):
        spec = fields.get(name)
        if spec is None:
            return {}
        out = {}
        for s in graph.sites:
            value = spec(*graph.positions[s])
            if value != 0.0:
                out[s] = value
        return out

    gate = {}
    if "gate_error" in fields:
        spec = fields["gate_error"]
        for a, b in graph.edges:
            (xa, ya), (xb, yb) = graph.positions[a], graph.positions[b]
            value = spec(0.5 * (xa + xb), 0.5 * (ya + yb))
            if value != 0.0:
                gate[(a, b)] = value

    return make_scenario(
        graph,
        dephase_eps=on_sites("dephasing"),
        gate_eps=gate,
        loss_p=on_sites("loss"),
        se_p=on_sites("spont_emission"),
        depol_p=on_sites("depolarizing"),
    )
