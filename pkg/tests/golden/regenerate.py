"""Rebuild oracle_golden.json from the dense oracle.

Run from the repository root: python3 tests/golden/regenerate.py
"""
import json
from pathlib import Path

import numpy as np

from entmap.lattice import REGION_KINDS, build_lattice, central_region, minimal_patch
from entmap.noise import CHANNELS, make_scenario, uniform_scenario
from entmap.oracle import averaged_unitary_channel, export_golden, prepare, region_values

HERE = Path(__file__).parent
GRID_LATTICE = ("honeycomb", 4, 4)
PARAMS = (0.0, 0.05, 0.1, 0.3)
GATE_EPS = (0.2, 0.4, 0.8)


def grid_records():
    graph = build_lattice(*GRID_LATTICE)
    records = []
    for kind in REGION_KINDS:
        region = central_region(graph, kind)
        patch = minimal_patch(graph, region)
        for channel in CHANNELS:
            for p in PARAMS:
                scenario = uniform_scenario(graph, channel, p)
                p_a, p_b, w = region_values(prepare(patch, scenario), graph, region)
                records.append({
                    "case": "grid",
                    "lattice": list(GRID_LATTICE),
                    "channel": channel,
                    "param": p,
                    "patch": [s.to_json() for s in patch.sites],
                    "scenario": scenario.digest(),
                    "region": region.to_json(),
                    "value": {"p_a": p_a, "p_b": p_b, "w": w},
                })
    return records


def gate_records():
    """<X_A Z_B> on one edge after averaging exp(i t ZZ) over t in [-eps, eps].

    Uses direct quadrature of the unitary, not the flip-channel form.
    """
    graph = build_lattice("honeycomb", 1, 1)
    ideal = prepare(graph, make_scenario(graph)).rho
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Z = np.diag([1.0, -1.0]).astype(complex)
    ZZ, XZ = np.kron(Z, Z), np.kron(X, Z)
    records = []
    for eps in GATE_EPS:
        rho = averaged_unitary_channel(ideal, ZZ, eps)
        records.append({
            "case": "gate_factor",
            "patch": [s.to_json() for s in graph.sites],
            "scenario": f"single edge, eps={eps!r}",
            "region": None,
            "param": eps,
            "value": float(np.real(np.trace(XZ @ rho))),
        })
    return records


def main():
    export_golden(grid_records() + gate_records(), HERE / "oracle_golden.json")


if __name__ == "__main__":
    main()
