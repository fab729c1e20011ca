"""Binary PPM heatmaps of witness maps."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .estimator import WitnessMap
from .lattice import lattice_from_descriptor

PIXELS_PER_UNIT = 24
BACKGROUND = (224, 224, 224)
OUTLINE = (0, 0, 0)
MARGIN = 1.0
# Marker radii in lattice units; alpha sits on bond midpoints, beta on sites,
# gamma on plaquette centers.
MARKER_RADIUS = {"alpha": 0.17, "beta": 0.27, "gamma": 0.45, "custom": 0.3}
OUTLINE_PX = 2


def palette(value: float, clamp: float = 0.5) -> tuple[int, int, int]:
    """Diverging map: -clamp red, 0 white, +clamp blue, linear in between."""
    t = max(-1.0, min(1.0, value / clamp))
    if t < 0:
        level = int(round(255 * (1.0 + t)))
        return (255, level, level)
    level = int(round(255 * (1.0 - t)))
    return (level, level, 255)


def render_map(wmap: WitnessMap, clamp: float = 0.5, scale: int = PIXELS_PER_UNIT) -> np.ndarray:
    if not wmap.entries:
        raise ValueError("cannot render an empty map")
    graph = lattice_from_descriptor(wmap.lattice)
    xs = [p[0] for p in graph.positions.values()]
    ys = [p[1] for p in graph.positions.values()]
    x0, y1 = min(xs) - MARGIN, max(ys) + MARGIN
    width = int(math.ceil((max(xs) - min(xs) + 2 * MARGIN) * scale))
    height = int(math.ceil((max(ys) - min(ys) + 2 * MARGIN) * scale))
    image = np.empty((height, width, 3), dtype=np.uint8)
    image[:] = BACKGROUND

    for e in wmap.entries:
        cx = (e.region.centroid[0] - x0) * scale
        cy = (y1 - e.region.centroid[1]) * scale
        r = MARKER_RADIUS.get(e.region.kind, MARKER_RADIUS["custom"]) * scale
        outer = r + (OUTLINE_PX if e.defect_adjacent else 0)
        i0, i1 = max(0, int(cy - outer)), min(height, int(cy + outer) + 2)
        j0, j1 = max(0, int(cx - outer)), min(width, int(cx + outer) + 2)
        py, px = np.mgrid[i0:i1, j0:j1]
        d2 = (px + 0.5 - cx) ** 2 + (py + 0.5 - cy) ** 2
        tile = image[i0:i1, j0:j1]
        tile[d2 <= r * r] = palette(e.w_hat, clamp)
        if e.defect_adjacent:
            tile[(d2 > r * r) & (d2 <= outer * outer)] = OUTLINE
    return image


def write_ppm(path, image: np.ndarray) -> None:
    height, width, _ = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or parts[2] != b"255":
        raise ValueError(f"{path}: not a binary 8-bit PPM")
    width, height = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(height, width, 3)
