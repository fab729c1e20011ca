import numpy as np
import pytest

from entmap.analytic import analytic_map
from entmap.estimator import WitnessMap
from entmap.lattice import build_lattice, enumerate_regions
from entmap.noise import identity_scenario, make_scenario, uniform_scenario
from entmap.render import BACKGROUND, OUTLINE, PIXELS_PER_UNIT, palette, read_ppm, render_map, write_ppm

RED, WHITE, BLUE = (255, 0, 0), (255, 255, 255), (0, 0, 255)


@pytest.mark.parametrize("value, rgb", [
    (-0.5, RED), (0.0, WHITE), (0.5, BLUE), (-2.0, RED), (3.0, BLUE),
    (-0.25, (255, 128, 128)), (0.25, (128, 128, 255)),
])
def test_palette(value, rgb):
    assert palette(value) == rgb


def test_palette_clamp():
    assert palette(-1.0, clamp=1.0) == RED
    assert palette(-0.5, clamp=1.0) == (255, 128, 128)


def painted(image):
    return image[np.any(image != BACKGROUND, axis=-1)]


@pytest.mark.parametrize("kind", ["alpha", "beta", "gamma"])
def test_perfect_map_is_red(kind):
    g = build_lattice("honeycomb", 4, 4)
    wmap = analytic_map(g, identity_scenario(g), enumerate_regions(g, kind))
    image = render_map(wmap)
    pixels = painted(image)
    assert len(pixels) > 0
    assert np.all(pixels == RED)


def test_marker_at_centroid():
    g = build_lattice("honeycomb", 1, 1)
    wmap = analytic_map(g, uniform_scenario(g, "depolarizing", 1.0), enumerate_regions(g, "alpha"))
    (entry,) = wmap.entries
    image = render_map(wmap, clamp=entry.w_hat)
    xs = [p[0] for p in g.positions.values()]
    ys = [p[1] for p in g.positions.values()]
    col = int((entry.region.centroid[0] - min(xs) + 1.0) * PIXELS_PER_UNIT)
    row = int((max(ys) + 1.0 - entry.region.centroid[1]) * PIXELS_PER_UNIT)
    assert tuple(image[row, col]) == BLUE


def test_zero_value_is_white():
    g = build_lattice("honeycomb", 2, 2)
    wmap = analytic_map(g, identity_scenario(g), enumerate_regions(g, "gamma"))
    entries = [type(e).from_parts(e.region, 0.75, 0.75, 0.0, 0, 0) for e in wmap.entries]
    image = render_map(WitnessMap("test", "gamma", entries, wmap.lattice))
    assert np.all(painted(image) == WHITE)


def test_defect_outline():
    g = build_lattice("honeycomb", 3, 3, holes=[[1, 1, "A"]])
    wmap = analytic_map(g, make_scenario(g), enumerate_regions(g, "gamma"))
    assert any(e.defect_adjacent for e in wmap.entries)
    image = render_map(wmap)
    assert np.any(np.all(image == OUTLINE, axis=-1))


def test_empty_map_rejected():
    g = build_lattice("honeycomb", 1, 1)
    with pytest.raises(ValueError):
        render_map(WitnessMap("x", "none", [], g.descriptor()))


def test_ppm_round_trip(tmp_path):
    g = build_lattice("honeycomb", 2, 3)
    image = render_map(analytic_map(g, uniform_scenario(g, "loss", 0.1), enumerate_regions(g, "beta")))
    path = tmp_path / "m.ppm"
    write_ppm(path, image)
    data = path.read_bytes()
    h, w, _ = image.shape
    assert data.startswith(f"P6\n{w} {h}\n255\n".encode())
    assert np.array_equal(read_ppm(path), image)
