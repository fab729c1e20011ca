import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entmap.analytic import (
    analytic_map, exact_region_bound, heisenberg_push, pair_projector_value, paper_product_formula,
    stabilizer_expectation,
)
from entmap.graphstate import generator, ideal_expectation, pair_group
from entmap.lattice import REGION_KINDS, SiteId, build_lattice, central_region, enumerate_regions, minimal_patch
from entmap.noise import identity_scenario, make_scenario, phase_sinc, uniform_scenario
from entmap.oracle import expectation, prepare, region_values

A11 = SiteId("A", 1, 1)


def random_scenario(graph, seed, scale=0.3):
    rng = np.random.default_rng(seed)
    return make_scenario(
        graph,
        dephase_eps={s: rng.uniform(0, 1.2) for s in graph.sites},
        gate_eps={e: rng.uniform(0, 0.8) for e in graph.edges},
        loss_p={s: rng.uniform(0, scale) for s in graph.sites},
        se_p={s: rng.uniform(0, scale) for s in graph.sites},
        depol_p={s: rng.uniform(0, scale) for s in graph.sites},
    )


def test_identity_scenario_is_perfect():
    g = build_lattice("honeycomb", 3, 3)
    s = identity_scenario(g)
    for kind in REGION_KINDS:
        for r in enumerate_regions(g, kind):
            assert exact_region_bound(g, s, r) == (1.0, 1.0, 1.0, -0.5)
    assert stabilizer_expectation(g, s, A11) == 1.0


def test_dephasing_at_one_site():
    g = build_lattice("honeycomb", 1, 1)
    a = SiteId("A", 0, 0)
    s = make_scenario(g, dephase_eps={a: 0.5})
    assert stabilizer_expectation(g, s, a) == pytest.approx(math.sin(1.0), abs=1e-15)
    assert stabilizer_expectation(g, s, SiteId("B", 0, 0)) == 1.0


@pytest.mark.parametrize("channel", ["loss", "spont_emission"])
@pytest.mark.parametrize("p", [0.05, 0.3])
def test_interior_reset_scaling(channel, p):
    g = build_lattice("honeycomb", 3, 3)
    s = uniform_scenario(g, channel, p)
    assert stabilizer_expectation(g, s, A11) == pytest.approx((1 - p) ** 4, abs=1e-15)
    pushed = heisenberg_push(generator(g, A11), s.descriptor, prune=False)
    assert len(pushed) == 8
    nonzero = [w for w, P in pushed.terms if ideal_expectation(g, P) != 0]
    assert nonzero == [pytest.approx((1 - p) ** 4)]


@pytest.mark.parametrize("eps", [0.2, 0.4])
def test_gate_error_on_interior_generator(eps):
    g = build_lattice("honeycomb", 3, 3)
    s = uniform_scenario(g, "gate_error", eps)
    assert stabilizer_expectation(g, s, A11) == pytest.approx(phase_sinc(eps) ** 3, abs=1e-15)
    paper = stabilizer_expectation(g, s, A11, gate_mode="paper")
    assert paper == pytest.approx((0.5 * (1 + phase_sinc(eps))) ** 3, abs=1e-15)


def test_full_loss_on_alpha():
    g = build_lattice("honeycomb", 3, 3)
    region = central_region(g, "alpha")
    a, b = region.sites
    s = make_scenario(g, loss_p={a: 1.0})
    assert stabilizer_expectation(g, s, a) == 0.0
    assert stabilizer_expectation(g, s, b) == 0.0
    bound = exact_region_bound(g, s, region)
    assert bound.p_a == bound.p_b == 0.5
    assert bound.p_tilde == 0.0 and bound.w == 0.5


@pytest.mark.parametrize("seed", range(4))
def test_prune_matches_full_branching(seed):
    g = build_lattice("honeycomb", 3, 3)
    s = random_scenario(g, seed)
    for kind in REGION_KINDS:
        for r in enumerate_regions(g, kind):
            fast = exact_region_bound(g, s, r)
            full = exact_region_bound(g, s, r, prune=False)
            assert fast == pytest.approx(full, abs=1e-14)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_oracle_under_mixed_noise(seed):
    g = build_lattice("honeycomb", 2, 2)
    s = random_scenario(g, seed)
    patch = prepare(g, s)
    for kind in REGION_KINDS:
        for r in enumerate_regions(g, kind):
            exact = exact_region_bound(g, s, r)
            oracle = region_values(patch, g, r)
            assert exact.p_a == pytest.approx(oracle[0], abs=1e-12)
            assert exact.p_b == pytest.approx(oracle[1], abs=1e-12)


@pytest.mark.parametrize("kind", REGION_KINDS)
def test_patch_sufficiency(kind):
    g = build_lattice("honeycomb", 5, 5)
    s = random_scenario(g, 17)
    region = central_region(g, kind)
    patch = minimal_patch(g, region)
    p_a, p_b, w = region_values(prepare(patch, s), g, region)
    exact = exact_region_bound(g, s, region)
    assert (exact.p_a, exact.p_b, exact.w) == pytest.approx((p_a, p_b, w), abs=1e-12)


def test_alpha_depolarizing_against_oracle():
    g = build_lattice("honeycomb", 4, 4)
    region = central_region(g, "alpha")
    s = uniform_scenario(g, "depolarizing", 0.1)
    w_oracle = region_values(prepare(minimal_patch(g, region), s), g, region)[2]
    assert exact_region_bound(g, s, region).w == pytest.approx(w_oracle, abs=1e-9)


def test_product_formula_identity():
    g = build_lattice("honeycomb", 3, 3)
    for kind in REGION_KINDS:
        r = enumerate_regions(g, kind)[0]
        pf = paper_product_formula(g, identity_scenario(g), r)
        assert pf.w == pf.w_exact == -0.5 and pf.deviation == 0.0


def test_product_formula_misses_shared_z_under_depolarizing():
    g = build_lattice("honeycomb", 4, 4)
    r = central_region(g, "gamma")
    pf = paper_product_formula(g, uniform_scenario(g, "depolarizing", 0.1), r)
    assert pf.deviation > 0.1


def test_pair_projector():
    g = build_lattice("pairs", 2, 1)
    a, b = g.edges[0]
    assert pair_projector_value(g, identity_scenario(g), a, b) == 1.0
    full = make_scenario(g, depol_p={s: 1.0 for s in g.sites})
    assert pair_projector_value(g, full, a, b) == pytest.approx(0.25)
    p = 0.3
    one = make_scenario(g, depol_p={a: p})
    assert pair_projector_value(g, one, a, b) == pytest.approx(0.25 * (1 + 3 * (1 - p)))


@pytest.mark.parametrize("seed", range(3))
def test_pair_projector_against_oracle(seed):
    g = build_lattice("pairs", 2, 1)
    s = random_scenario(g, seed)
    patch = prepare(g, s)
    for a, b in g.edges:
        dense = sum(0.25 * expectation(patch, P) for P in pair_group(a, b))
        assert pair_projector_value(g, s, a, b) == pytest.approx(dense, abs=1e-12)


def test_analytic_map_modes():
    g = build_lattice("honeycomb", 3, 3)
    s = uniform_scenario(g, "depolarizing", 0.2)
    regions = enumerate_regions(g, "gamma")
    exact = analytic_map(g, s, regions)
    paper = analytic_map(g, s, regions, mode="paper")
    assert exact.source == "analytic-exact" and paper.source == "analytic-paper"
    assert all(e.stderr == 0.0 for e in exact.entries)
    assert not np.allclose(exact.values(), paper.values())
    with pytest.raises(ValueError):
        analytic_map(g, s, regions, mode="fast")
