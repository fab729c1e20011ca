import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from entmap.lattice import SiteId, build_lattice
from entmap.noise import (
    Disk, FieldSpec, NoiseScenario, Ramp, SiteChannel, build_scenario, eps_for_attenuation, flip_probability,
    identity_scenario, make_scenario, phase_sinc, uniform_scenario,
)


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.5, 1.0, math.pi / 2])
def test_sinc_is_the_phase_average(eps):
    # <cos 2t> for t uniform on [-eps, eps], by quadrature
    if eps == 0:
        expected = 1.0
    else:
        expected = quad(lambda t: math.cos(2 * t), -eps, eps)[0] / (2 * eps)
    assert phase_sinc(eps) == pytest.approx(expected, abs=1e-12)


def test_flip_probability_limits():
    assert flip_probability(0.0) == 0.0
    assert flip_probability(math.pi / 2) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("mode, factor", [
    ("derived", lambda e: phase_sinc(e)),
    ("paper", lambda e: 0.5 * (1 + phase_sinc(e))),
])
@pytest.mark.parametrize("target", [0.99, 0.9, 0.75])
def test_attenuation_inversion(mode, factor, target):
    eps = eps_for_attenuation(target, mode)
    assert factor(eps) == pytest.approx(target, abs=1e-13)


def test_ten_percent_values():
    assert eps_for_attenuation(0.9) == pytest.approx(0.3933415360246061, abs=1e-14)
    assert eps_for_attenuation(0.9, "paper") == pytest.approx(0.5655512928256413, abs=1e-12)
    with pytest.raises(ValueError):
        eps_for_attenuation(0.9, "other")
    with pytest.raises(ValueError):
        eps_for_attenuation(0.0)


def test_site_channel_factors():
    ch = SiteChannel(dephase_flip=0.1, depol=0.2, loss=0.3, se=0.5)
    assert ch.reset == pytest.approx(1 - 0.7 * 0.5)
    assert ch.f_z == pytest.approx(0.8 * 0.35)
    assert ch.f_x == ch.f_y == pytest.approx(0.8 * 0.8 * 0.35)
    assert ch.factor("Z") == ch.f_z and ch.factor("Y") == ch.f_x


def test_field_evaluation():
    spec = FieldSpec(base=0.1, disks=(Disk(0, 0, 1, 2.0), Disk(0, 0, 5, 3.0)), ramp=Ramp(10, 0, 1, 3, 0.4))
    # the ramp adds on top of the disk values and saturates beyond r_out
    assert spec(0.5, 0) == pytest.approx(2.4)
    assert spec(3, 0) == pytest.approx(3.4)
    assert spec(20, 0) == pytest.approx(0.1 + 0.4)
    assert spec(12, 0) == pytest.approx(0.1 + 0.2)
    assert spec(10, 0.5) == pytest.approx(0.1)
    assert FieldSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ValueError):
        FieldSpec.from_json({"base": 0, "rings": []})
    with pytest.raises(ValueError):
        FieldSpec(ramp=Ramp(0, 0, 2, 1, 0.1))


def test_zero_fields_give_identity():
    g = build_lattice("honeycomb", 3, 3)
    s = build_scenario(g, {c: {"base": 0.0} for c in ("dephasing", "gate_error", "loss")})
    assert s.descriptor.sites == {} and s.descriptor.edge_q == {}
    assert s.digest() == identity_scenario(g).digest()


def test_disk_covers_one_site():
    g = build_lattice("honeycomb", 3, 3)
    target = SiteId("A", 1, 1)
    x, y = g.positions[target]
    s = build_scenario(g, {"dephasing": {"disks": [{"cx": x, "cy": y, "r": 0.1, "value": 0.7}]}})
    assert s.dephase_eps == {target: 0.7}


def test_gate_ramp():
    g = build_lattice("honeycomb", 8, 8)
    cx, cy = g.center()
    edge = eps_for_attenuation(0.9)
    s = build_scenario(g, {"gate_error": {"ramp": {"cx": cx, "cy": cy, "r_in": 0, "r_out": 4, "edge_value": edge}}})
    desc = s.descriptor
    factors = {e: desc.gate_factor(e) for e in g.edges}
    assert max(factors.values()) > 0.99
    assert min(factors.values()) == pytest.approx(0.9, abs=1e-12)


def test_pauliize_limits():
    g = build_lattice("honeycomb", 1, 1)
    a = SiteId("A", 0, 0)
    desc = make_scenario(g, dephase_eps={a: math.pi / 2}, loss_p={SiteId("B", 0, 0): 1.0}).descriptor
    assert desc.site(a).f_x == pytest.approx(0.0, abs=1e-15)
    assert desc.site(a).dephase_flip == pytest.approx(0.5)
    assert desc.site(SiteId("B", 0, 0)).reset == 1.0
    assert desc.site(SiteId("B", 0, 0)).f_z == 0.0


def test_holes_carry_full_loss():
    g = build_lattice("honeycomb", 2, 2, holes=[[0, 0, "B"]])
    s = make_scenario(g)
    assert s.loss_p[SiteId("B", 0, 0)] == 1.0
    with pytest.raises(ValueError):
        NoiseScenario(g, {}, {}, {}, {}, {})


def test_parameter_validation():
    g = build_lattice("honeycomb", 1, 1)
    a = SiteId("A", 0, 0)
    with pytest.raises(ValueError):
        make_scenario(g, loss_p={a: 1.5})
    with pytest.raises(ValueError):
        make_scenario(g, dephase_eps={a: -0.1})
    with pytest.raises(ValueError):
        build_scenario(g, {"thermal": 0.1})
    with pytest.raises(ValueError):
        uniform_scenario(g, "thermal", 0.1)


def test_digest_tracks_holes_and_values():
    plain = build_lattice("honeycomb", 4, 4)
    holed = build_lattice("honeycomb", 4, 4, holes=[[1, 1, "A"]])
    assert identity_scenario(plain).digest() != identity_scenario(holed).digest()
    assert uniform_scenario(plain, "loss", 0.1).digest() != uniform_scenario(plain, "loss", 0.2).digest()
    assert uniform_scenario(plain, "loss", 0.1).digest() == uniform_scenario(plain, "loss", 0.1).digest()


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.5))
def test_flip_channel_equals_phase_average(eps):
    """(1-q) rho + q Z rho Z reproduces the uniform-phase average of exp(-i t Z)."""
    rho = np.array([[0.6, 0.3 - 0.1j], [0.3 + 0.1j, 0.4]])
    Z = np.diag([1.0, -1.0])
    q = flip_probability(eps)
    flipped = (1 - q) * rho + q * Z @ rho @ Z
    x, w = np.polynomial.legendre.leggauss(40)
    averaged = sum(0.5 * wi * np.diag(np.exp(-1j * t * np.array([1, -1]))) @ rho
                   @ np.diag(np.exp(1j * t * np.array([1, -1]))) for t, wi in zip(eps * x, w))
    np.testing.assert_allclose(flipped, averaged, atol=1e-12)
