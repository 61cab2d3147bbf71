import numpy as np
import pytest

from surfcalc import geometry, jet, moving
from surfcalc.errors import ContractViolation, MissingExtension
from surfcalc.fields import (AmbientScalarField, NormalExtension, SurfaceScalarField, constant,
                             constant_vector, coordinate, identity_vector, planar_radial,
                             polynomial, polynomial_vector, trigonometric)
from surfcalc.moving import MovingChart
from surfcalc.transport import (GraphRegion, PiecewiseVolumeScenario, central_difference,
                                convergence_orders, curved_interface_scenario, make_report,
                                pillbox_sweep, planar_cube_scenario, richardson_difference,
                                split_integral, surface_transport_integrands, two_piece_reynolds,
                                unit_cube, verify_generalized_reynolds, verify_jacobian_rate,
                                verify_reynolds, verify_surface_divergence,
                                verify_surface_transport, volume_integral)


def test_make_report_pass_rule():
    rep = make_report("s", "c", 1.0, {"a": 1.0 + 4e-10, "b": 1.0 - 4e-10}, 1e-8)
    assert rep.passed and np.isclose(rep.abs_residual, 4e-10)
    assert not make_report("s", "c", 1.0, {"a": 1.1}, 1e-8).passed
    # forms that disagree fail even when each is within tol of lhs
    assert not make_report("s", "c", 1.0, {"a": 1.0 + 5e-7, "b": 1.0 - 5e-7}, 1e-6,
                           form_tol=1e-9).passed
    # tiny quantities pass on the absolute residual
    assert make_report("s", "c", 1e-20, {"a": 0.0}, 1e-12).passed
    with pytest.raises(ContractViolation):
        make_report("s", "c", 1.0, {}, 1e-8)
    d = rep.to_dict()
    assert d["rhs"] == {"a": 1.0 + 4e-10, "b": 1.0 - 4e-10}


def test_difference_orders():
    f = np.exp
    steps = np.array([1e-1, 5e-2, 2.5e-2])
    central = [abs(central_difference(f, 0.3, h) - np.exp(0.3)) for h in steps]
    rich = [abs(richardson_difference(f, 0.3, h) - np.exp(0.3)) for h in steps]
    assert np.all(np.abs(convergence_orders(steps, central) - 2) < 0.05)
    assert np.all(np.abs(convergence_orders(steps, rich) - 4) < 0.1)


def test_reynolds_stationary_flow():
    rep = verify_reynolds(moving.identity_flow(), polynomial(), unit_cube(), 0.0, tol=1e-12)
    assert abs(rep.lhs) < 1e-12 and rep.passed


def test_reynolds_linear_unit_rate():
    fm = moving.linear_flow(np.diag([1.0, 0.0, 0.0]))
    rep = verify_reynolds(fm, constant(1.0), unit_cube(), 0.0, tol=1e-8, method="richardson")
    assert rep.passed and np.isclose(rep.lhs, 1.0, atol=1e-8)
    assert np.isclose(rep.rhs["flux"], 1.0, atol=1e-12)


def test_reynolds_swirl_preserves_volume():
    rep = verify_reynolds(moving.swirl_flow(), constant(1.0), unit_cube(), 0.4, tol=1e-9)
    assert abs(rep.lhs) < 1e-9 and rep.passed


@pytest.mark.parametrize("name", ["linear", "swirl", "nonlinear_shear"])
def test_reynolds_general_density(name):
    fm = moving.make_flow(name, **({"a12": 0.4, "a21": -0.3, "a22": 0.5} if name == "linear"
                                   else {}))
    region = GraphRegion(((0.0, 1.0), (0.0, 1.0)), lambda a, b: 0.1 * a * b,
                         lambda a, b: 1.0 + 0.2 * jet.sin(3 * a) + 0 * b)
    rep = verify_reynolds(fm, trigonometric(1.3, 0.7), region, 0.3, tol=1e-7,
                          method="richardson")
    assert rep.passed, rep
    assert all(s in (-1.0, 1.0) for s in rep.details["face_signs"].values())


def test_jacobian_rate():
    assert verify_jacobian_rate(moving.identity_flow(), 0.3, [0.1, 0.2, 0.3]).lhs == 0
    fm = moving.linear_flow(np.diag([1.0, 2.0, 3.0]))
    rep = verify_jacobian_rate(fm, 0.1, [0.1, 0.2, 0.3])
    assert rep.passed and np.isclose(rep.lhs, 6 * np.exp(0.6), rtol=1e-9)


def test_jacobian_rate_random_linear_flows(rng):
    for _ in range(5):
        fm = moving.linear_flow(0.5 * rng.normal(size=(3, 3)))
        rep = verify_jacobian_rate(fm, 0.4, rng.normal(size=3), tol=1e-8)
        assert rep.passed
        tr = np.trace(np.array(fm.params["A"]))
        assert np.isclose(rep.rhs["divergence"], tr * np.exp(tr * 0.4), rtol=1e-12)


def test_surface_divergence_theorem():
    assert verify_surface_divergence(geometry.disc(), constant_vector(0, 0, 0)).lhs == 0
    disc = verify_surface_divergence(geometry.disc(), planar_radial(), tol=1e-9)
    assert disc.passed and np.isclose(disc.lhs, 2 * np.pi)
    cap = verify_surface_divergence(geometry.spherical_cap(), constant_vector(0, 0, 1), rule=32)
    assert cap.passed
    patch = verify_surface_divergence(geometry.graph(), polynomial_vector(), rule=32, tol=1e-10)
    assert patch.passed


def test_surface_transport_stationary():
    unit = geometry.sphere()
    still = MovingChart("still", lambda t, a, b: unit.func(a, b), unit.domain)
    rep = verify_surface_transport(still, polynomial(), 0.0, tol=1e-12)
    assert rep.passed and abs(rep.lhs) < 1e-12
    assert all(abs(v) < 1e-12 for v in rep.rhs.values())


def test_surface_transport_expanding_sphere():
    c = 0.5
    rep = verify_surface_transport(moving.expand_sphere(1.0, c), constant(1.0), 0.0)
    assert rep.passed and np.isclose(rep.lhs, 8 * np.pi * c, rtol=1e-6)
    assert set(rep.rhs) == {"lagrangian", "lagrangian_split", "thomas", "partial", "partial_split"}


def test_surface_transport_wave_graph():
    rep = verify_surface_transport(moving.wave_graph(), coordinate(3), 0.0)
    assert rep.passed and rep.form_spread < 1e-9


def test_surface_only_density_uses_lagrangian_forms():
    psi = SurfaceScalarField(lambda u, t: u[0] * u[1] + t, "q")
    rep = verify_surface_transport(moving.wave_graph(), psi, 0.1)
    assert rep.passed and rep.details["skipped_forms"] == ["thomas", "partial", "partial_split"]
    ext = verify_surface_transport(moving.wave_graph(), NormalExtension(psi), 0.1)
    assert ext.passed and len(ext.rhs) == 5


def test_transport_integrands_pointwise_agree(rng):
    mc = moving.rotate_sphere(0.7)
    u = mc.random_points(rng, 20)
    forms = surface_transport_integrands(mc, polynomial(), 0.2, u)
    # pointwise the forms differ by divergences; the Lagrangian pair agrees exactly
    assert np.allclose(forms["lagrangian"], forms["lagrangian_split"])
    assert np.allclose(forms["partial"], forms["partial_split"])


def test_planar_cube_generalized_reynolds():
    sc = planar_cube_scenario()
    assert np.isclose(split_integral(sc, 0.0), 0.5 * 1 + 0.5 * 3)
    rep = verify_generalized_reynolds(sc, 0.0, tol=1e-12)
    assert rep.passed and np.isclose(rep.lhs, -0.4, atol=1e-12)
    for v in rep.rhs.values():
        assert np.isclose(v, -0.4, atol=1e-12)


def test_curved_interface_generalized_reynolds():
    assert verify_generalized_reynolds(curved_interface_scenario(), 0.0).rel_residual < 1e-6
    sc = curved_interface_scenario(flow=moving.nonlinear_shear_flow(0.5))
    assert verify_generalized_reynolds(sc, 0.2).passed


def test_continuous_density_reduces_to_plain_reynolds():
    psi = polynomial()
    sc = PiecewiseVolumeScenario("continuous", moving.swirl_flow(), unit_cube(),
                                 lambda t, a, b: 0.5 + 0.1 * jet.sin(2 * np.pi * a) + 0.3 * t,
                                 psi, psi)
    rep = verify_generalized_reynolds(sc, 0.1, tol=1e-8)
    plain = verify_reynolds(sc.flow, psi, unit_cube(), 0.1, tol=1e-8)
    assert rep.passed and abs(rep.lhs - plain.lhs) < 1e-8


def test_material_interface_matches_two_piece():
    sc = curved_interface_scenario(speed=0.0, flow=moving.swirl_flow())
    gen = verify_generalized_reynolds(sc, 0.0)
    two = two_piece_reynolds(sc, 0.0, h=gen.fd_step)
    assert abs(gen.lhs - two.lhs) < 1e-10
    assert abs(gen.rhs["volume_jump"] - two.rhs["divergence"]) < 1e-10


def test_pillbox_volume_part_vanishes():
    sc = curved_interface_scenario(flow=moving.nonlinear_shear_flow(0.5))
    rows = pillbox_sweep(sc, 0.2, [1e-1, 1e-2, 1e-3])
    vols = [abs(r["volume"]) for r in rows]
    assert vols[0] > 5 * vols[1] > 25 * vols[2]
    assert abs(rows[0]["interface"]) > 100 * vols[2]
    assert len({r["interface"] for r in rows}) == 1


def test_volume_integral_linear_flow():
    fm = moving.linear_flow(np.diag([1.0, 2.0, 3.0]))
    assert np.isclose(volume_integral(fm, constant(1.0), unit_cube(), 0.2), np.exp(1.2))
