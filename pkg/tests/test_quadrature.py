import numpy as np
import pytest

from surfcalc import geometry, jet
from surfcalc.errors import ContractViolation, InterfaceEscapesVolume, InvertedBounds
from surfcalc.fields import constant_vector, planar_radial, radial_unit, surface_divergence
from surfcalc.quadrature import (QuadratureRule, integrate_boundary, integrate_graph_volume,
                                 integrate_interval, integrate_rectangle, integrate_split_volume,
                                 integrate_surface)

UNIT = ((0.0, 1.0), (0.0, 1.0))


def test_rule_validation():
    with pytest.raises(ContractViolation):
        QuadratureRule(1)
    with pytest.raises(ContractViolation):
        QuadratureRule(2.5)


def test_interval_is_exact_for_polynomials():
    rule = QuadratureRule(4)
    assert np.isclose(integrate_interval(lambda x: x ** 7, 0, 2, rule), 2 ** 8 / 8)
    assert np.isclose(integrate_rectangle(lambda a, b: a * b * b, ((0, 1), (0, 3)), rule), 4.5)


def test_surface_areas():
    assert abs(integrate_surface(geometry.sphere(), 1.0, 32) - 4 * np.pi) < 1e-8
    assert np.isclose(integrate_surface(geometry.plane(), 1.0), 1.0)
    assert abs(integrate_surface(geometry.torus(2.0, 0.5), 1.0, 32) - 4 * np.pi ** 2) < 1e-8
    assert abs(integrate_surface(geometry.spherical_cap(), 1.0, 16) - np.pi) < 1e-12


def test_surface_integral_of_field_and_callable():
    sph = geometry.sphere()
    z2 = integrate_surface(sph, lambda fr: fr.point[..., 2] ** 2, 32)
    assert abs(z2 - 4 * np.pi / 3) < 1e-8


def test_boundary_integrals():
    disc = geometry.disc(2.0)
    info = {}
    flux = integrate_boundary(disc, radial_unit(), 16, info=info)
    assert np.isclose(flux, 2 * np.pi * 2.0)
    assert info["collapsed"] == ["u1=lo"]
    assert integrate_boundary(disc, constant_vector(0, 0, 0)) == 0
    cap = geometry.spherical_cap()
    lhs = integrate_boundary(cap, constant_vector(0, 0, 1), 32)
    rhs = integrate_surface(
        cap, lambda fr: surface_divergence(constant_vector(0, 0, 1), cap, fr.u)
        + 2 * fr.mean_curvature * fr.normal[..., 2], 32)
    assert abs(lhs - rhs) < 1e-7


def test_boundary_orientation_follows_chart_normal():
    # swapping the parameters reverses the normal, and the conormal with it
    flipped = geometry.Chart("disc_swapped", lambda ph, r: (r * jet.cos(ph), r * jet.sin(ph), 0.0),
                             ((0.0, 2 * np.pi), (0.0, 1.0)))
    info = {}
    flux = integrate_boundary(flipped, planar_radial(), 16, info=info)
    assert np.isclose(flux, 2 * np.pi)
    assert info["flipped"] == []


def test_graph_volumes():
    one = lambda y1, y2: 1.0 + 0 * y1
    zero = lambda y1, y2: 0.0 * y1
    assert np.isclose(integrate_graph_volume(UNIT, zero, one, lambda a, b, c: 1.0 + 0 * a), 1)
    assert np.isclose(integrate_graph_volume(UNIT, zero, lambda a, b: 1 + a,
                                             lambda a, b, c: 1.0 + 0 * a), 1.5)
    assert np.isclose(integrate_graph_volume(UNIT, zero, one, lambda a, b, c: c), 0.5)
    with pytest.raises(InvertedBounds):
        integrate_graph_volume(UNIT, one, zero, lambda a, b, c: c)


def test_split_volume():
    zero = lambda y1, y2: 0.0 * y1
    one = lambda y1, y2: 1.0 + 0 * y1
    half = lambda y1, y2: 0.5 + 0.1 * np.sin(2 * np.pi * y1)
    lo, hi = integrate_split_volume(UNIT, zero, half, one, lambda a, b, c: 1.0 + 0 * a,
                                    lambda a, b, c: 3.0 + 0 * a)
    assert np.isclose(lo, 0.5) and np.isclose(hi, 1.5)
    with pytest.raises(InterfaceEscapesVolume):
        integrate_split_volume(UNIT, zero, lambda a, b: 2 + 0 * a, one,
                               lambda a, b, c: c, lambda a, b, c: c)


def test_spectral_convergence_on_cap():
    cap = geometry.spherical_cap()
    errs = [abs(integrate_surface(cap, 1.0, n) - np.pi) for n in (2, 4, 8)]
    assert errs[0] > errs[1] * 16 and errs[1] > errs[2] * 16
