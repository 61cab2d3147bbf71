import numpy as np
import pytest
from hypothesis import given, strategies as st

from surfcalc import geometry
from surfcalc.errors import (ConsistencyError, ContractViolation, MissingExtension,
                             UnknownCatalogEntry)
from surfcalc.fields import (AmbientScalarField, AmbientVectorField, NormalExtension, NormalField,
                             SurfaceScalarField, SurfaceVectorField, constant, constant_vector,
                             coordinate, decompose, identity_vector, kelvin_stokes_divergence,
                             make_scalar_field, make_vector_field, normal_derivative, polynomial,
                             polynomial_vector, projector, surface_divergence,
                             surface_divergence_split, surface_gradient, tangential_divergence)
from surfcalc.geometry import frame_at

EQ = np.array([np.pi / 2, 0.0])


def test_decompose_examples():
    fr = frame_at(geometry.sphere(), EQ)
    par, a_nu, _ = decompose(fr.normal, fr)
    assert np.allclose(par, 0) and np.isclose(a_nu, 1)
    par, a_nu, contra = decompose(fr.tangents[0], fr)
    assert np.allclose(par, fr.tangents[0]) and np.isclose(a_nu, 0)
    assert np.allclose(contra, [1, 0])
    par, a_nu, _ = decompose(np.array([1.0, 1.0, 0.0]), fr)
    assert np.allclose(par, [0, 1, 0]) and np.isclose(a_nu, 1)


def test_projector(rng):
    fr = frame_at(geometry.plane(), [0.5, 0.5])
    n, t = projector(fr)
    assert np.allclose(n, np.diag([0, 0, 1])) and np.allclose(t, np.diag([1, 1, 0]))
    fr = frame_at(geometry.torus(), geometry.torus().random_points(rng, 10))
    _, t = projector(fr)
    a = rng.normal(size=(10, 3))
    assert np.allclose(np.einsum("nij,nj->ni", t, a), decompose(a, fr)[0])
    assert np.allclose(np.trace(t, axis1=-2, axis2=-1), 2)


def test_surface_gradient_examples():
    assert np.allclose(surface_gradient(constant(2.0), geometry.sphere(), [1.0, 1.0]), 0)
    assert np.allclose(surface_gradient(coordinate(3), geometry.plane(), [0.3, 0.3]), 0)
    assert np.allclose(surface_gradient(coordinate(1), geometry.sphere(), EQ), 0, atol=1e-15)


@pytest.mark.parametrize("name", ["sphere", "torus", "graph", "ellipsoid"])
def test_gradient_forms_agree(name, rng):
    ch = geometry.make_chart(name)
    u = ch.random_points(rng, 20)
    proj = surface_gradient(polynomial(), ch, u)
    param = surface_gradient(polynomial(), ch, u, form="parametric")
    assert np.allclose(proj, param, atol=1e-12)


def test_surface_divergence_examples():
    assert np.allclose(surface_divergence(constant_vector(1, 2, 3), geometry.plane(), [0.2, 0.2]), 0)
    # a constant field has zero surface divergence; its tangential part does not
    e3, u = constant_vector(0, 0, 1), [1.0, 0.3]
    assert np.isclose(surface_divergence(e3, geometry.sphere(), u), 0)
    fr = frame_at(geometry.sphere(), u)
    assert np.isclose(tangential_divergence(e3, geometry.sphere(), u),
                      2 * fr.mean_curvature * fr.normal[2])
    assert not np.isclose(tangential_divergence(e3, geometry.sphere(), u), 0)
    assert np.isclose(surface_divergence(NormalField(), geometry.sphere(), [1.0, 0.3]), 2)
    assert np.isclose(surface_divergence(identity_vector(), geometry.sphere(), [1.0, 0.3]), 2)


def test_split_examples():
    tan, curv = surface_divergence_split(NormalField(), geometry.sphere(), [1.0, 0.3])
    assert np.isclose(tan, 0, atol=1e-13) and np.isclose(curv, 2)
    tangential = AmbientVectorField(lambda x, t: (-x[1], x[0], 0.0 * x[0]), "swirl")
    _, curv = surface_divergence_split(tangential, geometry.sphere(), [1.0, 0.3])
    assert np.isclose(curv, 0, atol=1e-14)


def test_split_reassembles_on_torus(rng):
    tor = geometry.torus()
    u = tor.random_points(rng, 50)
    tan, curv = surface_divergence_split(polynomial_vector(), tor, u)
    assert np.allclose(tan + curv, surface_divergence(polynomial_vector(), tor, u), atol=1e-10)
    assert np.allclose(tan, kelvin_stokes_divergence(polynomial_vector(), tor, u), atol=1e-10)


@pytest.mark.parametrize("name", sorted(geometry.CHARTS))
def test_divergence_forms_agree(name, rng):
    ch = geometry.make_chart(name)
    u = ch.random_points(rng, 30)
    a = polynomial_vector()
    proj = surface_divergence(a, ch, u)
    assert np.allclose(proj, surface_divergence(a, ch, u, form="parametric"), atol=1e-11)
    assert np.allclose(tangential_divergence(a, ch, u),
                       kelvin_stokes_divergence(a, ch, u), atol=1e-10)


def test_intrinsic_divergence_of_contravariant_field(rng):
    sph = geometry.sphere()
    a = SurfaceVectorField(lambda u, t: (u[0] * u[1], u[1] + 0 * u[0]), "a", contravariant=True)
    u = sph.random_points(rng, 20)
    assert np.allclose(surface_divergence(a, sph, u, form="intrinsic"),
                       surface_divergence(a, sph, u), atol=1e-11)
    with pytest.raises(ContractViolation):
        surface_divergence(polynomial_vector(), sph, u, form="intrinsic")


def test_surface_field_rules():
    dens = SurfaceScalarField(lambda u, t: u[0] * u[1], "q")
    with pytest.raises(ContractViolation):
        surface_gradient(dens, geometry.sphere(), [1.0, 1.0], form="projection")
    with pytest.raises(MissingExtension):
        normal_derivative(dens, geometry.sphere(), [1.0, 1.0])
    assert normal_derivative(NormalExtension(dens), geometry.sphere(), [1.0, 1.0]) == 0
    with pytest.raises(ContractViolation):
        surface_divergence(dens, geometry.sphere(), [1.0, 1.0])
    assert np.isclose(normal_derivative(coordinate(3), geometry.plane(), [0.2, 0.2]), 1)


def test_split_check_detects_mismatch(monkeypatch):
    import surfcalc.fields as f
    monkeypatch.setattr(f, "surface_divergence", lambda *a, **k: 99.0)
    with pytest.raises(ConsistencyError):
        f.surface_divergence_split(polynomial_vector(), geometry.sphere(), [1.0, 1.0])


def test_ambient_field_derivatives():
    f = AmbientScalarField(lambda x, t: x[0] * x[1] + t * x[2], "f")
    val, grad, dt = f.evaluate(np.array([1.0, 2.0, 3.0]), 0.5)
    assert np.isclose(val, 3.5) and np.allclose(grad, [2, 1, 0.5]) and np.isclose(dt, 3)
    v = AmbientVectorField(lambda x, t: (x[0] * x[1], x[2], t * x[0]), "v")
    _, jac, dt = v.evaluate(np.array([1.0, 2.0, 3.0]), 2.0)
    assert np.allclose(jac, [[2, 1, 0], [0, 0, 1], [2, 0, 0]]) and np.allclose(dt, [0, 0, 1])
    assert np.isclose(v.divergence(np.array([1.0, 2.0, 3.0])), 2)


def test_catalog():
    assert np.isclose(make_scalar_field("expr", expr="x1*x2 + t").value([2.0, 3.0, 0.0], 1.0), 7)
    assert np.allclose(make_vector_field("vector_expr", e1="x2", e3="2").value([1.0, 5.0, 0.0]),
                       [5, 0, 2])
    assert make_scalar_field("coordinate", i=2.0).name == "x2"
    with pytest.raises(UnknownCatalogEntry):
        make_scalar_field("nope")
    with pytest.raises(UnknownCatalogEntry):
        make_vector_field("swirl", speed=1)
    with pytest.raises(ContractViolation):
        coordinate(4)


@given(st.floats(0.2, 2.9), st.floats(0.1, 6.2))
def test_divergence_of_normal_is_minus_twice_mean_curvature(th, ph):
    for ch in (geometry.ellipsoid(), geometry.torus()):
        fr = frame_at(ch, [th, ph])
        assert np.isclose(surface_divergence(NormalField(), ch, [th, ph]),
                          -2 * fr.mean_curvature, atol=1e-10)
