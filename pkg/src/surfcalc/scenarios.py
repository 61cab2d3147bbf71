"""Ready-made interface scenarios shared by the runner, the tests and the demos."""

from __future__ import annotations

import numpy as np

from . import jet
from .balance import (BalanceSpec, InterfacePoint1D, MovingCurve, State1D, SurfaceLaw,
                      VolumeLaw, curve_jump_residual_2d, interface_jump_residual,
                      point_jump_residual_1d)
from .errors import UnknownCatalogEntry
from .fields import (AmbientScalarField, AmbientVectorField, NormalExtension,
                     SurfaceScalarField, SurfaceVectorField, constant, constant_vector)
from .moving import expand_sphere, rotate_sphere, translate_plane, wave_graph


def classical_plane(psi1=1.0, psi2=3.0, v1=0.5, v2=-0.2, j1=0.0, j2=0.0, speed=None):
    """Constant states on both sides of a translating plane ``x3 = speed t``.

    Velocities and fluxes point along ``e3``, the interface normal.  Without
    a speed the classical one is used, so the jump residual vanishes.
    """
    if speed is None:
        speed = ((psi2 * v2 + j2) - (psi1 * v1 + j1)) / (psi2 - psi1)
    side1 = VolumeLaw(constant(psi1), constant_vector(0.0, 0.0, v1), constant_vector(0.0, 0.0, j1))
    side2 = VolumeLaw(constant(psi2), constant_vector(0.0, 0.0, v2), constant_vector(0.0, 0.0, j2))
    return BalanceSpec(side1, side2, SurfaceLaw(), translate_plane(speed))


def surfactant_sphere(c=0.7, R0=1.0, rate=0.5):
    """Expanding sphere carrying ``psi = c / R(t)^2``; total amount is conserved."""
    def density(u, t):
        return c / (R0 + rate * t) ** 2 + 0.0 * u[0]
    law = SurfaceLaw(NormalExtension(SurfaceScalarField(density, "surfactant")))
    return BalanceSpec(VolumeLaw(None), VolumeLaw(None), law, expand_sphere(R0, rate))


def _shared_velocity():
    return AmbientVectorField(lambda x, t: (x[1], 0.3 + 0.0 * x[0], x[0] * t), "shear_velocity")


def smooth_interface():
    """Wave-graph interface with smooth bulk and surface fields on both sides."""
    side1 = VolumeLaw(AmbientScalarField(lambda x, t: 1.0 + x[0] * x[1] + t, "psi1"),
                      _shared_velocity(),
                      AmbientVectorField(lambda x, t: (0.0 * x[0], x[2], x[0]), "j1"))
    side2 = VolumeLaw(AmbientScalarField(lambda x, t: 2.0 + jet.sin(x[2]), "psi2"),
                      _shared_velocity())
    surface = SurfaceLaw(
        AmbientScalarField(lambda x, t: x[0] * x[0] + x[2] * t + 1.0, "psi_s"),
        AmbientVectorField(lambda x, t: (x[1] * x[2], x[0], x[0] * x[1]), "j_s"),
        AmbientScalarField(lambda x, t: jet.cos(x[0]), "xi_s"))
    return BalanceSpec(side1, side2, surface, wave_graph(0.1, 2 * np.pi, 1.0))


def rotating_surface_flux():
    """Rotating sphere with a normal-extended density and a contravariant surface flux."""
    side1 = VolumeLaw(AmbientScalarField(lambda x, t: 1.0 + x[0] * x[1] + t, "psi1"),
                      _shared_velocity())
    side2 = VolumeLaw(AmbientScalarField(lambda x, t: 2.0 + jet.sin(x[2]), "psi2"),
                      _shared_velocity())
    surface = SurfaceLaw(
        NormalExtension(SurfaceScalarField(lambda u, t: u[0] * u[1] + t, "psi_s")),
        SurfaceVectorField(lambda u, t: (u[1] + 0.0 * u[0], u[0] * t), "j_s", contravariant=True))
    return BalanceSpec(side1, side2, surface, rotate_sphere(0.5))


def _planar_fields():
    side1 = VolumeLaw(AmbientScalarField(lambda x, t: 1.0 + x[0] * x[1] + t, "psi1"),
                      AmbientVectorField(lambda x, t: (x[1], 0.3 + 0.0 * x[0], 0.0 * x[0]), "v1"))
    side2 = VolumeLaw(AmbientScalarField(lambda x, t: 2.0 + jet.sin(x[1]), "psi2"),
                      AmbientVectorField(lambda x, t: (x[1], 0.3 + 0.0 * x[0], 0.0 * x[0]), "v2"),
                      AmbientVectorField(lambda x, t: (x[0] * x[0], x[1], 0.0 * x[0]), "j2"))
    surface = SurfaceLaw(
        AmbientScalarField(lambda x, t: x[0] * x[0] + x[1] * t + 1.0, "psi_c"),
        AmbientVectorField(lambda x, t: (x[1] * x[0], x[0], 0.0 * x[0]), "j_c"),
        AmbientScalarField(lambda x, t: jet.cos(x[0]), "xi_c"))
    return side1, side2, surface


def planar_curve(R0=1.0, rate=0.5, drift=0.1):
    """A deforming closed curve and its planar-symmetric balance data.

    Returns ``(spec, curve)``; ``spec.interface`` is the extrusion of the
    curve along ``x3``.
    """
    curve = MovingCurve(lambda t, s: ((R0 + rate * t) * jet.cos(s),
                                      (R0 + rate * t) * jet.sin(s) + drift * t * jet.cos(s)),
                        name="deforming_circle")
    side1, side2, surface = _planar_fields()
    return BalanceSpec(side1, side2, surface, curve.extrude()), curve


def reduction_chain(t=0.3, p0=0.2, speed=0.4, xi=0.5):
    """Residuals of one planar front evaluated as a surface, a curve and a point.

    The front ``x1 = p0 + speed t`` carries a point density ``q(t)``; the bulk
    fields depend on ``x1`` only.  Returns ``{"surface", "curve", "point"}``,
    which must coincide.
    """
    def q(tt):
        return 0.3 + 0.2 * tt * tt

    def dq(tt):
        return 0.4 * tt

    def psi1(x, tt):
        return 1.0 + 0.2 * x[0] + 0.1 * tt

    def psi2(x, tt):
        return 2.5 - 0.3 * x[0] * x[0]

    def vel1(x, tt):
        return (0.5 + 0.1 * x[0], 0.0 * x[0], 0.0 * x[0])

    def vel2(x, tt):
        return (0.2 + 0.0 * x[0], 0.0 * x[0], 0.0 * x[0])

    def flux2(x, tt):
        return (0.1 * x[0], 0.0 * x[0], 0.0 * x[0])

    side1 = VolumeLaw(AmbientScalarField(psi1, "psi1"), AmbientVectorField(vel1, "v1"))
    side2 = VolumeLaw(AmbientScalarField(psi2, "psi2"), AmbientVectorField(vel2, "v2"),
                      AmbientVectorField(flux2, "j2"))
    surface = SurfaceLaw(NormalExtension(SurfaceScalarField(lambda u, tt: q(tt) + 0.0 * u[0], "q")),
                         None, AmbientScalarField(lambda x, tt: xi + 0.0 * x[0], "xi"))
    curve = MovingCurve(lambda tt, s: (p0 + speed * tt + 0.0 * s, s), (-1.0, 1.0), "front")
    spec = BalanceSpec(side1, side2, surface, curve.extrude())
    s = np.array([-0.5, 0.0, 0.4])
    u = np.stack([s, np.zeros_like(s)], -1)
    surf = interface_jump_residual(spec, t, u, "full")
    curv = curve_jump_residual_2d(spec, curve, t, s)
    p = p0 + speed * t
    x = np.array([p, 0.0, 0.0])
    left = State1D(float(psi1(x, t)), float(vel1(x, t)[0]), 0.0)
    right = State1D(float(psi2(x, t)), float(vel2(x, t)[0]), float(flux2(x, t)[0]))
    point = point_jump_residual_1d(InterfacePoint1D(p, speed, q(t), xi, dq(t)), left, right)
    return {"surface": surf, "curve": curv, "point": np.full(s.shape, point)}


JUMP_CASES = {
    "classical": (classical_plane, {"psi1": 1.0, "psi2": 3.0, "v1": 0.5, "v2": -0.2,
                                    "j1": 0.0, "j2": 0.0}),
    "surfactant_sphere": (surfactant_sphere, {"c": 0.7, "R0": 1.0, "rate": 0.5}),
    "smooth_forms": (smooth_interface, {}),
    "rotating_flux": (rotating_surface_flux, {}),
}


def make_jump_case(name, **params):
    try:
        factory, defaults = JUMP_CASES[name]
    except KeyError:
        raise UnknownCatalogEntry(f"unknown jump case {name!r}") from None
    unknown = set(params) - set(defaults) - ({"speed"} if name == "classical" else set())
    if unknown:
        raise UnknownCatalogEntry(f"jump case {name!r} has no parameter(s) {sorted(unknown)}")
    return factory(**{**defaults, **params})


__all__ = ["classical_plane", "surfactant_sphere", "smooth_interface", "rotating_surface_flux",
           "planar_curve", "reduction_chain", "JUMP_CASES", "make_jump_case"]
