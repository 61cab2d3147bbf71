"""Scalar and vector fields and the surface differential operators.

Two kinds of field exist:

* ambient fields ``f(x, t)`` defined on an open set of R^3 (``x`` is a
  3-tuple), differentiated in ``x`` and ``t`` with jets;
* surface fields ``f(u, t)`` defined only on parameter points (``u`` is a
  2-tuple), differentiated in ``u`` and ``t``.

Every field exposes ``restrict(chart, u, t)`` returning its values on the
surface together with parameter derivatives, and
``restrict_moving(mc, u, t)`` which additionally returns the derivative in
``t`` at fixed ``u``.  The operators below are written against that protocol.
A surface field used where its off-surface behaviour matters must be wrapped
in :class:`NormalExtension`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jet
from .errors import ConsistencyError, ContractViolation, MissingExtension, UnknownCatalogEntry
from .expression import compile_expression
from .geometry import as_points, frame_at, map_derivatives
from .jet import Jet2

SPLIT_ATOL = 1e-10
KELVIN_STOKES_ATOL = 1e-8


def _scale(*arrays):
    s = 1.0
    for a in arrays:
        s = np.maximum(s, np.abs(a))
    return s


def _tau_jets(d1, d2):
    """Tangent vectors as first-order jets from a map's Jacobian and Hessian."""
    return [tuple(Jet2.first_order(d1[..., i, a], d2[..., i, a, :]) for i in range(3))
            for a in range(2)]


def _unit_normal_jet(d1, d2):
    taus = _tau_jets(d1, d2)
    cr = jet.cross(taus[0], taus[1])
    nrm = jet.norm(cr)
    return [c / nrm for c in cr]


# -- ambient fields -----------------------------------------------------------

@dataclass(frozen=True)
class AmbientScalarField:
    fn: Callable
    name: str = "scalar"
    kind = "ambient"
    rank = 0

    def evaluate(self, x, t=0.0):
        """Value, spatial gradient ``(..., 3)`` and time derivative at points ``x``."""
        x = np.asarray(x, dtype=float)
        val, d, _ = map_derivatives(lambda a, b, c, tt: self.fn((a, b, c), tt),
                                    x[..., 0], x[..., 1], x[..., 2], t)
        return val[..., 0], d[..., 0, :3], d[..., 0, 3]

    def value(self, x, t=0.0):
        return self.evaluate(x, t)[0]

    def gradient(self, x, t=0.0):
        return self.evaluate(x, t)[1]

    def time_derivative(self, x, t=0.0):
        return self.evaluate(x, t)[2]

    def restrict(self, chart, u, t=0.0):
        u = as_points(u)
        val, d, _ = map_derivatives(lambda u1, u2: self.fn(chart.func(u1, u2), t),
                                    u[..., 0], u[..., 1])
        return val[..., 0], d[..., 0, :]

    def restrict_moving(self, mc, u, t):
        u = as_points(u)
        val, d, _ = map_derivatives(lambda u1, u2, tt: self.fn(mc.func(tt, u1, u2), tt),
                                    u[..., 0], u[..., 1], t)
        return val[..., 0], d[..., 0, :2], d[..., 0, 2]


@dataclass(frozen=True)
class AmbientVectorField:
    fn: Callable
    name: str = "vector"
    kind = "ambient"
    rank = 1

    def evaluate(self, x, t=0.0):
        """Value ``(..., 3)``, Jacobian ``J[i, j] = da_i/dx_j`` and time derivative."""
        x = np.asarray(x, dtype=float)
        val, d, _ = map_derivatives(lambda a, b, c, tt: self.fn((a, b, c), tt),
                                    x[..., 0], x[..., 1], x[..., 2], t)
        return val, d[..., :3], d[..., 3]

    def value(self, x, t=0.0):
        return self.evaluate(x, t)[0]

    def jacobian(self, x, t=0.0):
        return self.evaluate(x, t)[1]

    def divergence(self, x, t=0.0):
        return np.trace(self.jacobian(x, t), axis1=-2, axis2=-1)

    def restrict(self, chart, u, t=0.0):
        u = as_points(u)
        val, d, _ = map_derivatives(lambda u1, u2: self.fn(chart.func(u1, u2), t),
                                    u[..., 0], u[..., 1])
        return val, d

    def restrict_moving(self, mc, u, t):
        u = as_points(u)
        val, d, _ = map_derivatives(lambda u1, u2, tt: self.fn(mc.func(tt, u1, u2), tt),
                                    u[..., 0], u[..., 1], t)
        return val, d[..., :2], d[..., 2]


# -- surface fields -----------------------------------------------------------

@dataclass(frozen=True)
class SurfaceScalarField:
    """Density known only on the surface, as a function of ``(u, t)``."""

    fn: Callable
    name: str = "surface_scalar"
    kind = "surface"
    rank = 0

    def restrict(self, chart, u, t=0.0):
        u = as_points(u)
        val, d, _ = map_derivatives(lambda u1, u2: self.fn((u1, u2), t), u[..., 0], u[..., 1])
        return val[..., 0], d[..., 0, :]

    def restrict_moving(self, mc, u, t):
        u = as_points(u)
        val, d, _ = map_derivatives(lambda u1, u2, tt: self.fn((u1, u2), tt),
                                    u[..., 0], u[..., 1], t)
        return val[..., 0], d[..., 0, :2], d[..., 0, 2]


@dataclass(frozen=True)
class SurfaceVectorField:
    """Vector field known only on the surface.

    With ``contravariant=False`` (default) ``fn`` returns Cartesian components;
    otherwise it returns the two surface components ``a^alpha`` and the
    field is ``a^alpha tau_alpha``.
    """

    fn: Callable
    name: str = "surface_vector"
    contravariant: bool = False
    kind = "surface"
    rank = 1

    def components(self, u, t=0.0):
        """Contravariant components and their parameter derivatives ``[alpha, gamma]``."""
        if not self.contravariant:
            raise ContractViolation("field has Cartesian components")
        u = as_points(u)
        val, d, _ = map_derivatives(lambda u1, u2: self.fn((u1, u2), t), u[..., 0], u[..., 1])
        return val, d

    def _contravariant_to_cartesian(self, val, dval, d1, d2, nvar):
        # a = a^alpha tau_alpha, tau_alpha = d1[..., :, alpha]
        a = np.einsum("...a,...ia->...i", val, d1[..., :2])
        da = (np.einsum("...ag,...ia->...ig", dval, d1[..., :2])
              + np.einsum("...a,...iag->...ig", val, d2[..., :2, :nvar]))
        return a, da

    def restrict(self, chart, u, t=0.0):
        u = as_points(u)
        if not self.contravariant:
            val, d, _ = map_derivatives(lambda u1, u2: self.fn((u1, u2), t), u[..., 0], u[..., 1])
            return val, d
        val, dval = self.components(u, t)
        _, d1, d2 = chart.derivatives(u)
        return self._contravariant_to_cartesian(val, dval, d1, d2, 2)

    def restrict_moving(self, mc, u, t):
        u = as_points(u)
        val, d, _ = map_derivatives(lambda u1, u2, tt: self.fn((u1, u2), tt),
                                    u[..., 0], u[..., 1], t)
        if not self.contravariant:
            return val, d[..., :2], d[..., 2]
        _, d1, d2 = mc.derivatives(u, t)
        a, da = self._contravariant_to_cartesian(val, d, d1, d2, 3)
        return a, da[..., :2], da[..., 2]


@dataclass(frozen=True)
class NormalField:
    """The unit normal of whichever chart the field is restricted to."""

    name: str = "normal"
    kind = "surface"
    rank = 1

    def restrict(self, chart, u, t=0.0):
        _, d1, d2 = chart.derivatives(as_points(u))
        nu = _unit_normal_jet(d1, d2)
        return np.stack([c.val for c in nu], -1), np.stack([c.grad for c in nu], -2)

    def restrict_moving(self, mc, u, t):
        _, d1, d2 = mc.derivatives(as_points(u), t)
        nu = _unit_normal_jet(d1[..., :2], d2[..., :2, :])
        grad = np.stack([c.grad for c in nu], -2)
        return np.stack([c.val for c in nu], -1), grad[..., :2], grad[..., 2]


@dataclass(frozen=True)
class NormalExtension:
    """Extension of a surface density that is constant along surface normals.

    Its normal derivative vanishes by construction and its ambient gradient
    equals the surface gradient.
    """

    inner: object
    kind = "extension"

    @property
    def rank(self):
        return self.inner.rank

    @property
    def name(self):
        return f"{self.inner.name}_ext"

    def restrict(self, chart, u, t=0.0):
        return self.inner.restrict(chart, u, t)

    def restrict_moving(self, mc, u, t):
        return self.inner.restrict_moving(mc, u, t)


# -- algebra on fields ----------------------------------------------------------

def scaled(field_, c):
    return AmbientScalarField(lambda x, t: c * field_.fn(x, t), f"{c}*{field_.name}")


# -- parametric building blocks -------------------------------------------------

def parametric_gradient(du, frame):
    """``g^{ab} d psi/du_a tau_b`` from parameter derivatives ``(..., 2)``."""
    return np.einsum("...a,...ai->...i", du, frame.dual_tangents())


def parametric_divergence(du, frame):
    """``g^{ab} d a_i/du_a tau_{b;i}`` from parameter derivatives ``(..., 3, 2)``."""
    return np.einsum("...ia,...ai->...", du, frame.dual_tangents())


def tangential_part_derivatives(a, da, frame):
    """Parameter derivatives of ``a - (a.nu) nu`` given those of ``a``."""
    nu = frame.normal
    dnu = np.swapaxes(frame.normal_derivatives(), -1, -2)  # (..., 3, 2)
    a_nu = np.einsum("...i,...i->...", a, nu)
    da_nu = np.einsum("...ia,...i->...a", da, nu) + np.einsum("...i,...ia->...a", a, dnu)
    return da - nu[..., :, None] * da_nu[..., None, :] - a_nu[..., None, None] * dnu


def extension_jacobian(du, frame):
    """Spatial Jacobian of the normal-constant extension of a surface quantity.

    ``du`` holds parameter derivatives ``(..., m, 2)``; the result is
    ``[du_1, du_2, 0] [tau_1 tau_2 nu]^{-1}`` with shape ``(..., m, 3)``.
    """
    m = np.concatenate([du, np.zeros(du.shape[:-1] + (1,))], -1)
    return np.einsum("...ik,...kj->...ij", m, np.linalg.inv(frame.frame_matrix()))


# -- operators ------------------------------------------------------------------

def decompose(a, frame):
    """Split ``a`` into tangential part, normal component and contravariant components."""
    a = np.asarray(a, dtype=float)
    a_nu = np.einsum("...i,...i->...", a, frame.normal)
    a_par = a - a_nu[..., None] * frame.normal
    contra = np.einsum("...ab,...bi,...i->...a", frame.metric_inv, frame.tangents, a)
    return a_par, a_nu, contra


def projector(frame):
    nu = frame.normal
    n = nu[..., :, None] * nu[..., None, :]
    return n, np.eye(3) - n


def _need_rank(f, rank):
    if getattr(f, "rank", None) != rank:
        raise ContractViolation(f"field {getattr(f, 'name', f)!r} has the wrong rank")


def surface_gradient(psi, chart, u, t=0.0, form=None):
    """Surface gradient ``(..., 3)``.

    ``form`` is ``"projection"`` (ambient fields only; the default for them)
    or ``"parametric"`` (the default for surface fields).
    """
    _need_rank(psi, 0)
    u = as_points(u)
    fr = frame_at(chart, u)
    form = form or ("projection" if psi.kind == "ambient" else "parametric")
    if form == "projection":
        if psi.kind == "surface":
            raise ContractViolation("projection form needs an ambient field or a normal extension")
        if psi.kind == "ambient":
            grad = psi.gradient(fr.point, t)
            return grad - np.einsum("...i,...i->...", grad, fr.normal)[..., None] * fr.normal
        # extension: ambient gradient is already tangential
        _, du = psi.restrict(chart, u, t)
        grad = parametric_gradient(du, fr)
        return grad - np.einsum("...i,...i->...", grad, fr.normal)[..., None] * fr.normal
    if form != "parametric":
        raise ContractViolation(f"unknown form {form!r}")
    _, du = psi.restrict(chart, u, t)
    return parametric_gradient(du, fr)


def normal_derivative(psi, chart, u, t=0.0):
    """``psi_nu = grad psi . nu``; zero for normal extensions."""
    _need_rank(psi, 0)
    if psi.kind == "extension":
        return np.zeros(as_points(u).shape[:-1])
    if psi.kind != "ambient":
        raise MissingExtension(f"field {psi.name!r} has no declared normal derivative")
    fr = frame_at(chart, u)
    return np.einsum("...i,...i->...", psi.gradient(fr.point, t), fr.normal)


def surface_divergence(a, chart, u, t=0.0, form=None):
    """Surface divergence.

    Forms: ``"projection"`` (ambient only), ``"parametric"`` and, for
    contravariant surface fields, ``"intrinsic"`` (``d_a a^a + Gamma^a_{da} a^d``).
    """
    _need_rank(a, 1)
    u = as_points(u)
    fr = frame_at(chart, u)
    if form is None:
        form = "projection" if a.kind == "ambient" else "parametric"
    if form == "projection":
        if a.kind != "ambient":
            raise ContractViolation("projection form needs an ambient field")
        jac = a.jacobian(fr.point, t)
        nu = fr.normal
        return np.trace(jac, axis1=-2, axis2=-1) - np.einsum("...i,...ij,...j->...", nu, jac, nu)
    if form == "parametric":
        _, du = a.restrict(chart, u, t)
        return parametric_divergence(du, fr)
    if form == "intrinsic":
        if not getattr(a, "contravariant", False):
            raise ContractViolation("intrinsic form needs contravariant surface components")
        val, d = a.components(u, t)
        return (np.einsum("...aa->...", d)
                + np.einsum("...aga,...g->...", fr.christoffel, val))
    raise ContractViolation(f"unknown form {form!r}")


def tangential_divergence(a, chart, u, t=0.0):
    """``div_S a_par`` by differentiating the tangential part parametrically."""
    _need_rank(a, 1)
    u = as_points(u)
    fr = frame_at(chart, u)
    val, du = a.restrict(chart, u, t)
    return parametric_divergence(tangential_part_derivatives(val, du, fr), fr)


def kelvin_stokes_divergence(a, chart, u, t=0.0):
    """``(curl(nu x a)) . nu`` with nu extended constantly along normals.

    Ambient fields use their own Jacobian; surface fields are extended
    constantly along normals as well.
    """
    _need_rank(a, 1)
    u = as_points(u)
    fr = frame_at(chart, u)
    nu = fr.normal
    dnu = extension_jacobian(np.swapaxes(fr.normal_derivatives(), -1, -2), fr)
    if a.kind == "ambient":
        val, jac, _ = a.evaluate(fr.point, t)
    else:
        val, du = a.restrict(chart, u, t)
        jac = extension_jacobian(du, fr)
    # c = nu x a, Dc[i, j] = eps_ikl (Dnu[k, j] a_l + nu_k Da[l, j])
    dc = (np.cross(np.swapaxes(dnu, -1, -2), val[..., None, :])
          + np.cross(nu[..., None, :], np.swapaxes(jac, -1, -2)))  # (..., j, i)
    dc = np.swapaxes(dc, -1, -2)
    curl = np.stack([dc[..., 2, 1] - dc[..., 1, 2],
                     dc[..., 0, 2] - dc[..., 2, 0],
                     dc[..., 1, 0] - dc[..., 0, 1]], -1)
    return np.einsum("...i,...i->...", curl, nu)


def surface_divergence_split(a, chart, u, t=0.0, check=True):
    """``(div_S a_par, -2 kappa_M a_nu)``; their sum is ``div_S a``.

    With ``check`` the sum is compared with :func:`surface_divergence` and the
    tangential part with :func:`kelvin_stokes_divergence`.
    """
    u = as_points(u)
    fr = frame_at(chart, u)
    val, _ = a.restrict(chart, u, t)
    a_nu = np.einsum("...i,...i->...", val, fr.normal)
    div_tan = tangential_divergence(a, chart, u, t)
    curv = -2.0 * fr.mean_curvature * a_nu
    if check:
        total = surface_divergence(a, chart, u, t)
        err = np.abs(div_tan + curv - total) / _scale(div_tan, curv, total)
        if np.any(err > SPLIT_ATOL):
            raise ConsistencyError(f"split divergence does not reassemble: {np.max(err):.3e}")
        ks = kelvin_stokes_divergence(a, chart, u, t)
        err = np.abs(ks - div_tan) / _scale(ks, div_tan)
        if np.any(err > KELVIN_STOKES_ATOL):
            raise ConsistencyError(f"Kelvin-Stokes form disagrees: {np.max(err):.3e}")
    return div_tan, curv


# -- catalog ----------------------------------------------------------------------

def constant(c=1.0):
    return AmbientScalarField(lambda x, t: c + 0.0 * x[0], f"constant({c})")


def coordinate(i=1):
    if i not in (1, 2, 3):
        raise ContractViolation("coordinate index must be 1, 2 or 3")
    return AmbientScalarField(lambda x, t: x[i - 1], f"x{i}")


def radius():
    return AmbientScalarField(lambda x, t: jet.norm(x), "radius")


def polynomial(a=1.0, b=0.5, c=-0.3, d=0.2):
    """``a x1 x2 + b x3^2 + c x1 + d x2 x3 + 1``."""
    return AmbientScalarField(
        lambda x, t: a * x[0] * x[1] + b * x[2] * x[2] + c * x[0] + d * x[1] * x[2] + 1.0,
        "polynomial")


def trigonometric(k=1.0, omega=0.0):
    """``sin(k x1 - omega t) cos(k x2) + x3``."""
    return AmbientScalarField(
        lambda x, t: jet.sin(k * x[0] - omega * t) * jet.cos(k * x[1]) + x[2], "trigonometric")


def time_field():
    return AmbientScalarField(lambda x, t: t + 0.0 * x[0], "time")


def expression(expr="x1"):
    f = compile_expression(expr, ("x1", "x2", "x3", "t"))
    return AmbientScalarField(lambda x, t: f(x[0], x[1], x[2], t) + 0.0 * x[0], f"expr({expr})")


def constant_vector(c1=0.0, c2=0.0, c3=1.0):
    return AmbientVectorField(lambda x, t: (c1 + 0.0 * x[0], c2 + 0.0 * x[0], c3 + 0.0 * x[0]),
                              "constant_vector")


def identity_vector():
    return AmbientVectorField(lambda x, t: (x[0], x[1], x[2]), "identity")


def planar_radial():
    return AmbientVectorField(lambda x, t: (x[0], x[1], 0.0 * x[2]), "planar_radial")


def radial_unit():
    """``(x1, x2, 0) / |(x1, x2)|``."""
    def fn(x, t):
        r = jet.sqrt(x[0] * x[0] + x[1] * x[1])
        return (x[0] / r, x[1] / r, 0.0 * x[2])
    return AmbientVectorField(fn, "radial_unit")


def swirl_vector():
    return AmbientVectorField(lambda x, t: (-x[1], x[0], 0.0 * x[2]), "swirl")


def polynomial_vector():
    return AmbientVectorField(
        lambda x, t: (x[0] * x[1] + x[2], x[1] * x[1] - x[0] * x[2], x[0] + x[1] * x[2] * x[2]),
        "polynomial_vector")


def vector_expression(e1="0", e2="0", e3="0"):
    fs = [compile_expression(e, ("x1", "x2", "x3", "t")) for e in (e1, e2, e3)]
    return AmbientVectorField(lambda x, t: tuple(f(x[0], x[1], x[2], t) + 0.0 * x[0] for f in fs),
                              f"vector_expr({e1},{e2},{e3})")


def normal_field():
    return NormalField()


SCALAR_FIELDS = {
    "constant": (constant, {"c": 1.0}),
    "coordinate": (coordinate, {"i": 1}),
    "radius": (radius, {}),
    "polynomial": (polynomial, {"a": 1.0, "b": 0.5, "c": -0.3, "d": 0.2}),
    "trigonometric": (trigonometric, {"k": 1.0, "omega": 0.0}),
    "time": (time_field, {}),
    "expr": (expression, {"expr": "x1"}),
}

VECTOR_FIELDS = {
    "constant_vector": (constant_vector, {"c1": 0.0, "c2": 0.0, "c3": 1.0}),
    "identity": (identity_vector, {}),
    "planar_radial": (planar_radial, {}),
    "radial_unit": (radial_unit, {}),
    "swirl": (swirl_vector, {}),
    "polynomial_vector": (polynomial_vector, {}),
    "normal": (normal_field, {}),
    "vector_expr": (vector_expression, {"e1": "0", "e2": "0", "e3": "0"}),
}


def _make(table, kind, name, params):
    try:
        factory, defaults = table[name]
    except KeyError:
        raise UnknownCatalogEntry(f"unknown {kind} field {name!r}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise UnknownCatalogEntry(f"{kind} field {name!r} has no parameter(s) {sorted(unknown)}")
    merged = {**defaults, **params}
    if name == "coordinate":
        merged["i"] = int(merged["i"])
    return factory(**merged)


def make_scalar_field(name, **params):
    return _make(SCALAR_FIELDS, "scalar", name, params)


def make_vector_field(name, **params):
    return _make(VECTOR_FIELDS, "vector", name, params)
