"""Moving surfaces, flow maps and intrinsic time derivatives.

A :class:`MovingChart` is a chart with an extra leading time argument,
``func(t, u1, u2)``.  It is differentiated with jets over ``(u1, u2, t)``, so
the surface velocity ``w = dPhi/dt`` and its parameter derivatives are exact.

A :class:`FlowMap` moves material points ``x = chi(t, y)``; it carries its
Eulerian velocity ``v(t, x)`` explicitly so transport checks can compare the
two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from . import jet
from .errors import (ConsistencyError, ContractViolation, MissingExtension, SingularMatrix,
                     UnknownCatalogEntry, VanishingGradient)
from .fields import parametric_divergence, parametric_gradient, tangential_part_derivatives
from .geometry import Chart, SurfaceFrame, as_points, map_derivatives, sphere
from .jet import Jet2
from .tensor import check_invertible, inverse3, matvec

METRIC_RATE_RTOL = 1e-6
LAGRANGIAN_RTOL = 1e-8


def fd_step(T=1.0):
    """Default central-difference step ``1e-4 * max(1, T)``."""
    return 1e-4 * max(1.0, float(T))


# -- moving charts --------------------------------------------------------------

@dataclass(frozen=True)
class MovingChart:
    name: str
    func: Callable
    domain: tuple
    params: dict = field(default_factory=dict)
    T: float = 1.0

    def at(self, t):
        t = float(t)
        return Chart(f"{self.name}@{t:g}", lambda u1, u2: self.func(t, u1, u2), self.domain,
                     dict(self.params))

    def __call__(self, u, t):
        return self.at(t)(u)

    def derivatives(self, u, t):
        """``Phi``, its derivatives in ``(u1, u2, t)`` and the second derivatives."""
        u = as_points(u)
        return map_derivatives(lambda u1, u2, tt: self.func(tt, u1, u2), u[..., 0], u[..., 1], t)

    def frame(self, u, t):
        self.at(t).check_domain(u)
        x, d1, d2 = self.derivatives(u, t)
        return SurfaceFrame.from_derivatives(as_points(u), x, d1[..., :2], d2[..., :2, :2])

    def random_points(self, rng, n, margin=0.05):
        return self.at(0.0).random_points(rng, n, margin)


@dataclass(frozen=True)
class MovingState:
    """Frame plus surface velocity data at a batch of points of a moving chart."""

    frame: SurfaceFrame
    w: np.ndarray
    w_nu: np.ndarray
    w_par: np.ndarray
    dw: np.ndarray  # (..., 3, 2): dw/du_alpha

    @property
    def div_w(self):
        return parametric_divergence(self.dw, self.frame)

    @property
    def div_w_par(self):
        return parametric_divergence(tangential_part_derivatives(self.w, self.dw, self.frame),
                                     self.frame)

    @property
    def w_contravariant(self):
        return np.einsum("...ab,...bi,...i->...a", self.frame.metric_inv,
                         self.frame.tangents, self.w)


def moving_state(mc, t, u):
    u = as_points(u)
    mc.at(t).check_domain(u)
    x, d1, d2 = mc.derivatives(u, t)
    fr = SurfaceFrame.from_derivatives(u, x, d1[..., :2], d2[..., :2, :2])
    w = d1[..., 2]
    w_nu = np.einsum("...i,...i->...", w, fr.normal)
    return MovingState(fr, w, w_nu, w - w_nu[..., None] * fr.normal, d2[..., :, 2, :2])


def surface_velocity(mc, t, u):
    """``(w, w_nu, w_par)`` at parameter points ``u``."""
    st = moving_state(mc, t, u)
    return st.w, st.w_nu, st.w_par


def metric_rate(mc, t, u, h=None, check=True):
    """``d sqrt(g)/dt = (div_S w) sqrt(g)``, checked against a central difference."""
    st = moving_state(mc, t, u)
    rate = st.div_w * st.frame.sqrt_g
    if check:
        h = fd_step(mc.T) if h is None else h
        fd = (mc.frame(u, t + h).sqrt_g - mc.frame(u, t - h).sqrt_g) / (2 * h)
        scale = np.maximum(np.maximum(np.abs(rate), np.abs(fd)), st.frame.sqrt_g)
        err = np.abs(rate - fd) / scale
        if np.any(err > METRIC_RATE_RTOL):
            raise ConsistencyError(f"metric rate disagrees with finite difference: {np.max(err):.3e}")
    return rate


def thomas_derivative(psi, mc, t, u):
    """``d psi/dt + psi_nu w_nu`` for an ambient field.

    For a :class:`~surfcalc.fields.NormalExtension` the normal derivative
    vanishes and the partial time derivative at fixed ``x`` is recovered as
    ``psi_ring - w_par . grad_S psi``.
    """
    st = moving_state(mc, t, u)
    if psi.kind == "ambient":
        _, grad, dt = psi.evaluate(st.frame.point, t)
        return dt + np.einsum("...i,...i->...", grad, st.frame.normal) * st.w_nu
    if psi.kind == "extension":
        _, du, ring = psi.restrict_moving(mc, u, t)
        return ring - np.einsum("...i,...i->...", st.w_par, parametric_gradient(du, st.frame))
    raise MissingExtension(f"Thomas derivative of {psi.name!r} needs an extension off the surface")


def lagrangian_derivative_forms(psi, mc, t, u):
    """The two evaluations of the Lagrangian derivative.

    ``parametric``: d/dt of ``psi(t, Phi(t, u))`` at fixed ``u``;
    ``decomposed``: Thomas derivative plus ``w_par . grad_S psi`` (ambient
    fields only, ``None`` otherwise).
    """
    u = as_points(u)
    _, _, ring = psi.restrict_moving(mc, u, t)
    decomposed = None
    if psi.kind == "ambient":
        st = moving_state(mc, t, u)
        _, grad, _ = psi.evaluate(st.frame.point, t)
        nu = st.frame.normal
        grad_s = grad - np.einsum("...i,...i->...", grad, nu)[..., None] * nu
        decomposed = thomas_derivative(psi, mc, t, u) + np.einsum("...i,...i->...", st.w_par, grad_s)
    return ring, decomposed


def lagrangian_derivative(psi, mc, t, u, check=True):
    ring, decomposed = lagrangian_derivative_forms(psi, mc, t, u)
    if check and decomposed is not None:
        scale = np.maximum(1.0, np.maximum(np.abs(ring), np.abs(decomposed)))
        err = np.abs(ring - decomposed) / scale
        if np.any(err > LAGRANGIAN_RTOL):
            raise ConsistencyError(f"Lagrangian derivative forms disagree: {np.max(err):.3e}")
    return ring


def normal_line_intersection(mc, t, u, s, iters=30):
    """Parameters ``u'`` and offset ``lam`` with ``Phi(s, u') = Phi(t, u) + lam nu(t, u)``.

    Solved by Newton's method starting from ``(u, 0)``; one point at a time.
    """
    u = np.asarray(u, dtype=float)
    fr = mc.frame(u[None], t)
    x0, nu = fr.point[0], fr.normal[0]
    z = np.array([u[0], u[1], 0.0])
    for _ in range(iters):
        x, d1, _ = mc.derivatives(z[None, :2], s)
        res = x[0] - (x0 + z[2] * nu)
        jac = np.column_stack([d1[0, :, 0], d1[0, :, 1], -nu])
        step = np.linalg.solve(jac, res)
        z -= step
        if np.max(np.abs(step)) < 1e-15 * max(1.0, np.max(np.abs(z))):
            break
    return z[:2], z[2]


def thomas_derivative_geometric(psi, mc, t, u, dt=1e-4):
    """Thomas derivative from the normal-line construction, by central differences.

    Follows the straight normal line through ``Phi(t, u)`` to the surfaces at
    ``t +- dt``.  Ambient fields only.
    """
    if psi.kind != "ambient":
        raise MissingExtension("the geometric Thomas construction needs an ambient field")
    u = np.atleast_2d(np.asarray(u, dtype=float))
    out = np.empty(len(u))
    for k, uk in enumerate(u):
        fr = mc.frame(uk[None], t)
        x0, nu = fr.point[0], fr.normal[0]
        _, lp = normal_line_intersection(mc, t, uk, t + dt)
        _, lm = normal_line_intersection(mc, t, uk, t - dt)
        out[k] = (psi.value(x0 + lp * nu, t + dt) - psi.value(x0 + lm * nu, t - dt)) / (2 * dt)
    return out


# -- implicit and graph descriptions ----------------------------------------------

@dataclass(frozen=True)
class LevelSetSurface:
    """Surface ``f(t, x) = 0`` with normal ``grad f / |grad f|``."""

    f: Callable
    name: str = "levelset"

    def derivatives(self, t, x):
        x = np.asarray(x, dtype=float)
        val, d, _ = map_derivatives(lambda a, b, c, tt: self.f(tt, (a, b, c)),
                                    x[..., 0], x[..., 1], x[..., 2], t)
        return val[..., 0], d[..., 0, :3], d[..., 0, 3]

    def normal(self, t, x):
        _, grad, _ = self.derivatives(t, x)
        return grad / np.linalg.norm(grad, axis=-1)[..., None]


def levelset_normal_speed(ls, t, x, tol=1e-12, surface_tol=1e-8):
    """``-f_t / |grad_x f|`` at points of the level set."""
    val, grad, ft = ls.derivatives(t, x)
    g = np.linalg.norm(grad, axis=-1)
    if np.any(g <= tol):
        raise VanishingGradient("spatial gradient of the level-set function vanishes")
    if np.any(np.abs(val) > surface_tol * np.maximum(1.0, g)):
        raise ContractViolation("point is not on the zero level set")
    return -ft / g


@dataclass(frozen=True)
class GraphSurface:
    """Surface ``x3 = sigma(t, x1, x2)`` over a shadow rectangle."""

    sigma: Callable
    shadow: tuple = ((0.0, 1.0), (0.0, 1.0))
    name: str = "graph"

    def derivatives(self, t, y1, y2):
        """``sigma``, ``(sigma_x1, sigma_x2)`` and ``sigma_t``."""
        val, d, _ = map_derivatives(lambda a, b, tt: self.sigma(tt, a, b), y1, y2, t)
        return val[..., 0], d[..., 0, :2], d[..., 0, 2]

    def normal_speed(self, t, y1, y2):
        _, g, st = self.derivatives(t, y1, y2)
        return st / np.sqrt(1.0 + np.sum(g * g, axis=-1))

    def as_moving_chart(self, T=1.0):
        return MovingChart(self.name, lambda t, u1, u2: (u1, u2, self.sigma(t, u1, u2)),
                           self.shadow, {}, T)

    def as_levelset(self):
        return LevelSetSurface(lambda t, x: x[2] - self.sigma(t, x[0], x[1]), self.name)


def graph_speed_residual(gs, w_nu, t, y1, y2):
    """``sigma_t - w_nu sqrt(sigma_x1^2 + sigma_x2^2 + 1)``."""
    _, g, st = gs.derivatives(t, y1, y2)
    return st - w_nu * np.sqrt(1.0 + np.sum(g * g, axis=-1))


# -- flow maps -------------------------------------------------------------------

def _apply_matrix(m, y):
    return tuple(m[i][0] * y[0] + m[i][1] * y[1] + m[i][2] * y[2] for i in range(3))


def _matrix_exp_entries(A, t):
    """Entries of ``expm(A t)``; jets in ``t`` keep exact first and second derivatives."""
    A = np.asarray(A, dtype=float)
    if isinstance(t, Jet2):
        tv = np.asarray(t.val, dtype=float)
        flat = tv.ravel()
        E = np.stack([expm(A * s) for s in flat]).reshape(tv.shape + (3, 3))
        AE = np.einsum("ij,...jk->...ik", A, E)
        AAE = np.einsum("ij,...jk->...ik", A, AE)
        return [[t._chain(E[..., i, j], AE[..., i, j], AAE[..., i, j]) for j in range(3)]
                for i in range(3)]
    E = expm(A * float(t))
    return [[E[i, j] for j in range(3)] for i in range(3)]


@dataclass(frozen=True)
class FlowMap:
    """Motion ``x = chi(t, y)`` with Eulerian velocity ``v(t, x)``.

    ``chi`` and ``velocity`` take a 3-tuple of coordinates (jets or arrays).
    ``inverse`` maps current positions back to reference positions; when it
    is omitted Newton's method is used.
    """

    name: str
    chi: Callable
    velocity: Callable
    inverse: Callable | None = None
    params: dict = field(default_factory=dict)

    def positions(self, t, y):
        y = np.asarray(y, dtype=float)
        out = self.chi(t, (y[..., 0], y[..., 1], y[..., 2]))
        return np.stack(np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in out]), -1)

    def deformation_gradient(self, t, y):
        """``D[j, k] = d chi_j / d y_k`` with shape ``(..., 3, 3)``."""
        y = np.asarray(y, dtype=float)
        _, d, _ = map_derivatives(lambda a, b, c: self.chi(t, (a, b, c)),
                                  y[..., 0], y[..., 1], y[..., 2])
        return d

    def jacobian_det(self, t, y):
        from .tensor import det3
        return det3(self.deformation_gradient(t, y))

    def velocity_at(self, t, x):
        x = np.asarray(x, dtype=float)
        out = self.velocity(t, (x[..., 0], x[..., 1], x[..., 2]))
        return np.stack(np.broadcast_arrays(*[np.asarray(c, dtype=float) + 0.0 * x[..., 0]
                                              for c in out]), -1)

    def velocity_jacobian(self, t, x):
        x = np.asarray(x, dtype=float)
        val, d, _ = map_derivatives(lambda a, b, c: self.velocity(t, (a, b, c)),
                                    x[..., 0], x[..., 1], x[..., 2])
        return val, d

    def divergence(self, t, x):
        return np.trace(self.velocity_jacobian(t, x)[1], axis1=-2, axis2=-1)

    def reference_positions(self, t, x, iters=50):
        x = np.asarray(x, dtype=float)
        if self.inverse is not None:
            out = self.inverse(t, (x[..., 0], x[..., 1], x[..., 2]))
            return np.stack(np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in out]), -1)
        y = x.copy()
        for _ in range(iters):
            res = self.positions(t, y) - x
            step = np.linalg.solve(self.deformation_gradient(t, y), res[..., None])[..., 0]
            y = y - step
            if np.max(np.abs(step)) < 1e-15 * max(1.0, np.max(np.abs(y))):
                break
        return y


def relative_interface_velocity(fm, w, t, x):
    """``(D chi^t)^{-1} (w - v)`` at current positions ``x``."""
    x = np.asarray(x, dtype=float)
    y = fm.reference_positions(t, x)
    D = fm.deformation_gradient(t, y)
    check_invertible(D)
    return matvec(inverse3(D), np.asarray(w, dtype=float) - fm.velocity_at(t, x))


def identity_flow():
    return FlowMap("identity", lambda t, y: y, lambda t, x: (0.0 * x[0], 0.0 * x[0], 0.0 * x[0]),
                   lambda t, x: x)


def linear_flow(A=None, **entries):
    """``chi = expm(A t) y`` with velocity ``A x``.

    ``A`` is a 3x3 array, or give entries as ``a11=..., a23=...``.
    """
    if A is None:
        A = np.zeros((3, 3))
        for key, val in entries.items():
            if len(key) != 3 or key[0] != "a" or key[1] not in "123" or key[2] not in "123":
                raise ContractViolation(f"unknown linear flow entry {key!r}")
            A[int(key[1]) - 1, int(key[2]) - 1] = val
    A = np.array(A, dtype=float)
    if A.shape != (3, 3):
        raise ContractViolation("linear flow needs a 3x3 matrix")
    rows = [[A[i, j] for j in range(3)] for i in range(3)]

    def chi(t, y):
        return _apply_matrix(_matrix_exp_entries(A, t), y)

    def velocity(t, x):
        return tuple(v + 0.0 * x[0] for v in _apply_matrix(rows, x))

    def inverse(t, x):
        return _apply_matrix(_matrix_exp_entries(-A, t), x)

    return FlowMap("linear", chi, velocity, inverse, {"A": A.tolist()})


def swirl_flow(omega=1.0):
    """Rigid rotation about the x3 axis; volume preserving."""
    def chi(t, y):
        c, s = jet.cos(omega * t), jet.sin(omega * t)
        return (c * y[0] - s * y[1], s * y[0] + c * y[1], y[2] + 0.0 * y[0])

    def velocity(t, x):
        return (-omega * x[1], omega * x[0], 0.0 * x[2])

    def inverse(t, x):
        c, s = jet.cos(omega * t), jet.sin(omega * t)
        return (c * x[0] + s * x[1], -s * x[0] + c * x[1], x[2])

    return FlowMap("swirl", chi, velocity, inverse, {"omega": omega})


def nonlinear_shear_flow(c=0.5):
    """``chi = (y1 + c t y2^2, y2 exp(c t), y3)``; Jacobian ``exp(c t)``."""
    def chi(t, y):
        return (y[0] + c * t * y[1] * y[1], y[1] * jet.exp(c * t), y[2] + 0.0 * y[0])

    def velocity(t, x):
        return (c * x[1] * x[1] * jet.exp(-2 * c * t), c * x[1], 0.0 * x[2])

    def inverse(t, x):
        y2 = x[1] * np.exp(-c * t)
        return (x[0] - c * t * y2 * y2, y2, x[2])

    return FlowMap("nonlinear_shear", chi, velocity, inverse, {"c": c})


FLOWS = {
    "identity": (identity_flow, {}),
    "linear": (linear_flow, {f"a{i}{j}": 0.0 for i in "123" for j in "123"}),
    "swirl": (swirl_flow, {"omega": 1.0}),
    "nonlinear_shear": (nonlinear_shear_flow, {"c": 0.5}),
}


def make_flow(name, **params):
    try:
        factory, defaults = FLOWS[name]
    except KeyError:
        raise UnknownCatalogEntry(f"unknown flow {name!r}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise UnknownCatalogEntry(f"flow {name!r} has no parameter(s) {sorted(unknown)}")
    return factory(**{**defaults, **params})


def material_surface(fm, chart, T=1.0):
    """Moving chart ``chi(t, Phi(u))`` carried by a flow map."""
    return MovingChart(f"{chart.name}_in_{fm.name}",
                       lambda t, u1, u2: fm.chi(t, chart.func(u1, u2)), chart.domain,
                       dict(chart.params), T)


# -- moving chart catalog ------------------------------------------------------------

def translate_plane(c=1.0):
    return MovingChart("translate_plane", lambda t, u1, u2: (u1, u2, c * t + 0.0 * u1),
                       ((0.0, 1.0), (0.0, 1.0)), {"c": c})


def expand_sphere(R0=1.0, c=0.5):
    unit = sphere(1.0)

    def func(t, th, ph):
        R = R0 + c * t
        x = unit.func(th, ph)
        return (R * x[0], R * x[1], R * x[2])
    return MovingChart("expand_sphere", func, unit.domain, {"R0": R0, "c": c})


def wave_graph(a=0.1, k=2 * np.pi, omega=1.0):
    """``x3 = a sin(k x1 - omega t)`` over the unit square."""
    return MovingChart("wave_graph",
                       lambda t, u1, u2: (u1, u2, a * jet.sin(k * u1 - omega * t) + 0.0 * u2),
                       ((0.0, 1.0), (0.0, 1.0)), {"a": a, "k": k, "omega": omega})


def stretch_plane(rate=1.0):
    return MovingChart("stretch_plane", lambda t, u1, u2: ((1.0 + rate * t) * u1, u2, 0.0 * u1),
                       ((0.0, 1.0), (0.0, 1.0)), {"rate": rate})


def rotate_sphere(Omega=1.0):
    """Unit sphere rotating rigidly about x3; purely tangential surface velocity."""
    unit = sphere(1.0)
    return MovingChart("rotate_sphere", lambda t, th, ph: unit.func(th, ph + Omega * t),
                       unit.domain, {"Omega": Omega})


MOVING_CHARTS = {
    "translate_plane": (translate_plane, {"c": 1.0}),
    "expand_sphere": (expand_sphere, {"R0": 1.0, "c": 0.5}),
    "wave_graph": (wave_graph, {"a": 0.1, "k": 2 * np.pi, "omega": 1.0}),
    "stretch_plane": (stretch_plane, {"rate": 1.0}),
    "rotate_sphere": (rotate_sphere, {"Omega": 1.0}),
}


def make_moving_chart(name, **params):
    try:
        factory, defaults = MOVING_CHARTS[name]
    except KeyError:
        raise UnknownCatalogEntry(f"unknown moving chart {name!r}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise UnknownCatalogEntry(f"moving chart {name!r} has no parameter(s) {sorted(unknown)}")
    return factory(**{**defaults, **params})


__all__ = [
    "MovingChart", "MovingState", "moving_state", "surface_velocity", "metric_rate",
    "thomas_derivative", "thomas_derivative_geometric", "lagrangian_derivative",
    "lagrangian_derivative_forms", "LevelSetSurface", "levelset_normal_speed", "GraphSurface",
    "graph_speed_residual", "FlowMap", "relative_interface_velocity", "identity_flow",
    "linear_flow", "swirl_flow", "nonlinear_shear_flow", "make_flow", "material_surface",
    "make_moving_chart", "fd_step", "SingularMatrix",
]
