"""Generic balance laws with an interface and their pointwise consequences.

Sign convention: side 2 is the side the interface normal points into and
``[[q]] = q_2 - q_1``.  :class:`JumpState` and :class:`BalanceSpec` both
fix this at construction; the only way to swap sides is :meth:`JumpState.flipped`,
which also reverses the normal and the normal speed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractViolation, MissingExtension, ZeroJump
from .fields import parametric_divergence, tangential_part_derivatives
from .geometry import as_points, map_derivatives, metric_derivatives
from .moving import MovingChart, moving_state

UNIT_TOL = 1e-12
JUMP_FORMS = ("full", "concise", "coordinate")


# -- volume and surface laws -------------------------------------------------------

def _eval_scalar(f, x, t):
    """Value, gradient and time derivative of an optional ambient scalar field."""
    x = np.asarray(x, dtype=float)
    if f is None:
        z = np.zeros(x.shape[:-1])
        return z, np.zeros(x.shape), z
    return f.evaluate(x, t)


def _eval_vector(f, x, t):
    x = np.asarray(x, dtype=float)
    if f is None:
        return np.zeros(x.shape), np.zeros(x.shape + (3,)), np.zeros(x.shape)
    return f.evaluate(x, t)


@dataclass(frozen=True)
class VolumeLaw:
    """Density ``psi``, velocity ``v``, non-convective flux ``j`` and source ``xi``.

    All are ambient fields; ``None`` means identically zero.
    """

    psi: object
    v: object = None
    j: object = None
    xi: object = None

    def flux(self, x, t):
        """Total flux ``psi v + j``."""
        psi = _eval_scalar(self.psi, x, t)[0]
        return psi[..., None] * _eval_vector(self.v, x, t)[0] + _eval_vector(self.j, x, t)[0]


def volume_balance_residual(law: VolumeLaw, x, t):
    """``d psi/dt + div(psi v + j) - xi`` at points away from the interface."""
    val, grad, dt = _eval_scalar(law.psi, x, t)
    v, jv, _ = _eval_vector(law.v, x, t)
    _, jj, _ = _eval_vector(law.j, x, t)
    div_flux = (np.einsum("...i,...i->...", grad, v) + val * np.trace(jv, axis1=-2, axis2=-1)
                + np.trace(jj, axis1=-2, axis2=-1))
    return dt + div_flux - _eval_scalar(law.xi, x, t)[0]


@dataclass(frozen=True)
class SurfaceLaw:
    """Surface density, surface flux and surface source.

    ``psi`` may be ambient, a normal extension, or surface-only; forms that
    need ``psi_nu`` or a partial time derivative reject surface-only
    densities.  ``j`` is any vector field (only its tangential part enters)
    and ``xi`` any scalar field.  ``None`` means zero.
    """

    psi: object = None
    j: object = None
    xi: object = None


@dataclass(frozen=True)
class BalanceSpec:
    """Volume laws on both sides of a moving interface plus the surface law."""

    side1: VolumeLaw
    side2: VolumeLaw
    surface: SurfaceLaw
    interface: MovingChart


# -- jump brackets -------------------------------------------------------------------

@dataclass(frozen=True)
class JumpState:
    """One-sided values at an interface point; side 2 is where ``normal`` points."""

    psi1: float
    psi2: float
    v1: np.ndarray
    v2: np.ndarray
    j1: np.ndarray
    j2: np.ndarray
    normal: np.ndarray
    w_nu: float
    w_par: np.ndarray | None = None

    def __post_init__(self):
        for name in ("psi1", "psi2", "v1", "v2", "j1", "j2", "normal", "w_nu"):
            if getattr(self, name) is None:
                raise ContractViolation(f"jump state is missing {name}")
        for name in ("v1", "v2", "j1", "j2", "normal"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.w_par is not None:
            object.__setattr__(self, "w_par", np.asarray(self.w_par, dtype=float))
        if np.any(np.abs(np.linalg.norm(self.normal, axis=-1) - 1.0) > UNIT_TOL):
            raise ContractViolation("interface normal must be a unit vector")

    def flipped(self):
        """The same physical state described with the opposite normal."""
        return replace(self, psi1=self.psi2, psi2=self.psi1, v1=self.v2, v2=self.v1,
                       j1=self.j2, j2=self.j1, normal=-self.normal, w_nu=-np.asarray(self.w_nu))

    def flux1(self):
        return np.asarray(self.psi1)[..., None] * self.v1 + self.j1

    def flux2(self):
        return np.asarray(self.psi2)[..., None] * self.v2 + self.j2


JUMP_QUANTITIES = ("psi", "v", "j", "flux", "flux_normal")


def jump(js: JumpState, quantity="psi"):
    """``[[q]] = q_2 - q_1`` for ``psi``, ``v``, ``j``, ``flux`` (psi v + j) or ``flux_normal``."""
    if quantity == "psi":
        return np.asarray(js.psi2) - np.asarray(js.psi1)
    if quantity == "v":
        return js.v2 - js.v1
    if quantity == "j":
        return js.j2 - js.j1
    if quantity == "flux":
        return js.flux2() - js.flux1()
    if quantity == "flux_normal":
        return np.einsum("...i,...i->...", js.flux2() - js.flux1(), js.normal)
    raise ContractViolation(f"unknown jump quantity {quantity!r}; use one of {JUMP_QUANTITIES}")


def exchange_term(js: JumpState):
    """``w_nu [[psi]] - [[psi v + j]] . nu``: what the bulk hands to the interface."""
    return js.w_nu * jump(js, "psi") - jump(js, "flux_normal")


def classical_speed(js: JumpState, tol=1e-14):
    """Normal speed solving ``w_nu [[psi]] = [[psi v + j]] . nu``."""
    dpsi = jump(js, "psi")
    scale = np.maximum(1.0, np.maximum(np.abs(js.psi1), np.abs(js.psi2)))
    if np.any(np.abs(dpsi) <= tol * scale):
        raise ZeroJump("density does not jump; the classical condition fixes no speed")
    return jump(js, "flux_normal") / dpsi


def jump_state(spec: BalanceSpec, t, u):
    """One-sided states of ``spec`` at interface parameters ``u``."""
    st = moving_state(spec.interface, t, u)
    x = st.frame.point
    laws = (spec.side1, spec.side2)
    psi = [_eval_scalar(l.psi, x, t)[0] for l in laws]
    v = [_eval_vector(l.v, x, t)[0] for l in laws]
    j = [_eval_vector(l.j, x, t)[0] for l in laws]
    return JumpState(psi[0], psi[1], v[0], v[1], j[0], j[1], st.frame.normal, st.w_nu, st.w_par)


# -- surface operators on the moving interface ------------------------------------------

def intrinsic_divergence(a, da, frame):
    """``nabla_alpha a^alpha`` with ``a^alpha = g^{ab} tau_b . a``.

    ``a`` is Cartesian ``(..., 3)`` with parameter derivatives ``(..., 3, 2)``;
    only its tangential part contributes.  Derivatives of the components are
    assembled from the metric derivatives, then the Christoffel term is added.
    """
    tau, ginv = frame.tangents, frame.metric_inv
    dg = metric_derivatives(frame)
    dginv = -np.einsum("...am,...mnc,...nb->...abc", ginv, dg, ginv)
    proj = np.einsum("...bi,...i->...b", tau, a)
    dproj = (np.einsum("...bci,...i->...bc", frame.second, a)
             + np.einsum("...bi,...ic->...bc", tau, da))
    comp = np.einsum("...ab,...b->...a", ginv, proj)
    dcomp = np.einsum("...abc,...b->...ac", dginv, proj) + np.einsum("...ab,...bc->...ac", ginv, dproj)
    return np.einsum("...aa->...", dcomp) + np.einsum("...aad,...d->...", frame.christoffel, comp)


def _surface_flux_terms(law, mc, t, u, st):
    """``div_S j_par`` parametrically and intrinsically."""
    if law.j is None:
        z = np.zeros(st.frame.shape)
        return z, z
    val, du, _ = law.j.restrict_moving(mc, u, t)
    par = parametric_divergence(tangential_part_derivatives(val, du, st.frame), st.frame)
    if getattr(law.j, "contravariant", False):
        comp, dcomp = law.j.components(u, t)
        intr = (np.einsum("...aa->...", dcomp)
                + np.einsum("...aad,...d->...", st.frame.christoffel, comp))
    else:
        intr = intrinsic_divergence(val, du, st.frame)
    return par, intr


def _surface_source(law, mc, t, u, shape):
    if law.xi is None:
        return np.zeros(shape)
    if law.xi.kind == "ambient":
        return law.xi.value(mc(u, t), t)
    return law.xi.restrict_moving(mc, u, t)[0]


def surface_balance_terms(law: SurfaceLaw, mc, t, u):
    """Left sides of the surface balance in three forms.

    ``full``: ``d psi/dt + div_S(psi w_par) + (psi_nu - 2 kappa psi) w_nu + div_S j_par - xi``
    (needs an ambient density or a normal extension);
    ``concise``: ``psi_ring + psi div_S w + div_S j_par - xi`` with the ring
    derivative taken at fixed parameters;
    ``coordinate``: ``psi_ring + psi (nabla_a w^a - 2 kappa w_nu) + nabla_a j^a - xi``.
    Forms that are not available for the density are omitted.
    """
    u = as_points(u)
    st = moving_state(mc, t, u)
    fr = st.frame
    kappa = fr.mean_curvature
    shape = fr.shape
    div_j_par, div_j_intr = _surface_flux_terms(law, mc, t, u, st)
    xi = _surface_source(law, mc, t, u, shape)
    if law.psi is None:
        base = div_j_par - xi
        return {"full": base, "concise": base, "coordinate": div_j_intr - xi}
    val, du, ring = law.psi.restrict_moving(mc, u, t)
    div_w_intr = intrinsic_divergence(st.w, st.dw, fr)
    out = {"concise": ring + val * st.div_w + div_j_par - xi,
           "coordinate": ring + val * (div_w_intr - 2.0 * kappa * st.w_nu) + div_j_intr - xi}
    kind = law.psi.kind
    if kind in ("ambient", "extension"):
        dwpar = tangential_part_derivatives(st.w, st.dw, fr)
        div_psi_wpar = parametric_divergence(
            du[..., None, :] * st.w_par[..., :, None] + val[..., None, None] * dwpar, fr)
        if kind == "ambient":
            _, grad, dt = law.psi.evaluate(fr.point, t)
            psi_nu = np.einsum("...i,...i->...", grad, fr.normal)
        else:
            grad_s = np.einsum("...a,...ai->...i", du, fr.dual_tangents())
            dt = ring - np.einsum("...i,...i->...", st.w_par, grad_s)
            psi_nu = np.zeros_like(val)
        out["full"] = (dt + div_psi_wpar + (psi_nu - 2.0 * kappa * val) * st.w_nu
                       + div_j_par - xi)
    return out


def surface_balance_residual(law: SurfaceLaw, mc, t, u, form="full"):
    """Residual of the uncoupled surface balance (no exchange with the bulk)."""
    terms = surface_balance_terms(law, mc, t, u)
    if form not in terms:
        if form in JUMP_FORMS:
            raise MissingExtension(
                f"the {form} form needs an ambient density or a normal extension")
        raise ContractViolation(f"unknown form {form!r}")
    return terms[form]


def interface_jump_residual(spec: BalanceSpec, t, u, form="full"):
    """Surface balance minus the exchange term ``w_nu [[psi]] - [[psi v + j]] . nu``."""
    lhs = surface_balance_residual(spec.surface, spec.interface, t, u, form)
    return lhs - exchange_term(jump_state(spec, t, u))


def interface_jump_residuals(spec: BalanceSpec, t, u):
    """All available jump forms at once."""
    terms = surface_balance_terms(spec.surface, spec.interface, t, u)
    ex = exchange_term(jump_state(spec, t, u))
    return {k: v - ex for k, v in terms.items()}


# -- planar curves ----------------------------------------------------------------------

@dataclass(frozen=True)
class MovingCurve:
    """Planar curve ``c(t, s)`` in the ``(x1, x2)`` plane.

    The normal is the tangent rotated clockwise, which equals the normal of
    the extruded surface ``(c1, c2, x3)``.  The curvature is
    ``c'' . nu / |c'|^2``; with this orientation it is twice the mean
    curvature of the extrusion.
    """

    func: object
    domain: tuple = (0.0, 2 * np.pi)
    name: str = "curve"
    T: float = 1.0

    def extrude(self, height=(-1.0, 1.0)):
        f = self.func
        return MovingChart(f"{self.name}_extruded",
                           lambda t, u1, u2: (*f(t, u1), u2 + 0.0 * u1),
                           (tuple(self.domain), tuple(height)), {}, self.T)

    def state(self, t, s):
        """Point, unit tangent, normal, speed ``|c'|``, curvature, velocity and ``d w_tau/ds``."""
        s = np.asarray(s, dtype=float)
        x, d, dd = map_derivatives(lambda a, tt: self.func(tt, a), s, t)
        cp, w = d[..., 0], d[..., 1]
        cpp, cpt = dd[..., 0, 0], dd[..., 0, 1]
        speed = np.linalg.norm(cp, axis=-1)
        tan = cp / speed[..., None]
        nu = np.stack([tan[..., 1], -tan[..., 0]], -1)
        kappa = np.einsum("...i,...i->...", cpp, nu) / speed ** 2
        # arc-length derivative of the unit tangent
        dtan = ((cpp - np.einsum("...i,...i->...", cpp, tan)[..., None] * tan)
                / (speed ** 2)[..., None])
        dw_tau = np.einsum("...i,...i->...", cpt, tan) / speed + np.einsum("...i,...i->...", w, dtan)
        return {"point": x, "tangent": tan, "normal": nu, "speed": speed, "curvature": kappa,
                "w": w, "dtan": dtan, "dw_tau": dw_tau}


def _planar(x2d):
    x2d = np.asarray(x2d, dtype=float)
    return np.concatenate([x2d, np.zeros(x2d.shape[:-1] + (1,))], -1)


def _check_planar(f, x3d, t, rank):
    if f is None:
        return
    if rank == 0:
        _, grad, _ = f.evaluate(x3d, t)
        bad = np.abs(grad[..., 2])
    else:
        val, jac, _ = f.evaluate(x3d, t)
        bad = np.maximum(np.abs(val[..., 2]), np.max(np.abs(jac[..., :, 2]), axis=-1))
    if np.any(bad > 1e-12):
        raise ContractViolation(f"field {f.name!r} is not planar-symmetric")


def curve_jump_residual_2d(spec: BalanceSpec, curve: MovingCurve, t, s):
    """Jump residual on a moving planar curve.

    ``psi_ring_c + psi_c (d w_tau/ds - kappa w_nu) + psi_c,nu w_nu - xi_c + d j_par/ds``
    minus the exchange term.  ``psi_ring_c`` is the tangential advective
    derivative ``d psi/dt + w_tau d psi/ds``; the normal part enters through
    the separate ``psi_c,nu w_nu`` term.  Fields are 3D fields that must not
    depend on ``x3`` and whose vectors have no ``x3`` component.  Surface-only
    densities are functions of ``((s, x3), t)`` as on the extruded chart.
    """
    s = np.asarray(s, dtype=float)
    cs = curve.state(t, s)
    x = _planar(cs["point"])
    tan, nu = _planar(cs["tangent"]), _planar(cs["normal"])
    w = _planar(cs["w"])
    w_nu = np.einsum("...i,...i->...", w, nu)
    w_tau = np.einsum("...i,...i->...", w, tan)
    kappa, speed = cs["curvature"], cs["speed"]
    for law in (spec.side1, spec.side2):
        _check_planar(law.psi, x, t, 0)
        _check_planar(law.v, x, t, 1)
        _check_planar(law.j, x, t, 1)
    law = spec.surface
    mc = curve.extrude()
    u = np.stack([s, np.zeros_like(s)], -1)
    if law.psi is None:
        psi = ring_c = psi_nu = np.zeros_like(s)
    elif law.psi.kind == "ambient":
        _check_planar(law.psi, x, t, 0)
        psi, grad, dt = law.psi.evaluate(x, t)
        ring_c = dt + w_tau * np.einsum("...i,...i->...", grad, tan)
        psi_nu = np.einsum("...i,...i->...", grad, nu)
    elif law.psi.kind == "extension":
        psi, _, ring_c = law.psi.restrict_moving(mc, u, t)
        psi_nu = np.zeros_like(s)
    else:
        raise MissingExtension("the curve form needs an ambient density or a normal extension")
    if law.j is None:
        dj = np.zeros_like(s)
    else:
        jval, jdu, _ = law.j.restrict_moving(mc, u, t)
        # d/ds (j . T) with the arc-length derivative of j taken along u1
        dtan = _planar(cs["dtan"])
        dj = (np.einsum("...i,...i->...", jdu[..., :, 0], tan) / speed
              + np.einsum("...i,...i->...", jval, dtan))
    xi = _surface_source(law, mc, t, u, s.shape)
    lhs = ring_c + psi * (cs["dw_tau"] - kappa * w_nu) + psi_nu * w_nu - xi + dj
    laws = (spec.side1, spec.side2)
    psis = [_eval_scalar(l.psi, x, t)[0] for l in laws]
    fluxes = [l.flux(x, t) for l in laws]
    exchange = (w_nu * (psis[1] - psis[0])
                - np.einsum("...i,...i->...", fluxes[1] - fluxes[0], nu))
    return lhs - exchange


# -- points on a line ----------------------------------------------------------------------

@dataclass(frozen=True)
class State1D:
    psi: float
    v: float = 0.0
    j: float = 0.0

    @property
    def flux(self):
        return self.psi * self.v + self.j


@dataclass(frozen=True)
class InterfacePoint1D:
    """Interface point with its own density ``psi_p`` and source ``xi_p``."""

    p: float
    w: float
    psi_p: float = 0.0
    xi_p: float = 0.0
    dpsi_p: float = 0.0


def point_jump_residual_1d(ip: InterfacePoint1D, left: State1D, right: State1D):
    """``d psi_p/dt - xi_p - (w [[psi]] - [[psi v + j]])`` with the right side as side 2."""
    return ip.dpsi_p - ip.xi_p - (ip.w * (right.psi - left.psi) - (right.flux - left.flux))


def shock_speed_1d(left: State1D, right: State1D, tol=1e-14):
    """Classical speed ``[[psi v + j]] / [[psi]]``."""
    dpsi = right.psi - left.psi
    if abs(dpsi) <= tol * max(1.0, abs(left.psi), abs(right.psi)):
        raise ZeroJump("density does not jump; the speed is not determined")
    return (right.flux - left.flux) / dpsi


__all__ = [
    "VolumeLaw", "SurfaceLaw", "BalanceSpec", "JumpState", "jump", "exchange_term",
    "classical_speed", "jump_state", "volume_balance_residual", "intrinsic_divergence",
    "surface_balance_terms", "surface_balance_residual", "interface_jump_residual",
    "interface_jump_residuals", "MovingCurve", "curve_jump_residual_2d", "State1D",
    "InterfacePoint1D", "point_jump_residual_1d", "shock_speed_1d", "JUMP_FORMS",
]
