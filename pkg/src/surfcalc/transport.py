"""Numerical checks of the transport theorems.

Every check compares a left side obtained by central differences of an
integral in time with right sides obtained by quadrature of the theorem's
integrands, so the two never share a code path.  Right sides that the
theorem states in several equivalent forms are all evaluated and their
mutual spread is reported next to the residual.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractViolation, MissingExtension
from .geometry import Chart, frame_at, map_derivatives
from .moving import FlowMap, MovingChart, fd_step, moving_state, relative_interface_velocity
from .quadrature import (QuadratureRule, _rule, boundary_edges, graph_nodes,
                         integrate_boundary, integrate_split_volume, integrate_surface)
from .fields import (parametric_divergence, surface_divergence, tangential_divergence,
                     tangential_part_derivatives)
from .tensor import cofactor3

REL_FLOOR = 1e-14
FORM_TOL = 1e-9


# -- reports -------------------------------------------------------------------

@dataclass
class ResidualReport:
    scenario: str
    check: str
    lhs: float
    rhs: dict
    abs_residual: float
    rel_residual: float
    form_spread: float
    order: int | None
    fd_step: float | None
    tol: float
    form_tol: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def make_report(scenario, check, lhs, rhs, tol, order=None, h=None, form_tol=FORM_TOL,
                **details):
    """Assemble a report; the worst form decides the residual.

    A check passes when ``min(abs, rel) <= tol`` for every form and the forms
    agree among themselves to ``form_tol`` (scaled by ``max(1, |rhs|)``).
    """
    lhs = float(lhs)
    rhs = {k: float(v) for k, v in rhs.items()}
    if not rhs:
        raise ContractViolation("a report needs at least one right-hand side")
    absr = max(abs(lhs - v) for v in rhs.values())
    relr = max(abs(lhs - v) / max(abs(lhs), abs(v), REL_FLOOR) for v in rhs.values())
    vals = list(rhs.values())
    spread = (max(vals) - min(vals)) / max(1.0, max(abs(v) for v in vals))
    ok = all(min(abs(lhs - v), abs(lhs - v) / max(abs(lhs), abs(v), REL_FLOOR)) <= tol
             for v in vals) and spread <= form_tol
    return ResidualReport(scenario, check, lhs, rhs, absr, relr, spread, order, h, tol,
                          form_tol, bool(ok), details)


def central_difference(f, t, h):
    return (f(t + h) - f(t - h)) / (2.0 * h)


def richardson_difference(f, t, h):
    """Central difference with one Richardson step, fourth order in ``h``."""
    return (4.0 * central_difference(f, t, 0.5 * h) - central_difference(f, t, h)) / 3.0


def _difference(method):
    if method == "central":
        return central_difference
    if method == "richardson":
        return richardson_difference
    raise ContractViolation(f"unknown difference method {method!r}")


def convergence_orders(steps, errors):
    """Empirical orders ``log(e_k / e_{k+1}) / log(h_k / h_{k+1})``."""
    steps, errors = np.asarray(steps, float), np.asarray(errors, float)
    return np.log(errors[:-1] / errors[1:]) / np.log(steps[:-1] / steps[1:])


# -- regions bounded by graphs ----------------------------------------------------

def _const(c):
    return lambda y1, y2: c + 0.0 * y1


@dataclass(frozen=True)
class GraphRegion:
    """Reference region ``alpha(y) < y3 < beta(y)`` over a rectangular shadow."""

    shadow: tuple = ((0.0, 1.0), (0.0, 1.0))
    alpha: Callable = _const(0.0)
    beta: Callable = _const(1.0)
    name: str = "region"


def unit_cube():
    return GraphRegion(name="unit_cube")


def _region_faces(shadow, lower, upper):
    """Faces ``(name, Y(u1, u2), domain, outward reference direction)``."""
    faces = [("top", lambda u1, u2: (u1, u2, upper(u1, u2)), shadow, np.array([0.0, 0.0, 1.0])),
             ("bottom", lambda u1, u2: (u1, u2, lower(u1, u2)), shadow,
              np.array([0.0, 0.0, -1.0]))]
    for name, start, direction in boundary_edges(shadow):
        def ref(s, lam, start=start, direction=direction):
            y1 = start[0] + s * direction[0]
            y2 = start[1] + s * direction[1]
            lo = lower(y1, y2)
            return (y1 + 0.0 * lam, y2 + 0.0 * lam, lo + lam * (upper(y1, y2) - lo))
        faces.append((f"side {name}", ref, ((0.0, 1.0), (0.0, 1.0)),
                      np.array([direction[1], -direction[0], 0.0])))
    return faces


def _face_flux(fm, t, ref_func, domain, outward, psi, rule):
    """``int psi v . n dS`` over the image of one reference face at time ``t``."""
    chart = Chart("face", lambda u1, u2: fm.chi(t, ref_func(u1, u2)), domain)
    centre = np.array([[0.5 * sum(domain[0]), 0.5 * sum(domain[1])]])
    y_c = np.stack(np.broadcast_arrays(*[np.asarray(c, float) for c in
                                         ref_func(centre[:, 0], centre[:, 1])]), -1)
    push = np.einsum("...ij,j->...i", fm.deformation_gradient(t, y_c), outward)
    sign = 1.0 if float(np.dot(frame_at(chart, centre).normal[0], push[0])) > 0 else -1.0

    def integrand(fr):
        v = fm.velocity_at(t, fr.point)
        return psi.value(fr.point, t) * np.einsum("...i,...i->...", v, fr.normal)
    return sign * integrate_surface(chart, integrand, rule, t), sign


def _volume_terms(fm, psi, pts, t):
    """Integrand pieces at reference nodes: value, d psi/dt, div(psi v), all times J."""
    x = fm.positions(t, pts)
    jac = fm.jacobian_det(t, pts)
    val, grad, dt = psi.evaluate(x, t)
    v = fm.velocity_at(t, x)
    div_flux = np.einsum("...i,...i->...", grad, v) + val * fm.divergence(t, x)
    return val * jac, dt * jac, div_flux * jac


def volume_integral(fm, psi, region, t, rule=None, lower=None, upper=None):
    """``int_{V(t)} psi dV`` computed on the reference region with the Jacobian."""
    lower = lower or region.alpha
    upper = upper or region.beta
    pts, w = graph_nodes(region.shadow, lower, upper, rule)
    x = fm.positions(t, pts)
    return float(np.dot(w, psi.value(x, t) * fm.jacobian_det(t, pts)))


def reynolds_sides(fm, psi, region, t, rule=None, lower=None, upper=None, skip=()):
    """Divergence-form and flux-form right sides of the Reynolds theorem.

    Faces named in ``skip`` are left out of the flux form.
    """
    lower = lower or region.alpha
    upper = upper or region.beta
    pts, w = graph_nodes(region.shadow, lower, upper, rule)
    _, dt_j, div_j = _volume_terms(fm, psi, pts, t)
    vol_dt = float(np.dot(w, dt_j))
    divergence = vol_dt + float(np.dot(w, div_j))
    flux, signs = 0.0, {}
    for name, ref, domain, outward in _region_faces(region.shadow, lower, upper):
        if name in skip:
            continue
        f, s = _face_flux(fm, t, ref, domain, outward, psi, rule)
        flux += f
        signs[name] = s
    return {"divergence": divergence, "flux": vol_dt + flux}, signs


def verify_reynolds(fm: FlowMap, psi, region: GraphRegion, t=0.0, tol=1e-6, rule=None, h=None,
                    method="central", name=None):
    """d/dt of a material volume integral against both Reynolds right sides."""
    rule = _rule(rule)
    h = fd_step() if h is None else h
    lhs = _difference(method)(lambda s: volume_integral(fm, psi, region, s, rule), t, h)
    rhs, signs = reynolds_sides(fm, psi, region, t, rule)
    return make_report(name or f"reynolds:{fm.name}:{psi.name}", "reynolds", lhs, rhs, tol,
                       rule.order, h, face_signs=signs, method=method)


def verify_jacobian_rate(fm: FlowMap, t, y, tol=1e-8, h=None, method="richardson", name=None):
    """``dJ/dt = (div v) J`` and the co-factor form ``cof(D) : dD/dt`` with ``dD/dt = (grad v) D``."""
    y = np.asarray(y, dtype=float)
    h = fd_step() if h is None else h
    lhs = _difference(method)(lambda s: float(fm.jacobian_det(s, y)), t, h)
    D = fm.deformation_gradient(t, y)
    x = fm.positions(t, y)
    _, L = fm.velocity_jacobian(t, x)
    rhs = {"divergence": float(fm.divergence(t, x) * np.linalg.det(D)),
           "cofactor": float(np.sum(cofactor3(D) * (L @ D)))}
    return make_report(name or f"jacobian:{fm.name}", "jacobian_rate", lhs, rhs, tol, None, h,
                       method=method)


# -- surface divergence theorem ------------------------------------------------------

def verify_surface_divergence(chart, a, tol=1e-7, rule=None, t=0.0, name=None):
    """Boundary flux against the tangential and curvature-corrected surface integrals."""
    rule = _rule(rule)
    info = {}
    lhs = integrate_boundary(chart, a, rule, t, info)

    def tangential(fr):
        return tangential_divergence(a, chart, fr.u, t)

    def corrected(fr):
        val, _ = a.restrict(chart, fr.u, t)
        a_nu = np.einsum("...i,...i->...", val, fr.normal)
        return surface_divergence(a, chart, fr.u, t) + 2.0 * fr.mean_curvature * a_nu

    rhs = {"tangential": integrate_surface(chart, tangential, rule, t),
           "curvature": integrate_surface(chart, corrected, rule, t)}
    return make_report(name or f"divergence:{chart.name}:{a.name}", "surface_divergence", lhs,
                       rhs, tol, rule.order, None, collapsed=info["collapsed"],
                       flipped=info["flipped"])


# -- surface transport theorem ---------------------------------------------------------

SURFACE_TRANSPORT_FORMS = ("lagrangian", "lagrangian_split", "thomas", "partial", "partial_split")


def surface_integral(mc, psi, t, rule=None):
    rule = _rule(rule)
    u, w = rule.rectangle(mc.domain)
    fr = mc.frame(u, t)
    val = psi.restrict_moving(mc, u, t)[0]
    return float(np.dot(w, val * fr.sqrt_g))


def surface_transport_integrands(mc, psi, t, u):
    """Pointwise integrands of every applicable form of the surface transport theorem.

    Forms needing a normal derivative or a Thomas derivative are omitted for
    surface-only densities.
    """
    st = moving_state(mc, t, u)
    fr = st.frame
    kappa = fr.mean_curvature
    val, du, ring = psi.restrict_moving(mc, u, t)
    out = {"lagrangian": ring + val * st.div_w,
           "lagrangian_split": ring + val * (st.div_w_par - 2.0 * kappa * st.w_nu)}
    if psi.kind == "surface":
        return out
    dwpar = tangential_part_derivatives(st.w, st.dw, fr)
    div_psi_wpar = parametric_divergence(
        du[..., None, :] * st.w_par[..., :, None] + val[..., None, None] * dwpar, fr)
    div_psi_w = parametric_divergence(
        du[..., None, :] * st.w[..., :, None] + val[..., None, None] * st.dw, fr)
    if psi.kind == "ambient":
        _, grad, dt = psi.evaluate(fr.point, t)
        psi_nu = np.einsum("...i,...i->...", grad, fr.normal)
    elif psi.kind == "extension":
        grad_s = np.einsum("...a,...ai->...i", du, fr.dual_tangents())
        dt = ring - np.einsum("...i,...i->...", st.w_par, grad_s)
        psi_nu = np.zeros_like(val)
    else:
        raise MissingExtension(f"unknown field kind {psi.kind!r}")
    thomas = dt + psi_nu * st.w_nu
    out["thomas"] = thomas + div_psi_wpar - 2.0 * kappa * val * st.w_nu
    out["partial"] = dt + div_psi_w + psi_nu * st.w_nu
    out["partial_split"] = dt + div_psi_wpar + (psi_nu - 2.0 * kappa * val) * st.w_nu
    return out


def verify_surface_transport(mc: MovingChart, psi, t=0.0, tol=1e-6, rule=None, h=None,
                             form_tol=FORM_TOL, method="central", name=None):
    """d/dt of a moving surface integral against every applicable transport form."""
    rule = _rule(rule)
    h = fd_step(mc.T) if h is None else h
    lhs = _difference(method)(lambda s: surface_integral(mc, psi, s, rule), t, h)
    u, w = rule.rectangle(mc.domain)
    sqrt_g = mc.frame(u, t).sqrt_g
    rhs = {k: float(np.dot(w, v * sqrt_g))
           for k, v in surface_transport_integrands(mc, psi, t, u).items()}
    skipped = [f for f in SURFACE_TRANSPORT_FORMS if f not in rhs]
    return make_report(name or f"surface_transport:{mc.name}:{psi.name}", "surface_transport",
                       lhs, rhs, tol, rule.order, h, form_tol, skipped_forms=skipped,
                       method=method)


# -- generalized Reynolds with a moving interface ----------------------------------------

@dataclass(frozen=True)
class PiecewiseVolumeScenario:
    """Material region split by an interface ``y3 = sigma(t, y1, y2)`` in reference coordinates.

    Side 1 lies below the interface and side 2 above, so the interface normal
    points into side 2.  A single velocity field (the flow map's) is shared by
    both sides; the interface moves relative to the material unless ``sigma``
    is independent of time.
    """

    name: str
    flow: FlowMap
    region: GraphRegion
    sigma: Callable
    psi_lower: object
    psi_upper: object
    T: float = 1.0

    def interface_chart(self):
        fm, sigma = self.flow, self.sigma
        return MovingChart(f"{self.name}_interface",
                           lambda t, u1, u2: fm.chi(t, (u1, u2, sigma(t, u1, u2))),
                           self.region.shadow, {}, self.T)

    def sigma_at(self, t):
        return lambda y1, y2: self.sigma(t, y1, y2)


def split_integral(sc, t, rule=None):
    """``int_{V1(t)} psi_1 + int_{V2(t)} psi_2`` with a separate Gauss rule per side."""
    fm = sc.flow

    def side(psi):
        def h(y1, y2, y3):
            pts = np.stack([y1, y2, y3], -1)
            return psi.value(fm.positions(t, pts), t) * fm.jacobian_det(t, pts)
        return h
    lo, hi = integrate_split_volume(sc.region.shadow, sc.region.alpha, sc.sigma_at(t),
                                    sc.region.beta, side(sc.psi_lower), side(sc.psi_upper), rule)
    return lo + hi


def generalized_reynolds_sides(sc, t, rule=None):
    rule = _rule(rule)
    fm, region = sc.flow, sc.region
    sig = sc.sigma_at(t)
    parts = {}
    for side, psi, lower, upper, skip in (("lower", sc.psi_lower, region.alpha, sig, "top"),
                                          ("upper", sc.psi_upper, sig, region.beta, "bottom")):
        rhs, _ = reynolds_sides(fm, psi, region, t, rule, lower, upper, (skip,))
        parts[side] = rhs
    mc = sc.interface_chart()
    u, wq = rule.rectangle(region.shadow)
    st = moving_state(mc, t, u)
    x = st.frame.point
    jump = sc.psi_upper.value(x, t) - sc.psi_lower.value(x, t)
    v = fm.velocity_at(t, x)
    rel_nu = np.einsum("...i,...i->...", st.w - v, st.frame.normal)
    surf = st.frame.sqrt_g
    jump_rel = float(np.dot(wq, jump * rel_nu * surf))
    jump_w = float(np.dot(wq, jump * st.w_nu * surf))
    # the same relative-flux integral pulled back to the reference interface
    y = np.stack([u[:, 0], u[:, 1], np.asarray(sig(u[:, 0], u[:, 1]), float) + 0.0 * u[:, 0]], -1)
    _, dsig, _ = map_derivatives(lambda a, b: sig(a, b), u[:, 0], u[:, 1])
    n0 = np.concatenate([-dsig[:, 0, :], np.ones((len(u), 1))], -1)
    w0 = relative_interface_velocity(fm, st.w, t, x)
    jump_ref = float(np.dot(wq, jump * np.einsum("...i,...i->...", w0, n0)
                            * fm.jacobian_det(t, y)))
    div_total = parts["lower"]["divergence"] + parts["upper"]["divergence"]
    flux_total = parts["lower"]["flux"] + parts["upper"]["flux"]
    return {"volume_jump": div_total - jump_rel,
            "boundary_jump": flux_total - jump_w,
            "reference_jump": div_total - jump_ref}


def verify_generalized_reynolds(sc: PiecewiseVolumeScenario, t=0.0, tol=1e-6, rule=None,
                                h=None, method="central", form_tol=FORM_TOL):
    """d/dt of the split volume integral against the interface forms of the theorem."""
    rule = _rule(rule)
    h = fd_step(sc.T) if h is None else h
    lhs = _difference(method)(lambda s: split_integral(sc, s, rule), t, h)
    rhs = generalized_reynolds_sides(sc, t, rule)
    return make_report(f"generalized_reynolds:{sc.name}", "generalized_reynolds", lhs, rhs, tol,
                       rule.order, h, form_tol, method=method)


def two_piece_reynolds(sc, t=0.0, tol=1e-6, rule=None, h=None, method="central"):
    """Reynolds checks of the two sides as separate material volumes, summed.

    Meaningful only for a material interface (``sigma`` independent of time).
    """
    rule = _rule(rule)
    h = fd_step(sc.T) if h is None else h
    region = sc.region
    sig = sc.sigma_at(t)
    lhs = 0.0
    rhs = {"divergence": 0.0, "flux": 0.0}
    for psi, lower, upper in ((sc.psi_lower, region.alpha, sig), (sc.psi_upper, sig, region.beta)):
        lhs += _difference(method)(
            lambda s: volume_integral(sc.flow, psi, region, s, rule, lower, upper), t, h)
        part, _ = reynolds_sides(sc.flow, psi, region, t, rule, lower, upper)
        for k in rhs:
            rhs[k] += part[k]
    return make_report(f"two_piece_reynolds:{sc.name}", "reynolds", lhs, rhs, tol, rule.order, h,
                       method=method)


def pillbox_sweep(sc, t, widths, rule=None):
    """Diagnostic only: volume and interface contributions inside a band around the interface.

    For each half-width ``eps`` the band ``sigma - eps < y3 < sigma + eps``
    is integrated; the volume part shrinks with ``eps`` while the interface
    term does not.  No pass/fail tolerance is attached.
    """
    rule = _rule(rule)
    sig = sc.sigma_at(t)
    rows = []
    interface = generalized_reynolds_sides(sc, t, rule)
    jump_part = interface["reference_jump"] - (
        sum(reynolds_sides(sc.flow, p, sc.region, t, rule, lo, hi)[0]["divergence"]
            for p, lo, hi in ((sc.psi_lower, sc.region.alpha, sig),
                              (sc.psi_upper, sig, sc.region.beta))))
    for eps in widths:
        below = lambda y1, y2, e=eps: sig(y1, y2) - e
        above = lambda y1, y2, e=eps: sig(y1, y2) + e
        vol = (reynolds_sides(sc.flow, sc.psi_lower, sc.region, t, rule, below, sig)[0]["divergence"]
               + reynolds_sides(sc.flow, sc.psi_upper, sc.region, t, rule, sig, above)[0]["divergence"])
        rows.append({"eps": float(eps), "volume": vol, "interface": jump_part})
    return rows


# -- scenario builders ---------------------------------------------------------------

def planar_cube_scenario(speed=0.2, psi1=1.0, psi2=3.0, height=0.5):
    """Unit cube at rest cut by the plane ``x3 = height + speed t``; constant densities."""
    from .fields import constant
    from .moving import identity_flow
    return PiecewiseVolumeScenario(
        "planar_cube", identity_flow(), unit_cube(),
        lambda t, y1, y2: height + speed * t + 0.0 * y1, constant(psi1), constant(psi2))


def curved_interface_scenario(speed=0.2, amp=0.1, flow=None):
    """``sigma = 0.5 + amp sin(2 pi y1) + speed t`` with smooth, distinct densities."""
    from . import jet
    from .fields import AmbientScalarField
    from .moving import identity_flow
    lower = AmbientScalarField(lambda x, t: 1.0 + x[0] * x[1] + 0.5 * x[2] * x[2] + 0.1 * t,
                               "lower_density")
    upper = AmbientScalarField(lambda x, t: 3.0 + jet.sin(x[0] + x[2]) - 0.2 * t * x[1],
                               "upper_density")
    return PiecewiseVolumeScenario(
        "curved_interface", flow or identity_flow(), unit_cube(),
        lambda t, y1, y2: 0.5 + amp * jet.sin(2 * np.pi * y1) + speed * t + 0.0 * y2,
        lower, upper)


__all__ = [
    "ResidualReport", "make_report", "central_difference", "richardson_difference",
    "convergence_orders", "GraphRegion", "unit_cube", "volume_integral", "reynolds_sides",
    "verify_reynolds", "verify_jacobian_rate", "verify_surface_divergence", "surface_integral",
    "surface_transport_integrands", "verify_surface_transport", "PiecewiseVolumeScenario",
    "split_integral", "generalized_reynolds_sides", "verify_generalized_reynolds",
    "two_piece_reynolds", "pillbox_sweep", "planar_cube_scenario", "curved_interface_scenario",
    "QuadratureRule",
]
