"""Turn parsed scenario configs into residual reports.

Each scenario kind has a builder that reads its keys from a
:class:`~surfcalc.config.ScenarioConfig` and a runner that evaluates the
checks.  Building never evaluates numerics, so configuration mistakes are
found before any scenario runs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import balance, geometry, moving, transport
from .config import ScenarioConfig
from .errors import ConfigParse, SurfcalcError, UnknownCatalogEntry
from .expression import compile_expression
from .fields import (NormalExtension, SurfaceScalarField, SCALAR_FIELDS, VECTOR_FIELDS,
                     make_scalar_field, make_vector_field, normal_field, surface_divergence,
                     kelvin_stokes_divergence, tangential_divergence)
from .front_tracking import SIMULATIONS, Simulation1D, simulate_interface_1d
from .quadrature import QuadratureRule, integrate_surface
from .scenarios import JUMP_CASES, make_jump_case, reduction_chain
from .transport import make_report

KINDS = ("geometry", "area", "divergence", "transport", "reynolds", "jacobian",
         "generalized-reynolds", "jump", "simulate-1d")


@dataclass
class Overrides:
    quad_order: int | None = None
    fd_step: float | None = None
    tol: float | None = None


@dataclass
class Scenario:
    name: str
    kind: str
    source: str
    config: dict
    run: Callable

    def execute(self):
        return self.run()


@dataclass
class Outcome:
    name: str
    kind: str
    source: str
    config: dict
    checks: list = field(default_factory=list)
    series: list = field(default_factory=list)
    error: dict | None = None

    @property
    def passed(self):
        return self.error is None and all(c.passed for c in self.checks)

    def to_dict(self):
        return {"name": self.name, "kind": self.kind, "source": self.source,
                "config": self.config, "passed": self.passed, "error": self.error,
                "checks": [c.to_dict() for c in self.checks]}


# -- shared readers -----------------------------------------------------------------

def _catalog(cfg, key, table, factory, default=None):
    name = cfg.get_str(key, default, required=default is None)
    if name not in table:
        raise cfg.error(key, f"unknown {key.split('.')[-1].replace('_', ' ')} {name!r}")
    defaults = table[name][1]
    try:
        return factory(name, **cfg.params(key, defaults))
    except UnknownCatalogEntry as exc:
        raise cfg.error(key, str(exc)) from None


def _chart(cfg, key="chart"):
    return _catalog(cfg, key, geometry.CHARTS, geometry.make_chart)


def _moving_chart(cfg, key="moving_chart"):
    mc = _catalog(cfg, key, moving.MOVING_CHARTS, moving.make_moving_chart)
    T = cfg.get_float("T", 1.0)
    return moving.MovingChart(mc.name, mc.func, mc.domain, mc.params, T)


def _flow(cfg, key="flow", default=None):
    return _catalog(cfg, key, moving.FLOWS, moving.make_flow, default)


def _scalar_field(cfg, key="field", default="constant"):
    name = cfg.get_str(key, default)
    if name == "surface_expr":
        src = cfg.get_str(f"{key}.expr", required=True)
        extend = cfg.get_bool(f"{key}.extend", False)
        try:
            f = compile_expression(src, ("u1", "u2", "t"))
        except SurfcalcError as exc:
            raise cfg.error(f"{key}.expr", str(exc)) from None
        fld = SurfaceScalarField(lambda u, t: f(u[0], u[1], t) + 0.0 * u[0], f"surface({src})")
        return NormalExtension(fld) if extend else fld
    if name not in SCALAR_FIELDS:
        raise cfg.error(key, f"unknown scalar field {name!r}")
    try:
        return make_scalar_field(name, **cfg.params(key, SCALAR_FIELDS[name][1]))
    except (UnknownCatalogEntry, SurfcalcError) as exc:
        raise cfg.error(key, str(exc)) from None


def _vector_field(cfg, key="field", default="identity"):
    name = cfg.get_str(key, default)
    if name not in VECTOR_FIELDS:
        raise cfg.error(key, f"unknown vector field {name!r}")
    try:
        return make_vector_field(name, **cfg.params(key, VECTOR_FIELDS[name][1]))
    except (UnknownCatalogEntry, SurfcalcError) as exc:
        raise cfg.error(key, str(exc)) from None


def _rule(cfg, ov, default=16):
    order = ov.quad_order if ov.quad_order is not None else cfg.get_int("quad.order", default)
    cfg.get_int("quad.order")  # mark as read even when overridden
    if order is None or order < 2:
        raise cfg.error("quad.order", "quad.order must be an integer >= 2")
    return QuadratureRule(order)


def _tol(cfg, ov, default):
    value = cfg.get_float("tol", default)
    return ov.tol if ov.tol is not None else value


def _fd_step(cfg, ov):
    value = cfg.get_float("fd.step")
    return ov.fd_step if ov.fd_step is not None else value


def _method(cfg, default="central"):
    method = cfg.get_str("fd.method", default)
    if method not in ("central", "richardson"):
        raise cfg.error("fd.method", "fd.method must be central or richardson")
    return method


def _refine(cfg):
    levels = cfg.get_int("refine.levels", 0)
    if levels < 0:
        raise cfg.error("refine.levels", "refine.levels must be >= 0")
    return levels


def _expected(cfg, key="expected"):
    return cfg.get_float(key)


def _refinement_rows(name, check, h0, levels, fn):
    """Re-run ``fn(h)`` with ``h0 / 2^k`` and record residuals and empirical orders."""
    rows, errs, hs = [], [], []
    for k in range(levels + 1):
        h = h0 / 2 ** k
        rep = fn(h)
        hs.append(h)
        errs.append(rep.abs_residual)
    orders = [None] + list(transport.convergence_orders(hs, errs)) if levels else [None]
    for h, e, o in zip(hs, errs, orders):
        rows.append({"check": check, "h": h, "abs_residual": e,
                     "order": None if o is None or not np.isfinite(o) else float(o)})
    return rows


def _closed_form(name, lhs_expected, rhs, tol):
    return make_report(name, "closed_form", lhs_expected, rhs, tol)


# -- builders per kind ----------------------------------------------------------------

def _worst(name, check, a, b, tol, label="rhs"):
    a, b = np.ravel(a), np.ravel(b)
    k = int(np.argmax(np.abs(a - b)))
    return make_report(name, check, a[k], {label: b[k]}, tol, points=int(a.size))


def build_geometry(cfg, ov, name):
    chart = _chart(cfg)
    n = cfg.get_int("points", 50)
    seed = cfg.get_int("seed", 0)
    tol = _tol(cfg, ov, 1e-10)
    split_tol = cfg.get_float("split.tol", 1e-8)
    vec = _vector_field(cfg, "field", "polynomial_vector")

    def run():
        rng = np.random.default_rng(seed)
        u = chart.random_points(rng, n)
        fr = geometry.frame_at(chart, u)
        nu = normal_field()
        checks = [
            _worst(name, "normal_divergence", surface_divergence(nu, chart, u),
                   -2.0 * fr.mean_curvature, tol, "minus_twice_mean_curvature"),
            _worst(name, "weingarten", fr.normal_derivatives(),
                   geometry.normal_jet_derivative(chart, u), tol, "jet"),
            _worst(name, "metric_compatibility", geometry.metrinilic_residual(chart, u),
                   np.zeros((n, 2, 2, 2)), tol, "zero"),
            _worst(name, "kelvin_stokes", kelvin_stokes_divergence(vec, chart, u),
                   tangential_divergence(vec, chart, u), split_tol, "tangential"),
        ]
        return checks, []
    return run


def build_area(cfg, ov, name):
    chart = _chart(cfg)
    psi = _scalar_field(cfg, "field", "constant")
    rule = _rule(cfg, ov)
    tol = _tol(cfg, ov, 1e-8)
    expected = cfg.get_float("expected", required=True)
    levels = _refine(cfg)

    def run():
        value = integrate_surface(chart, psi, rule)
        checks = [make_report(name, "surface_integral", value, {"expected": expected}, tol,
                              rule.order)]
        series = []
        for k in range(levels + 1):
            order = rule.order * 2 ** k
            v = integrate_surface(chart, psi, QuadratureRule(order))
            series.append({"check": "quadrature", "order": order, "value": v,
                           "abs_error": abs(v - expected)})
        return checks, series if levels else []
    return run


def build_divergence(cfg, ov, name):
    chart = _chart(cfg)
    a = _vector_field(cfg)
    rule = _rule(cfg, ov, 32)
    tol = _tol(cfg, ov, 1e-7)

    def run():
        return [transport.verify_surface_divergence(chart, a, tol, rule, name=name)], []
    return run


def build_transport(cfg, ov, name):
    mc = _moving_chart(cfg)
    psi = _scalar_field(cfg)
    t = cfg.get_float("t", 0.0)
    rule = _rule(cfg, ov)
    h = _fd_step(cfg, ov)
    tol = _tol(cfg, ov, 1e-6)
    form_tol = cfg.get_float("form_tol", transport.FORM_TOL)
    method = _method(cfg)
    expected = _expected(cfg)
    levels = _refine(cfg)

    def verify(hh):
        return transport.verify_surface_transport(mc, psi, t, tol, rule, hh, form_tol, method,
                                                  name=name)

    def run():
        rep = verify(h)
        checks = [rep]
        if expected is not None:
            checks.append(_closed_form(name, expected, rep.rhs, tol))
        series = _refinement_rows(name, "surface_transport", rep.fd_step, levels, verify) \
            if levels else []
        return checks, series
    return run


def build_reynolds(cfg, ov, name):
    fm = _flow(cfg)
    psi = _scalar_field(cfg)
    t = cfg.get_float("t", 0.0)
    rule = _rule(cfg, ov)
    h = _fd_step(cfg, ov)
    tol = _tol(cfg, ov, 1e-6)
    method = _method(cfg)
    expected = _expected(cfg)
    levels = _refine(cfg)
    region = transport.unit_cube()

    def verify(hh):
        return transport.verify_reynolds(fm, psi, region, t, tol, rule, hh, method, name=name)

    def run():
        rep = verify(h)
        checks = [rep]
        if expected is not None:
            checks.append(_closed_form(name, expected, rep.rhs, tol))
        series = _refinement_rows(name, "reynolds", rep.fd_step, levels, verify) if levels else []
        return checks, series
    return run


def build_jacobian(cfg, ov, name):
    fm = _flow(cfg)
    t = cfg.get_float("t", 0.0)
    y = cfg.get_floats("y", [0.3, 0.4, 0.5], 3)
    h = _fd_step(cfg, ov)
    tol = _tol(cfg, ov, 1e-8)
    method = _method(cfg, "richardson")
    expected = _expected(cfg)
    levels = _refine(cfg)

    def verify(hh):
        return transport.verify_jacobian_rate(fm, t, y, tol, hh, method, name=name)

    def run():
        rep = verify(h)
        checks = [rep]
        if expected is not None:
            checks.append(_closed_form(name, expected, rep.rhs, tol))
        series = _refinement_rows(name, "jacobian_rate", rep.fd_step, levels, verify) \
            if levels else []
        return checks, series
    return run


GR_SCENARIOS = {
    "planar_cube": (transport.planar_cube_scenario,
                    {"speed": 0.2, "psi1": 1.0, "psi2": 3.0, "height": 0.5}),
    "curved_interface": (transport.curved_interface_scenario, {"speed": 0.2, "amp": 0.1}),
}


def build_generalized_reynolds(cfg, ov, name):
    key = "scenario"
    sname = cfg.get_str(key, required=True)
    if sname not in GR_SCENARIOS:
        raise cfg.error(key, f"unknown generalized-reynolds scenario {sname!r}")
    factory, defaults = GR_SCENARIOS[sname]
    params = cfg.params(key, defaults)
    if sname == "curved_interface" and "flow" in cfg:
        params["flow"] = _flow(cfg)
    sc = factory(**params)
    t = cfg.get_float("t", 0.0)
    rule = _rule(cfg, ov)
    h = _fd_step(cfg, ov)
    tol = _tol(cfg, ov, 1e-6)
    method = _method(cfg)
    material = cfg.get_bool("compare_two_piece", False)
    two_piece_tol = cfg.get_float("two_piece.tol", 1e-10)
    expected = _expected(cfg)
    levels = _refine(cfg)

    def verify(hh):
        return transport.verify_generalized_reynolds(sc, t, tol, rule, hh, method)

    def run():
        rep = verify(h)
        checks = [rep]
        if expected is not None:
            checks.append(_closed_form(name, expected, rep.rhs, tol))
        if material:
            two = transport.two_piece_reynolds(sc, t, tol, rule, rep.fd_step, method)
            checks.append(two)
            checks.append(make_report(name, "two_piece_agreement", rep.lhs,
                                      {"two_piece_lhs": two.lhs}, two_piece_tol))
        series = _refinement_rows(name, "generalized_reynolds", rep.fd_step, levels, verify) \
            if levels else []
        return checks, series
    return run


def build_jump(cfg, ov, name):
    case = cfg.get_str("case", required=True)
    t = cfg.get_float("t", 0.2)
    tol = _tol(cfg, ov, 1e-9)
    if case == "reduction":
        cfg.params("case", {})

        def run_reduction():
            r = reduction_chain(t)
            return [_worst(name, "surface_vs_curve", r["surface"], r["curve"], tol, "curve"),
                    _worst(name, "curve_vs_point", r["curve"], r["point"], tol, "point")], []
        return run_reduction
    if case not in JUMP_CASES:
        raise cfg.error("case", f"unknown jump case {case!r}")
    defaults = dict(JUMP_CASES[case][1])
    if case == "classical":
        defaults["speed"] = 0.0
    try:
        spec = make_jump_case(case, **cfg.params("case", defaults))
    except UnknownCatalogEntry as exc:
        raise cfg.error("case", str(exc)) from None
    n = cfg.get_int("points", 20)
    seed = cfg.get_int("seed", 0)
    expect_zero = cfg.get_bool("expect_zero", case in ("classical", "surfactant_sphere"))

    def run():
        rng = np.random.default_rng(seed)
        u = spec.interface.random_points(rng, n)
        res = balance.interface_jump_residuals(spec, t, u)
        checks = [_worst(name, f"forms_{form}", res["full"], res[form], tol, form)
                  for form in ("concise", "coordinate") if form in res and "full" in res]
        if expect_zero:
            checks.extend(_worst(name, f"residual_{form}", res[form], np.zeros_like(res[form]),
                                 tol, "zero") for form in res)
        return checks, []
    return run


def build_simulation(cfg, ov, name):
    preset = cfg.get_str("preset")
    base = {}
    if preset is not None:
        if preset not in SIMULATIONS:
            raise cfg.error("preset", f"unknown 1D simulation {preset!r}")
        base = dict(SIMULATIONS[preset])
    states = {}
    for side in ("left", "right"):
        old = base.get(side)
        vals = {}
        for q in ("psi", "v", "j"):
            default = getattr(old, q) if old is not None else (None if q == "psi" else 0.0)
            vals[q] = cfg.get_float(f"states.{side}.{q}", default)
            if vals[q] is None:
                raise ConfigParse(f"missing required key 'states.{side}.psi'", cfg.path, None)
        states[side] = balance.State1D(**vals)
    rh = cfg.get_bool("interface.rh", False)
    w = cfg.get_float("interface.w", base.get("w"))
    if rh and "interface.w" in cfg:
        raise cfg.error("interface.w", "give either interface.w or interface.rh, not both")
    if rh:
        w = None
    kwargs = dict(left=states["left"], right=states["right"],
                  p0=cfg.get_float("interface.p0", base.get("p0", 0.0)), w=w,
                  psi0=cfg.get_float("point.psi0", base.get("psi0", 0.0)),
                  xi=cfg.get_float("point.xi", base.get("xi", 0.0)),
                  t_end=cfg.get_float("t_end", 1.0), dt=cfg.get_float("dt", 1e-3),
                  domain=(cfg.get_float("domain.lo", -5.0), cfg.get_float("domain.hi", 5.0)),
                  cells=cfg.get_int("grid.cells", 200), name=name)
    try:
        sim = Simulation1D(**kwargs)
    except SurfcalcError as exc:
        raise ConfigParse(str(exc), cfg.path, None) from None
    tol = _tol(cfg, ov, 1e-12)

    def run():
        res = simulate_interface_1d(sim)
        t_end = float(res.t[-1])
        checks = [
            make_report(name, "ledger", res.ledger[-1], {"initial": res.ledger[0]}, tol,
                        max_step_drift=res.max_drift, steps=len(res.t) - 1),
            make_report(name, "step_drift", res.max_drift, {"zero": 0.0}, tol),
            make_report(name, "front_position", res.p[-1], {"p0_plus_wt": sim.p0 + res.speed * t_end},
                        tol, speed=res.speed, point_rate=res.point_rate),
        ]
        return checks, list(res.rows())
    return run


BUILDERS = {
    "geometry": build_geometry,
    "area": build_area,
    "divergence": build_divergence,
    "transport": build_transport,
    "reynolds": build_reynolds,
    "jacobian": build_jacobian,
    "generalized-reynolds": build_generalized_reynolds,
    "jump": build_jump,
    "simulate-1d": build_simulation,
}


def build(cfg: ScenarioConfig, ov: Overrides | None = None) -> Scenario:
    """Validate a config completely and return a runnable scenario."""
    ov = ov or Overrides()
    kind = cfg.get_str("kind", required=True)
    if kind not in BUILDERS:
        raise cfg.error("kind", f"unknown scenario kind {kind!r}; expected one of {list(KINDS)}")
    name = cfg.get_str("name", os.path.splitext(os.path.basename(cfg.path))[0])
    run = BUILDERS[kind](cfg, ov, name)
    cfg.check_all_used()
    return Scenario(name, kind, cfg.path, cfg.echo(), run)


def execute(sc: Scenario) -> Outcome:
    out = Outcome(sc.name, sc.kind, sc.source, sc.config)
    try:
        out.checks, out.series = sc.execute()
    except SurfcalcError as exc:
        out.error = {"type": type(exc).__name__, "message": f"{sc.name}: {exc}"}
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        out.error = {"type": type(exc).__name__, "message": f"{sc.name}: {exc}"}
    return out


__all__ = ["KINDS", "Overrides", "Scenario", "Outcome", "build", "execute", "BUILDERS",
           "GR_SCENARIOS"]
