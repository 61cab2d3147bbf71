"""Acceptance criteria 1-10, one pass/fail line each.

Each criterion is a function returning ``(passed, summary)``.  Under pytest
every criterion is its own test and the lines are repeated in the terminal
summary; run the file directly to print just the lines.
"""

import numpy as np
import pytest

from surfcalc import geometry, moving
from surfcalc.balance import interface_jump_residuals
from surfcalc.fields import (AmbientVectorField, NormalField, polynomial, polynomial_vector,
                             surface_divergence, surface_divergence_split, surface_gradient,
                             constant, constant_vector, coordinate, planar_radial)
from surfcalc.front_tracking import SIMULATIONS, make_simulation, simulate_interface_1d
from surfcalc.quadrature import integrate_surface
from surfcalc.scenarios import classical_plane, reduction_chain, rotating_surface_flux, smooth_interface
from surfcalc.tensor import transform_cross
from surfcalc.transport import (convergence_orders, curved_interface_scenario,
                                planar_cube_scenario, two_piece_reynolds, unit_cube,
                                verify_generalized_reynolds, verify_jacobian_rate,
                                verify_reynolds, verify_surface_divergence,
                                verify_surface_transport)

RESULTS = {}


def _rel(a, b):
    return np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))


def criterion_1():
    rng = np.random.default_rng(1)
    sph = geometry.sphere()
    u = sph.random_points(rng, 50)
    fr = geometry.frame_at(sph, u)
    th = u[:, 0]
    s, c = np.sin(th), np.cos(th)
    g = np.zeros((50, 2, 2))
    g[:, 0, 0], g[:, 1, 1] = 1.0, s * s
    gam = np.zeros((50, 2, 2, 2))
    gam[:, 0, 1, 1] = -s * c
    gam[:, 1, 0, 1] = gam[:, 1, 1, 0] = c / s
    errs = {"g": np.max(np.abs(fr.metric - g)),
            "b": np.max(np.abs(fr.curvature + g)),
            "kappa": np.max(np.abs(fr.mean_curvature + 1.0)),
            "christoffel": np.max(np.abs(fr.christoffel - gam))}
    tor = geometry.torus(2.0, 0.5)
    ut = tor.random_points(rng, 50)
    kt = geometry.frame_at(tor, ut).mean_curvature
    errs["torus_kappa"] = np.max(np.abs(kt - geometry.torus_mean_curvature(2.0, 0.5, ut[:, 1])))
    worst = max(errs.values())
    return worst <= 1e-10, f"sphere g, b, kappa, Gamma and torus kappa: worst error {worst:.2e} (tol 1e-10)"


def criterion_2():
    rng = np.random.default_rng(2)
    psi, a = polynomial(), polynomial_vector()
    prod = AmbientVectorField(lambda x, t: tuple(psi.fn(x, t) * ai for ai in a.fn(x, t)), "psi_a")
    normal_err = prod_err = split_err = 0.0
    for name in geometry.CHARTS:
        ch = geometry.make_chart(name)
        u = ch.random_points(rng, 100)
        fr = geometry.frame_at(ch, u)
        div_nu = surface_divergence(NormalField(), ch, u)
        normal_err = max(normal_err, np.max(np.abs(div_nu + 2.0 * fr.mean_curvature)))
        lhs = surface_divergence(prod, ch, u)
        rhs = (psi.value(fr.point) * surface_divergence(a, ch, u)
               + np.einsum("...i,...i->...", a.value(fr.point), surface_gradient(psi, ch, u)))
        prod_err = max(prod_err, np.max(_rel(lhs, rhs)))
        tan, curv = surface_divergence_split(a, ch, u, check=False)
        split_err = max(split_err, np.max(_rel(tan + curv, surface_divergence(a, ch, u))))
    ok = normal_err <= 1e-10 and prod_err <= 1e-9 and split_err <= 1e-8
    return ok, (f"div nu = -2 kappa {normal_err:.2e} (1e-10), product rule {prod_err:.2e} (1e-9), "
                f"split {split_err:.2e} (1e-8) over {len(geometry.CHARTS)} charts")


def criterion_3():
    disc = verify_surface_divergence(geometry.disc(), planar_radial(), tol=1e-7, rule=32)
    cap = verify_surface_divergence(geometry.spherical_cap(), constant_vector(0, 0, 1), tol=1e-7,
                                    rule=32)
    # closed forms: 2 pi R for the disc, -2 pi sin^2(theta_max) for e3 through the cap edge
    oracle = max(abs(disc.lhs - 2 * np.pi), abs(cap.lhs + 1.5 * np.pi))
    ok = (disc.passed and cap.passed and max(disc.abs_residual, cap.abs_residual) <= 1e-7
          and oracle <= 1e-7)
    return ok, (f"disc residual {disc.abs_residual:.2e}, cap residual {cap.abs_residual:.2e}, "
                f"closed forms {oracle:.2e} (tol 1e-7, order 32)")


def criterion_4():
    c = 0.5
    rep = verify_surface_transport(moving.expand_sphere(1.0, c), constant(1.0), 0.0, tol=1e-6,
                                   rule=16, h=1e-4)
    oracle = 8 * np.pi * c
    rel_oracle = abs(rep.lhs - oracle) / oracle
    wave = verify_surface_transport(moving.wave_graph(0.1, 2 * np.pi, 1.0), coordinate(3), 0.0,
                                    tol=1e-6, rule=16, h=1e-4)
    ok = (rep.passed and rep.rel_residual <= 1e-6 and rel_oracle <= 1e-6
          and len(wave.rhs) == 5 and wave.form_spread <= 1e-9 and wave.passed)
    return ok, (f"sphere FD-vs-quadrature rel {rep.rel_residual:.2e}, vs 8 pi R c {rel_oracle:.2e} "
                f"(1e-6); wave graph 5-form spread {wave.form_spread:.2e} (1e-9)")


def criterion_5():
    fm = moving.linear_flow(np.diag([1.0, 2.0, 3.0]))
    t = 0.2
    jac = verify_jacobian_rate(fm, t, np.array([0.3, -0.2, 0.5]), tol=1e-8)
    oracle = 6.0 * np.exp(6.0 * t)
    jac_err = max(abs(jac.lhs - oracle), *(abs(v - oracle) for v in jac.rhs.values())) / oracle
    rey = verify_reynolds(fm, constant(1.0), unit_cube(), t, tol=1e-6)
    spread = abs(rey.rhs["divergence"] - rey.rhs["flux"]) / oracle
    vol_err = abs(rey.rhs["divergence"] - oracle) / oracle
    ok = jac.passed and jac_err <= 1e-8 and spread <= 1e-9 and vol_err <= 1e-8 and rey.passed
    return ok, (f"dJ/dt vs 6 exp(6t) rel {jac_err:.2e} (1e-8); divergence vs flux form "
                f"{spread:.2e} (1e-9)")


def criterion_6():
    cube = verify_generalized_reynolds(planar_cube_scenario(), 0.0, tol=1e-12)
    cube_oracle = max(abs(cube.lhs + 0.4), *(abs(v + 0.4) for v in cube.rhs.values()))
    curved = verify_generalized_reynolds(curved_interface_scenario(), 0.0, tol=1e-6)
    sc = curved_interface_scenario(speed=0.0, flow=moving.swirl_flow())
    gen = verify_generalized_reynolds(sc, 0.0, tol=1e-6)
    two = two_piece_reynolds(sc, 0.0, tol=1e-6, h=gen.fd_step)
    material = max(abs(gen.lhs - two.lhs),
                   *(abs(g - w) for g in gen.rhs.values() for w in two.rhs.values()))
    ok = (cube.abs_residual <= 1e-12 and cube_oracle <= 1e-12 and curved.rel_residual <= 1e-6
          and curved.passed and material <= 1e-10)
    return ok, (f"planar cube abs {cube.abs_residual:.2e} (1e-12), curved rel "
                f"{curved.rel_residual:.2e} (1e-6), material vs two-piece {material:.2e} (1e-10)")


def criterion_7():
    u = np.array([[0.2, 0.3], [0.7, 0.6], [0.5, 0.1]])
    rh = classical_plane()
    at_rh = max(np.max(np.abs(r)) for r in interface_jump_residuals(rh, 0.3, u).values())
    speed = rh.interface.params["c"]
    off = classical_plane(speed=speed + 0.1)
    off_rh = min(np.min(np.abs(r)) for r in interface_jump_residuals(off, 0.3, u).values())
    rng = np.random.default_rng(7)
    spread = 0.0
    for spec in (smooth_interface(), rotating_surface_flux()):
        pts = spec.interface.random_points(rng, 50, margin=0.1)
        res = interface_jump_residuals(spec, 0.4, pts)
        vals = np.stack([res[k] for k in ("full", "concise", "coordinate")])
        spread = max(spread, np.max(vals.max(0) - vals.min(0)))
    chain = reduction_chain()
    chain_err = max(np.max(np.abs(chain["surface"] - chain["curve"])),
                    np.max(np.abs(chain["surface"] - chain["point"])))
    ok = at_rh <= 1e-12 and off_rh >= 0.1 and spread <= 1e-9 and chain_err <= 1e-10
    return ok, (f"RH speed residual {at_rh:.2e}, off-speed residual {off_rh:.2e} (nonzero); "
                f"form spread {spread:.2e} (1e-9); 3D-2D-1D {chain_err:.2e} (1e-10)")


def criterion_8():
    rng = np.random.default_rng(8)
    a = rng.normal(size=(1000, 3, 3))
    t1, t2 = rng.normal(size=(1000, 3)), rng.normal(size=(1000, 3))
    lhs = transform_cross(a, t1, t2, check=False)
    # right side from independent library routines
    rhs = np.einsum("n,nji,nj->ni", np.linalg.det(a), np.linalg.inv(a), np.cross(t1, t2))
    scale = (np.linalg.norm(np.einsum("nij,nj->ni", a, t1), axis=-1)
             * np.linalg.norm(np.einsum("nij,nj->ni", a, t2), axis=-1))
    worst = float(np.max(np.linalg.norm(lhs - rhs, axis=-1) / scale))
    return worst <= 1e-12, f"A t1 x A t2 = det(A) A^-T (t1 x t2) on 1000 matrices: rel {worst:.2e} (1e-12)"


def criterion_9():
    worst = 0.0
    for name in SIMULATIONS:
        res = simulate_interface_1d(make_simulation(name, dt=1e-3, t_end=1.0))
        assert len(res.t) == 1001
        worst = max(worst, res.max_drift)
    dt = 2.0 ** -10
    exact = True
    for name in ("density_shock", "burgers", "contact"):
        res = simulate_interface_1d(make_simulation(name, dt=dt, t_end=1000 * dt))
        n = np.arange(1001)
        exact &= bool(np.array_equal(res.p, res.config.p0 + res.speed * (n * dt)))
        exact &= res.speed in (-1.0, 0.5, 1.0)
    ok = worst <= 1e-12 and exact
    return ok, (f"ledger drift {worst:.2e} per step over 1000 steps, {len(SIMULATIONS)} presets "
                f"(1e-12); dyadic fronts exact: {exact}")


def criterion_10():
    steps = np.array([1e-2, 5e-3, 2.5e-3])
    mc = moving.wave_graph(0.1, 2 * np.pi, 1.0)
    psi = polynomial()
    errs = [verify_surface_transport(mc, psi, 0.2, tol=1.0, h=h).abs_residual for h in steps]
    fd_transport = convergence_orders(steps, errs)
    fm = moving.nonlinear_shear_flow(0.5)
    errs = [verify_reynolds(fm, polynomial(), unit_cube(), 0.3, tol=1.0, h=h).abs_residual
            for h in steps]
    fd_reynolds = convergence_orders(steps, errs)
    fd_min = float(min(fd_transport.min(), fd_reynolds.min()))
    # spherical cap area pi: smooth, non-periodic in theta
    cap = geometry.spherical_cap()
    orders = [2, 4, 8]
    qerr = [abs(integrate_surface(cap, 1.0, n) - np.pi) for n in orders]
    q_rates = convergence_orders(1.0 / np.array(orders), qerr)
    ok = fd_min >= 1.9 and float(q_rates.min()) > 4.0
    return ok, (f"lowest FD order {fd_min:.3f} (>= 1.9); quadrature rates "
                f"{', '.join(f'{r:.1f}' for r in q_rates)} under order doubling (> 4)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


def _line(k, ok, summary):
    return f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {summary}"


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k):
    ok, summary = CRITERIA[k - 1]()
    line = _line(k, ok, summary)
    RESULTS[k] = line
    print(line)
    assert ok, line


if __name__ == "__main__":
    for k, fn in enumerate(CRITERIA, 1):
        print(_line(k, *fn()))
