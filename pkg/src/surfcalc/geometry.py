"""Charts of surfaces in R^3 and their first/second fundamental forms.

A :class:`Chart` wraps a map ``(u1, u2) -> (x1, x2, x3)`` written with the
elementary functions of :mod:`surfcalc.jet`, so the same code evaluates
points and their exact first and second parameter derivatives.
:func:`frame_at` turns those derivatives into a :class:`SurfaceFrame`.

Surface indices (alpha, beta, ...) are 0-based in every array and argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jet
from .errors import ConsistencyError, ContractViolation, DegenerateChart, UnknownCatalogEntry
from .jet import Jet2

TOL_RANK = 1e-10
POLE_MARGIN = 1e-6
DOMAIN_SLACK = 1e-12


# -- jet evaluation of parametrized maps ------------------------------------

def _components(comps, shape, n):
    """Stack a tuple of jets/constants into value, gradient and Hessian arrays."""
    vals, grads, hesss = [], [], []
    for c in comps:
        if isinstance(c, Jet2):
            if c.n != n:
                raise ContractViolation(f"map returned a jet over {c.n} variables, expected {n}")
            vals.append(np.broadcast_to(c.val, shape))
            grads.append(np.broadcast_to(c.grad, shape + (n,)))
            hesss.append(np.broadcast_to(c.hess, shape + (n, n)))
        else:
            vals.append(np.broadcast_to(np.asarray(c, dtype=float), shape))
            grads.append(np.zeros(shape + (n,)))
            hesss.append(np.zeros(shape + (n, n)))
    return np.stack(vals, -1), np.stack(grads, -2), np.stack(hesss, -3)


def map_derivatives(func, *args):
    """Evaluate ``func(*jets)`` with one jet variable per argument.

    Returns ``(x, dx, ddx)`` with shapes ``(..., m)``, ``(..., m, n)`` and
    ``(..., m, n, n)`` where ``m`` is the number of returned components and
    ``n = len(args)``.
    """
    jets = Jet2.variables(*args)
    shape = jets[0].shape
    out = func(*jets)
    if isinstance(out, Jet2) or np.ndim(out) == 0:
        out = (out,)
    return _components(out, shape, len(args))


def as_points(u):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != 2:
        raise ContractViolation(f"parameter points need a trailing axis of length 2, got {u.shape}")
    return u


# -- charts -----------------------------------------------------------------

@dataclass(frozen=True)
class Chart:
    """Parametrization ``Phi(u1, u2)`` of a surface patch over a rectangle.

    ``func`` must accept jets (or plain arrays) and return a 3-tuple.
    ``domain`` is ``((lo1, hi1), (lo2, hi2))``.
    """

    name: str
    func: Callable
    domain: tuple
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        u = as_points(u)
        return np.stack(np.broadcast_arrays(*[np.asarray(c, dtype=float)
                                              for c in self.func(u[..., 0], u[..., 1])]), -1)

    def check_domain(self, u):
        u = as_points(u)
        (a1, b1), (a2, b2) = self.domain
        s1 = DOMAIN_SLACK * max(1.0, abs(a1), abs(b1))
        s2 = DOMAIN_SLACK * max(1.0, abs(a2), abs(b2))
        ok = ((u[..., 0] >= a1 - s1) & (u[..., 0] <= b1 + s1)
              & (u[..., 1] >= a2 - s2) & (u[..., 1] <= b2 + s2))
        if not np.all(ok):
            raise ContractViolation(f"parameter point outside the domain of chart {self.name!r}")

    def derivatives(self, u):
        u = as_points(u)
        return map_derivatives(self.func, u[..., 0], u[..., 1])

    def random_points(self, rng, n, margin=0.05):
        """Uniform random parameter points, kept ``margin`` (relative) from the edges."""
        (a1, b1), (a2, b2) = self.domain
        m1, m2 = margin * (b1 - a1), margin * (b2 - a2)
        return np.stack([rng.uniform(a1 + m1, b1 - m1, n), rng.uniform(a2 + m2, b2 - m2, n)], -1)


def reparametrize(chart, inner, domain, name=None):
    """Chart ``Phi(m(v))`` for a jet-evaluable parameter map ``m(v1, v2) -> (u1, u2)``."""
    def func(v1, v2):
        u1, u2 = inner(v1, v2)
        return chart.func(u1, u2)
    return Chart(name or f"{chart.name}_reparam", func, domain, dict(chart.params))


# -- the frame --------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceFrame:
    """Geometric data at a batch of parameter points.

    Arrays carry the batch shape in front.  ``tangents[..., a, :]`` is tau_a,
    ``second[..., a, b, :]`` is d^2 Phi / du_a du_b and
    ``christoffel[..., c, a, b]`` is Gamma^c_{ab}.
    """

    u: np.ndarray
    point: np.ndarray
    tangents: np.ndarray
    second: np.ndarray
    normal: np.ndarray
    metric: np.ndarray
    metric_inv: np.ndarray
    det_g: np.ndarray
    sqrt_g: np.ndarray
    curvature: np.ndarray
    mean_curvature: np.ndarray
    christoffel: np.ndarray

    @classmethod
    def from_derivatives(cls, u, x, d1, d2):
        """Build the frame from ``Phi``, its Jacobian ``(..., 3, 2)`` and Hessian ``(..., 3, 2, 2)``."""
        tau = np.swapaxes(d1, -1, -2)
        second = np.moveaxis(d2, -3, -1)
        cr = np.cross(tau[..., 0, :], tau[..., 1, :])
        area = np.linalg.norm(cr, axis=-1)
        if np.any(~(area > TOL_RANK)):
            raise DegenerateChart(
                f"tangent vectors are linearly dependent (|tau1 x tau2| = {np.min(area):.3e})")
        nu = cr / area[..., None]
        g = np.einsum("...ai,...bi->...ab", tau, tau)
        det_g = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
        ginv = np.empty_like(g)
        ginv[..., 0, 0] = g[..., 1, 1]
        ginv[..., 1, 1] = g[..., 0, 0]
        ginv[..., 0, 1] = -g[..., 0, 1]
        ginv[..., 1, 0] = -g[..., 1, 0]
        ginv /= det_g[..., None, None]
        b = np.einsum("...abi,...i->...ab", second, nu)
        kappa = 0.5 * np.einsum("...ab,...ab->...", ginv, b)
        # dg[a, d, c] = d g_ad / du_c
        dg = (np.einsum("...aci,...di->...adc", second, tau)
              + np.einsum("...ai,...dci->...adc", tau, second))
        lowered = 0.5 * (dg + np.swapaxes(dg, -3, -1) - np.swapaxes(dg, -2, -1))
        # lowered[a, d, b] = 1/2 (d_b g_ad + d_a g_bd - d_d g_ab)
        gamma = np.einsum("...cd,...adb->...cab", ginv, lowered)
        return cls(u=np.asarray(u, dtype=float), point=x, tangents=tau, second=second,
                   normal=nu, metric=g, metric_inv=ginv, det_g=det_g, sqrt_g=np.sqrt(det_g),
                   curvature=b, mean_curvature=kappa, christoffel=gamma)

    @property
    def shape(self):
        return self.sqrt_g.shape

    def normal_derivatives(self):
        """``dnu/du_a`` for both a, shape ``(..., 2, 3)``, from the Weingarten relation."""
        coeff = -np.einsum("...bc,...ca->...ab", self.metric_inv, self.curvature)
        return np.einsum("...ab,...bi->...ai", coeff, self.tangents)

    def dual_tangents(self):
        """Contravariant tangents ``g^{ab} tau_b``, shape ``(..., 2, 3)``."""
        return np.einsum("...ab,...bi->...ai", self.metric_inv, self.tangents)

    def frame_matrix(self):
        """Matrix with columns tau_1, tau_2, nu."""
        return np.stack([self.tangents[..., 0, :], self.tangents[..., 1, :], self.normal], -1)


def frame_at(chart, u):
    u = as_points(u)
    chart.check_domain(u)
    x, d1, d2 = chart.derivatives(u)
    return SurfaceFrame.from_derivatives(u, x, d1, d2)


def normal_derivative_at(chart, u, alpha):
    if alpha not in (0, 1):
        raise ContractViolation("surface index must be 0 or 1")
    return frame_at(chart, u).normal_derivatives()[..., alpha, :]


def normal_jet_derivative(chart, u):
    """``dnu/du_a`` by differentiating the normalized cross product directly."""
    u = as_points(u)
    chart.check_domain(u)
    _, d1, d2 = chart.derivatives(u)
    taus = []
    for a in range(2):
        taus.append(tuple(Jet2.first_order(d1[..., i, a], d2[..., i, a, :]) for i in range(3)))
    cr = jet.cross(taus[0], taus[1])
    nrm = jet.norm(cr)
    nu = [c / nrm for c in cr]
    return np.stack([np.stack([nu[i].grad[..., a] for i in range(3)], -1) for a in range(2)], -2)


def metric_derivatives(frame):
    """``d g_ab / du_c`` with shape ``(..., 2, 2, 2)`` indexed [a, b, c]."""
    s, t = frame.second, frame.tangents
    return (np.einsum("...aci,...bi->...abc", s, t) + np.einsum("...ai,...bci->...abc", t, s))


def metrinilic_residual(chart, u):
    """``nabla_c g_ab`` assembled from frame data; vanishes identically."""
    fr = frame_at(chart, u)
    dg = metric_derivatives(fr)
    gam, g = fr.christoffel, fr.metric
    # nabla_c g_ab = d_c g_ab - Gamma^d_{ca} g_db - Gamma^d_{cb} g_ad
    return (dg - np.einsum("...dca,...db->...abc", gam, g)
            - np.einsum("...dcb,...ad->...abc", gam, g))


def covariant_derivative_surface_vector(chart, u, a, gamma=None):
    """Covariant derivative of a contravariant surface vector field.

    ``a(u1, u2)`` returns the components ``(a^0, a^1)``.  The result has
    shape ``(..., 2, 2)`` indexed [alpha, gamma] or, when ``gamma`` is given,
    ``(..., 2)``.
    """
    u = as_points(u)
    fr = frame_at(chart, u)
    val, d, _ = map_derivatives(a, u[..., 0], u[..., 1])
    cov = d + np.einsum("...adg,...d->...ag", fr.christoffel, val)
    if gamma is None:
        return cov
    if gamma not in (0, 1):
        raise ContractViolation("surface index must be 0 or 1")
    return cov[..., gamma]


def covariant_derivative_spatial_vector(chart, u, b, alpha):
    """Covariant surface derivative of an ambient covector ``b(x)`` along u_alpha.

    Ambient coordinates are Cartesian, so the ambient Christoffel symbols vanish
    and the result is the partial derivative of ``b(Phi(u))``.
    """
    u = as_points(u)

    def composed(u1, u2):
        return b(*chart.func(u1, u2))
    _, d, _ = map_derivatives(composed, u[..., 0], u[..., 1])
    return d[..., alpha]


def covariant_derivative_tangent(chart, u, alpha, beta, atol=1e-10):
    """``d tau_alpha / du_beta - Gamma^c_{alpha beta} tau_c``; checked against ``b_{alpha beta} nu``."""
    fr = frame_at(chart, u)
    res = fr.second[..., alpha, beta, :] - np.einsum(
        "...c,...ci->...i", fr.christoffel[..., :, alpha, beta], fr.tangents)
    expected = fr.curvature[..., alpha, beta, None] * fr.normal
    scale = np.maximum(1.0, np.linalg.norm(fr.second[..., alpha, beta, :], axis=-1))
    err = np.linalg.norm(res - expected, axis=-1) / scale
    if np.any(err > atol):
        raise ConsistencyError(f"covariant tangent derivative differs from b nu by {np.max(err):.3e}")
    return res


# -- catalog ------------------------------------------------------------------

def plane(size=1.0):
    return Chart("plane", lambda u1, u2: (u1, u2, 0.0), ((0.0, size), (0.0, size)), {"size": size})


def graph(sigma=None, amp=0.1, k=2 * np.pi, domain=((0.0, 1.0), (0.0, 1.0))):
    """Graph ``x3 = sigma(x1, x2)``; defaults to ``amp sin(k x1) cos(k x2)``."""
    if sigma is None:
        def sigma(u1, u2):
            return amp * jet.sin(k * u1) * jet.cos(k * u2)
        params = {"amp": amp, "k": k}
    else:
        params = {}
    return Chart("graph", lambda u1, u2: (u1, u2, sigma(u1, u2)), tuple(domain), params)


def sphere(R=1.0, theta_range=None):
    def func(th, ph):
        s = jet.sin(th)
        return (R * s * jet.cos(ph), R * s * jet.sin(ph), R * jet.cos(th))
    dom = (theta_range or (POLE_MARGIN, np.pi - POLE_MARGIN), (0.0, 2 * np.pi))
    return Chart("sphere", func, dom, {"R": R})


def spherical_cap(R=1.0, theta_max=np.pi / 3):
    """Cap ``theta <= theta_max``; the edge theta = 0 collapses to the pole."""
    ch = sphere(R, (0.0, theta_max))
    return Chart("spherical_cap", ch.func, ch.domain, {"R": R, "theta_max": theta_max})


def ellipsoid(a=1.0, b=0.8, c=0.6):
    def func(th, ph):
        s = jet.sin(th)
        return (a * s * jet.cos(ph), b * s * jet.sin(ph), c * jet.cos(th))
    return Chart("ellipsoid", func, ((POLE_MARGIN, np.pi - POLE_MARGIN), (0.0, 2 * np.pi)),
                 {"a": a, "b": b, "c": c})


def torus(R=2.0, r=0.5):
    def func(p, q):
        rho = R + r * jet.cos(q)
        return (rho * jet.cos(p), rho * jet.sin(p), r * jet.sin(q))
    return Chart("torus", func, ((0.0, 2 * np.pi), (0.0, 2 * np.pi)), {"R": R, "r": r})


def disc(R=1.0):
    """Flat disc in polar parameters; the edge r = 0 collapses to the centre."""
    def func(r, ph):
        return (r * jet.cos(ph), r * jet.sin(ph), 0.0)
    return Chart("disc", func, ((0.0, R), (0.0, 2 * np.pi)), {"R": R})


def torus_mean_curvature(R, r, q):
    """Closed-form mean curvature of :func:`torus` (outward normal)."""
    return -(R + 2 * r * np.cos(q)) / (2 * r * (R + r * np.cos(q)))


CHARTS = {
    "plane": (plane, {"size": 1.0}),
    "graph": (graph, {"amp": 0.1, "k": 2 * np.pi}),
    "sphere": (sphere, {"R": 1.0}),
    "spherical_cap": (spherical_cap, {"R": 1.0, "theta_max": np.pi / 3}),
    "ellipsoid": (ellipsoid, {"a": 1.0, "b": 0.8, "c": 0.6}),
    "torus": (torus, {"R": 2.0, "r": 0.5}),
    "disc": (disc, {"R": 1.0}),
}


def make_chart(name, **params):
    try:
        factory, defaults = CHARTS[name]
    except KeyError:
        raise UnknownCatalogEntry(f"unknown chart {name!r}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise UnknownCatalogEntry(f"chart {name!r} has no parameter(s) {sorted(unknown)}")
    return factory(**{**defaults, **params})
