"""Tensor-product Gauss-Legendre quadrature for surface, boundary and
graph-bounded volume integrals.

Nodes come from :func:`numpy.polynomial.legendre.leggauss`.  Sums are taken
with :func:`numpy.dot` over a fixed node ordering so repeated runs give
bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractViolation, InterfaceEscapesVolume, InvertedBounds
from .geometry import TOL_RANK, frame_at

DEFAULT_ORDER = 16


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadratureRule:
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 2:
            raise ContractViolation(f"quadrature order must be an integer >= 2, got {self.order}")

    def interval(self, a, b):
        """Nodes and weights on ``[a, b]``; ``a`` and ``b`` may be arrays (broadcast in front)."""
        x, w = _leggauss(int(self.order))
        a = np.asarray(a, dtype=float)[..., None]
        b = np.asarray(b, dtype=float)[..., None]
        half = 0.5 * (b - a)
        return 0.5 * (a + b) + half * x, half * w

    def rectangle(self, domain):
        """Nodes ``(n*n, 2)`` and weights ``(n*n,)`` on ``((a1, b1), (a2, b2))``."""
        (a1, b1), (a2, b2) = domain
        x1, w1 = self.interval(a1, b1)
        x2, w2 = self.interval(a2, b2)
        u1, u2 = np.meshgrid(x1, x2, indexing="ij")
        return np.stack([u1.ravel(), u2.ravel()], -1), np.outer(w1, w2).ravel()


def _rule(rule):
    if rule is None:
        return QuadratureRule()
    if isinstance(rule, QuadratureRule):
        return rule
    return QuadratureRule(int(rule))


def _scalar_integrand(psi, chart, frame, t):
    if callable(psi) and not hasattr(psi, "restrict"):
        return np.asarray(psi(frame), dtype=float)
    if getattr(psi, "rank", 0) != 0:
        raise ContractViolation("surface integrand must be scalar")
    if getattr(psi, "kind", None) == "ambient":
        return psi.value(frame.point, t)
    return psi.restrict(chart, frame.u, t)[0]


def integrate_surface(chart, psi, rule=None, t=0.0):
    """``int_Sigma psi dS = int_U psi(Phi(u)) sqrt(g) du``.

    ``psi`` is a scalar field, a constant, or a callable taking the
    :class:`~surfcalc.geometry.SurfaceFrame` of the quadrature nodes.
    """
    rule = _rule(rule)
    u, w = rule.rectangle(chart.domain)
    fr = frame_at(chart, u)
    if np.isscalar(psi):
        vals = np.full(w.shape, float(psi))
    else:
        vals = np.broadcast_to(_scalar_integrand(psi, chart, fr, t), w.shape)
    return float(np.dot(w, vals * fr.sqrt_g))


def boundary_edges(domain):
    """The four edges of a parameter rectangle, counter-clockwise.

    Each edge is ``(name, start, direction)`` with points ``start + s*direction``
    for ``s`` in ``[0, 1]``.
    """
    (a1, b1), (a2, b2) = domain
    return [
        ("u2=lo", np.array([a1, a2]), np.array([b1 - a1, 0.0])),
        ("u1=hi", np.array([b1, a2]), np.array([0.0, b2 - a2])),
        ("u2=hi", np.array([b1, b2]), np.array([a1 - b1, 0.0])),
        ("u1=lo", np.array([a1, b2]), np.array([0.0, a2 - b2])),
    ]


def integrate_boundary(chart, a, rule=None, t=0.0, info=None):
    """``oint a . nu_dS dl`` over the image of the parameter rectangle's boundary.

    ``nu_dS dl = T x nu ds`` where ``T = dPhi/ds`` runs counter-clockwise in
    parameter space.  Edges whose image collapses to a point (poles, disc
    centres) contribute nothing and are skipped.  The outward orientation is
    checked at every edge midpoint against the image of the parameter-space
    outward normal; a reversed orientation is corrected and recorded.

    ``a`` is a vector field or a callable ``a(frame) -> (..., 3)``.  When
    ``info`` is a dict it receives ``collapsed`` and ``flipped`` edge lists.
    """
    rule = _rule(rule)
    s, ws = rule.interval(0.0, 1.0)
    total = 0.0
    collapsed, flipped = [], []
    for name, start, direction in boundary_edges(chart.domain):
        u = start + s[:, None] * direction
        _, d1, _ = chart.derivatives(u)
        tang = np.einsum("...ia,a->...i", d1, direction)
        length = np.linalg.norm(tang, axis=-1)
        ref = max(1.0, float(np.max(np.linalg.norm(d1, axis=-2))))
        if np.all(length <= TOL_RANK * ref):
            collapsed.append(name)
            continue
        fr = frame_at(chart, u)
        conormal = np.cross(tang, fr.normal)
        # outward direction in parameter space is the direction rotated clockwise
        out_param = np.array([direction[1], -direction[0]])
        out = np.einsum("...ia,a->...i", d1, out_param)
        mid = len(s) // 2
        sign = 1.0
        if np.dot(conormal[mid], out[mid]) < 0:
            sign = -1.0
            flipped.append(name)
        if callable(a) and not hasattr(a, "restrict"):
            vals = np.asarray(a(fr), dtype=float)
        elif getattr(a, "kind", None) == "ambient":
            vals = a.value(fr.point, t)
        else:
            vals = a.restrict(chart, u, t)[0]
        total += sign * float(np.dot(ws, np.einsum("...i,...i->...", vals, conormal)))
    if info is not None:
        info["collapsed"] = collapsed
        info["flipped"] = flipped
    return total


def integrate_interval(f, a, b, rule=None):
    rule = _rule(rule)
    x, w = rule.interval(a, b)
    return float(np.dot(w, f(x)))


def integrate_rectangle(f, domain, rule=None):
    """``int f(u1, u2) du`` over a rectangle."""
    rule = _rule(rule)
    u, w = rule.rectangle(domain)
    return float(np.dot(w, np.broadcast_to(f(u[:, 0], u[:, 1]), w.shape)))


def graph_nodes(shadow, alpha, beta, rule=None):
    """Nodes ``(N, 3)`` and weights for ``alpha(y) < y3 < beta(y)`` over ``shadow``."""
    rule = _rule(rule)
    yy, wy = rule.rectangle(shadow)
    lo = np.broadcast_to(np.asarray(alpha(yy[:, 0], yy[:, 1]), dtype=float), wy.shape)
    hi = np.broadcast_to(np.asarray(beta(yy[:, 0], yy[:, 1]), dtype=float), wy.shape)
    if np.any(~(lo < hi)):
        raise InvertedBounds("lower graph is not below the upper graph at a quadrature node")
    z, wz = rule.interval(lo, hi)
    n = z.shape[-1]
    pts = np.concatenate([np.repeat(yy, n, axis=0), z.reshape(-1, 1)], -1)
    return pts, (wy[:, None] * wz).ravel()


def integrate_graph_volume(shadow, alpha, beta, h, rule=None):
    """``int_shadow int_alpha^beta h(y1, y2, y3) dy3 dy1 dy2``."""
    pts, w = graph_nodes(shadow, alpha, beta, rule)
    vals = np.broadcast_to(np.asarray(h(pts[:, 0], pts[:, 1], pts[:, 2]), dtype=float), w.shape)
    return float(np.dot(w, vals))


def integrate_split_volume(shadow, alpha, sigma, beta, h_lower, h_upper, rule=None):
    """Volume integral split at an interior graph ``sigma``; returns both pieces.

    Each piece gets its own Gauss rule in ``y3`` so piecewise-smooth
    integrands are integrated at full order.
    """
    rule = _rule(rule)
    yy, _ = rule.rectangle(shadow)
    lo = np.asarray(alpha(yy[:, 0], yy[:, 1]), dtype=float)
    mid = np.asarray(sigma(yy[:, 0], yy[:, 1]), dtype=float)
    hi = np.asarray(beta(yy[:, 0], yy[:, 1]), dtype=float)
    if np.any(~((lo < mid) & (mid < hi))):
        raise InterfaceEscapesVolume("interface leaves the control volume at a quadrature node")
    return (integrate_graph_volume(shadow, alpha, sigma, h_lower, rule),
            integrate_graph_volume(shadow, sigma, beta, h_upper, rule))


def frame_nodes(chart, rule=None):
    """Frame and weights at the tensor nodes of a chart's parameter rectangle."""
    rule = _rule(rule)
    u, w = rule.rectangle(chart.domain)
    return frame_at(chart, u), w


__all__ = [
    "QuadratureRule", "DEFAULT_ORDER", "integrate_surface", "integrate_boundary",
    "integrate_graph_volume", "integrate_split_volume", "integrate_interval",
    "integrate_rectangle", "graph_nodes", "frame_nodes", "boundary_edges",
]
