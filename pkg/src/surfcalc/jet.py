"""Second-order forward-mode differentiation (truncated Taylor jets).

A :class:`Jet2` carries a value together with its gradient and Hessian with
respect to ``n`` declared independent variables.  All three parts are numpy
arrays with a common leading batch shape, so one jet can represent the same
function evaluated at many points at once::

    u1, u2 = Jet2.variables(np.linspace(0, 1, 5), 0.3)
    f = sin(u1) * u2
    f.grad[..., 0]      # cos(u1) * u2 at the five points

Arithmetic between jets over different numbers of variables raises
:class:`~surfcalc.errors.ContractViolation` instead of silently promoting.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation

__all__ = [
    "Jet2",
    "sin",
    "cos",
    "tan",
    "exp",
    "log",
    "sqrt",
    "tanh",
    "cosh",
    "sinh",
    "arctan",
    "value",
    "grad",
    "dot",
    "cross",
    "norm",
]


class Jet2:
    __slots__ = ("val", "grad", "hess")

    # make ndarray (op) Jet2 dispatch to the reflected Jet2 method
    __array_ufunc__ = None

    def __init__(self, val, grad, hess):
        self.val = np.asarray(val, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    # -- construction -----------------------------------------------------

    @classmethod
    def variables(cls, *values):
        """Seed one jet per independent variable, broadcast to a common shape."""
        arrays = np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in values])
        n = len(arrays)
        shape = arrays[0].shape
        eye = np.eye(n)
        zero_h = np.zeros(shape + (n, n))
        out = []
        for k, a in enumerate(arrays):
            g = np.broadcast_to(eye[k], shape + (n,))
            out.append(cls(a.copy(), g, zero_h))
        return tuple(out)

    @classmethod
    def constant(cls, c, n, shape=()):
        c = np.broadcast_to(np.asarray(c, dtype=float), shape)
        return cls(c, np.zeros(c.shape + (n,)), np.zeros(c.shape + (n, n)))

    @classmethod
    def first_order(cls, val, grad):
        """Jet with known value and gradient and an unknown (zeroed) Hessian.

        Only the gradient of anything computed from such jets is meaningful.
        """
        val = np.asarray(val, dtype=float)
        grad = np.asarray(grad, dtype=float)
        n = grad.shape[-1]
        return cls(val, grad, np.zeros(grad.shape + (n,)))

    @property
    def n(self):
        return self.grad.shape[-1]

    @property
    def shape(self):
        return self.val.shape

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet2(self.val[idx], self.grad[idx + (Ellipsis, slice(None))],
                    self.hess[idx + (Ellipsis, slice(None), slice(None))])

    def __repr__(self):
        return f"Jet2(val={self.val!r}, grad={self.grad!r})"

    # -- helpers ----------------------------------------------------------

    def _other(self, other):
        if isinstance(other, Jet2):
            if other.n != self.n:
                raise ContractViolation(
                    f"cannot combine jets over {self.n} and {other.n} variables")
            return other
        return None

    def _bcast(self, shape):
        n = self.n
        return (np.broadcast_to(self.grad, shape + (n,)),
                np.broadcast_to(self.hess, shape + (n, n)))

    def _chain(self, f0, f1, f2):
        g = self.grad
        return Jet2(f0,
                    f1[..., None] * g,
                    f1[..., None, None] * self.hess
                    + f2[..., None, None] * (g[..., :, None] * g[..., None, :]))

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return Jet2(-self.val, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._other(other)
        if o is not None:
            return Jet2(self.val + o.val, self.grad + o.grad, self.hess + o.hess)
        v = self.val + np.asarray(other, dtype=float)
        g, h = self._bcast(v.shape)
        return Jet2(v, g, h)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is not None:
            return Jet2(self.val - o.val, self.grad - o.grad, self.hess - o.hess)
        return self + (-np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            c = np.asarray(other, dtype=float)
            return Jet2(self.val * c, self.grad * c[..., None],
                        self.hess * c[..., None, None])
        a, b = self, o
        ag, bg = a.grad, b.grad
        outer = ag[..., :, None] * bg[..., None, :] + bg[..., :, None] * ag[..., None, :]
        return Jet2(a.val * b.val,
                    ag * b.val[..., None] + a.val[..., None] * bg,
                    a.hess * b.val[..., None, None] + a.val[..., None, None] * b.hess
                    + outer)

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.val
        r = 1.0 / v
        return self._chain(r, -r * r, 2.0 * r * r * r)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet2):
            return exp(p * log(self))
        if p == 2:
            return self * self
        if p == 1:
            return self
        v = self.val
        p = float(p)
        return self._chain(v ** p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    def __rpow__(self, base):
        return exp(self * np.log(base))


# -- elementary functions ---------------------------------------------------

def _unary(np_fn, derivs):
    def fn(x):
        if isinstance(x, Jet2):
            v = x.val
            f0 = np_fn(v)
            f1, f2 = derivs(v, f0)
            return x._chain(f0, f1, f2)
        return np_fn(x)
    fn.__name__ = np_fn.__name__
    return fn


sin = _unary(np.sin, lambda v, f: (np.cos(v), -f))
cos = _unary(np.cos, lambda v, f: (-np.sin(v), -f))
tan = _unary(np.tan, lambda v, f: (1.0 + f * f, 2.0 * f * (1.0 + f * f)))
exp = _unary(np.exp, lambda v, f: (f, f))
log = _unary(np.log, lambda v, f: (1.0 / v, -1.0 / (v * v)))
sqrt = _unary(np.sqrt, lambda v, f: (0.5 / f, -0.25 / (f * v)))
tanh = _unary(np.tanh, lambda v, f: (1.0 - f * f, -2.0 * f * (1.0 - f * f)))
sinh = _unary(np.sinh, lambda v, f: (np.cosh(v), f))
cosh = _unary(np.cosh, lambda v, f: (np.sinh(v), f))
arctan = _unary(np.arctan, lambda v, f: (1.0 / (1.0 + v * v),
                                        -2.0 * v / (1.0 + v * v) ** 2))


def value(x):
    return x.val if isinstance(x, Jet2) else np.asarray(x, dtype=float)


def grad(x, n, shape=()):
    """Gradient of ``x``; zeros when ``x`` is a plain constant."""
    if isinstance(x, Jet2):
        return x.grad
    return np.zeros((np.shape(x) or tuple(shape)) + (n,))


# -- small vector helpers on 3-tuples of jets/arrays ----------------------

def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def norm(a):
    return sqrt(dot(a, a))
