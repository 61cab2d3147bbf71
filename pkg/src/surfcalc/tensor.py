"""Small fixed-size tensor algebra: permutation symbol, cross products,
3x3 determinants, co-factors and inverses.

Matrix routines accept a single matrix of shape ``(3, 3)`` or a stack of
shape ``(..., 3, 3)``.  Indices for :func:`epsilon3` are 1-based, matching
the usual index notation.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation, ConsistencyError, SingularMatrix

SINGULAR_RTOL = 1e-12
TRANSFORM_CROSS_RTOL = 1e-12


def epsilon3(i, j, k):
    """Levi-Civita symbol with indices in {1, 2, 3}."""
    for idx in (i, j, k):
        if idx not in (1, 2, 3):
            raise ContractViolation(f"permutation index {idx!r} not in {{1,2,3}}")
    return float((i - j) * (j - k) * (k - i) / 2)


def epsilon_array():
    """The full 3x3x3 permutation tensor (0-based array)."""
    e = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                e[i, j, k] = epsilon3(i + 1, j + 1, k + 1)
    return e


def kronecker(i, j):
    return 1.0 if i == j else 0.0


def cross(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != 3 or b.shape[-1] != 3:
        raise ContractViolation("cross product needs 3-vectors")
    return np.cross(a, b)


def det2(m):
    m = np.asarray(m, dtype=float)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inverse2(m):
    """Inverse of a (stack of) 2x2 matrices via the adjugate."""
    m = np.asarray(m, dtype=float)
    d = det2(m)
    scale = np.max(np.abs(m).sum(axis=-1), axis=-1)
    if np.any(np.abs(d) <= SINGULAR_RTOL * scale ** 2):
        raise SingularMatrix("2x2 matrix is singular to working precision")
    adj = np.empty_like(m)
    adj[..., 0, 0] = m[..., 1, 1]
    adj[..., 1, 1] = m[..., 0, 0]
    adj[..., 0, 1] = -m[..., 0, 1]
    adj[..., 1, 0] = -m[..., 1, 0]
    return adj / d[..., None, None]


def det3(a):
    a = np.asarray(a, dtype=float)
    if a.shape[-2:] != (3, 3):
        raise ContractViolation("det3 needs 3x3 matrices")
    return np.einsum("...i,...i->...", a[..., 0, :], np.cross(a[..., 1, :], a[..., 2, :]))


def cofactor3(a):
    """Co-factor matrix C with C[j, k] = (-1)^(j+k) * minor(j, k).

    Satisfies ``C[j, k] = inv(A)[k, j] * det(A)``, i.e. ``C = det(A) inv(A)^T``.
    Each row of C is the cross product of the other two rows of A, in cyclic
    order.
    """
    a = np.asarray(a, dtype=float)
    if a.shape[-2:] != (3, 3):
        raise ContractViolation("cofactor3 needs 3x3 matrices")
    r0, r1, r2 = a[..., 0, :], a[..., 1, :], a[..., 2, :]
    return np.stack([np.cross(r1, r2), np.cross(r2, r0), np.cross(r0, r1)], axis=-2)


def _singular_scale(a):
    # product of row norms bounds |det| (Hadamard); tolerance is relative to
    # the largest row norm as a size measure
    return np.max(np.linalg.norm(a, axis=-1), axis=-1)


def check_invertible(a):
    a = np.asarray(a, dtype=float)
    d = det3(a)
    scale = _singular_scale(a)
    if np.any(np.abs(d) <= SINGULAR_RTOL * scale ** 3) or np.any(~np.isfinite(d)):
        raise SingularMatrix("3x3 matrix is singular to working precision")
    return d


def inverse3(a):
    a = np.asarray(a, dtype=float)
    d = check_invertible(a)
    return np.swapaxes(cofactor3(a), -1, -2) / d[..., None, None]


def matvec(a, x):
    return np.einsum("...ij,...j->...i", a, x)


def transform_cross(a, t1, t2, check=True):
    """Cross product of two transformed vectors, ``A t1 x A t2``.

    The result is cross-checked against ``det(A) inv(A)^T (t1 x t2)``;
    disagreement beyond round-off raises :class:`ConsistencyError`.
    """
    a = np.asarray(a, dtype=float)
    check_invertible(a)
    at1 = matvec(a, t1)
    at2 = matvec(a, t2)
    lhs = np.cross(at1, at2)
    if check:
        rhs = transform_cross_rhs(a, t1, t2)
        err = np.linalg.norm(lhs - rhs, axis=-1)
        scale = np.linalg.norm(at1, axis=-1) * np.linalg.norm(at2, axis=-1)
        scale = np.maximum(scale, 1e-300)
        if np.any(err > TRANSFORM_CROSS_RTOL * scale):
            raise ConsistencyError(
                f"A t1 x A t2 disagrees with det(A) A^-T (t1 x t2): rel {np.max(err / scale):.3e}")
    return lhs


def transform_cross_rhs(a, t1, t2):
    """``det(A) inv(A)^T (t1 x t2)``, evaluated as the co-factor matrix times t1 x t2."""
    return matvec(cofactor3(a), np.cross(t1, t2))
