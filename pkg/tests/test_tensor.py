import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from surfcalc.errors import ConsistencyError, ContractViolation, SingularMatrix
from surfcalc.tensor import (cofactor3, cross, det2, det3, epsilon3, epsilon_array, inverse2,
                             inverse3, transform_cross, transform_cross_rhs)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec3 = arrays(float, 3, elements=finite)
mat3 = arrays(float, (3, 3), elements=finite)


@pytest.mark.parametrize("idx,expected", [((1, 2, 3), 1), ((2, 3, 1), 1), ((3, 1, 2), 1),
                                          ((1, 3, 2), -1), ((3, 2, 1), -1), ((2, 1, 3), -1),
                                          ((1, 1, 2), 0), ((3, 3, 3), 0)])
def test_epsilon3(idx, expected):
    assert epsilon3(*idx) == expected


def test_epsilon3_rejects_zero_based_index():
    with pytest.raises(ContractViolation):
        epsilon3(0, 1, 2)


def test_epsilon_array_matches_cross():
    e = epsilon_array()
    a, b = np.array([1.0, 2, 3]), np.array([4.0, 5, 6])
    assert np.allclose(np.einsum("ijk,j,k->i", e, a, b), np.cross(a, b))


def test_cross_examples():
    e1, e2, e3 = np.eye(3)
    assert np.array_equal(cross(e1, e2), e3)
    assert np.array_equal(cross(e1, e1), np.zeros(3))
    assert np.array_equal(cross([1, 2, 3], [4, 5, 6]), [-3, 6, -3])
    with pytest.raises(ContractViolation):
        cross([1, 2], [3, 4])


def test_det_cofactor_inverse_examples():
    assert det3(np.eye(3)) == 1
    assert np.array_equal(cofactor3(np.eye(3)), np.eye(3))
    assert det3(np.diag([2.0, 3, 4])) == 24
    assert np.allclose(inverse3(np.diag([2.0, 4, 8])), np.diag([0.5, 0.25, 0.125]))
    assert det2(np.array([[1.0, 2], [3, 4]])) == -2


def test_singular_matrices_raise():
    with pytest.raises(SingularMatrix):
        inverse3(np.array([[1.0, 2, 3], [2, 4, 6], [0, 0, 1]]))
    with pytest.raises(SingularMatrix):
        inverse2(np.array([[1.0, 2], [2, 4]]))
    with pytest.raises(SingularMatrix):
        transform_cross(np.zeros((3, 3)), [1, 0, 0], [0, 1, 0])


def test_stacked_inverse(rng):
    a = rng.normal(size=(20, 3, 3)) + 3 * np.eye(3)
    assert np.allclose(inverse3(a) @ a, np.eye(3), atol=1e-12)
    b = rng.normal(size=(20, 2, 2)) + 3 * np.eye(2)
    assert np.allclose(inverse2(b) @ b, np.eye(2), atol=1e-12)


def test_transform_cross_examples():
    t1, t2 = np.array([1.0, 2, 0]), np.array([0.0, 1, 5])
    assert np.allclose(transform_cross(np.eye(3), t1, t2), np.cross(t1, t2))
    assert np.allclose(transform_cross(2 * np.eye(3), [1, 0, 0], [0, 1, 0]), [0, 0, 4])
    assert np.allclose(transform_cross_rhs(2 * np.eye(3), [1, 0, 0], [0, 1, 0]), [0, 0, 4])


def test_transform_cross_detects_bad_cofactor(monkeypatch):
    import surfcalc.tensor as tensor
    monkeypatch.setattr(tensor, "transform_cross_rhs", lambda a, t1, t2: np.zeros(3))
    with pytest.raises(ConsistencyError):
        tensor.transform_cross(np.diag([1.0, 2, 3]), [1, 0, 0], [0, 1, 0])


@given(mat3)
def test_cofactor_is_det_times_inverse_transpose(a):
    d = np.linalg.det(a)
    scale = np.linalg.norm(a) ** 3
    if abs(d) < 1e-3 * max(scale, 1e-300) or scale < 1e-6:
        return
    assert np.allclose(cofactor3(a), d * np.linalg.inv(a).T, atol=1e-9 * scale)


@given(mat3, vec3, vec3)
def test_transform_cross_identity(a, t1, t2):
    scale = np.linalg.norm(a @ t1) * np.linalg.norm(a @ t2)
    if scale < 1e-6 or abs(np.linalg.det(a)) < 1e-6 * np.linalg.norm(a) ** 3:
        return
    lhs = np.cross(a @ t1, a @ t2)
    rhs = np.linalg.det(a) * np.linalg.inv(a).T @ np.cross(t1, t2)
    assert np.linalg.norm(lhs - rhs) <= 1e-9 * scale
    assert np.allclose(transform_cross(a, t1, t2), lhs)


@given(vec3, vec3)
def test_cross_antisymmetric_and_orthogonal(a, b):
    c = cross(a, b)
    assert np.array_equal(c, -cross(b, a))
    scale = max(1.0, np.linalg.norm(a) * np.linalg.norm(b))
    assert abs(c @ a) <= 1e-12 * scale * max(1.0, np.linalg.norm(a))
