import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from mfkrig.errors import DomainError, InputShapeError
from mfkrig.kernels import (THETA_FLOOR, KernelConfig, KernelFamily, kernel_eval,
                            kernel_matrix, project_theta)
from mfkrig.pls import PlsProjection

import oracle

FAMILIES = list(KernelFamily)


def se(theta):
    return KernelConfig("squared_exponential", theta)


def test_zero_distance_is_one():
    assert kernel_eval(se([1.0]), 0.3, 0.3) == 1.0
    assert kernel_eval(KernelConfig("matern52", [1.0]), 0.0, 0.0) == 1.0


def test_squared_exponential_unit_distance():
    assert kernel_eval(se([1.0]), 0.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert kernel_eval(se([1.0]), 0.0, 1.0) == pytest.approx(0.367879, abs=1e-6)


def test_two_point_matrix():
    K = kernel_matrix(se([1.0]), [[0.0], [1.0]])
    e = math.exp(-1)
    np.testing.assert_allclose(K, [[1, e], [e, 1]], rtol=1e-15)
    assert kernel_matrix(se([1.0]), [[0.5]], [[0.5]]).tolist() == [[1.0]]


@pytest.mark.parametrize("family", FAMILIES)
def test_matrix_matches_elementwise_oracle(family):
    rng = np.random.default_rng(3)
    X, Xp = rng.uniform(size=(5, 3)), rng.uniform(size=(4, 3))
    theta = [0.5, 2.0, 7.0]
    K = kernel_matrix(KernelConfig(family, theta), X, Xp)
    np.testing.assert_allclose(K, oracle.corr_matrix(family.value, theta, X, Xp), rtol=1e-13)


@pytest.mark.parametrize("family", FAMILIES)
def test_self_matrix_symmetric_unit_diagonal(family):
    X = np.random.default_rng(0).normal(size=(7, 2))
    K = kernel_matrix(KernelConfig(family, [0.7, 1.3]), X)
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)


def test_dimension_mismatch():
    with pytest.raises(InputShapeError):
        kernel_eval(se([1.0, 1.0]), [0.0], [1.0])
    with pytest.raises(InputShapeError):
        kernel_matrix(se([1.0]), np.zeros((3, 2)))


def test_theta_must_be_positive():
    with pytest.raises(DomainError):
        se([1.0, 0.0])


def test_family_aliases():
    assert KernelFamily.parse("gaussian") is KernelFamily.SQUARED_EXPONENTIAL
    with pytest.raises(DomainError):
        KernelFamily.parse("periodic")


def _proj(w):
    w = np.asarray(w, float).reshape(len(w), -1)
    return PlsProjection(w, np.zeros(w.shape[0]), 0.0)


def test_project_theta_examples():
    np.testing.assert_array_equal(project_theta([2.5], _proj([[1.0]])), [2.5])
    np.testing.assert_array_equal(project_theta([3.0], _proj([[1.0], [0.0]])),
                                  [3.0, THETA_FLOOR])
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(project_theta([2.0], _proj([[s], [s]])), [1.0, 1.0],
                               rtol=1e-15)
    with pytest.raises(DomainError):
        project_theta([0.0], _proj([[1.0]]))


def test_projected_kernel_uses_effective_theta():
    s = 1 / math.sqrt(2)
    k = KernelConfig("squared_exponential", [2.0], _proj([[s], [s]]))
    assert k.dim == 2
    x, xp = [0.0, 0.0], [1.0, 0.5]
    assert kernel_eval(k, x, xp) == pytest.approx(math.exp(-(1.0 + 0.25)), rel=1e-14)


finite = st.floats(-5, 5, allow_nan=False)
points = st.lists(finite, min_size=2, max_size=2)
thetas = st.lists(st.floats(1e-3, 50), min_size=2, max_size=2)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FAMILIES), thetas, points, points)
def test_symmetric_and_bounded(family, theta, x, xp):
    k = KernelConfig(family, theta)
    a, b = kernel_eval(k, x, xp), kernel_eval(k, xp, x)
    assert a == b
    assert 0.0 <= a <= 1.0
    if x == xp:
        assert a == 1.0


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-2, 10), st.floats(0, 3), st.floats(1e-3, 3))
def test_squared_exponential_monotone(theta, d, step):
    k = se([theta])
    near, far = kernel_eval(k, 0.0, d), kernel_eval(k, 0.0, d + step)
    assert far <= near
    if near > 1e-300:
        assert far < near


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_nugget_makes_positive_definite(family, seed, n):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, 2))
    X = np.unique(X, axis=0)
    K = kernel_matrix(KernelConfig(family, rng.uniform(0.1, 20, 2)), X)
    linalg.cholesky(K + 1e-10 * np.eye(len(X)), lower=True)
