import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfkrig.errors import DegenerateResponseError, InvalidArgumentError
from mfkrig.kernels import project_theta
from mfkrig.pls import pls_fit, pls_scores


def test_one_dimension_is_identity():
    rng = np.random.default_rng(0)
    for _ in range(5):
        proj = pls_fit(rng.normal(size=(6, 1)), rng.normal(size=6), 1)
        assert proj.weights.tolist() == [[1.0]]


def test_orthogonal_noise_column_gets_zero_weight():
    # column 2 is orthogonal to the centered response and to column 1
    x1 = np.array([-3.0, -1.0, 1.0, 3.0])
    x2 = np.array([1.0, -1.0, -1.0, 1.0])
    y = 2.0 * x1 + 5.0
    proj = pls_fit(np.column_stack([x1, x2]), y, 1)
    np.testing.assert_allclose(proj.weights[:, 0], [1.0, 0.0], atol=1e-8)


def test_first_component_closed_form():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(20, 4))
    y = X @ [1.0, -2.0, 0.5, 0.0] + rng.normal(size=20)
    Xc, yc = X - X.mean(0), y - y.mean()
    w = Xc.T @ yc
    w /= np.linalg.norm(w)
    w *= np.sign(w[np.argmax(np.abs(w))])
    proj = pls_fit(X, y, 3)
    np.testing.assert_allclose(proj.weights[:, 0], w, atol=1e-12)


def test_sign_convention_and_unit_norm():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(15, 5))
    proj = pls_fit(X, -X[:, 2] + 0.1 * rng.normal(size=15), 4)
    for k in range(4):
        w = proj.weights[:, k]
        assert abs(np.linalg.norm(w) - 1.0) < 1e-12
        assert w[np.argmax(np.abs(w))] > 0


def test_errors():
    X = np.random.default_rng(0).normal(size=(5, 2))
    with pytest.raises(DegenerateResponseError):
        pls_fit(X, np.full(5, 3.0), 1)
    with pytest.raises(InvalidArgumentError):
        pls_fit(X, np.arange(5.0), 3)
    with pytest.raises(InvalidArgumentError):
        pls_fit(X[:2], np.arange(2.0), 2)


def test_identity_composition_with_project_theta():
    proj = pls_fit(np.arange(5.0).reshape(-1, 1), [1.0, 3.0, 2.0, 5.0, 4.0], 1)
    np.testing.assert_array_equal(project_theta([0.37], proj), [0.37])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.floats(0.01, 100))
def test_scores_orthogonal_and_scale_invariant(seed, d, c):
    rng = np.random.default_rng(seed)
    n = 12
    X = rng.normal(size=(n, d))
    y = X @ rng.normal(size=d) + 0.3 * rng.normal(size=n)
    h = d
    proj = pls_fit(X, y, h)
    T = pls_scores(proj, X)
    G = T.T @ T
    off = G - np.diag(np.diag(G))
    assert np.all(np.abs(off) <= 1e-8 * np.max(np.diag(G)))
    np.testing.assert_allclose(np.linalg.norm(proj.weights, axis=0), 1.0, atol=1e-12)
    scaled = pls_fit(X, c * y, h)
    np.testing.assert_allclose(scaled.weights, proj.weights, atol=1e-12)
