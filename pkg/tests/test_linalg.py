import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fusededup.errors import ConfigError, ShapeError
from fusededup.linalg import cosine, pca_fit, pca_transform
from oracles import covariance_eig


def test_points_on_a_line():
    model = pca_fit([[0, 0], [1, 1], [2, 2], [3, 3]], 1)
    np.testing.assert_allclose(model.components[0], [2 ** -0.5, 2 ** -0.5], atol=1e-12)
    total = np.var([[0, 0], [1, 1], [2, 2], [3, 3]], axis=0, ddof=1).sum()
    assert model.explained_variance[0] == pytest.approx(total)


def test_full_rank_reconstruction():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(20, 2))
    model = pca_fit(x, 2)
    z = pca_transform(model, x)
    np.testing.assert_allclose(model.mean + z @ model.components, x, atol=1e-8)


@pytest.mark.parametrize("k", range(1, 10))
def test_variance_matches_covariance_eigenvalues(k):
    x = np.random.default_rng(k).normal(size=(50, 10))
    model = pca_fit(x, k)
    vals, _ = covariance_eig(x)
    np.testing.assert_allclose(model.explained_variance, vals[:k], atol=1e-6)


def test_transform_of_mean_is_zero():
    x = np.random.default_rng(2).normal(size=(30, 5))
    model = pca_fit(x, 3)
    np.testing.assert_allclose(pca_transform(model, model.mean[None, :]), 0.0, atol=1e-12)


def test_projected_variance_equals_explained():
    x = np.random.default_rng(3).normal(size=(40, 6))
    model = pca_fit(x, 4)
    z = pca_transform(model, x)
    np.testing.assert_allclose(z.var(axis=0, ddof=1), model.explained_variance, atol=1e-6)


def test_degenerate_model():
    model = pca_fit(np.ones((5, 3)), 2)
    assert model.degenerate
    assert (model.explained_variance == 0).all()
    assert not pca_transform(model, np.random.default_rng(0).normal(size=(4, 3))).any()


def test_k_clamped():
    assert pca_fit(np.random.default_rng(0).normal(size=(4, 10)), 128).n_components == 3
    assert pca_fit(np.random.default_rng(0).normal(size=(40, 10)), 128).n_components == 10


def test_sign_convention():
    x = np.random.default_rng(4).normal(size=(30, 7))
    model = pca_fit(x, 5)
    for comp in model.components:
        assert comp[np.argmax(np.abs(comp))] > 0
    again = pca_fit(-x, 5)
    np.testing.assert_allclose(np.abs(again.components), np.abs(model.components), atol=1e-10)


def test_too_few_samples():
    with pytest.raises(ConfigError):
        pca_fit([[1.0, 2.0]], 1)


def test_transform_dimension_mismatch():
    model = pca_fit(np.random.default_rng(0).normal(size=(10, 4)), 2)
    with pytest.raises(ShapeError):
        pca_transform(model, np.zeros((3, 5)))


@pytest.mark.parametrize("seed", range(10))
def test_components_match_oracle_up_to_sign(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 13))
    # distinct, well-separated spectrum keeps eigenvectors identifiable
    scales = np.linspace(3.0, 0.5, d)
    x = rng.normal(size=(200, d)) * scales
    k = d
    model = pca_fit(x, k)
    _, vecs = covariance_eig(x)
    for comp, ref in zip(model.components, vecs[:k]):
        dot = float(comp @ ref)
        np.testing.assert_allclose(comp, np.sign(dot) * ref, atol=1e-6)


def test_orthonormal_components():
    x = np.random.default_rng(9).normal(size=(60, 12))
    c = pca_fit(x, 8).components
    np.testing.assert_allclose(c @ c.T, np.eye(8), atol=1e-8)


def test_reconstruction_error_monotone():
    x = np.random.default_rng(5).normal(size=(50, 10))
    errs = []
    for k in range(1, 10):
        m = pca_fit(x, k)
        errs.append(np.linalg.norm(x - (m.mean + pca_transform(m, x) @ m.components)))
    assert all(b <= a + 1e-10 for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("a, b, expected", [
    ([1, 2, 3], [1, 2, 3], 1.0),
    ([1, 0], [0, 1], 0.0),
    ([1, 1], [1, 0], 0.7071068),
    ([0, 0], [1, 0], 0.0),
])
def test_cosine_examples(a, b, expected):
    assert cosine(a, b) == pytest.approx(expected, abs=1e-6)


def test_cosine_length_mismatch():
    with pytest.raises(ShapeError):
        cosine([1, 2], [1, 2, 3])


vec = arrays(np.float64, 6, elements=st.floats(-1e3, 1e3, allow_nan=False))


@given(vec, vec, st.floats(1e-3, 1e3))
@settings(max_examples=300, deadline=None)
def test_cosine_properties(a, b, lam):
    c = cosine(a, b)
    assert c == cosine(b, a)
    assert abs(c) <= 1 + 1e-12
    if np.linalg.norm(a) > 1e-6 and np.linalg.norm(b) > 1e-6:
        assert cosine(lam * a, b) == pytest.approx(c, abs=1e-9)
