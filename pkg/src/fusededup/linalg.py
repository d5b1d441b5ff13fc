"""PCA and cosine similarity kernels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError

ZERO_NORM = 1e-12


@dataclass(frozen=True)
class PcaConfig:
    text_dim: int = 64
    device_dim: int = 16

    def __post_init__(self) -> None:
        if self.text_dim < 1 or self.device_dim < 1:
            raise ConfigError("pca.text_dim and pca.device_dim must be >= 1")


@dataclass(frozen=True)
class PcaModel:
    """A fitted projection.

    Attributes
    ----------
    mean : ndarray, shape (d,)
    components : ndarray, shape (k, d)
        Orthonormal rows, each signed so its largest-magnitude entry is positive.
    explained_variance : ndarray, shape (k,)
        Sample variance (divisor n-1) along each component, non-increasing.
    degenerate : bool
        True when the fit data had zero total variance; transform then
        returns zeros.
    """

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    degenerate: bool = False

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def input_dim(self) -> int:
        return self.mean.shape[0]

    def transform(self, samples) -> np.ndarray:
        return pca_transform(self, samples)


def _as_matrix(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise ShapeError(f"expected a 2-D sample matrix, got shape {x.shape}")
    return x


def pca_fit(samples, k: int) -> PcaModel:
    """Fit the top-``k`` principal directions of ``samples`` (n x d).

    ``k`` is clamped to ``min(k, d, n - 1)``. Directions come from the SVD of
    the centred data, which equals the eigendecomposition of the sample
    covariance without forming it.
    """
    x = _as_matrix(samples)
    n, d = x.shape
    if n < 2:
        raise ConfigError(f"PCA needs at least 2 samples, got {n}")
    if k < 1:
        raise ConfigError(f"PCA needs k >= 1, got {k}")
    k = min(k, d, n - 1)
    mean = x.mean(axis=0)
    centred = x - mean
    if not np.any(centred):
        return PcaModel(mean, np.eye(k, d), np.zeros(k), degenerate=True)

    _, s, vt = np.linalg.svd(centred, full_matrices=False)
    components = vt[:k].copy()
    variance = s[:k] ** 2 / (n - 1)
    # sign convention: largest-|entry| of each component is positive
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(k), pivots])
    signs[signs == 0] = 1.0
    components *= signs[:, None]
    return PcaModel(mean, components, variance)


def pca_transform(model: PcaModel, samples) -> np.ndarray:
    x = _as_matrix(samples)
    if x.shape[1] != model.input_dim:
        raise ShapeError(f"model expects {model.input_dim} features, got {x.shape[1]}")
    if model.degenerate:
        return np.zeros((x.shape[0], model.n_components))
    return (x - model.mean) @ model.components.T


def pca_reduce(samples, k: int) -> np.ndarray:
    return pca_transform(pca_fit(samples, k), samples)


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"cosine of vectors with lengths {a.size} and {b.size}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na < ZERO_NORM or nb < ZERO_NORM:
        return 0.0
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def unit_rows(mat) -> np.ndarray:
    """Scale each row to unit length; rows with norm below ``ZERO_NORM`` become zero."""
    m = _as_matrix(mat)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    out = np.zeros_like(m)
    np.divide(m, norms, out=out, where=norms >= ZERO_NORM)
    return out
