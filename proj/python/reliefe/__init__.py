"""ReliefE feature ranking for sparse, high-dimensional data."""

import numpy as np

from . import _reliefe
from ._reliefe import CsrMatrix, EmbeddingConfig, RankingConfig, ReliefEError

__all__ = [
    "CsrMatrix",
    "EmbeddingConfig",
    "RankingConfig",
    "ReliefEError",
    "as_csr",
    "embed",
    "estimate_dimension",
    "estimate_epsilon",
    "rank",
    "rf1_curve",
    "sparsify",
]


def _csr_parts(x):
    """(n_rows, n_cols, indptr, indices, data) with sorted indices and no stored zeros."""
    try:
        import scipy.sparse as sp
    except ImportError:  # pragma: no cover
        sp = None
    if sp is not None and sp.issparse(x):
        m = sp.csr_matrix(x, dtype=np.float64, copy=True)
        m.eliminate_zeros()
        m.sort_indices()
        return m.shape[0], m.shape[1], m.indptr, m.indices, m.data
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    rows, cols = np.nonzero(a)
    indptr = np.zeros(a.shape[0] + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return a.shape[0], a.shape[1], np.cumsum(indptr), cols, a[rows, cols]


def as_csr(x):
    """Convert a dense array, scipy sparse matrix or CsrMatrix to CsrMatrix."""
    if isinstance(x, CsrMatrix):
        return x
    return CsrMatrix(*_csr_parts(x))


def _targets(y):
    try:
        import scipy.sparse as sp

        sparse = sp.issparse(y)
    except ImportError:  # pragma: no cover
        sparse = False
    if not sparse:
        a = np.asarray(y)
        if a.ndim == 1:
            return a.astype(np.int64)
    return _csr_parts(y)


def _apply(config, options):
    for key, value in options.items():
        if not hasattr(config, key):
            raise TypeError(f"unknown option '{key}'")
        setattr(config, key, value)
    return config


def rank(x, y, embedding=None, **options):
    """Feature weights of x for class vector or binary label matrix y.

    Keyword options are RankingConfig attributes; ``embedding`` may be an
    EmbeddingConfig or a dict of its attributes. Returns (weights, info).
    """
    config = _apply(RankingConfig(), options)
    if embedding is not None:
        if isinstance(embedding, dict):
            embedding = _apply(EmbeddingConfig(), embedding)
        config.embedding = embedding
    return _reliefe.rank(as_csr(x), _targets(y), config)


def estimate_dimension(x, y=None, sample_cap=2048, trim=0.1, multiplier=1.0):
    """Two-nearest-neighbor latent dimension; returns a dict with d and slope."""
    x = as_csr(x)
    if y is None:
        y = np.zeros(x.shape[0], dtype=np.int64)
    return _reliefe.estimate_dimension(x, _targets(y), sample_cap, trim, multiplier)


def embed(x, y=None, **options):
    """Manifold projection of the rows of x; returns (coordinates, trained_rows, dim_fallback)."""
    x = as_csr(x)
    if y is None:
        y = np.zeros(x.shape[0], dtype=np.int64)
    return _reliefe.embed(x, _targets(y), _apply(EmbeddingConfig(), options))


def estimate_epsilon(x):
    return _reliefe.estimate_epsilon(as_csr(x))


def sparsify(x, epsilon=None, seed=0):
    """Probabilistic sparsification; returns a scipy CSR matrix."""
    import scipy.sparse as sp

    x = as_csr(x)
    out = _reliefe.sparsify(x, epsilon, seed)
    indptr, indices, data = out.arrays()
    return sp.csr_matrix((data, indices, indptr), shape=out.shape)


def rf1_curve(x, y, weights, grid, folds=3, seed=0):
    """Relative F1 of the probe learner on the top-f features for every f in grid."""
    return _reliefe.rf1_curve(as_csr(x), _targets(y), list(map(float, weights)), list(grid), folds, seed)
