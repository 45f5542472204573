"""scikit-learn style front end to the decoders.

Samples are integer outcome masks.  ``ConvolutionPowers`` turns raw
per-event samples into power columns; the decoders fit on those columns and
expose the recovered distribution as ``noise_``.

>>> from sklearn.pipeline import make_pipeline
>>> model = make_pipeline(ConvolutionPowers(source="p"), SeriesDecoder(w=3, s=0))
>>> model.fit(raw_p_draws)                                   # doctest: +SKIP
>>> model[-1].noise_.infidelity()                            # doctest: +SKIP
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .decoder import NEGATIVE_MODES, decode_series, series_coefficients, solve_exact
from .distribution import Distribution
from .hypergraph import MAX_QUBITS


def check_masks(X, n_qubits: int | None = None, min_columns: int = 1) -> tuple[np.ndarray, int]:
    """Validate an array of outcome masks.

    Parameters
    ----------
    X : array-like of int, shape (n_samples,) or (n_samples, n_columns)
    n_qubits : int, optional
        Inferred from the largest mask when omitted.
    min_columns : int

    Returns
    -------
    X : ndarray of int64, shape (n_samples, n_columns)
    n_qubits : int
    """
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"expected a 1-D or 2-D array of masks, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("need at least one sample")
    if arr.shape[1] < min_columns:
        raise ValueError(f"need at least {min_columns} columns, got {arr.shape[1]}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("masks must be integers")
    arr = arr.astype(np.int64)
    if arr.min() < 0:
        raise ValueError("masks must be nonnegative")
    needed = max(int(arr.max()).bit_length(), 1)
    if n_qubits is None:
        n_qubits = needed
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
    if needed > n_qubits:
        raise ValueError(f"mask needs {needed} qubits but n_qubits={n_qubits}")
    return arr, n_qubits


def empirical(column: np.ndarray, n_qubits: int) -> Distribution:
    uniq, cnt = np.unique(column, return_counts=True)
    return Distribution(n_qubits, dict(zip(uniq.tolist(), (cnt / column.size).tolist())))


class ConvolutionPowers(TransformerMixin, BaseEstimator):
    """Raw per-event samples -> columns sampling ``mu^{*0}, mu^{*1}, ...``.

    Parameters
    ----------
    source : {"mu", "p"}
        ``"mu"``: each input column is one measured outcome.  ``"p"``:
        columns come in pairs of draws from p and are XORed first.
    n_qubits : int, optional
    """

    def __init__(self, source: str = "mu", n_qubits: int | None = None):
        self.source = source
        self.n_qubits = n_qubits

    def fit(self, X, y=None):
        if self.source not in ("mu", "p"):
            raise ValueError("source must be 'mu' or 'p'")
        arr, self.n_qubits_ = check_masks(X, self.n_qubits)
        if self.source == "p" and arr.shape[1] % 2:
            raise ValueError("source='p' needs an even number of columns")
        self.n_features_in_ = arr.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_qubits_")
        arr, _ = check_masks(X, self.n_qubits_)
        if arr.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {arr.shape[1]}")
        mu = arr[:, 0::2] ^ arr[:, 1::2] if self.source == "p" else arr
        return np.bitwise_xor.accumulate(mu, axis=1)


class ExactDecoder(BaseEstimator):
    """Spectral decoder fitted on outcome samples of mu.

    Parameters
    ----------
    k : int
        Hypergraph order (3 for CCZ states).
    negatives : {"clamp", "error"}
    n_qubits : int, optional

    Attributes
    ----------
    mu_ : Distribution
        Empirical law of the first column.
    noise_ : Distribution
        Recovered quasi-probability p.
    n_clamped_ : int
    """

    def __init__(self, k: int = 3, negatives: str = "clamp", n_qubits: int | None = None):
        self.k = k
        self.negatives = negatives
        self.n_qubits = n_qubits

    def fit(self, X, y=None):
        if self.negatives not in NEGATIVE_MODES:
            raise ValueError(f"negatives must be one of {NEGATIVE_MODES}")
        arr, self.n_qubits_ = check_masks(X, self.n_qubits)
        self.mu_ = empirical(arr[:, 0], self.n_qubits_)
        self.noise_, info = solve_exact(self.mu_, k=self.k, negatives=self.negatives, return_info=True)
        self.n_clamped_ = info["clamped"]
        self.n_features_in_ = arr.shape[1]
        return self

    def score_samples(self, X) -> np.ndarray:
        """Estimated ``p_a`` at each mask in ``X``."""
        check_is_fitted(self, "noise_")
        arr, _ = check_masks(X, self.n_qubits_)
        return np.array([self.noise_[int(m)] for m in arr[:, 0]])


class SeriesDecoder(BaseEstimator):
    """Truncated convolution-series decoder ``p ~ sum_j c_j mu^{*j}``.

    Parameters
    ----------
    w, s : int
        Series order and number of extra geometric terms.
    n_qubits : int, optional

    Attributes
    ----------
    table_ : CoeffTable
    coef_ : ndarray of float
    noise_ : Distribution
    """

    def __init__(self, w: int = 2, s: int = 0, n_qubits: int | None = None):
        self.w = w
        self.s = s
        self.n_qubits = n_qubits

    def fit(self, X, y=None):
        self.table_ = series_coefficients(self.w, self.s)
        arr, self.n_qubits_ = check_masks(X, self.n_qubits, min_columns=self.table_.a_ws)
        powers = [empirical(arr[:, j], self.n_qubits_) for j in range(self.table_.a_ws)]
        self.coef_ = np.array(self.table_.floats)
        self.noise_ = decode_series(powers, self.table_)
        self.n_features_in_ = arr.shape[1]
        return self

    def score_samples(self, X) -> np.ndarray:
        check_is_fitted(self, "noise_")
        arr, _ = check_masks(X, self.n_qubits_)
        return np.array([self.noise_[int(m)] for m in arr[:, 0]])
