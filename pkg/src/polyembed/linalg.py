"""Numerical kernels: CCA, truncated SVD, alternating least squares, correlations."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


class UndefinedCorrelationError(ValueError):
    """Correlation with a constant vector is undefined."""


@dataclass
class CcaResult:
    proj_x: np.ndarray  # dx x r, columns are canonical directions for X
    proj_y: np.ndarray  # dy x r
    correlations: np.ndarray  # r values, non-increasing
    mean_x: np.ndarray
    mean_y: np.ndarray


def _as_matrix(a, name):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return a


def default_reg(cov: np.ndarray) -> float:
    return 1e-5 * float(np.trace(cov)) / cov.shape[0]


def _inv_sqrt(cov: np.ndarray, rank_tol: float = 1e-10) -> np.ndarray:
    """Symmetric inverse square root; directions with negligible variance are dropped.

    The result is ``d x k`` with ``k`` the numerical rank, so that
    ``W.T @ cov @ W = I_k``.
    """
    evals, evecs = np.linalg.eigh(cov)
    top = evals[-1] if evals.size else 0.0
    keep = evals > rank_tol * max(top, np.finfo(float).tiny)
    if not keep.any():
        return np.zeros((cov.shape[0], 0))
    return evecs[:, keep] / np.sqrt(evals[keep])


def cca_fit(X, Y, reg: float | None = None) -> CcaResult:
    """Canonical correlation analysis of paired rows of X (n x dx) and Y (n x dy).

    Covariances are regularized by ``reg * I``; ``reg=None`` picks
    ``1e-5 * trace(cov) / dims`` for each side.  With ``reg=0`` rank-deficient
    covariances are handled by whitening only their supported subspace, in
    which case components beyond the joint rank get correlation 0.
    """
    X = _as_matrix(X, "X")
    Y = _as_matrix(Y, "Y")
    n = X.shape[0]
    if n < 2:
        raise ValueError("CCA needs at least two paired rows")
    if Y.shape[0] != n:
        raise ValueError(f"row mismatch: {n} vs {Y.shape[0]}")
    mx, my = X.mean(axis=0), Y.mean(axis=0)
    Xc, Yc = X - mx, Y - my
    cxx = Xc.T @ Xc / (n - 1)
    cyy = Yc.T @ Yc / (n - 1)
    cxy = Xc.T @ Yc / (n - 1)
    rx = default_reg(cxx) if reg is None else reg
    ry = default_reg(cyy) if reg is None else reg
    if rx < 0 or ry < 0:
        raise ValueError("reg must be non-negative")
    wx = _inv_sqrt(cxx + rx * np.eye(cxx.shape[0]))
    wy = _inv_sqrt(cyy + ry * np.eye(cyy.shape[0]))
    r = min(X.shape[1], Y.shape[1])
    u, s, vt = np.linalg.svd(wx.T @ cxy @ wy)
    k = min(len(s), r)
    proj_x = np.zeros((X.shape[1], r))
    proj_y = np.zeros((Y.shape[1], r))
    proj_x[:, :k] = wx @ u[:, :k]
    proj_y[:, :k] = wy @ vt.T[:, :k]
    corr = np.zeros(r)
    corr[:k] = np.clip(s[:k], 0.0, 1.0)
    return CcaResult(proj_x, proj_y, corr, mx, my)


def first_canonical_correlation(X, Y, reg: float | None = None) -> float:
    return float(cca_fit(X, Y, reg).correlations[0])


def truncated_svd(M, k: int):
    """Top-k singular triplets ``(U_k, s_k, V_k)`` with ``M ~= U_k diag(s_k) V_k.T``."""
    M = _as_matrix(M, "M")
    if not 1 <= k <= min(M.shape):
        raise ValueError(f"k={k} out of range for a {M.shape[0]}x{M.shape[1]} matrix")
    u, s, vt = np.linalg.svd(M, full_matrices=False)
    return u[:, :k], s[:k], vt[:k].T


@dataclass
class FactorizationResult:
    U: np.ndarray
    V: np.ndarray
    objective: float
    history: list[float]  # objective after each full iteration, starting with the initial guess


def _multi_objective(targets, weights, approx) -> float:
    return float(sum(w * np.sum((t - approx) ** 2) for t, w in zip(targets, weights)))


def als_factorize(targets, d: int, iterations: int = 100, seed: int = 0, tol: float = 0.0) -> FactorizationResult:
    """Minimize ``sum_t w_t ||T_t - U V^T||^2`` by alternating least squares.

    ``targets`` is a list of ``(matrix, weight)`` pairs.  Because every term
    shares the same ``U V^T``, the minimizer is the one for the weighted
    average of the targets, which is what the alternating updates fit; the
    reported objective is always the full multi-term sum.
    """
    if not targets:
        raise ValueError("no targets to factorize")
    mats = [_as_matrix(t, "target") for t, _ in targets]
    weights = [float(w) for _, w in targets]
    shape = mats[0].shape
    for m in mats:
        if m.shape != shape:
            raise ValueError(f"target shape mismatch: {m.shape} vs {shape}")
    if any(w < 0 for w in weights) or sum(weights) <= 0:
        raise ValueError("weights must be non-negative with a positive sum")
    if not 1 <= d <= min(shape):
        raise ValueError(f"d={d} out of range for shape {shape}")
    avg = sum(w * m for w, m in zip(weights, mats)) / sum(weights)

    rng = np.random.default_rng(seed)
    V, _ = np.linalg.qr(rng.standard_normal((shape[1], d)))
    U = avg @ V
    history = [_multi_objective(mats, weights, U @ V.T)]
    for it in range(iterations):
        # U-step with V orthonormal: U = avg V
        V, _ = np.linalg.qr(V)
        U = avg @ V
        # V-step: V = avg^T U (U^T U)^-1
        gram = U.T @ U
        V = np.linalg.lstsq(gram, (avg.T @ U).T, rcond=None)[0].T
        history.append(_multi_objective(mats, weights, U @ V.T))
        if tol > 0 and history[-2] - history[-1] <= tol * max(history[-2], 1e-300):
            break
    logger.debug("als: %d iterations, objective %.6g", len(history) - 1, history[-1])
    return FactorizationResult(U, V, history[-1], history)


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-d vectors of equal length")
    if len(x) < 2:
        raise ValueError("pearson needs at least two observations")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = np.sqrt(np.dot(xc, xc))
    sy = np.sqrt(np.dot(yc, yc))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("correlation with a constant vector is undefined")
    r = float(np.dot(xc, yc) / (sx * sy))
    return max(-1.0, min(1.0, r))


def average_ranks(x) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("spearman needs vectors of equal length")
    return pearson(average_ranks(x), average_ranks(y))
