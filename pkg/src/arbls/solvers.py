"""Closed-form ridge and iteratively reweighted least squares.

The robust fit works on standardized residuals ``u = 0.6745 e / MAD``.
The MAD scale is taken from the ridge starting point and held fixed for the
rest of the fit, so every reweighting step is a majorize-minimize step on

    J(W) = sum_i rho(u_i) + (lam / 2) * ||s W||^2,      s = 0.6745 / MAD,

i.e. the ridge penalty applied to the weights expressed in the same
standardized units as ``u``. ``J`` never increases along the iterates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import linalg

from .kernels import KernelSpec, irls_weight, kernel_rho

__all__ = [
    "SolverConfig",
    "FitTrace",
    "NumericalError",
    "ridge_solve",
    "weighted_ridge_solve",
    "mad",
    "residual_scale",
    "normalized_residuals",
    "weighting_operator",
    "irls_objective",
    "irls_fit",
]

MAD_CONSISTENCY = 0.6745
MAD_FLOOR = 1e-8


class NumericalError(ArithmeticError):
    """Non-finite values appeared during an iterative fit."""


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 2.0**-30
    tol: float = 1e-6
    max_iter: int = 50

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


@dataclass
class FitTrace:
    iterations: int = 0
    objective_history: List[float] = field(default_factory=list)
    weight_deltas: List[float] = field(default_factory=list)
    converged: bool = False
    scale: float = 1.0


def _as_2d(Y):
    Y = np.asarray(Y, dtype=float)
    return (Y[:, None], True) if Y.ndim == 1 else (Y, False)


# Above this Gram-matrix condition estimate the normal equations lose too many
# digits; the same system is then solved in augmented least-squares form.
_GRAM_COND_LIMIT = 1e10


def _augmented_solve(A, Y, root_w, lam):
    """Least-squares solve of ``[sqrt(L) A; sqrt(lam) I] W = [sqrt(L) Y; 0]``.

    Same minimiser as the normal equations, but conditioned like ``A``
    rather than ``A^T A``.
    """
    d = A.shape[1]
    M = np.vstack([A if root_w is None else A * root_w[:, None], np.sqrt(lam) * np.eye(d)])
    rhs = np.vstack([Y if root_w is None else Y * root_w[:, None], np.zeros((d, Y.shape[1]))])
    return linalg.lstsq(M, rhs, check_finite=False, lapack_driver="gelsd")[0]


def _spd_solve(G, R):
    """Cholesky solve; ``None`` when ``G`` is not safely positive definite."""
    try:
        factor = linalg.cho_factor(G, lower=False, check_finite=False)
    except linalg.LinAlgError:
        return None
    diag = np.abs(np.diag(factor[0]))
    if (diag.max() / diag.min()) ** 2 > _GRAM_COND_LIMIT:
        return None
    return linalg.cho_solve(factor, R, check_finite=False)


def ridge_solve(A, Y, lam):
    """Minimiser of ``||AW - Y||^2 + lam ||W||^2``."""
    return weighted_ridge_solve(A, Y, None, lam)


def weighted_ridge_solve(A, Y, weights, lam):
    """Solve ``(A^T L A + lam I) W = A^T L Y`` with ``L = diag(weights)``.

    The diagonal is applied as a row scaling; it is never materialised.
    Well-conditioned systems go through a Cholesky factorisation. When the
    factor shows the Gram matrix is nearly singular (linear feature nodes
    with a tiny ``lam`` are the usual cause) the equivalent stacked
    least-squares problem is solved instead.
    """
    A = np.asarray(A, dtype=float)
    Y2, flat = _as_2d(Y)
    if A.ndim != 2 or A.shape[0] != Y2.shape[0]:
        raise ValueError(f"A has {A.shape[0] if A.ndim else 0} rows but Y has {Y2.shape[0]}")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    root_w = None
    if weights is None:
        Aw = A
    else:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (A.shape[0],):
            raise ValueError(f"weights must have length {A.shape[0]}, got shape {weights.shape}")
        if np.any(weights < 0):
            raise ValueError("weights must be non-negative")
        Aw = A * weights[:, None]
        root_w = np.sqrt(weights)
    G = Aw.T @ A
    G[np.diag_indices_from(G)] += lam
    W = _spd_solve(G, Aw.T @ Y2)
    if W is None:
        W = _augmented_solve(A, Y2, root_w, lam)
    return W[:, 0] if flat else W


def mad(e):
    e = np.asarray(e, dtype=float)
    return float(np.median(np.abs(e - np.median(e))))


def residual_scale(e):
    """Multiplier ``0.6745 / MAD`` that standardizes residuals (MAD floored at 1e-8)."""
    return MAD_CONSISTENCY / max(mad(e), MAD_FLOOR)


def normalized_residuals(e):
    e = np.asarray(e, dtype=float)
    if e.size == 0:
        raise ValueError("need at least one residual")
    return residual_scale(e) * e


def weighting_operator(u, spec: KernelSpec):
    """Diagonal of the reweighting matrix, as a vector."""
    return np.asarray(irls_weight(np.asarray(u, dtype=float), spec), dtype=float)


def _lead(M):
    return M if M.ndim == 1 else M[:, 0]


def irls_objective(u, W, scale, spec: KernelSpec, lam):
    """``sum rho(u) + (lam/2) ||scale * W||^2`` for the first output column."""
    w = _lead(np.asarray(W, dtype=float))
    return float(np.sum(kernel_rho(u, spec)) + 0.5 * lam * scale**2 * (w @ w))


def _check_finite(W, it):
    if not np.all(np.isfinite(W)):
        raise NumericalError(f"non-finite weights at iteration {it}")


def irls_fit(A, Y, spec: KernelSpec, cfg: SolverConfig = SolverConfig()):
    """Robust output weights by IRLS, starting from the ridge solution.

    Returns ``(W, trace)``. For multi-output ``Y`` the first column's
    residuals drive the row weights, which are shared by all columns.
    """
    A = np.asarray(A, dtype=float)
    Y = np.asarray(Y, dtype=float)
    W = ridge_solve(A, Y, cfg.lam)
    _check_finite(W, 0)
    e = _lead(A @ W - Y)
    scale = residual_scale(e)
    trace = FitTrace(scale=scale)
    trace.objective_history.append(irls_objective(scale * e, W, scale, spec, cfg.lam))
    for it in range(1, cfg.max_iter + 1):
        weights = weighting_operator(scale * e, spec)
        W_new = weighted_ridge_solve(A, Y, weights, cfg.lam)
        _check_finite(W_new, it)
        delta = float(np.linalg.norm(W_new - W))
        W = W_new
        e = _lead(A @ W - Y)
        trace.iterations = it
        trace.weight_deltas.append(delta)
        trace.objective_history.append(irls_objective(scale * e, W, scale, spec, cfg.lam))
        if delta < cfg.tol:
            trace.converged = True
            break
    return W, trace
