"""Robust loss kernels.

The one-parameter family of robust losses ``rho(e, alpha, c)`` (quadratic at
``alpha = 2``, Cauchy-like at 0, Welsch in the limit) with its influence function,
exact and truncated partition functions, the truncated negative
log-likelihood used to pick ``alpha``, and the classical fixed
M-estimator weight functions (Huber, Cauchy, Welsch).

``alpha = -inf`` is accepted everywhere as the Welsch-limit sentinel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate

__all__ = [
    "ALPHA_MIN",
    "NEG_INF",
    "HUBER_K",
    "CAUCHY_C",
    "WELSCH_C",
    "KernelSpec",
    "PartitionTable",
    "rho_general",
    "influence",
    "irls_weight",
    "kernel_rho",
    "partition_exact",
    "partition_truncated",
    "adaptive_nll",
    "build_partition_table",
    "alpha_grid",
]

ALPHA_MIN = -10.0
NEG_INF = -np.inf

# 95% asymptotic efficiency under Gaussian noise.
HUBER_K = 1.345
CAUCHY_C = 2.3849
WELSCH_C = 2.9846

_BRANCH_TOL = 1e-7
FAMILIES = ("l2", "huber", "cauchy", "welsch", "adaptive")


def _check_scale(c):
    if not np.all(np.asarray(c) > 0):
        raise ValueError(f"scale c must be positive, got {c!r}")


def _is_welsch_limit(alpha):
    return np.isneginf(alpha)


def rho_general(e, alpha, c=1.0):
    """General robust loss, vectorised over ``e``.

    Parameters
    ----------
    e : array_like
        Residuals.
    alpha : float
        Shape parameter. ``2`` is the quadratic loss, ``0`` the Cauchy-like
        log loss, ``-inf`` the Welsch loss.
    c : float
        Width of the quadratic bowl around zero.

    Returns
    -------
    ndarray or float
        Non-negative loss values, same shape as ``e``.
    """
    _check_scale(c)
    alpha = float(alpha)
    x2 = (np.asarray(e, dtype=float) / c) ** 2
    if abs(alpha - 2.0) < _BRANCH_TOL:
        out = 0.5 * x2
    elif abs(alpha) < _BRANCH_TOL:
        out = np.log1p(0.5 * x2)
    elif _is_welsch_limit(alpha):
        out = -np.expm1(-0.5 * x2)
    elif np.isnan(alpha) or np.isinf(alpha):
        raise ValueError(f"alpha must be finite or -inf, got {alpha}")
    else:
        b = abs(alpha - 2.0)
        out = (b / alpha) * np.expm1(0.5 * alpha * np.log1p(x2 / b))
    return out if out.ndim else float(out)


def influence(e, alpha, c=1.0):
    """Derivative of :func:`rho_general` with respect to the residual."""
    _check_scale(c)
    alpha = float(alpha)
    e = np.asarray(e, dtype=float)
    x2 = (e / c) ** 2
    if abs(alpha - 2.0) < _BRANCH_TOL:
        out = e / c**2
    elif abs(alpha) < _BRANCH_TOL:
        out = 2.0 * e / (e**2 + 2.0 * c**2)
    elif _is_welsch_limit(alpha):
        out = e / c**2 * np.exp(-0.5 * x2)
    elif np.isnan(alpha) or np.isinf(alpha):
        raise ValueError(f"alpha must be finite or -inf, got {alpha}")
    else:
        b = abs(alpha - 2.0)
        out = e / c**2 * np.exp((0.5 * alpha - 1.0) * np.log1p(x2 / b))
    return out if out.ndim else float(out)


def _adaptive_weight(u, alpha, c):
    # influence(u)/u with the u -> 0 limit 1/c**2 built in
    x2 = (np.asarray(u, dtype=float) / c) ** 2
    if abs(alpha - 2.0) < _BRANCH_TOL:
        return np.full_like(x2, 1.0 / c**2)
    if abs(alpha) < _BRANCH_TOL:
        return 1.0 / (c**2 * (1.0 + 0.5 * x2))
    if _is_welsch_limit(alpha):
        return np.exp(-0.5 * x2) / c**2
    b = abs(alpha - 2.0)
    return np.exp((0.5 * alpha - 1.0) * np.log1p(x2 / b)) / c**2


@dataclass(frozen=True)
class KernelSpec:
    """Loss family selector.

    ``shape`` is ``alpha`` for the adaptive family and the tuning constant
    (Huber ``k``, Cauchy/Welsch ``c``) for the fixed families; it is unused
    for ``l2``. ``scale`` is the adaptive width ``c``.
    """

    family: str
    shape: float = 2.0
    scale: float = 1.0

    def __post_init__(self):
        fam = self.family.lower()
        if fam not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        if not self.scale > 0:
            raise ValueError("kernel scale must be positive")
        if fam == "adaptive":
            if not (ALPHA_MIN <= self.shape <= 2.0 or _is_welsch_limit(self.shape)):
                raise ValueError(f"adaptive alpha must lie in [{ALPHA_MIN}, 2], got {self.shape}")
        elif fam != "l2" and not self.shape > 0:
            raise ValueError(f"{fam} tuning constant must be positive")

    @classmethod
    def l2(cls):
        return cls("l2")

    @classmethod
    def huber(cls, k=HUBER_K):
        return cls("huber", k)

    @classmethod
    def cauchy(cls, c=CAUCHY_C):
        return cls("cauchy", c)

    @classmethod
    def welsch(cls, c=WELSCH_C):
        return cls("welsch", c)

    @classmethod
    def adaptive(cls, alpha, c=1.0):
        return cls("adaptive", alpha, c)

    @classmethod
    def from_name(cls, name):
        """Build a kernel with default constants from ``"huber"``, ``"bls"`` etc."""
        name = name.lower()
        if name in ("l2", "bls", "ridge"):
            return cls.l2()
        try:
            return {"huber": cls.huber, "cauchy": cls.cauchy, "welsch": cls.welsch}[name]()
        except KeyError:
            raise ValueError(f"no fixed kernel named {name!r}") from None


def irls_weight(u, spec: KernelSpec):
    """IRLS weight ``psi(u) / u`` for the kernel, with the ``u = 0`` limit filled in."""
    u = np.asarray(u, dtype=float)
    fam = spec.family
    if fam == "l2":
        w = np.ones_like(u)
    elif fam == "huber":
        au = np.abs(u)
        with np.errstate(divide="ignore"):
            w = np.where(au <= spec.shape, 1.0, spec.shape / np.where(au == 0, 1.0, au))
    elif fam == "cauchy":
        w = 1.0 / (1.0 + (u / spec.shape) ** 2)
    elif fam == "welsch":
        w = np.exp(-((u / spec.shape) ** 2))
    else:
        w = _adaptive_weight(u, float(spec.shape), spec.scale)
    return w if w.ndim else float(w)


def kernel_rho(u, spec: KernelSpec):
    """Loss whose IRLS weight is :func:`irls_weight` for the same kernel."""
    u = np.asarray(u, dtype=float)
    fam = spec.family
    if fam == "l2":
        out = 0.5 * u**2
    elif fam == "huber":
        k = spec.shape
        au = np.abs(u)
        out = np.where(au <= k, 0.5 * u**2, k * au - 0.5 * k**2)
    elif fam == "cauchy":
        c = spec.shape
        out = 0.5 * c**2 * np.log1p((u / c) ** 2)
    elif fam == "welsch":
        c = spec.shape
        out = -0.5 * c**2 * np.expm1(-((u / c) ** 2))
    else:
        return rho_general(u, spec.shape, spec.scale)
    return out if out.ndim else float(out)


def partition_exact(alpha, c=1.0):
    """Normalising integral of ``exp(-rho)`` over the whole real line.

    Only defined for ``alpha`` in ``[0, 2]``; below zero the loss is bounded
    and the integral diverges (use :func:`partition_truncated`).
    """
    _check_scale(c)
    if not 0.0 <= alpha <= 2.0:
        raise ValueError(
            f"exact partition undefined for alpha={alpha}; use partition_truncated"
        )
    half, _ = integrate.quad(
        lambda t: np.exp(-rho_general(t, alpha, c)), 0.0, np.inf,
        epsrel=1e-8, epsabs=0.0, limit=200,
    )
    return 2.0 * half


_PANELS = 1024


def partition_truncated(alpha, c=1.0, epsilon=10.0, panels=_PANELS):
    """``exp(-rho)`` integrated over ``[-epsilon, epsilon]``.

    Composite Simpson rule with ``panels`` panels on ``[0, epsilon]``,
    doubled by symmetry. Finite for every ``alpha <= 2``.
    """
    _check_scale(c)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if panels < 512:
        raise ValueError("at least 512 panels required")
    panels += panels % 2
    t = np.linspace(0.0, epsilon, panels + 1)
    return 2.0 * float(integrate.simpson(np.exp(-rho_general(t, alpha, c)), x=t))


@dataclass(frozen=True)
class PartitionTable:
    """Precomputed ``log Z_hat(alpha)`` on a sorted grid; linear in between."""

    alphas: np.ndarray
    log_values: np.ndarray
    epsilon: float
    c: float = 1.0
    _lookup: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=float)
        logs = np.array(self.log_values, dtype=float)
        if alphas.ndim != 1 or alphas.size == 0 or alphas.shape != logs.shape:
            raise ValueError("alphas and log_values must be equal-length non-empty 1-D sequences")
        if np.any(np.diff(alphas) <= 0):
            raise ValueError("alphas must be strictly increasing")
        if not np.all(np.isfinite(logs)):
            raise ValueError("log partition values must be finite")
        alphas.setflags(write=False)
        logs.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "log_values", logs)
        object.__setattr__(self, "_lookup", {round(a, 9): v for a, v in zip(alphas, logs)})

    def __len__(self):
        return self.alphas.size

    def log_z(self, alpha):
        """Interpolated ``log Z_hat(alpha)``."""
        alpha = float(alpha)
        lo, hi = self.alphas[0], self.alphas[-1]
        if not lo - 1e-12 <= alpha <= hi + 1e-12:
            raise ValueError(f"alpha={alpha} outside partition table range [{lo}, {hi}]")
        hit = self._lookup.get(round(alpha, 9))
        if hit is not None:
            return float(hit)
        return float(np.interp(alpha, self.alphas, self.log_values))


def build_partition_table(alpha_grid: Sequence[float], c=1.0, epsilon=10.0):
    grid = np.asarray(alpha_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("alpha grid is empty")
    if grid.min() < ALPHA_MIN - 1e-12 or grid.max() > 2.0 + 1e-12:
        raise ValueError(f"alpha grid must lie within [{ALPHA_MIN}, 2]")
    logs = [np.log(partition_truncated(a, c, epsilon)) for a in grid]
    return PartitionTable(grid, np.array(logs), float(epsilon), float(c))


def adaptive_nll(e, alpha, c, table: PartitionTable):
    """Truncated negative log-likelihood ``rho + log(c * Z_hat(alpha))``."""
    return rho_general(e, alpha, c) + np.log(c) + table.log_z(alpha)


def alpha_grid(alpha_min=ALPHA_MIN, step=0.1):
    """Candidate shapes ``alpha_min, alpha_min + step, ..., 2`` (2 always included)."""
    if not alpha_min < 2.0:
        raise ValueError("alpha_min must be below 2")
    if not step > 0:
        raise ValueError("alpha step must be positive")
    n = int(np.floor((2.0 - alpha_min) / step + 1e-9))
    grid = np.round(alpha_min + step * np.arange(n + 1), 10)
    if 2.0 - grid[-1] > 1e-9:
        grid = np.append(grid, 2.0)
    return grid
