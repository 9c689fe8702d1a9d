"""Seeded contamination of training targets.

Two protocols: proportional outliers (a random subset of targets gets a
uniform draw added) and additive symmetric alpha-stable noise with
characteristic function ``exp(-dispersion * |x| ** exponent)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["OutlierSpec", "StableSpec", "inject_outliers", "sample_stable", "add_stable_noise"]


@dataclass(frozen=True)
class OutlierSpec:
    proportion: float
    low: float = 0.0
    high: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.proportion <= 1.0:
            raise ValueError(f"outlier proportion must be in [0, 1], got {self.proportion}")
        if self.low > self.high:
            raise ValueError("outlier range needs low <= high")


@dataclass(frozen=True)
class StableSpec:
    dispersion: float = 0.1
    exponent: float = 1.5
    seed: int = 0

    def __post_init__(self):
        if not self.dispersion > 0:
            raise ValueError("dispersion must be positive")
        if not 0.0 < self.exponent <= 2.0:
            raise ValueError(f"stable exponent must be in (0, 2], got {self.exponent}")


def inject_outliers(y, spec: OutlierSpec):
    """Add ``U[low, high]`` draws to ``floor(P * N)`` distinct random entries.

    Returns the contaminated copy and the sorted contaminated indices. For a
    fixed seed the contaminated sets are nested in the proportion.
    """
    y = np.array(y, dtype=float)
    rng = np.random.default_rng(spec.seed)
    k = int(np.floor(spec.proportion * y.size + 1e-9))
    # one permutation and one draw per row, so larger proportions extend smaller ones
    order = rng.permutation(y.size)
    shifts = rng.uniform(spec.low, spec.high, size=y.size)
    idx = order[:k]
    y[idx] += shifts[:k]
    return y, np.sort(idx)


def _standard_sas(mu, size, rng):
    # Chambers-Mallows-Stuck, symmetric case
    v = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size=size)
    w = rng.standard_exponential(size=size)
    if mu == 1.0:
        return np.tan(v)
    return (np.sin(mu * v) / np.cos(v) ** (1.0 / mu)) * (
        np.cos(v - mu * v) / w
    ) ** ((1.0 - mu) / mu)


def sample_stable(spec: StableSpec, count: int):
    """``count`` symmetric stable draws with characteristic function ``exp(-rho |x|^mu)``."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(spec.seed)
    mu = float(spec.exponent)
    return spec.dispersion ** (1.0 / mu) * _standard_sas(mu, count, rng)


def add_stable_noise(y, spec: StableSpec):
    y = np.asarray(y, dtype=float)
    return y + sample_stable(spec, y.size).reshape(y.shape)
