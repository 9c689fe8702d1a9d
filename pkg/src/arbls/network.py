"""Random feature/enhancement layers of a broad learning system."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

__all__ = ["NetworkConfig", "FrozenNodes", "init_nodes", "build_hidden", "ACTIVATIONS"]

DEFAULT_LAMBDA = 2.0**-30

ACTIVATIONS = {
    "tanh": np.tanh,
    "sigmoid": lambda z: 0.5 * (1.0 + np.tanh(0.5 * z)),
}


@dataclass(frozen=True)
class NetworkConfig:
    """Structure of the hidden layer.

    n feature groups of q nodes each, m enhancement groups of p nodes each.
    ``strict`` enforces the usual search ranges (n, q <= 20, p <= 200).
    """

    n: int = 10
    q: int = 10
    m: int = 1
    p: int = 100
    lam: float = DEFAULT_LAMBDA
    seed: int = 0
    activation: str = "tanh"
    strict: bool = True

    def __post_init__(self):
        for name in ("n", "q", "m", "p"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.strict:
            if self.n > 20 or self.q > 20 or self.p > 200:
                raise ValueError(
                    f"structure (n={self.n}, q={self.q}, p={self.p}) outside n,q in [1,20], "
                    "p in [1,200]; pass strict=False to override"
                )
        if not self.lam > 0:
            raise ValueError("regularization lambda must be positive")
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def width(self):
        return self.n * self.q + self.m * self.p

    def structure(self) -> Tuple[int, int, int, int]:
        return (self.n, self.q, self.m, self.p)


@dataclass(frozen=True)
class FrozenNodes:
    feature_weights: Tuple[np.ndarray, ...]
    feature_biases: Tuple[np.ndarray, ...]
    enhancement_weights: Tuple[np.ndarray, ...]
    enhancement_biases: Tuple[np.ndarray, ...]
    config: NetworkConfig
    feature_dim: int


def _frozen(a):
    a.setflags(write=False)
    return a


def init_nodes(feature_dim: int, config: NetworkConfig) -> FrozenNodes:
    """Draw every node weight and bias i.i.d. from U[-1, 1] with ``config.seed``."""
    if feature_dim < 1:
        raise ValueError("feature_dim must be at least 1")
    rng = np.random.default_rng(config.seed)
    n, q, m, p = config.structure()
    fw, fb = [], []
    for _ in range(n):
        fw.append(_frozen(rng.uniform(-1.0, 1.0, size=(feature_dim, q))))
        fb.append(_frozen(rng.uniform(-1.0, 1.0, size=q)))
    ew, eb = [], []
    for _ in range(m):
        ew.append(_frozen(rng.uniform(-1.0, 1.0, size=(n * q, p))))
        eb.append(_frozen(rng.uniform(-1.0, 1.0, size=p)))
    return FrozenNodes(tuple(fw), tuple(fb), tuple(ew), tuple(eb), config, feature_dim)


def build_hidden(X, nodes: FrozenNodes) -> np.ndarray:
    """Hidden matrix ``A = [Z | H]`` with linear feature maps and activated enhancements."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != nodes.feature_dim:
        raise ValueError(
            f"X must be 2-D with {nodes.feature_dim} columns, got shape {X.shape}"
        )
    Z = np.hstack([X @ W + b for W, b in zip(nodes.feature_weights, nodes.feature_biases)])
    act = ACTIVATIONS[nodes.config.activation]
    H = [act(Z @ W + b) for W, b in zip(nodes.enhancement_weights, nodes.enhancement_biases)]
    return np.hstack([Z, *H])
