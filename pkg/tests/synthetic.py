"""Shared synthetic problems for the test suite."""

import numpy as np

from arbls.adaptive import arbls_fit
from arbls.network import NetworkConfig, build_hidden, init_nodes
from arbls.noise import OutlierSpec, inject_outliers

LADDER = (0.0, 0.1, 0.2, 0.3)


def linear_problem(seed, n_samples=500, n_features=8, noise=0.05):
    """Linear target plus N(0, noise) on uniform inputs, every column min-max scaled."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n_samples, n_features))
    y = X @ rng.normal(size=n_features) + rng.normal(0.0, noise, n_samples)
    X = (X - X.min(0)) / (X.max(0) - X.min(0))
    y = (y - y.min()) / (y.max() - y.min())
    return X, y


def ladder_alphas(seed, proportions=LADDER):
    """Final AR-BLS shape for each outlier share, same clean data and hidden layer."""
    X, y = linear_problem(seed)
    A = build_hidden(X, init_nodes(X.shape[1], NetworkConfig(5, 5, 1, 20, seed=seed)))
    out = []
    for p in proportions:
        y_obs, _ = inject_outliers(y, OutlierSpec(p, 0.0, 1.0, seed))
        out.append(arbls_fit(A, y_obs)[1].alpha)
    return np.array(out)
