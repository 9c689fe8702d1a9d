"""Scikit-learn compatible regressors.

``BLSRegressor`` is the plain ridge-trained broad learning system,
``MBLSRegressor`` swaps the squared loss for a fixed M-estimator and
``ARBLSRegressor`` learns the shape of an adaptive robust kernel while
fitting. All three share the same random hidden layer for a given
structure and ``random_state``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .adaptive import AdaptiveConfig, arbls_fit
from .kernels import ALPHA_MIN, KernelSpec
from .network import DEFAULT_LAMBDA, NetworkConfig, build_hidden, init_nodes
from .solvers import SolverConfig, irls_fit, ridge_solve

__all__ = ["BLSRegressor", "MBLSRegressor", "ARBLSRegressor"]


class BLSRegressor(RegressorMixin, BaseEstimator):
    """Broad learning system regressor.

    Parameters
    ----------
    n_feature_groups, feature_nodes : int
        Number of linear feature-node groups and nodes per group.
    n_enhancement_groups, enhancement_nodes : int
        Number of enhancement groups and nodes per group.
    reg_lambda : float
        Ridge coefficient on the output weights.
    activation : {"tanh", "sigmoid"}
        Enhancement-node nonlinearity.
    random_state : int or None
        Seed for the frozen random node parameters.
    scale_inputs : bool
        Min-max scale ``X`` and ``y`` with training-set ranges and undo the
        target scaling in :meth:`predict`.
    strict_structure : bool
        Reject structures outside the usual search ranges.
    """

    def __init__(
        self,
        n_feature_groups=10,
        feature_nodes=10,
        n_enhancement_groups=1,
        enhancement_nodes=100,
        reg_lambda=DEFAULT_LAMBDA,
        activation="tanh",
        random_state=0,
        scale_inputs=False,
        strict_structure=True,
    ):
        self.n_feature_groups = n_feature_groups
        self.feature_nodes = feature_nodes
        self.n_enhancement_groups = n_enhancement_groups
        self.enhancement_nodes = enhancement_nodes
        self.reg_lambda = reg_lambda
        self.activation = activation
        self.random_state = random_state
        self.scale_inputs = scale_inputs
        self.strict_structure = strict_structure

    def _network_config(self):
        seed = self.random_state
        if seed is None:
            seed = int(np.random.default_rng().integers(2**63))
        return NetworkConfig(
            n=self.n_feature_groups, q=self.feature_nodes,
            m=self.n_enhancement_groups, p=self.enhancement_nodes,
            lam=self.reg_lambda, seed=int(seed), activation=self.activation,
            strict=self.strict_structure,
        )

    def _solve(self, A, Y):
        return ridge_solve(A, Y, self.reg_lambda)

    def fit(self, X, y):
        X, y = validate_data(self, X, y, multi_output=True, y_numeric=True, dtype=np.float64)
        config = self._network_config()
        if self.scale_inputs:
            self.x_min_, self.x_max_ = X.min(axis=0), X.max(axis=0)
            self.y_min_, self.y_max_ = y.min(axis=0), y.max(axis=0)
            X = self._scale(X, self.x_min_, self.x_max_)
            y = self._scale(y, self.y_min_, self.y_max_)
        self.nodes_ = init_nodes(X.shape[1], config)
        A = build_hidden(X, self.nodes_)
        self.coef_ = self._solve(A, y)
        return self

    @staticmethod
    def _scale(v, lo, hi):
        span = np.where(hi > lo, hi - lo, 1.0)
        return np.where(hi > lo, (v - lo) / span, 0.0)

    def hidden_matrix(self, X):
        """Hidden-layer activations ``[Z | H]`` for ``X``."""
        check_is_fitted(self)
        X = validate_data(self, X, reset=False, dtype=np.float64)
        if self.scale_inputs:
            X = self._scale(X, self.x_min_, self.x_max_)
        return build_hidden(X, self.nodes_)

    def predict(self, X):
        out = self.hidden_matrix(X) @ self.coef_
        if self.scale_inputs:
            out = out * (self.y_max_ - self.y_min_) + self.y_min_
        return out

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.target_tags.multi_output = True
        return tags


class MBLSRegressor(BLSRegressor):
    """Broad learning system trained by IRLS under a fixed M-estimator.

    ``loss`` is one of ``"huber"``, ``"cauchy"``, ``"welsch"`` or ``"l2"``;
    ``tuning`` overrides the family's default constant.
    """

    def __init__(
        self,
        loss="huber",
        tuning=None,
        tol=1e-6,
        max_iter=50,
        n_feature_groups=10,
        feature_nodes=10,
        n_enhancement_groups=1,
        enhancement_nodes=100,
        reg_lambda=DEFAULT_LAMBDA,
        activation="tanh",
        random_state=0,
        scale_inputs=False,
        strict_structure=True,
    ):
        super().__init__(
            n_feature_groups=n_feature_groups, feature_nodes=feature_nodes,
            n_enhancement_groups=n_enhancement_groups, enhancement_nodes=enhancement_nodes,
            reg_lambda=reg_lambda, activation=activation, random_state=random_state,
            scale_inputs=scale_inputs, strict_structure=strict_structure,
        )
        self.loss = loss
        self.tuning = tuning
        self.tol = tol
        self.max_iter = max_iter

    def _kernel(self):
        if self.tuning is None:
            return KernelSpec.from_name(self.loss)
        return KernelSpec(self.loss, self.tuning)

    def _solve(self, A, Y):
        cfg = SolverConfig(self.reg_lambda, self.tol, self.max_iter)
        W, self.trace_ = irls_fit(A, Y, self._kernel(), cfg)
        self.n_iter_ = self.trace_.iterations
        return W


class ARBLSRegressor(BLSRegressor):
    """Broad learning system with an adaptive robust kernel.

    The kernel shape ``alpha`` is re-selected on the grid
    ``alpha_min, alpha_min + alpha_step, ..., 2`` before every reweighting
    step. After fitting, ``alpha_`` holds the final shape, ``c_`` the kernel
    width and ``trace_`` the full optimisation history.
    """

    def __init__(
        self,
        alpha_min=ALPHA_MIN,
        alpha_step=0.1,
        epsilon=10.0,
        c_policy="fixed_one",
        tol=1e-6,
        max_iter=50,
        n_feature_groups=10,
        feature_nodes=10,
        n_enhancement_groups=1,
        enhancement_nodes=100,
        reg_lambda=DEFAULT_LAMBDA,
        activation="tanh",
        random_state=0,
        scale_inputs=False,
        strict_structure=True,
    ):
        super().__init__(
            n_feature_groups=n_feature_groups, feature_nodes=feature_nodes,
            n_enhancement_groups=n_enhancement_groups, enhancement_nodes=enhancement_nodes,
            reg_lambda=reg_lambda, activation=activation, random_state=random_state,
            scale_inputs=scale_inputs, strict_structure=strict_structure,
        )
        self.alpha_min = alpha_min
        self.alpha_step = alpha_step
        self.epsilon = epsilon
        self.c_policy = c_policy
        self.tol = tol
        self.max_iter = max_iter

    def _solve(self, A, Y):
        cfg = AdaptiveConfig(
            self.alpha_min, self.alpha_step, self.epsilon, self.c_policy,
            SolverConfig(self.reg_lambda, self.tol, self.max_iter),
        )
        W, self.trace_ = arbls_fit(A, Y, cfg)
        self.alpha_ = self.trace_.alpha
        self.c_ = self.trace_.c_history[-1]
        self.n_iter_ = self.trace_.fit_trace.iterations
        return W
