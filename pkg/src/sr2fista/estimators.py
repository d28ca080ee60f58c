"""scikit-learn style front-ends.

``SR2FISTA`` and ``ISTA`` are solvers whose ``fit`` takes a
:class:`~sr2fista.problem.ProblemSpec`; they support ``get_params``,
``set_params`` and ``clone`` like any estimator.  ``PenalizedLeastSquares``
is a regular regressor (``fit(X, y)`` / ``predict(X)``) for least squares
with an l1, MCP or SCAD penalty, solved by the accelerated method.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import prox
from .problem import ProblemSpec, SmoothOracle, zero_regularizer
from .solver import Backtracking, SolverConfig, solve


class _SolverEstimator(BaseEstimator):
    _algorithm = None

    def _config(self):
        raise NotImplementedError

    def _solve_kwargs(self):
        return {}

    def fit(self, problem, x0=None):
        """Minimize ``problem`` starting from ``x0`` (zeros by default)."""
        if not isinstance(problem, ProblemSpec):
            raise TypeError(f"expected a ProblemSpec, got {type(problem).__name__}")
        if x0 is None:
            x0 = np.zeros(problem.dimension)
        result = solve(problem, self._config(), x0, self._algorithm,
                       **self._solve_kwargs())
        self.result_ = result
        self.x_ = result.state.x
        self.trace_ = result.trace
        self.n_iter_ = result.state.k
        self.stop_reason_ = result.stop_reason
        return self

    def objective(self, problem):
        check_is_fitted(self, "x_")
        return problem.f(self.x_)


class SR2FISTA(_SolverEstimator):
    """Accelerated forward-backward solver.

    Parameters
    ----------
    beta_mode : {"compromised", "plain"}
        ``beta = mu_g - mu^2/(4 L_g)`` (gap certificate) or ``beta = mu_g``.
    max_iter : int
    target_gap : float, optional
        Stop once ``f(x_k) - f*`` drops below it (needs a known optimum).
    backtracking : tuple ``(initial_L, increase_factor)`` or Backtracking, optional
        Estimate ``L_g`` by increase-only backtracking instead of using the
        problem's constant.
    trace_every : int
    """

    _algorithm = "sr2fista"

    def __init__(self, beta_mode="compromised", max_iter=1000, target_gap=None,
                 backtracking=None, trace_every=1):
        self.beta_mode = beta_mode
        self.max_iter = max_iter
        self.target_gap = target_gap
        self.backtracking = backtracking
        self.trace_every = trace_every

    def _config(self):
        bt = self.backtracking
        if bt is not None and not isinstance(bt, Backtracking):
            bt = Backtracking(*bt)
        return SolverConfig(self.beta_mode, self.max_iter, self.target_gap, bt,
                            self.trace_every)


class ISTA(_SolverEstimator):
    """Proximal gradient with a fixed step (``1/L_g`` when ``step_size`` is None)."""

    _algorithm = "ista"

    def __init__(self, step_size=None, max_iter=1000, target_gap=None, trace_every=1):
        self.step_size = step_size
        self.max_iter = max_iter
        self.target_gap = target_gap
        self.trace_every = trace_every

    def _config(self):
        return SolverConfig("compromised", self.max_iter, self.target_gap, None,
                            self.trace_every)

    def _solve_kwargs(self):
        return {"eta": self.step_size}


def least_squares_oracle(X, y):
    """``g(w) = ||X w - y||^2 / (2 n)`` with constants from the singular values."""
    n, d = X.shape
    sv = np.linalg.svd(X, compute_uv=False)
    L = float(sv[0] ** 2 / n) if sv.size else 0.0
    mu = float(sv[-1] ** 2 / n) if n >= d and sv.size else 0.0

    def value(w):
        r = X @ w - y
        return 0.5 * float(r @ r) / n

    def gradient(w):
        return X.T @ (X @ w - y) / n

    return SmoothOracle(value, gradient, max(L, np.finfo(float).tiny), min(mu, L),
                        name="least_squares")


class PenalizedLeastSquares(RegressorMixin, BaseEstimator):
    """Least squares with an l1, MCP or SCAD penalty.

    Minimizes ``||y - X w||^2 / (2 n) + sum_j P(w_j)`` where ``P`` is
    ``alpha |w|``, ``MCP(w; alpha, gamma)`` or ``SCAD(w; alpha, a)``.  The l1
    objective is the one minimized by ``sklearn.linear_model.Lasso``.

    The weakly convex penalties need the data term to be strong enough to
    keep the total objective convex: ``sigma_min(X)^2 / n >= 1/gamma`` (MCP)
    or ``>= 1/(a - 1)`` (SCAD).
    """

    def __init__(self, penalty="l1", alpha=1.0, gamma=3.0, a=3.7, fit_intercept=True,
                 max_iter=500, beta_mode="compromised"):
        self.penalty = penalty
        self.alpha = alpha
        self.gamma = gamma
        self.a = a
        self.fit_intercept = fit_intercept
        self.max_iter = max_iter
        self.beta_mode = beta_mode

    def _regularizer(self):
        if self.penalty == "l1":
            return prox.l1(self.alpha)
        if self.penalty == "mcp":
            return prox.mcp(self.alpha, self.gamma)
        if self.penalty == "scad":
            return prox.scad(self.alpha, self.a)
        if self.penalty == "none":
            return zero_regularizer()
        raise ValueError(f"unknown penalty {self.penalty!r}")

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        if self.fit_intercept:
            X_offset, y_offset = X.mean(axis=0), float(y.mean())
        else:
            X_offset, y_offset = np.zeros(X.shape[1]), 0.0
        Xc, yc = X - X_offset, y - y_offset
        g = least_squares_oracle(Xc, yc)
        h = self._regularizer()
        if g.strong_mu + h.strong_mu < 0:
            raise ValueError(
                f"penalty '{self.penalty}' is too concave for this design: "
                f"sigma_min^2/n = {g.strong_mu:.4g} < {-h.strong_mu:.4g}; "
                "increase gamma / a or use the l1 penalty")
        problem = ProblemSpec(g, h, X.shape[1])
        result = solve(problem, SolverConfig(self.beta_mode, self.max_iter, trace_every=self.max_iter or 1),
                       np.zeros(X.shape[1]))
        self.coef_ = result.state.x
        self.intercept_ = y_offset - float(X_offset @ self.coef_) if self.fit_intercept else 0.0
        self.n_iter_ = result.state.k
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        return X @ self.coef_ + self.intercept_
