"""Derivative-free minimizers for circuit parameters: a linear-approximation
trust-region method (COBYLA) and a Gaussian-process Bayesian ask/tell loop
with expected-improvement acquisition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
from scipy.stats import norm
from sklearn.gaussian_process import GaussianProcessRegressor
from sklearn.gaussian_process.kernels import ConstantKernel, Matern, WhiteKernel


@dataclass
class OptimizerBudget:
    max_evals: int
    tol: float = 1e-8
    bounds: list | None = None

    def __post_init__(self):
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class OptResult:
    best_params: np.ndarray
    best_value: float
    eval_trace: list
    converged: bool
    reason: str

    @classmethod
    def from_trace(cls, trace, converged, reason):
        best_idx = int(np.argmin([value for _, value in trace]))
        params, value = trace[best_idx]
        return cls(np.array(params), float(value), trace, converged, reason)


class _BudgetExhausted(Exception):
    pass


class _Recorder:
    """Wraps the objective: records the trace, enforces the eval budget, and
    rejects non-finite values."""

    def __init__(self, objective, max_evals):
        self.objective = objective
        self.max_evals = max_evals
        self.trace = []

    def __call__(self, x):
        if len(self.trace) >= self.max_evals:
            raise _BudgetExhausted
        value = float(self.objective(np.asarray(x, dtype=float)))
        if not np.isfinite(value):
            raise ValueError(f"objective returned non-finite value {value}")
        self.trace.append((np.array(x, dtype=float), value))
        return value


def cobyla_minimize(objective, x0, budget: OptimizerBudget) -> OptResult:
    """COBYLA descent behind the budget/trace contract.

    budget.tol is an energy tolerance; the final trust-region radius is tied
    to sqrt(tol) since the objective is quadratic around a minimum.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    recorder = _Recorder(objective, budget.max_evals)
    rhoend = max(1e-10, 0.03 * np.sqrt(budget.tol))
    converged = False
    reason = "budget"
    try:
        result = scipy.optimize.minimize(
            recorder, x0, method="COBYLA",
            options={"maxiter": budget.max_evals, "rhobeg": 0.4, "tol": rhoend},
        )
        if len(recorder.trace) >= budget.max_evals:
            reason = "budget"
        elif result.success:
            converged = True
            reason = "trust_region"
        else:
            reason = str(result.message)
    except _BudgetExhausted:
        reason = "budget"
    if not recorder.trace:
        # budget of zero remaining evals never happens (max_evals >= 1), but
        # COBYLA may fail before evaluating; fall back to x0
        value = float(objective(x0))
        recorder.trace.append((x0.copy(), value))
    return OptResult.from_trace(recorder.trace, converged, reason)


def _fit_gp(X, y, seed):
    kernel = (
        ConstantKernel(1.0, (1e-3, 1e3))
        * Matern(length_scale=0.3, length_scale_bounds=(1e-2, 1e2), nu=2.5)
        + WhiteKernel(noise_level=1e-6, noise_level_bounds=(1e-10, 1e1))
    )
    gp = GaussianProcessRegressor(
        kernel=kernel, normalize_y=True, n_restarts_optimizer=1,
        random_state=seed,
    )
    gp.fit(X, y)
    return gp


def _expected_improvement(gp, candidates, best):
    mu, sigma = gp.predict(candidates, return_std=True)
    sigma = np.maximum(sigma, 1e-12)
    imp = best - mu
    z = imp / sigma
    return imp * norm.cdf(z) + sigma * norm.pdf(z)


def bayes_minimize(objective, budget: OptimizerBudget, seed=0) -> OptResult:
    """Ask/tell Bayesian loop: GP posterior (Matern-5/2 + fitted noise term),
    expected-improvement acquisition maximized by random multistart plus a
    local polish. Deterministic for a fixed seed."""
    if budget.bounds is None:
        raise ValueError("bayes_minimize needs bounds for every parameter")
    bounds = np.asarray(budget.bounds, dtype=float)
    n_dim = bounds.shape[0]
    lo, hi = bounds[:, 0], bounds[:, 1]
    span = hi - lo
    rng = np.random.default_rng(seed)
    recorder = _Recorder(objective, budget.max_evals)

    def run_point(unit_x):
        x = lo + span * np.clip(unit_x, 0.0, 1.0)
        return recorder(x)

    n_init = int(min(budget.max_evals, max(2, n_dim + 2)))
    X_unit = []
    try:
        for _ in range(n_init):
            u = rng.uniform(size=n_dim)
            run_point(u)
            X_unit.append(u)
        it = 0
        while len(recorder.trace) < budget.max_evals:
            y = np.array([v for _, v in recorder.trace])
            gp = _fit_gp(np.array(X_unit), y, seed=int(rng.integers(1 << 31)))
            best = float(y.min())
            cands = rng.uniform(size=(max(256, 64 * n_dim), n_dim))
            ei = _expected_improvement(gp, cands, best)
            u0 = cands[int(np.argmax(ei))]
            polish = scipy.optimize.minimize(
                lambda u: -_expected_improvement(gp, u.reshape(1, -1), best)[0],
                u0, method="L-BFGS-B", bounds=[(0.0, 1.0)] * n_dim,
            )
            u_next = polish.x if polish.success else u0
            if min((np.linalg.norm(u_next - u) for u in X_unit), default=1.0) < 1e-8:
                u_next = rng.uniform(size=n_dim)  # escape duplicate proposals
            run_point(u_next)
            X_unit.append(u_next)
            it += 1
    except _BudgetExhausted:
        pass
    return OptResult.from_trace(recorder.trace, converged=True, reason="budget")
