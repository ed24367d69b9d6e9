"""Inner minimization of aggregated FTRL objectives, and the dual update.

The aggregate objective always has the shape

    S/2 ||x - center||^2 + <linear, x> + sum_i <w_i, g_i(x)>

over a feasible set.  Whenever the learner managed to fold everything
affine into `linear` the term list is empty and the minimizer is exact:
a prox projection when S > 0, a vertex rule when S = 0.  Remaining
terms are handled iteratively: projected gradient with a fixed step
1 / (S + sum_i ||w_i|| L_i) when every term declares a smoothness
constant L_i, projected subgradient with step ~ 1/sqrt(k) and
best-iterate tracking otherwise.  Convergence is judged by the norm of
the gradient map x - project(x - grad(x) / max(S, 1)).

The dual maximization is never iterative: with a quadratic dual
regularizer the maximizer over the nonnegative orthant is the closed
form [a_t (cumulative + predicted)]_+.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .sets import ConfigurationError, positive_part

__all__ = [
    "SolverSettings",
    "FtrlObjective",
    "SolveResult",
    "minimize",
    "dual_closed_form",
]

# (weights, oracle, smoothness): oracle(x) -> (values, jacobian); the term
# contributes <weights, values> to the objective.
Term = tuple[np.ndarray, Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]], float | None]


@dataclass
class SolverSettings:
    tolerance: float = 1e-9
    max_iterations: int = 10000
    fallback: np.ndarray | None = None

    def __post_init__(self):
        if not (self.tolerance > 0.0 and math.isfinite(self.tolerance)):
            raise ConfigurationError("solver tolerance must be positive")
        if int(self.max_iterations) < 1:
            raise ConfigurationError("max_iterations must be >= 1")
        self.max_iterations = int(self.max_iterations)


@dataclass
class FtrlObjective:
    domain: object
    quad_weight: float
    quad_center: np.ndarray
    linear: np.ndarray
    constraint_terms: list[Term] = field(default_factory=list)

    def value(self, x: np.ndarray) -> float:
        diff = x - self.quad_center
        v = 0.5 * self.quad_weight * float(diff @ diff) + float(self.linear @ x)
        for w, oracle, _ in self.constraint_terms:
            vals = oracle(x)[0]
            v += float(np.dot(w, vals))
        return v

    def gradient(self, x: np.ndarray) -> np.ndarray:
        g = self.quad_weight * (x - self.quad_center) + self.linear
        for w, oracle, _ in self.constraint_terms:
            jac = oracle(x)[1]
            g = g + jac.T @ w
        return g


@dataclass
class SolveResult:
    x: np.ndarray
    residual: float
    converged: bool
    iterations: int = 0


def _gradient_map_norm(obj: FtrlObjective, x: np.ndarray, grad: np.ndarray) -> float:
    scale = max(obj.quad_weight, 1.0)
    step = obj.domain.project(x - grad / scale)
    return float(np.linalg.norm(x - step))


def minimize(obj: FtrlObjective, settings: SolverSettings) -> SolveResult:
    """Minimize an aggregate objective over its feasible set."""
    S = float(obj.quad_weight)
    if S < 0.0:
        raise ConfigurationError("quadratic weight must be nonnegative")

    if not obj.constraint_terms:
        if S > 0.0:
            x = obj.domain.project(obj.quad_center - obj.linear / S)
            return SolveResult(x=x, residual=0.0, converged=True)
        x = obj.domain.argmin_linear(obj.linear, fallback=settings.fallback)
        return SolveResult(x=x, residual=0.0, converged=True)

    smooth = all(L is not None for _, _, L in obj.constraint_terms)
    if smooth:
        curvature = S + sum(float(np.linalg.norm(w)) * L for w, _, L in obj.constraint_terms)
        if curvature <= 0.0:
            # every term is affine after all; evaluate once and fold
            folded = obj.linear.copy()
            for w, oracle, _ in obj.constraint_terms:
                folded = folded + oracle(obj.quad_center)[1].T @ w
            x = obj.domain.argmin_linear(folded, fallback=settings.fallback)
            return SolveResult(x=x, residual=0.0, converged=True)

    start = settings.fallback if settings.fallback is not None else obj.quad_center
    x = obj.domain.project(np.asarray(start, dtype=float))
    best_x = x
    best_val = obj.value(x)
    best_res = math.inf

    for k in range(1, settings.max_iterations + 1):
        grad = obj.gradient(x)
        res = _gradient_map_norm(obj, x, grad)
        if res < best_res:
            best_res = res
        if res <= settings.tolerance:
            return SolveResult(x=x, residual=res, converged=True, iterations=k)
        if smooth:
            x = obj.domain.project(x - grad / curvature)
        else:
            ng = float(np.linalg.norm(grad))
            step = (1.0 + obj.domain.norm_bound) / ((1.0 + ng) * math.sqrt(k))
            x = obj.domain.project(x - step * grad)
            val = obj.value(x)
            if val < best_val:
                best_val, best_x = val, x

    if not smooth:
        x = best_x
        grad = obj.gradient(x)
        best_res = min(best_res, _gradient_map_norm(obj, x, grad))
    return SolveResult(x=x, residual=best_res, converged=False,
                       iterations=settings.max_iterations)


def dual_closed_form(a_t: float, cumulative: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    """Maximizer of <lam, cumulative + predicted> - ||lam||^2 / (2 a_t) over lam >= 0."""
    if not (a_t > 0.0 and math.isfinite(a_t)):
        raise ConfigurationError(f"dual step size must be positive, got {a_t}")
    return positive_part(a_t * (np.asarray(cumulative, dtype=float) + np.asarray(predicted, dtype=float)))
