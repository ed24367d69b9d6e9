"""Round oracles and scenario generators.

A scenario emits one :class:`RoundOracle` per round t = 1, 2, ...  Each
oracle evaluates the round's cost f_t (value and gradient) and the
constraint map g_t (values and Jacobian).  Oracles additionally expose
closed-form descriptors when the round functions are affine or shifted
quadratics; the learners and the benchmark solver use those to keep
per-round work constant.

Adaptive scenarios (the regret/violation lower-bound opponent) consume
the player's actions through :meth:`record_action` before emitting the
next round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .sets import Box, ConfigurationError, make_set

__all__ = [
    "ProblemBounds",
    "RoundOracle",
    "AlternatingLinear",
    "StochasticConstraint",
    "ImpossibilityAdversary",
    "PerturbedLinear",
    "RandomQuadratic",
    "make_scenario",
    "SCENARIO_KINDS",
]


@dataclass(frozen=True)
class ProblemBounds:
    """A-priori constants of the problem family.

    L_f, L_g   Lipschitz constants of the costs and of each constraint row.
    G          uniform bound on ||g_t(x)|| over the feasible set.
    D          norm bound on the feasible set.
    F          uniform bound on |f_t(x)|.
    E_m        worst-case cost-gradient prediction error.
    Delta_m    worst-case constraint-Jacobian prediction error.
    """

    L_f: float
    L_g: float
    G: float
    D: float
    F: float
    E_m: float
    Delta_m: float

    def __post_init__(self):
        for name in ("L_f", "L_g", "G", "D", "F"):
            v = float(getattr(self, name))
            if not (np.isfinite(v) and v > 0.0):
                raise ConfigurationError(f"bound {name} must be positive, got {v}")
            object.__setattr__(self, name, v)
        for name in ("E_m", "Delta_m"):
            v = float(getattr(self, name))
            if not (np.isfinite(v) and v >= 0.0):
                raise ConfigurationError(f"bound {name} must be nonnegative, got {v}")
            object.__setattr__(self, name, v)

    def replace(self, **kwargs) -> "ProblemBounds":
        data = {k: getattr(self, k) for k in ("L_f", "L_g", "G", "D", "F", "E_m", "Delta_m")}
        data.update(kwargs)
        return ProblemBounds(**data)


@dataclass
class RoundOracle:
    """One round's cost and constraint evaluators.

    cost(x) -> (f_t(x), grad f_t(x)); constraint(x) -> (g_t(x), Jacobian).
    Descriptors, when present, give the same functions in closed form:

    cost_affine       (c, b)   with f(x) = <c, x> + b
    cost_quadratic    (w, u, b) with f(x) = w/2 ||x - u||^2 + b
    constraint_affine (W, u)   with g(x) = W x + u
    """

    cost: Callable[[np.ndarray], tuple[float, np.ndarray]]
    constraint: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    cost_affine: tuple[np.ndarray, float] | None = None
    cost_quadratic: tuple[float, np.ndarray, float] | None = None
    constraint_affine: tuple[np.ndarray, np.ndarray] | None = None

    def cost_value(self, x: np.ndarray) -> float:
        if self.cost_affine is not None:
            c, b = self.cost_affine
            return float(c @ x) + b
        if self.cost_quadratic is not None:
            w, u, b = self.cost_quadratic
            d = x - u
            return 0.5 * w * float(d @ d) + b
        return self.cost(x)[0]

    def constraint_value(self, x: np.ndarray) -> np.ndarray:
        if self.constraint_affine is not None:
            W, u = self.constraint_affine
            return W @ x + u
        return self.constraint(x)[0]


def affine_cost_oracle(c, b=0.0):
    c = np.asarray(c, dtype=float)

    def cost(x):
        return float(c @ x) + b, c

    return cost


def affine_constraint_oracle(W, u):
    W = np.asarray(W, dtype=float)
    u = np.asarray(u, dtype=float)

    def constraint(x):
        return W @ x + u, W

    return constraint


def affine_round(c, cb, W, u) -> RoundOracle:
    c = np.asarray(c, dtype=float)
    W = np.asarray(W, dtype=float)
    u = np.asarray(u, dtype=float)
    return RoundOracle(
        cost=affine_cost_oracle(c, cb),
        constraint=affine_constraint_oracle(W, u),
        cost_affine=(c, float(cb)),
        constraint_affine=(W, u),
    )


class AlternatingLinear:
    """Two linear phases on [-1, 1] with a single alternating constraint.

    Even t: f_t(x) = -4x, g_t(x) = 0.79x + 0.26.
    Odd  t: f_t(x) = -x,  g_t(x) = 0.64x - 0.135.
    """

    kind = "alternating_linear"
    adaptive = False
    supports_lookahead = True

    def __init__(self, horizon: int, dimension: int = 1, constraints: int = 1,
                 seed: int = 0, params: dict | None = None):
        if dimension != 1 or constraints != 1:
            raise ConfigurationError("alternating_linear is one-dimensional with one constraint")
        self.horizon = int(horizon)
        self.dimension = 1
        self.n_constraints = 1
        self.seed = int(seed)
        self.params = dict(params or {})
        self.domain = Box(np.array([-1.0]), np.array([1.0]))
        self.bounds = ProblemBounds(L_f=4.0, L_g=0.79, G=1.05, D=1.0, F=4.0,
                                    E_m=8.0, Delta_m=1.58)
        self._even = affine_round([-4.0], 0.0, [[0.79]], [0.26])
        self._odd = affine_round([-1.0], 0.0, [[0.64]], [-0.135])

    def round(self, t: int) -> RoundOracle:
        return self._even if t % 2 == 0 else self._odd

    def record_action(self, t: int, x: np.ndarray) -> None:
        pass

    def replay(self) -> "AlternatingLinear":
        return AlternatingLinear(self.horizon, seed=self.seed, params=self.params)


class StochasticConstraint:
    """Linear cost with a constraint that bites at random rounds.

    f_t(x) = -2x on [-1, 1].  With probability 0.1 / (t+1)^0.05 the round
    constraint is g_t(x) = x, otherwise g_t(x) = -0.01 (always satisfied).
    Each round consumes exactly one uniform variate, in round order, so
    runs with the same seed see the same branch sequence regardless of
    how far they go.
    """

    kind = "stochastic_constraint"
    adaptive = False
    supports_lookahead = True

    def __init__(self, horizon: int, dimension: int = 1, constraints: int = 1,
                 seed: int = 0, params: dict | None = None):
        if dimension != 1 or constraints != 1:
            raise ConfigurationError("stochastic_constraint is one-dimensional with one constraint")
        self.horizon = int(horizon)
        self.dimension = 1
        self.n_constraints = 1
        self.seed = int(seed)
        self.params = dict(params or {})
        self.domain = Box(np.array([-1.0]), np.array([1.0]))
        self.bounds = ProblemBounds(L_f=2.0, L_g=1.0, G=1.0, D=1.0, F=2.0,
                                    E_m=4.0, Delta_m=2.0)
        self._rng = np.random.default_rng(self.seed)
        self._branches: list[bool] = []
        self._active = affine_round([-2.0], 0.0, [[1.0]], [0.0])
        self._slack = affine_round([-2.0], 0.0, [[0.0]], [-0.01])

    def _ensure(self, t: int) -> None:
        while len(self._branches) < t:
            s = len(self._branches) + 1
            p = 0.1 / (s + 1.0) ** 0.05
            self._branches.append(bool(self._rng.uniform() < p))

    def branch_active(self, t: int) -> bool:
        self._ensure(t)
        return self._branches[t - 1]

    def round(self, t: int) -> RoundOracle:
        return self._active if self.branch_active(t) else self._slack

    def record_action(self, t: int, x: np.ndarray) -> None:
        pass

    def replay(self) -> "StochasticConstraint":
        return StochasticConstraint(self.horizon, seed=self.seed, params=self.params)


class ImpossibilityAdversary:
    """Adaptive opponent forcing max(R_t, V_t) = Omega(t) on [0, 1].

    Two round types: p = (f(x) = -x, g(x) = -1) and q = (f(x) = -2x,
    g(x) = 2x - 1).  Rounds are grouped into blocks I_1, J_1, I_2, ...
    During I_n the opponent plays q until the first round m whose running
    action mean drops below 3/4; J_n then repeats p for |I_n| rounds.
    The decision for round t+1 uses only the mean of x_1..x_t, so no
    lookahead into the player's current move is needed.  Ends of J-blocks
    are recorded in `block_ends`.
    """

    kind = "impossibility_adversary"
    adaptive = True
    supports_lookahead = True

    def __init__(self, horizon: int, dimension: int = 1, constraints: int = 1,
                 seed: int = 0, params: dict | None = None):
        if dimension != 1 or constraints != 1:
            raise ConfigurationError("impossibility_adversary is one-dimensional with one constraint")
        self.horizon = int(horizon)
        self.dimension = 1
        self.n_constraints = 1
        self.seed = int(seed)
        self.params = dict(params or {})
        self.domain = Box(np.array([0.0]), np.array([1.0]))
        self.bounds = ProblemBounds(L_f=2.0, L_g=2.0, G=1.0, D=1.0, F=2.0,
                                    E_m=4.0, Delta_m=4.0)
        self._p = affine_round([-1.0], 0.0, [[0.0]], [-1.0])
        self._q = affine_round([-2.0], 0.0, [[2.0]], [-1.0])
        self._sum_x = 0.0
        self._n_seen = 0
        self._mode = "I"
        self._block_start = 1
        self._j_left = 0
        self.branch_log: list[str] = []
        self.block_ends: list[int] = []

    def _mean(self) -> float:
        # empty history counts as mean >= 3/4, so play opens in I_1
        if self._n_seen == 0:
            return 1.0
        return self._sum_x / self._n_seen

    def _branch_for(self, t: int) -> str:
        if t <= len(self.branch_log):
            return self.branch_log[t - 1]
        if t != len(self.branch_log) + 1:
            raise ConfigurationError("adversary rounds must be requested in order")
        if self._n_seen < t - 1:
            raise ConfigurationError(f"round {t} requested before action {t - 1} was recorded")
        if self._mode == "I" and t > self._block_start and self._mean() < 0.75:
            # I_n ended at t-1; mirror its length with p-rounds
            self._mode = "J"
            self._j_left = (t - 1) - self._block_start + 1
        branch = "q" if self._mode == "I" else "p"
        self.branch_log.append(branch)
        if self._mode == "J":
            self._j_left -= 1
            if self._j_left == 0:
                self.block_ends.append(t)
                self._mode = "I"
                self._block_start = t + 1
        return branch

    def round(self, t: int) -> RoundOracle:
        return self._q if self._branch_for(t) == "q" else self._p

    def record_action(self, t: int, x: np.ndarray) -> None:
        if t != self._n_seen + 1:
            raise ConfigurationError("actions must be recorded in round order")
        self._sum_x += float(np.asarray(x).reshape(-1)[0])
        self._n_seen += 1

    def replay(self) -> "_BranchReplay":
        return _BranchReplay(self)


class _BranchReplay:
    """Re-emits an adversary's recorded branch sequence."""

    adaptive = False
    supports_lookahead = True

    def __init__(self, source: ImpossibilityAdversary):
        self.kind = source.kind
        self.horizon = source.horizon
        self.dimension = source.dimension
        self.n_constraints = source.n_constraints
        self.domain = source.domain
        self.bounds = source.bounds
        self._log = list(source.branch_log)
        self._p = source._p
        self._q = source._q

    def round(self, t: int) -> RoundOracle:
        if t > len(self._log):
            raise ConfigurationError(f"replay has only {len(self._log)} recorded rounds")
        return self._q if self._log[t - 1] == "q" else self._p

    def record_action(self, t: int, x: np.ndarray) -> None:
        pass


class PerturbedLinear:
    """Fixed constraint g(x) = x plus a bounded per-round perturbation b_t.

    f_t(x) = slope * x on [-1, 1]; g_t(x) = x + b_t with b_t drawn
    i.i.d. uniform from [-amplitude, amplitude].  The fixed part and the
    perturbation are exposed separately so learners may aggregate
    multipliers against the fixed part alone.
    """

    kind = "perturbed_linear"
    adaptive = False
    supports_lookahead = True

    def __init__(self, horizon: int, dimension: int = 1, constraints: int = 1,
                 seed: int = 0, params: dict | None = None):
        if dimension != 1 or constraints != 1:
            raise ConfigurationError("perturbed_linear is one-dimensional with one constraint")
        self.horizon = int(horizon)
        self.dimension = 1
        self.n_constraints = 1
        self.seed = int(seed)
        self.params = dict(params or {})
        self.amplitude = float(self.params.get("amplitude", 0.1))
        self.cost_slope = float(self.params.get("cost_slope", -2.0))
        if self.amplitude < 0.0:
            raise ConfigurationError("amplitude must be nonnegative")
        unknown = set(self.params) - {"amplitude", "cost_slope"}
        if unknown:
            raise ConfigurationError(f"unknown perturbed_linear params: {sorted(unknown)}")
        self.domain = Box(np.array([-1.0]), np.array([1.0]))
        lf = max(abs(self.cost_slope), 1e-12)
        self.bounds = ProblemBounds(L_f=lf, L_g=1.0, G=1.0 + self.amplitude, D=1.0,
                                    F=lf, E_m=2.0 * lf, Delta_m=2.0)
        self.base_affine = (np.array([[1.0]]), np.array([0.0]))
        self.base_constraint = affine_constraint_oracle(*self.base_affine)
        self._rng = np.random.default_rng(self.seed)
        self._shifts: list[float] = []

    def perturbation(self, t: int) -> np.ndarray:
        while len(self._shifts) < t:
            self._shifts.append(float(self._rng.uniform(-self.amplitude, self.amplitude)))
        return np.array([self._shifts[t - 1]])

    def round(self, t: int) -> RoundOracle:
        b = self.perturbation(t)
        return affine_round([self.cost_slope], 0.0, [[1.0]], b)

    def record_action(self, t: int, x: np.ndarray) -> None:
        pass

    def replay(self) -> "PerturbedLinear":
        return PerturbedLinear(self.horizon, seed=self.seed, params=self.params)


class RandomQuadratic:
    """Seeded quadratic costs with random affine constraints.

    f_t(x) = ||x - u_t||^2 / 2 with u_t uniform in the scaled cube;
    g_t(x) = A_t x - b_t with row norms capped at `matrix_scale` and
    b_t >= 0, so the origin is feasible in every round and the per-round
    feasible-set intersection is never empty.
    """

    kind = "random_quadratic"
    adaptive = False
    supports_lookahead = True

    def __init__(self, horizon: int, dimension: int = 1, constraints: int = 1,
                 seed: int = 0, params: dict | None = None):
        self.horizon = int(horizon)
        self.dimension = int(dimension)
        self.n_constraints = int(constraints)
        if self.dimension < 1 or self.n_constraints < 1:
            raise ConfigurationError("dimension and constraints must be >= 1")
        self.seed = int(seed)
        self.params = dict(params or {})
        self.center_scale = float(self.params.get("center_scale", 0.8))
        self.matrix_scale = float(self.params.get("matrix_scale", 1.0))
        self.offset_scale = float(self.params.get("offset_scale", 0.5))
        unknown = set(self.params) - {"center_scale", "matrix_scale", "offset_scale"}
        if unknown:
            raise ConfigurationError(f"unknown random_quadratic params: {sorted(unknown)}")
        n = self.dimension
        self.domain = Box(-np.ones(n), np.ones(n))
        D = self.domain.norm_bound
        lf = D + self.center_scale * math.sqrt(n)
        self.bounds = ProblemBounds(
            L_f=lf,
            L_g=self.matrix_scale,
            G=math.sqrt(self.n_constraints) * (self.matrix_scale * D + self.offset_scale),
            D=D,
            F=0.5 * lf * lf,
            E_m=2.0 * lf,
            # Jacobian mismatch is measured in the matrix norm, which for d
            # stacked rows of norm <= matrix_scale can reach sqrt(d) times it
            Delta_m=2.0 * math.sqrt(self.n_constraints) * self.matrix_scale,
        )
        self._rng = np.random.default_rng(self.seed)
        self._rounds: list[RoundOracle] = []

    def _draw(self) -> RoundOracle:
        n, d = self.dimension, self.n_constraints
        u = self._rng.uniform(-self.center_scale, self.center_scale, size=n)
        A = self._rng.uniform(-1.0, 1.0, size=(d, n))
        norms = np.linalg.norm(A, axis=1, keepdims=True)
        A = A * (self.matrix_scale / np.maximum(norms, 1.0))
        b = self._rng.uniform(0.0, self.offset_scale, size=d)

        def cost(x, u=u):
            diff = x - u
            return 0.5 * float(diff @ diff), diff

        return RoundOracle(
            cost=cost,
            constraint=affine_constraint_oracle(A, -b),
            cost_quadratic=(1.0, u, 0.0),
            constraint_affine=(A, -b),
        )

    def round(self, t: int) -> RoundOracle:
        while len(self._rounds) < t:
            self._rounds.append(self._draw())
        return self._rounds[t - 1]

    def record_action(self, t: int, x: np.ndarray) -> None:
        pass

    def replay(self) -> "RandomQuadratic":
        return RandomQuadratic(self.horizon, self.dimension, self.n_constraints,
                               seed=self.seed, params=self.params)


SCENARIO_KINDS = {
    "alternating_linear": AlternatingLinear,
    "stochastic_constraint": StochasticConstraint,
    "impossibility_adversary": ImpossibilityAdversary,
    "perturbed_linear": PerturbedLinear,
    "random_quadratic": RandomQuadratic,
}


def make_scenario(kind: str, horizon: int, dimension: int = 1, constraints: int = 1,
                  seed: int = 0, params: dict | None = None):
    if kind not in SCENARIO_KINDS:
        raise ConfigurationError(
            f"unknown scenario kind {kind!r}; expected one of {sorted(SCENARIO_KINDS)}")
    if int(horizon) < 1:
        raise ConfigurationError("horizon must be >= 1")
    cls = SCENARIO_KINDS[kind]
    return cls(horizon=int(horizon), dimension=int(dimension),
               constraints=int(constraints), seed=int(seed), params=params)
