import math

import numpy as np
import pytest

from lazyoco.learners import GreedyLearner, LearnerConfig, LlpLearner, make_learner
from lazyoco.predictors import PredictionBundle, make_predictor, zero_bundle
from lazyoco.problems import ProblemBounds, RoundOracle, affine_round, make_scenario
from lazyoco.sets import Box, ConfigurationError
from lazyoco.solver import SolverSettings

from helpers import grid_min_1d, saddle_point_grid

BOX1 = Box(np.array([-1.0]), np.array([1.0]))


def bounds1(**over):
    base = dict(L_f=1.0, L_g=1.0, G=1.0, D=1.0, F=1.0, E_m=0.0, Delta_m=0.0)
    base.update(over)
    return ProblemBounds(**base)


def cfg(variant="llp", sigma=1.0, a=1.0, beta=0.5, bounds=None, **kw):
    return LearnerConfig(variant=variant, sigma=sigma, a=a, beta=beta,
                         bounds=bounds if bounds is not None else bounds1(), **kw)


def affine_bundle(c, W, u, value=None):
    """Exact forecast of an affine round; value defaults to the deferred hook."""
    W = np.asarray(W, dtype=float)
    u = np.asarray(u, dtype=float)

    def constraint(x):
        return W @ x + u, W

    return PredictionBundle(
        cost_gradient=np.asarray(c, dtype=float),
        constraint=constraint,
        constraint_affine=(W, u),
        predicted_value=None if value is None else np.asarray(value, dtype=float),
        predicted_value_fn=(lambda x: W @ x + u) if value is None else None,
        predicted_jacobian=W,
    )


def test_round_one_zero_predictions_stays_at_start():
    learner = LlpLearner(cfg(), BOX1, 1, 1)
    rec = learner.play_round(affine_round([-1.0], 0.0, [[0.64]], [-0.135]))
    assert np.array_equal(rec.x, [0.0])
    assert np.array_equal(rec.lam, [0.0])


def test_round_one_perfect_forecast_plays_vertex():
    # oracle: the assembled round-1 objective is just c~ x = -x on [-1, 1]
    expected = grid_min_1d(lambda x: -x, -1.0, 1.0, 1e-6)
    assert expected == 1.0
    sc = make_scenario("alternating_linear", horizon=4)
    learner = LlpLearner(cfg(bounds=sc.bounds), sc.domain, 1, 1)
    learner.set_prediction(affine_bundle([-1.0], [[0.64]], [-0.135]))
    rec = learner.play_round(sc.round(1))
    assert rec.x[0] == expected


def test_mismatch_norm_formula():
    """eps=(1,0), delta row=(0.5,0.5), lam=(2) -> h = ||(2,1)|| = sqrt(5)."""
    learner = LlpLearner(cfg(), Box(-np.ones(2), np.ones(2)), 2, 1)
    eps = np.array([1.0, 0.0])
    jac_x = np.array([[1.0, 1.0]])
    bundle = affine_bundle([0.0, 0.0], [[0.5, 0.5]], [0.0], value=[0.0])
    lam = np.array([2.0])
    x = np.zeros(2)
    h = learner._mismatch_norm(eps, jac_x, bundle, bundle.predicted_jacobian, lam, x)
    assert h == pytest.approx(math.sqrt(5.0), abs=1e-15)

    pert = LlpLearner(cfg("llp_perturbed"), Box(-np.ones(2), np.ones(2)), 2, 1,
                      base_affine=(np.array([[1.0, 0.0]]), np.array([0.0])))
    h = pert._mismatch_norm(eps, jac_x, bundle, bundle.predicted_jacobian, lam, x)
    assert h == 1.0  # perturbed variant only sees the cost-gradient error


def test_regularizer_increments():
    learner = LlpLearner(cfg(sigma=1.0), BOX1, 1, 1)
    assert learner._advance_regularizer(4.0, np.array([0.5])) == pytest.approx(2.0)
    assert learner._advance_regularizer(5.0, np.array([0.5])) == pytest.approx(1.0)
    assert learner.prox_S == pytest.approx(3.0)


def test_dual_step_size_first_round_example():
    # a=1, G=1, beta=1/2, xi_1=0 -> a_1 = 1/max{2, 1} = 0.5
    learner = LlpLearner(cfg(), BOX1, 1, 1)
    learner.play_round(affine_round([0.0], 0.0, [[0.0]], [0.0]))
    assert learner.stats()["a_t"] == 0.5


def test_dual_step_size_worst_case_example():
    # all xi_t = 2G = 2 for 100 rounds -> a_100 = 1/max{sqrt(404), 10}
    learner = LlpLearner(cfg(), BOX1, 1, 1)
    oracle = affine_round([0.0], 0.0, [[0.0]], [2.0])
    for _ in range(100):
        rec = learner.play_round(oracle)
        assert rec.xi_t == 2.0
    assert learner.stats()["a_t"] == pytest.approx(1.0 / math.sqrt(404.0), abs=1e-15)


def test_xi_is_norm_of_value_gap():
    # g(z) = (1, -1) with zero forecast -> xi = sqrt(2)
    learner = LlpLearner(cfg(), BOX1, 1, 2)
    rec = learner.play_round(affine_round([0.0], 0.0, [[0.0], [0.0]], [1.0, -1.0]))
    assert rec.xi_t == pytest.approx(math.sqrt(2.0), abs=1e-15)


def test_phi_is_inverse_step_size():
    sc = make_scenario("alternating_linear", horizon=60)
    p = make_predictor("noisy", bounds=sc.bounds, domain=sc.domain, dimension=1,
                       constraints=1, level=0.4, seed=3)
    learner = LlpLearner(cfg(bounds=sc.bounds), sc.domain, 1, 1)
    learner.set_prediction(p.bundle_for(sc.round(1)))
    for t in range(1, 61):
        nb = p.bundle_for(sc.round(t + 1)) if t < 60 else None
        rec = learner.play_round(sc.round(t), nb)
        p.note_action(rec.x)
        s = learner.stats()
        assert s["phi_cum"] == pytest.approx(1.0 / s["a_t"], rel=1e-12)


def run_rounds(learner, sc, predictor_kind, horizon, level=0.3, seed=5):
    p = make_predictor(predictor_kind, bounds=sc.bounds, domain=sc.domain,
                       dimension=sc.dimension, constraints=sc.n_constraints,
                       level=level, seed=seed)
    learner.set_prediction(p.bundle_for(sc.round(1)))
    records = []
    for t in range(1, horizon + 1):
        nb = p.bundle_for(sc.round(t + 1)) if t < horizon else None
        rec = learner.play_round(sc.round(t), nb)
        p.note_action(rec.x)
        records.append(rec)
    return records


def test_multipliers_nonnegative_and_step_nonincreasing():
    for pk in ("none", "noisy", "adversarial"):
        sc = make_scenario("random_quadratic", horizon=120, dimension=2,
                           constraints=2, seed=4)
        learner = LlpLearner(cfg(bounds=sc.bounds), sc.domain, 2, 2)
        records = run_rounds(learner, sc, pk, 120)
        a_prev = math.inf
        for rec in records:
            assert np.all(rec.lam >= 0.0)
            assert rec.a_t <= a_prev + 1e-15
            a_prev = rec.a_t


def test_sigma_cum_matches_h_identity():
    """sigma_{1:t} = sigma * sqrt(h_{1:t}) for llp, with mu folded in for llp2."""
    sc = make_scenario("alternating_linear", horizon=80)
    llp = LlpLearner(cfg(sigma=1.3, bounds=sc.bounds), sc.domain, 1, 1)
    run_rounds(llp, sc, "noisy", 80, level=0.5)
    assert llp.prox_S == pytest.approx(1.3 * math.sqrt(llp.h_cum), rel=1e-12)

    llp2 = LlpLearner(cfg("llp2", sigma=1.3, bounds=sc.bounds), sc.domain, 1, 1)
    run_rounds(llp2, sc, "noisy", 80, level=0.5)
    assert llp2.prox_S == pytest.approx(1.3 * math.sqrt(llp2.h_cum + llp2.mu), rel=1e-12)


def test_per_round_drift_inequality():
    """||x_t - z_t|| <= h_t / sigma_{1:t} + slack whenever sigma_{1:t} > 0."""
    sc = make_scenario("random_quadratic", horizon=250, dimension=2, constraints=2, seed=9)
    learner = LlpLearner(cfg(sigma=0.8, bounds=sc.bounds), sc.domain, 2, 2)
    records = run_rounds(learner, sc, "noisy", 250, level=0.4, seed=13)
    tol = learner.cfg.solver.tolerance
    h_cum = 0.0
    checked = 0
    for rec in records:
        h_cum += rec.h_t
        s_cum = 0.8 * math.sqrt(h_cum)
        if s_cum > 0.0:
            assert np.linalg.norm(rec.x - rec.z) <= rec.h_t / s_cum + 10.0 * tol
            checked += 1
    assert checked > 200
    assert learner.drift_gap <= 10.0 * tol


def test_llp_equals_linearized_on_affine_rounds():
    """Affine constraints make the linearized variant exactly equal to llp."""
    sc = make_scenario("alternating_linear", horizon=100)
    xs = {}
    for variant in ("llp", "llp_linearized"):
        learner = LlpLearner(cfg(variant, bounds=sc.bounds), sc.domain, 1, 1)
        records = run_rounds(learner, sc, "noisy", 100, level=0.6, seed=21)
        xs[variant] = np.array([r.x[0] for r in records])
    np.testing.assert_allclose(xs["llp"], xs["llp_linearized"], atol=1e-12)


def nonaffine_round():
    def constraint(x):
        return np.array([float(x[0]) ** 2 - 0.25]), np.array([[2.0 * x[0]]])

    return RoundOracle(cost=lambda x: (float(-x[0]), np.array([-1.0])),
                       constraint=constraint)


def test_linearized_folds_nonaffine_constraints():
    lin = LlpLearner(cfg("llp_linearized"), BOX1, 1, 1)
    full = LlpLearner(cfg("llp"), BOX1, 1, 1)
    for _ in range(6):
        lin.play_round(nonaffine_round())
        full.play_round(nonaffine_round())
    assert len(lin.lag_terms) == 0   # everything folded into the linear part
    assert len(full.lag_terms) > 0   # llp keeps the oracles it cannot fold


def test_xi_stays_below_twice_constraint_bound():
    sc = make_scenario("alternating_linear", horizon=150)
    for pk in ("none", "noisy", "adversarial"):
        learner = LlpLearner(cfg(bounds=sc.bounds), sc.domain, 1, 1)
        records = run_rounds(learner, sc, pk, 150, level=0.8)
        for rec in records:
            assert rec.xi_t <= 2.0 * sc.bounds.G + 1e-9


def test_records_are_finite():
    sc = make_scenario("random_quadratic", horizon=100, dimension=3, constraints=2, seed=17)
    learner = LlpLearner(cfg(bounds=sc.bounds), sc.domain, 3, 2)
    for rec in run_rounds(learner, sc, "noisy", 100, level=0.5):
        assert np.all(np.isfinite(rec.x)) and np.all(np.isfinite(rec.z))
        assert np.all(np.isfinite(rec.lam))
        for v in (rec.f_value, rec.epsilon_norm, rec.h_t, rec.xi_t, rec.sigma_t, rec.a_t):
            assert math.isfinite(v)


def test_perfect_collapse_step_size_identity():
    """With exact forecasts a_t = a / max(2G, t^beta) and all xi vanish."""
    sc = make_scenario("alternating_linear", horizon=120)
    learner = LlpLearner(cfg(a=1.0, beta=0.5, bounds=sc.bounds), sc.domain, 1, 1)
    records = run_rounds(learner, sc, "perfect", 120)
    assert learner.xi_sq_cum == 0.0
    for rec in records:
        want = 1.0 / max(2.0 * sc.bounds.G, float(rec.t) ** 0.5)
        assert rec.a_t == pytest.approx(want, rel=1e-15)
    assert learner.max_xz <= 10.0 * learner.cfg.solver.tolerance
    assert learner.warning_count == 0


def test_llp2_mu_arithmetic():
    # a_100 = 1/max(2, 10) = 0.1, so mu_101 = 0 + 0.1 * 1 * 101 * 1 = 10.1
    b = bounds1(E_m=0.0, Delta_m=1.0)
    learner = LlpLearner(cfg("llp2", a=1.0, beta=0.5, bounds=b), BOX1, 1, 1)
    oracle = affine_round([-1.0], 0.0, [[0.0]], [-0.01])
    bundle = affine_bundle([-1.0], [[0.0]], [-0.01], value=[-0.01])
    learner.set_prediction(bundle)
    for _ in range(100):
        rec = learner.play_round(oracle, bundle)
        assert rec.h_t == 0.0 and rec.xi_t == 0.0
    assert learner.mu == pytest.approx(10.1, abs=1e-12)
    assert learner.prox_S == pytest.approx(math.sqrt(10.1), rel=1e-12)


def test_llp_perturbed_requires_base_constraint():
    with pytest.raises(ConfigurationError):
        LlpLearner(cfg("llp_perturbed"), BOX1, 1, 1)


def test_learner_config_validation():
    with pytest.raises(ConfigurationError):
        cfg(variant="nonexistent")
    with pytest.raises(ConfigurationError):
        cfg(sigma=0.0)
    with pytest.raises(ConfigurationError):
        cfg(beta=1.0)
    with pytest.raises(ConfigurationError):
        LlpLearner(cfg(x0=np.array([2.0])), BOX1, 1, 1)  # outside the box


def test_greedy_single_gradient_step():
    learner = GreedyLearner(cfg("greedy_baseline", a=1.0), BOX1, 1, 1)
    learner.play_round(affine_round([-1.0], 0.0, [[0.0]], [0.0]))
    assert np.array_equal(learner.x, [1.0])


def test_greedy_multiplier_positive_part():
    learner = GreedyLearner(cfg("greedy_baseline", a=1.0), BOX1, 1, 1)
    learner.lam = np.array([0.2])
    learner.play_round(affine_round([0.0], 0.0, [[0.0]], [-0.5]))
    assert np.array_equal(learner.lam, [0.0])


def test_greedy_converges_to_static_saddle():
    """Constant round: f(x) = x^2/2 - x, g(x) = x - 0.3 on [-1, 1].

    The grid saddle is x ~= 0.3 (feasibility binds) with lam ~= 0.7
    (stationarity x - 1 + lam = 0); greedy's tail averages must land there.
    """
    x_hat, lam_hat = saddle_point_grid(lambda xs: 0.5 * xs * xs - xs,
                                       lambda xs: xs - 0.3,
                                       -1.0, 1.0, lam_hi=3.0, resolution=1e-3)
    assert x_hat == pytest.approx(0.3, abs=2e-3)
    assert lam_hat == pytest.approx(0.7, abs=2e-3)

    def oracle():
        def cost(x):
            return 0.5 * float(x[0]) ** 2 - float(x[0]), np.array([x[0] - 1.0])

        return RoundOracle(cost=cost,
                           constraint=lambda x: (np.array([x[0] - 0.3]),
                                                 np.array([[1.0]])))

    learner = GreedyLearner(cfg("greedy_baseline", a=1.0), BOX1, 1, 1)
    xs, lams = [], []
    for _ in range(4000):
        rec = learner.play_round(oracle())
        xs.append(rec.x[0])
        lams.append(rec.lam[0])
    assert np.mean(xs[2000:]) == pytest.approx(x_hat, abs=0.05)
    assert np.mean(lams[2000:]) == pytest.approx(lam_hat, abs=0.05)


def test_make_learner_dispatch():
    assert isinstance(make_learner(cfg("greedy_baseline"), BOX1, 1, 1), GreedyLearner)
    assert isinstance(make_learner(cfg("llp"), BOX1, 1, 1), LlpLearner)
    with pytest.raises(ConfigurationError):
        GreedyLearner(cfg("llp"), BOX1, 1, 1)
