"""Online convex optimization with long-term constraints and untrusted predictions.

The package splits into five layers: feasible sets (`sets`), environments
(`problems`), forecast sources (`predictors`), the inner minimization
(`solver`), the learners themselves (`learners`), and offline evaluation
(`analysis`).  `runner` and `cli` wire them into reproducible experiments.
"""

from .analysis import (
    BENCHMARK_KINDS,
    BenchmarkResult,
    BoundReport,
    ExponentFit,
    TraceMetrics,
    compute_benchmark,
    compute_metrics,
    dual_regret_gap,
    evaluate_perturbed_bounds,
    evaluate_theorem1_bounds,
    evaluate_theorem3_bounds,
    fit_growth_exponent,
    llp2_bound_report,
    llp_bound_report,
    perturbed_report,
)
from .learners import VARIANTS, LearnerConfig, RoundRecord, make_learner
from .predictors import (
    PREDICTOR_KINDS,
    PredictionBundle,
    UnsupportedScenarioError,
    make_predictor,
    zero_bundle,
)
from .problems import SCENARIO_KINDS, ProblemBounds, RoundOracle, make_scenario
from .runner import (
    RunConfig,
    RunResult,
    SweepConfig,
    bench,
    compare,
    execute_run,
    parse_run_config,
    parse_sweep_config,
    sweep,
    write_trace,
)
from .sets import Ball, Box, ConfigurationError, Simplex, make_set, positive_part
from .solver import FtrlObjective, SolveResult, SolverSettings, dual_closed_form, minimize

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Ball", "Box", "Simplex", "make_set", "positive_part", "ConfigurationError",
    "ProblemBounds", "RoundOracle", "SCENARIO_KINDS", "make_scenario",
    "PredictionBundle", "PREDICTOR_KINDS", "make_predictor", "zero_bundle",
    "UnsupportedScenarioError",
    "SolverSettings", "SolveResult", "FtrlObjective", "minimize", "dual_closed_form",
    "LearnerConfig", "RoundRecord", "VARIANTS", "make_learner",
    "BENCHMARK_KINDS", "BenchmarkResult", "BoundReport", "ExponentFit", "TraceMetrics",
    "compute_benchmark", "compute_metrics", "dual_regret_gap",
    "evaluate_theorem1_bounds", "evaluate_theorem3_bounds", "evaluate_perturbed_bounds",
    "fit_growth_exponent", "perturbed_report", "llp_bound_report", "llp2_bound_report",
    "RunConfig", "SweepConfig", "RunResult", "parse_run_config", "parse_sweep_config",
    "execute_run", "write_trace", "sweep", "compare", "bench",
]
