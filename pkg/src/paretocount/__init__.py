"""Approximate Pareto frontiers for counting-based stochastic objectives.

The pipeline: discretize the objective space multiplicatively, answer each
grid point's joint-threshold question with a probabilistic SAT oracle built
from random parity constraints and majority amplification, and prune the
witnesses to a non-dominated set.  Weighted counting objectives are first
embedded into counter bits and amplified by a product construction.
"""

from .engine import (
    Assignment,
    SolveResult,
    SolveTimeout,
    count_models,
    evaluate,
    get_backend,
    solve,
)
from .frontier import (
    RunReport,
    SolveConfig,
    approximate_frontier,
    approximate_frontier_weighted,
    build_grid,
    build_pseudo,
    embed_weighted,
    params_for_gamma,
)
from .hashing import (
    amplification_size,
    build_amplified,
    sample_xor,
    split_seed,
    xor_counting,
)
from .kernels import KERNEL_BACKEND
from .model import (
    Card,
    Formula,
    FrontierEntry,
    GridPoint,
    SmooProblem,
    UnweightedObjective,
    VariableSpace,
    WeightFactor,
    WeightedObjective,
    Xor,
    build_space,
    dominates,
    lit,
    prune_nondominated,
    replicate_latent,
    strictly_dominates,
    true_formula,
)
from .oracle import OracleContext, OracleQuery, OracleResult, confidence_tau, xor_sat

__version__ = "0.1.0"
