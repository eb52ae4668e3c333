"""Grid-sweep frontier solvers.

The unweighted driver discretizes the objective space on a power-of-two
grid, asks the probabilistic oracle one joint-threshold question per grid
point (error budget split evenly: eta = delta / #points, gap fixed by the
approximation factor), keeps the SAT witnesses, and prunes to the
non-dominated set.  The weighted driver first embeds each weighted
objective into counter bits, takes a T-fold product to shrink the effective
approximation factor, and then runs the same sweep on the resulting
problem.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .encodings import less_than_const
from .engine import SolverBackend, get_backend
from .hashing import amplification_size, split_seed
from .model import (
    Formula,
    Frontier,
    FrontierEntry,
    GridPoint,
    SmooProblem,
    UnweightedObjective,
    VariableSpace,
    WeightedObjective,
    lit,
    prune_nondominated,
    remap_formula,
)
from .oracle import OracleContext, OracleQuery, confidence_tau, xor_sat


@dataclass
class SolveConfig:
    """Driver parameters.

    Exactly one of ``gamma`` or the explicit pair ``(T, b)`` may be supplied
    on the weighted path; the unweighted path uses ``epsilon`` (>= 3) and
    fixes the oracle gap at ``epsilon - 1``.
    """

    delta: float = 0.2
    epsilon: int = 3
    gamma: float | None = None
    T: int | None = None
    b: int | None = None
    seed: int = 0
    backend: str | None = None
    strategy: str = "auto"
    step_limit: int | None = None
    time_limit: float | None = None  # wall seconds per oracle query
    jobs: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.gamma is not None and (self.T is not None or self.b is not None):
            raise ValueError("supply either gamma or explicit (T, b), not both")
        if (self.T is None) != (self.b is None):
            raise ValueError("T and b must be supplied together")


@dataclass(frozen=True)
class PointOutcome:
    exponents: tuple[int, ...]
    status: str
    witness: tuple[int, ...] | None = None


@dataclass
class RunReport:
    """Everything needed to audit a sweep."""

    delta: float
    epsilon: int
    l_star: int
    eta: float
    tau: float
    m: int
    grid_size: int
    naive_query_count: int  # product of block sizes, for comparison
    outcomes: list[PointOutcome]
    seed: int
    wall_time: float
    frontier: Frontier
    all_indeterminate: bool = False
    weighted: dict | None = None

    @property
    def tally(self) -> dict[str, int]:
        t = {"sat": 0, "unsat": 0, "indeterminate": 0}
        for o in self.outcomes:
            t[o.status] += 1
        return t

    def to_obj(self, include_wall_time: bool = False) -> dict:
        obj = {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "l_star": self.l_star,
            "eta": self.eta,
            "tau": self.tau,
            "m": self.m,
            "grid_size": self.grid_size,
            "naive_query_count": self.naive_query_count,
            "tally": self.tally,
            "seed": self.seed,
            "all_indeterminate": self.all_indeterminate,
            "outcomes": [
                {
                    "exponents": list(o.exponents),
                    "status": o.status,
                    "witness": list(o.witness) if o.witness else None,
                }
                for o in self.outcomes
            ],
        }
        if self.weighted is not None:
            obj["weighted"] = self.weighted
        if include_wall_time:
            obj["wall_time_s"] = self.wall_time
        return obj


def build_grid(problem: SmooProblem) -> list[GridPoint]:
    """All exponent tuples ``0 <= l_i <= |y_i|`` in lexicographic order."""
    ranges = [range(b + 1) for b in problem.space.latent_blocks]
    return [GridPoint(tuple(t)) for t in itertools.product(*ranges)]


def approximate_frontier(
    problem: SmooProblem, cfg: SolveConfig
) -> tuple[Frontier, RunReport]:
    """Threshold-grid sweep for unweighted counting objectives."""
    if problem.is_weighted:
        raise ValueError("use approximate_frontier_weighted for weighted objectives")
    if cfg.epsilon < 3:
        raise ValueError("epsilon must be >= 3")
    start = time.perf_counter()
    grid = build_grid(problem)
    l_star = cfg.epsilon - 1
    eta = cfg.delta / len(grid)
    n = problem.space.decision_count
    tau = confidence_tau(problem.k, n, eta)
    m = amplification_size(l_star, tau)
    backend = get_backend(cfg.backend)
    context = OracleContext(problem)

    def run_point(idx_point):
        idx, point = idx_point
        query = OracleQuery(
            problem, point.exponents, l_star, eta, split_seed(cfg.seed, idx)
        )
        res = xor_sat(
            query,
            backend=backend,
            context=context,
            strategy=cfg.strategy,
            step_limit=cfg.step_limit,
            time_limit=cfg.time_limit,
        )
        return PointOutcome(point.exponents, res.status, res.witness)

    items = list(enumerate(grid))
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(run_point, items))
    else:
        outcomes = [run_point(it) for it in items]

    entries = [
        FrontierEntry(o.witness, GridPoint(o.exponents).thresholds)
        for o in outcomes
        if o.status == "sat"
    ]
    frontier = prune_nondominated(entries)
    all_indet = bool(outcomes) and all(
        o.status == "indeterminate" for o in outcomes
    )
    report = RunReport(
        delta=cfg.delta,
        epsilon=cfg.epsilon,
        l_star=l_star,
        eta=eta,
        tau=tau,
        m=m,
        grid_size=len(grid),
        naive_query_count=math.prod(problem.space.latent_blocks),
        outcomes=outcomes,
        seed=cfg.seed,
        wall_time=time.perf_counter() - start,
        frontier=frontier,
        all_indeterminate=all_indet,
    )
    return frontier, report


# ---------------------------------------------------------------------------
# Weighted path: embedding, pseudo problem, parameter selection.


@dataclass(frozen=True)
class EmbeddedObjective:
    """Single-copy unweighted embedding of a weighted objective.

    The new latent block is ``[original y | b counter bits z]`` in a fresh
    space; for every support assignment the number of satisfying ``z``
    equals ``floor(r_b)`` where ``r_b = (weight - L) / (U - L) * 2^b``.
    """

    source: WeightedObjective
    b: int
    space: VariableSpace
    formula: Formula
    z_vars: tuple[int, ...]
    y_size: int


def discretized_value(obj: WeightedObjective, weight: Fraction, b: int) -> int:
    """floor((weight - L) / (U - L) * 2^b), clamped into [0, 2^b]."""
    r = (weight - obj.lower) / (obj.upper - obj.lower) * (1 << b)
    if r < 0:
        return 0
    if r > (1 << b):
        raise ValueError("weight above declared upper bound")
    return math.floor(r)


def embed_weighted(obj: WeightedObjective, b: int) -> EmbeddedObjective:
    """Counter-bit embedding of one weighted objective.

    Builds a fresh space holding the decisions, the objective's own latent
    block extended by ``b`` counter bits, and one-hot selector auxiliaries
    per joint factor-scope assignment guarding fixed comparator clauses.
    """
    if b < 0:
        raise ValueError("b must be >= 0")
    src_space = obj.hard_formula.space
    n = src_space.decision_count
    y_vars = list(src_space.block_range(obj.index))
    y_size = len(y_vars)
    space = VariableSpace(n, (y_size + b,))
    mapping = {v: n + j for j, v in enumerate(y_vars)}
    z_vars = tuple(range(n + y_size, n + y_size + b))
    # Carry the hard formula's own aux (if any) into fresh aux ids.
    aux_mentioned = sorted(
        v for v in obj.hard_formula.vars_mentioned() if src_space.is_aux(v)
    )
    if aux_mentioned:
        space, fresh = space.with_aux(len(aux_mentioned), "embedded-hard-aux")
        mapping.update(dict(zip(aux_mentioned, fresh)))
    hard = remap_formula(obj.hard_formula, mapping, space)

    scope = obj.joint_scope
    scope_new = [mapping[v] for v in scope]
    clauses = list(hard.clauses)
    n_sel = 1 << len(scope)
    space, sel = space.with_aux(n_sel, "weight-selector")
    zlits = tuple(lit(z) for z in z_vars)
    for pattern in range(n_sel):
        bits_of = {v: (pattern >> pos) & 1 for pos, v in enumerate(scope)}
        w = obj.weight(bits_of)
        value = discretized_value(obj, w, b)
        s = lit(sel[pattern])
        agree = tuple(
            lit(v, bool((pattern >> pos) & 1)) for pos, v in enumerate(scope_new)
        )
        # One-hot selector: s <-> (scope == pattern).
        clauses += [(-s, l) for l in agree]
        clauses.append(tuple(-l for l in agree) + (s,))
        # Guarded comparator: scope == pattern -> binary(z) < value.
        for comp in less_than_const(zlits, value):
            clauses.append((-s,) + comp)
    formula = Formula(space, tuple(clauses), hard.xors, hard.cards)
    return EmbeddedObjective(obj, b, space, formula, z_vars, y_size)


def build_pseudo(problem: SmooProblem, T: int, b: int) -> SmooProblem:
    """T-fold product problem over embedded objectives.

    Each objective becomes the conjunction of ``T`` fresh-copy embeddings,
    so its latent count is the single-copy count raised to the T-th power
    and its block size becomes ``T * (|y_i| + b)``.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if not problem.is_weighted:
        raise ValueError("pseudo construction applies to weighted problems")
    templates = [embed_weighted(o, b) for o in problem.objectives]
    n = problem.space.decision_count
    unit = [t.y_size + b for t in templates]
    blocks = tuple(T * u for u in unit)
    space = VariableSpace(n, blocks)
    objectives = []
    for i, tpl in enumerate(templates):
        parts = []
        block_start = space.block_start(i)
        for t in range(T):
            mapping = {}
            for j in range(unit[i]):
                mapping[n + j] = block_start + t * unit[i] + j
            aux_vars = sorted(
                v for v in tpl.formula.vars_mentioned() if tpl.space.is_aux(v)
            )
            space, fresh = space.with_aux(len(aux_vars), f"obj{i}-copy{t}")
            mapping.update(dict(zip(aux_vars, fresh)))
            parts.append(remap_formula(tpl.formula, mapping, space))
        parts = [p.in_space(space) for p in parts]
        combined = Formula(
            space,
            tuple(c for p in parts for c in p.clauses),
            tuple(x for p in parts for x in p.xors),
            tuple(cc for p in parts for cc in p.cards),
        )
        objectives.append(UnweightedObjective(i, combined, parts=tuple(parts)))
    constraints = remap_formula(problem.decision_constraints, {}, space)
    return SmooProblem(space, tuple(objectives), constraints)


def params_for_gamma(
    gamma: float, bounds: Sequence[tuple[Fraction, Fraction]]
) -> tuple[int, int]:
    """Smallest integer (T, b) meeting a target approximation factor.

    ``T = ceil(10 / log2 gamma)``; ``b`` makes the discretization slack not
    exceed the other half of the budget.  Requires positive lower bounds.
    """
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    for L, U in bounds:
        if L <= 0:
            raise ValueError(
                "target-factor parameter selection requires positive lower "
                "bounds on every objective"
            )
        if U <= L:
            raise ValueError("bounds must satisfy U > L")
    T = math.ceil(10 / math.log2(gamma))
    worst = max(float(U) / float(L) for L, U in bounds)
    raw = math.log2(worst - 1) - math.log2(gamma - math.sqrt(gamma))
    b = max(0, math.ceil(raw))
    return T, b


def zeta_value(
    T: int, b: int, bounds: Sequence[tuple[Fraction, Fraction]]
) -> float:
    """Discretization slack exponent: max_i log2(1 + (U-L)/(2^(5/T) L 2^b))."""
    vals = []
    for L, U in bounds:
        if L <= 0:
            return math.inf
        vals.append(
            math.log2(1 + float(U - L) / (2 ** (5 / T) * float(L) * (1 << b)))
        )
    return max(vals)


def approximate_frontier_weighted(
    problem: SmooProblem, cfg: SolveConfig
) -> tuple[Frontier, RunReport]:
    """Weighted sweep: embed, amplify by T, solve the pseudo problem.

    Frontier p-vectors live in pseudo-count space (the space the guarantee
    addresses); the report also carries back-transformed weighted estimates
    per entry.
    """
    if not problem.is_weighted:
        raise ValueError("problem has unweighted objectives; use approximate_frontier")
    bounds = [(o.lower, o.upper) for o in problem.objectives]
    if cfg.T is not None:
        T, b = cfg.T, cfg.b
        if T < 1 or b < 0:
            raise ValueError("need T >= 1 and b >= 0")
    elif cfg.gamma is not None:
        T, b = params_for_gamma(cfg.gamma, bounds)
    else:
        raise ValueError("weighted path needs gamma or explicit (T, b)")
    pseudo = build_pseudo(problem, T, b)
    inner_cfg = SolveConfig(
        delta=cfg.delta,
        epsilon=3,  # the weighted reduction is proven for this setting
        seed=cfg.seed,
        backend=cfg.backend,
        strategy=cfg.strategy,
        step_limit=cfg.step_limit,
        time_limit=cfg.time_limit,
        jobs=cfg.jobs,
    )
    frontier, report = approximate_frontier(pseudo, inner_cfg)
    z = zeta_value(T, b, bounds)
    estimates = [
        tuple(
            weighted_estimate(problem.objectives[i], b, T, entry.p[i])
            for i in range(problem.k)
        )
        for entry in frontier
    ]
    report.weighted = {
        "T": T,
        "b": b,
        "zeta": z,
        "approx_factor_log2": 5 / T + z,
        "gamma": cfg.gamma,
        "estimates": [[float(v) for v in est] for est in estimates],
    }
    return frontier, report


def weighted_estimate(
    obj: WeightedObjective, b: int, T: int, pseudo_count: float
) -> float:
    """Back-transformed weighted-sum estimate from a pseudo-count level."""
    y = obj.hard_formula.space.latent_blocks[obj.index]
    scale = float(obj.upper - obj.lower) / (1 << b)
    return float(obj.lower) * (1 << y) + scale * pseudo_count ** (1.0 / T)
