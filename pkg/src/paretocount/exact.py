"""Brute-force ground truth at desk scale.

These are the oracles the statistical guarantees are validated against:
exact objective evaluation (integer counts or rational weighted sums),
exact Pareto enumeration, the exact-oracle threshold frontier, and the
deterministic discretized-count inequality check.  Everything here uses
exact arithmetic; nothing is shared with the randomized solver path beyond
the model types.
"""

from __future__ import annotations

import itertools
import math
import os
from fractions import Fraction
from typing import Sequence

from .engine import count_models
from .frontier import build_grid, discretized_value
from .model import (
    Formula,
    Frontier,
    FrontierEntry,
    SmooProblem,
    UnweightedObjective,
    WeightedObjective,
    compact_formula,
    pareto_front,
    restrict_formula,
)

EXACT_BUDGET = int(os.environ.get("PARETOCOUNT_EXACT_BUDGET", str(1 << 24)))


def _check_budget(log2_size: int, what: str) -> None:
    if log2_size > math.log2(EXACT_BUDGET):
        raise ValueError(
            f"{what} would enumerate 2^{log2_size} assignments, over the "
            f"exhaustive budget of {EXACT_BUDGET}"
        )


def enumerate_feasible(problem: SmooProblem) -> list[int]:
    """All decision assignments satisfying the hard constraints, ascending."""
    n = problem.space.decision_count
    _check_budget(n, "decision enumeration")
    cons, _ = compact_formula(problem.decision_constraints, range(n))
    out = []
    for bits in range(1 << n):
        fixed = {v: (bits >> v) & 1 for v in range(n)}
        compacted, _ = compact_formula(restrict_formula(cons, fixed), [])
        if count_models(compacted, []) == 1:
            out.append(bits)
    return out


def _count_given(formula: Formula, fixed: dict[int, int], proj: Sequence[int]) -> int:
    restricted = restrict_formula(formula, fixed)
    compacted, order = compact_formula(restricted, proj)
    return count_models(compacted, range(len(proj)))


def exact_objectives(
    problem: SmooProblem, x: Sequence[int]
) -> tuple[Fraction | int, ...]:
    """Objective vector at ``x``: exact counts or exact weighted sums."""
    space = problem.space
    n = space.decision_count
    if len(x) != n:
        raise ValueError(f"x must assign all {n} decision variables")
    fixed = {v: int(x[v]) for v in range(n)}
    out: list[Fraction | int] = []
    for i, obj in enumerate(problem.objectives):
        # count_models enforces the projection-size limit for both paths
        block = list(space.block_range(i))
        if isinstance(obj, UnweightedObjective):
            out.append(_count_given(obj.formula, fixed, block))
        else:
            scope = list(obj.joint_scope)
            rest = [v for v in block if v not in set(scope)]
            total = Fraction(0)
            for pattern in range(1 << len(scope)):
                bits_of = {v: (pattern >> p) & 1 for p, v in enumerate(scope)}
                w = obj.weight(bits_of)
                if w == 0:
                    continue
                cnt = _count_given(
                    obj.hard_formula, {**fixed, **bits_of}, rest
                )
                total += w * cnt
            out.append(total)
    return tuple(out)


def exact_pareto(problem: SmooProblem) -> Frontier:
    """Exact Pareto frontier under strict dominance, scored exactly."""
    n = problem.space.decision_count
    entries = []
    for bits in enumerate_feasible(problem):
        xv = tuple((bits >> v) & 1 for v in range(n))
        entries.append(FrontierEntry(xv, exact_objectives(problem, xv)))
    return pareto_front(entries)


def exact_pareto_with_costs(
    problem: SmooProblem, costs: Sequence[Fraction]
) -> Frontier:
    """Joint Pareto front over (counting objectives..., -cost).

    Supply-style problems carry a deterministic linear cost outside the
    counting machinery; the reference front must trade both off.
    """
    n = problem.space.decision_count
    entries = []
    for bits in enumerate_feasible(problem):
        xv = tuple((bits >> v) & 1 for v in range(n))
        cost = sum(
            (Fraction(c) for c, bit in zip(costs, xv) if bit), Fraction(0)
        )
        entries.append(
            FrontierEntry(xv, exact_objectives(problem, xv) + (-cost,))
        )
    return pareto_front(entries)


def exact_threshold_frontier(problem: SmooProblem) -> Frontier:
    """Witnesses of maximal satisfiable power-of-two grid points.

    Uses the exact scores: a grid point is satisfiable when some feasible
    ``x`` meets every threshold; a point is kept when no other satisfiable
    point weakly dominates it with a strict improvement.  Each kept point
    contributes its lexicographically first witness, scored exactly.
    """
    n = problem.space.decision_count
    scored: list[tuple[int, tuple]] = []
    for bits in enumerate_feasible(problem):
        xv = tuple((bits >> v) & 1 for v in range(n))
        scored.append((bits, exact_objectives(problem, xv)))
    grid = build_grid(problem)
    sat_points = []
    for point in grid:
        thr = point.thresholds
        witness = next(
            (
                bits
                for bits, scores in scored
                if all(s >= t for s, t in zip(scores, thr))
            ),
            None,
        )
        if witness is not None:
            sat_points.append((point.exponents, witness))
    maximal = []
    for exps, witness in sat_points:
        dominated = any(
            all(o >= e for o, e in zip(other, exps))
            and any(o > e for o, e in zip(other, exps))
            for other, _ in sat_points
        )
        if not dominated:
            maximal.append((exps, witness))
    entries = []
    for exps, bits in maximal:
        xv = tuple((bits >> v) & 1 for v in range(n))
        entries.append(FrontierEntry(xv, exact_objectives(problem, xv)))
    # Distinct witnesses may repeat across grid points; collapse duplicates.
    seen = set()
    unique = []
    for e in entries:
        if e.x not in seen:
            seen.add(e.x)
            unique.append(e)
    return tuple(unique)


def is_gamma_approximation(
    candidate: Frontier, optimal: Frontier, gamma: Fraction | float
) -> bool:
    """Does every optimal entry have a candidate within factor gamma?"""
    for opt in optimal:
        if not any(
            all(gamma * c >= o for c, o in zip(cand.p, opt.p))
            for cand in candidate
        ):
            return False
    return True


def embedded_count(obj: WeightedObjective, b: int, x: Sequence[int]) -> int:
    """Sum over support of floor(r_b): the embedded model count at ``x``."""
    space = obj.hard_formula.space
    n = space.decision_count
    fixed = {v: int(x[v]) for v in range(n)}
    block = list(space.block_range(obj.index))
    scope = list(obj.joint_scope)
    rest = [v for v in block if v not in set(scope)]
    total = 0
    for pattern in range(1 << len(scope)):
        bits_of = {v: (pattern >> p) & 1 for p, v in enumerate(scope)}
        cnt = _count_given(obj.hard_formula, {**fixed, **bits_of}, rest)
        if cnt:
            total += cnt * discretized_value(obj, obj.weight(bits_of), b)
    return total


def check_weighted_bounds(
    obj: WeightedObjective, b: int, x: Sequence[int]
) -> bool:
    """Two-sided discretized-count inequality, in exact rationals.

    ``2^m L + (U-L)/2^b * S  <=  true sum  <  same + 2^m (U-L)/2^b`` where
    ``S`` is the embedded count and ``m`` the latent block size.  Holds
    whenever the support is total or the lower bound is zero.
    """
    space = obj.hard_formula.space
    m = space.latent_blocks[obj.index]
    fixed = {v: int(x[v]) for v in range(space.decision_count)}
    block = list(space.block_range(obj.index))
    scope = list(obj.joint_scope)
    rest = [v for v in block if v not in set(scope)]
    true_sum = Fraction(0)
    embedded = 0
    for pattern in range(1 << len(scope)):
        bits_of = {v: (pattern >> p) & 1 for p, v in enumerate(scope)}
        cnt = _count_given(obj.hard_formula, {**fixed, **bits_of}, rest)
        if cnt:
            w = obj.weight(bits_of)
            true_sum += w * cnt
            embedded += cnt * discretized_value(obj, w, b)
    step = (obj.upper - obj.lower) / (1 << b)
    low = (1 << m) * obj.lower + step * embedded
    high = low + (1 << m) * step
    return low <= true_sum < high


def validate_weight_bounds(problem: SmooProblem) -> bool:
    """Every support assignment's weight lies within [L, U] (desk scan)."""
    if not problem.is_weighted:
        return True
    space = problem.space
    n = space.decision_count
    for obj in problem.objectives:
        scope = list(obj.joint_scope)
        rest = [
            v for v in space.block_range(obj.index) if v not in set(scope)
        ]
        for bits in enumerate_feasible(problem):
            fixed = {v: (bits >> v) & 1 for v in range(n)}
            for pattern in range(1 << len(scope)):
                bits_of = {v: (pattern >> p) & 1 for p, v in enumerate(scope)}
                if _count_given(obj.hard_formula, {**fixed, **bits_of}, rest):
                    w = obj.weight(bits_of)
                    if not obj.lower <= w <= obj.upper:
                        return False
    return True
