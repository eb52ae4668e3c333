import math
import random
from fractions import Fraction

import pytest

from paretocount.engine import count_models
from paretocount.exact import (
    embedded_count,
    exact_objectives,
    exact_pareto,
    is_gamma_approximation,
)
from paretocount.frontier import (
    SolveConfig,
    approximate_frontier,
    approximate_frontier_weighted,
    build_grid,
    build_pseudo,
    discretized_value,
    embed_weighted,
    params_for_gamma,
    zeta_value,
)
from paretocount.model import (
    Formula,
    FrontierEntry,
    SmooProblem,
    UnweightedObjective,
    WeightFactor,
    WeightedObjective,
    build_space,
    lit,
    true_formula,
)


def unweighted_problem(sizes=(2, 3), n=0):
    sp = build_space(n, list(sizes))
    objs = tuple(
        UnweightedObjective(i, true_formula(sp)) for i in range(len(sizes))
    )
    return SmooProblem(sp, objs, true_formula(sp))


class TestGrid:
    def test_counts_and_order(self):
        g = build_grid(unweighted_problem((2, 3)))
        assert len(g) == 12
        assert g[0].thresholds == (1, 1)
        assert g[-1].thresholds == (4, 8)

    def test_degenerate_block(self):
        g = build_grid(unweighted_problem((0,)))
        assert len(g) == 1 and g[0].thresholds == (1,)

    def test_pseudo_range(self):
        sp = build_space(0, [2])
        obj = WeightedObjective(
            0,
            true_formula(sp),
            (WeightFactor((0, 1), tuple(Fraction(v) for v in (1, 2, 3, 4))),),
            Fraction(1),
            Fraction(4),
        )
        problem = SmooProblem(sp, (obj,), true_formula(sp))
        pseudo = build_pseudo(problem, 2, 1)
        g = build_grid(pseudo)
        assert len(g) == 7  # exponents 0..6


class TestConfig:
    def test_gamma_conflicts_with_explicit(self):
        with pytest.raises(ValueError):
            SolveConfig(gamma=2.0, T=1, b=1)
        with pytest.raises(ValueError):
            SolveConfig(T=2)
        with pytest.raises(ValueError):
            SolveConfig(delta=0.0)


class TestUnweightedDriver:
    def test_all_unsat_gives_empty_frontier(self):
        sp = build_space(0, [2, 2])
        dead0 = Formula(sp, clauses=((lit(0),), (-lit(0),)))
        dead1 = Formula(sp, clauses=((lit(2),), (-lit(2),)))
        problem = SmooProblem(
            sp,
            (UnweightedObjective(0, dead0), UnweightedObjective(1, dead1)),
            true_formula(sp),
        )
        frontier, report = approximate_frontier(problem, SolveConfig(seed=1))
        assert frontier == ()
        assert report.tally["unsat"] == report.grid_size

    def test_trivial_single_objective(self):
        problem = unweighted_problem((4,))
        frontier, report = approximate_frontier(problem, SolveConfig(seed=2))
        assert len(frontier) == 1
        (entry,) = frontier
        exact = exact_objectives(problem, entry.x)[0]
        assert exact == 16
        assert (2 ** (2 * 3 - 1)) * exact >= 16

    def test_eta_budget_exact(self):
        problem = unweighted_problem((2, 3))
        _, report = approximate_frontier(problem, SolveConfig(delta=0.3, seed=0))
        assert report.eta == 0.3 / 12
        assert report.grid_size == 12
        assert report.naive_query_count == 6

    def test_epsilon_below_three_rejected(self):
        with pytest.raises(ValueError):
            approximate_frontier(unweighted_problem(), SolveConfig(epsilon=2))

    def test_frontier_points_are_sat_outcomes(self):
        problem = unweighted_problem((3, 3))
        frontier, report = approximate_frontier(problem, SolveConfig(seed=5))
        sat_points = {
            tuple(1 << l for l in o.exponents)
            for o in report.outcomes
            if o.status == "sat"
        }
        for e in frontier:
            assert tuple(e.p) in sat_points

    def test_deterministic_including_parallel(self):
        problem = unweighted_problem((3, 2))
        f1, r1 = approximate_frontier(problem, SolveConfig(seed=9, jobs=1))
        f2, r2 = approximate_frontier(problem, SolveConfig(seed=9, jobs=4))
        assert f1 == f2
        assert [o.status for o in r1.outcomes] == [o.status for o in r2.outcomes]

    def test_statistical_thirty_two_approx(self):
        # desk-scale contract check at reduced trial count; the acceptance
        # suite runs the full version
        rnd = random.Random(77)
        instances = [toy_instance(rnd) for _ in range(3)]
        runs, valid = 0, 0
        for problem, _ in instances:
            front = exact_pareto(problem)
            for rep in range(4):
                frontier, _ = approximate_frontier(
                    problem, SolveConfig(delta=0.2, seed=1000 + runs)
                )
                cand = tuple(
                    FrontierEntry(e.x, exact_objectives(problem, e.x))
                    for e in frontier
                )
                valid += int(is_gamma_approximation(cand, front, 32))
                runs += 1
        p0 = 0.8
        sigma = math.sqrt(p0 * (1 - p0) / runs)
        assert valid / runs >= p0 - 3 * sigma


def toy_instance(rnd, n_max=4, y_max=5):
    """Random 2-objective instance whose Pareto optima all have counts >= 8
    (the multiplicative guarantee presumes thresholds reachable from the
    grid's lowest level)."""
    while True:
        n = rnd.randint(1, n_max)
        sizes = [rnd.randint(4, y_max) for _ in range(2)]
        sp = build_space(n, sizes)
        objs = []
        for i in range(2):
            block = list(sp.block_range(i))
            clauses = []
            for _ in range(rnd.randint(1, 2)):
                vs = rnd.sample(block, 2) + [rnd.randrange(n)]
                clauses.append(tuple(lit(v, rnd.random() < 0.5) for v in vs))
            objs.append(UnweightedObjective(i, Formula(sp, tuple(clauses))))
        problem = SmooProblem(sp, tuple(objs), true_formula(sp))
        front = exact_pareto(problem)
        if front and all(all(v >= 8 for v in e.p) for e in front):
            return problem, front


class TestEmbed:
    def setup_method(self):
        sp = build_space(0, [1])
        self.obj = WeightedObjective(
            0,
            true_formula(sp),
            (WeightFactor((0,), (Fraction(1), Fraction(5))),),
            Fraction(1),
            Fraction(5),
        )

    def test_discretized_values(self):
        assert discretized_value(self.obj, Fraction(3), 2) == 2
        assert discretized_value(self.obj, Fraction(1), 2) == 0
        assert discretized_value(self.obj, Fraction(5), 2) == 4

    def test_embedded_counts(self):
        emb = embed_weighted(self.obj, 2)
        assert count_models(emb.formula, emb.space.block_range(0)) == 4
        assert embedded_count(self.obj, 2, ()) == 4

    def test_z_count_per_support_point(self):
        # f(y)=3 with L=1,U=5,b=2 -> two satisfying z patterns
        sp = build_space(0, [1])
        obj = WeightedObjective(
            0,
            true_formula(sp),
            (WeightFactor((0,), (Fraction(3), Fraction(5))),),
            Fraction(1),
            Fraction(5),
        )
        emb = embed_weighted(obj, 2)
        f_y0 = emb.formula.with_units([-lit(emb.space.block_start(0))])
        assert count_models(f_y0, emb.z_vars) == 2

    def test_scope_limit_enforced(self):
        sp = build_space(0, [18])
        table = tuple(Fraction(v % 3 + 1) for v in range(1 << 17))
        with pytest.raises(ValueError, match="limit"):
            WeightedObjective(
                0,
                true_formula(sp),
                (WeightFactor(tuple(range(17)), table),),
                Fraction(1),
                Fraction(3),
            )


class TestPseudo:
    def test_product_identity(self):
        sp = build_space(1, [2])
        fac = WeightFactor(
            (1, 2), (Fraction(1), Fraction(2), Fraction(3), Fraction(4))
        )
        obj = WeightedObjective(0, true_formula(sp), (fac,), Fraction(1), Fraction(4))
        problem = SmooProblem(sp, (obj,), true_formula(sp))
        for T in (1, 2, 3):
            pseudo = build_pseudo(problem, T, 2)
            assert pseudo.space.latent_blocks == (T * 4,)
            for xb in (0, 1):
                single = embedded_count(obj, 2, (xb,))
                assert exact_objectives(pseudo, (xb,))[0] == single**T

    def test_zero_annihilates(self):
        sp = build_space(0, [1])
        dead = Formula(sp, clauses=((lit(0),), (-lit(0),)))
        obj = WeightedObjective(
            0, dead, (WeightFactor((0,), (Fraction(1), Fraction(2))),),
            Fraction(0), Fraction(2),
        )
        problem = SmooProblem(sp, (obj,), true_formula(sp))
        pseudo = build_pseudo(problem, 3, 1)
        assert exact_objectives(pseudo, ())[0] == 0


class TestParams:
    def test_corollary_examples(self):
        assert params_for_gamma(2.0, [(Fraction(1), Fraction(5))]) == (10, 3)
        assert params_for_gamma(2.0, [(Fraction(1), Fraction(2))]) == (10, 1)
        assert params_for_gamma(4.0, [(Fraction(1), Fraction(5))])[0] == 5

    def test_zero_lower_bound_rejected(self):
        with pytest.raises(ValueError):
            params_for_gamma(2.0, [(Fraction(0), Fraction(5))])

    def test_zeta_example(self):
        z = zeta_value(10, 3, [(Fraction(1), Fraction(5))])
        assert z == pytest.approx(math.log2(1 + 4 / (2**0.5 * 8)), abs=1e-12)


class TestWeightedDriver:
    def make_problem(self):
        sp = build_space(2, [2, 2])
        f1 = WeightFactor(
            (2, 3), (Fraction(1), Fraction(3), Fraction(2), Fraction(5))
        )
        f2 = WeightFactor(
            (4, 5), (Fraction(5), Fraction(2), Fraction(4), Fraction(1))
        )
        o1 = WeightedObjective(0, true_formula(sp), (f1,), Fraction(1), Fraction(5))
        o2 = WeightedObjective(1, true_formula(sp), (f2,), Fraction(1), Fraction(5))
        return SmooProblem(sp, (o1, o2), true_formula(sp))

    def test_report_parameters(self):
        problem = self.make_problem()
        frontier, report = approximate_frontier_weighted(
            problem, SolveConfig(delta=0.2, T=2, b=2, seed=3)
        )
        assert report.weighted["T"] == 2
        assert report.weighted["b"] == 2
        assert report.epsilon == 3
        assert report.grid_size == 81
        z = zeta_value(2, 2, [(Fraction(1), Fraction(5))] * 2)
        assert report.weighted["zeta"] == pytest.approx(z)
        assert len(report.weighted["estimates"]) == len(frontier)

    def test_gamma_path_resolves_parameters(self):
        problem = self.make_problem()
        cfg = SolveConfig(delta=0.5, gamma=16.0, seed=1)
        frontier, report = approximate_frontier_weighted(problem, cfg)
        assert report.weighted["T"] == math.ceil(10 / math.log2(16.0))
        assert report.weighted["gamma"] == 16.0

    def test_statistical_guarantee(self):
        # witnesses scored by exact weighted sums form a
        # 2^(5/T + zeta)-approximate frontier in most seeded runs
        problem = self.make_problem()
        T, b = 2, 2
        bounds = [(o.lower, o.upper) for o in problem.objectives]
        factor = 2 ** (5 / T + zeta_value(T, b, bounds))
        front = exact_pareto(problem)
        runs, valid = 12, 0
        for s in range(runs):
            frontier, _ = approximate_frontier_weighted(
                problem, SolveConfig(delta=0.2, T=T, b=b, seed=s)
            )
            cand = tuple(
                FrontierEntry(e.x, exact_objectives(problem, e.x))
                for e in frontier
            )
            valid += int(is_gamma_approximation(cand, front, factor))
        p0 = 0.8
        sigma = math.sqrt(p0 * (1 - p0) / runs)
        assert valid / runs >= p0 - 3 * sigma

    def test_requires_parameters(self):
        with pytest.raises(ValueError, match="gamma or explicit"):
            approximate_frontier_weighted(self.make_problem(), SolveConfig())

    def test_kind_mismatch_rejected(self):
        with pytest.raises(ValueError):
            approximate_frontier_weighted(unweighted_problem(), SolveConfig(T=1, b=1))
        with pytest.raises(ValueError):
            approximate_frontier(self.make_problem(), SolveConfig())
