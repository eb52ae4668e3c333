import math
import warnings
from fractions import Fraction

import pytest

from paretocount.engine import count_models
from paretocount.exact import (
    enumerate_feasible,
    exact_objectives,
    validate_weight_bounds,
)
from paretocount.model import FrontierEntry, compact_formula, restrict_formula
from paretocount.scenarios import (
    EventModel,
    NetworkSpec,
    attach_costs,
    bfs_reachable,
    count_shipments_brute,
    discretize_weights,
    encode_road_network,
    encode_supply_chain,
    event_distribution_total,
    generate_random_instance,
    load_tsplib,
)

TRIANGLE = NetworkSpec(
    3, ((0, 2), (0, 1), (1, 2)), (Fraction(1),) * 3, source=0, target=2
)


def simple_events(p=Fraction(3, 10), affected=((0,),)):
    return EventModel(
        affected,
        (),
        tuple(() for _ in affected),
        {
            "summer": tuple((p,) for _ in affected),
            "winter": tuple((p,) for _ in affected),
        },
    )


class TestSupply:
    def test_triangle_counts(self):
        problem, costs = encode_supply_chain(TRIANGLE)
        assert exact_objectives(problem, (1, 1, 1)) == (2,)
        f1 = exact_objectives(problem, (0, 1, 1))[0]
        assert f1 == 1
        assert Fraction(f1, 2) == Fraction(1, 2)  # normalized retention

    def test_no_path_always_zero(self):
        spec = NetworkSpec(3, ((1, 0), (2, 1)), (Fraction(1),) * 2, 0, 2)
        problem, _ = encode_supply_chain(spec)
        for xb in range(4):
            x = (xb & 1, (xb >> 1) & 1)
            assert exact_objectives(problem, x)[0] == 0

    @pytest.mark.parametrize(
        "spec",
        [
            TRIANGLE,
            NetworkSpec(
                4,
                ((0, 1), (0, 2), (1, 3), (2, 3), (1, 2)),
                (Fraction(1),) * 5,
                0,
                3,
            ),
            # graph with a directed cycle: conservation-satisfying sets may
            # layer cycles on top of a path and are counted as written
            NetworkSpec(
                3,
                ((0, 1), (1, 2), (2, 0), (1, 0), (0, 2)),
                (Fraction(1),) * 5,
                0,
                2,
            ),
        ],
    )
    def test_count_equivalence_exhaustive(self, spec):
        problem, _ = encode_supply_chain(spec)
        m = len(spec.edges)
        for active in range(1 << m):
            x = tuple((active >> e) & 1 for e in range(m))
            assert exact_objectives(problem, x)[0] == count_shipments_brute(
                spec, active
            )

    def test_budget_constrains_witnesses(self):
        spec = NetworkSpec(
            3,
            ((0, 2), (0, 1), (1, 2)),
            (Fraction(1),) * 3,
            0,
            2,
            budget_fraction=Fraction(1, 3),
        )
        problem, _ = encode_supply_chain(spec)
        feas = enumerate_feasible(problem)
        assert all(bin(b).count("1") <= 1 for b in feas)

    def test_attach_costs_prunes_jointly(self):
        front = (
            FrontierEntry((1, 0, 0), (1,)),
            FrontierEntry((0, 1, 1), (1,)),
            FrontierEntry((1, 1, 1), (2,)),
        )
        costs = [Fraction(2), Fraction(1), Fraction(1)]
        out = attach_costs(front, costs)
        assert FrontierEntry((1, 1, 1), (2, Fraction(-4))) in out
        # (1, -2) both appear; first representative kept, second identical-p dropped
        assert sum(1 for e in out if e.p == (1, Fraction(-2))) == 1


class TestRoad:
    def test_single_edge_probabilities(self):
        spec = NetworkSpec(2, ((0, 1),), (Fraction(1),), 0, 1, hop_limit=1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            problem = encode_road_network(spec, simple_events(), weight_scale=10)
        assert exact_objectives(problem, (0,)) == (7, 7)
        assert exact_objectives(problem, (1,)) == (10, 10)

    def test_empty_affected_set_is_irrelevant(self):
        spec = NetworkSpec(2, ((0, 1),), (Fraction(1),), 0, 1, hop_limit=1)
        ev = simple_events(affected=((),))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            problem = encode_road_network(spec, ev, weight_scale=10)
        assert exact_objectives(problem, (0,)) == (10, 10)

    def test_reachability_matches_bfs_exhaustive(self):
        spec, events = generate_random_instance(
            "road", seed=1, rows=2, cols=2, k_events=2, r_regimes=1, hop_limit=3
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            problem = encode_road_network(spec, events, weight_scale=10)
        m = len(spec.edges)
        base = problem.space.block_start(0)
        hard = problem.objectives[0].hard_formula
        K, R = events.k, events.r
        for xb in range(1 << m):
            for sb in range(1 << K):
                for zb in range(1 << R):
                    fixed = {v: (xb >> v) & 1 for v in range(m)}
                    for j in range(K):
                        fixed[base + j] = (sb >> j) & 1
                    for r in range(R):
                        fixed[base + K + r] = (zb >> r) & 1
                    comp, _ = compact_formula(restrict_formula(hard, fixed), [])
                    enc = count_models(comp, []) == 1
                    oper = [
                        ((xb >> e) & 1)
                        or all(
                            ((sb >> j) & 1) == 0
                            for j in range(K)
                            if e in events.affected[j]
                        )
                        for e in range(m)
                    ]
                    assert enc == bfs_reachable(spec, oper, spec.hop_limit)

    def test_distribution_normalized(self):
        _, events = generate_random_instance(
            "road", seed=5, rows=2, cols=2, k_events=3, r_regimes=2
        )
        for season in events.seasons:
            assert event_distribution_total(events, season) == 1

    def test_budget_enforced(self):
        spec, events = generate_random_instance(
            "road", seed=2, rows=1, cols=2, k_events=1, r_regimes=1,
            hop_limit=1, budget_fraction=Fraction(1, 4),
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            problem = encode_road_network(spec, events, weight_scale=10)
        feas = enumerate_feasible(problem)
        allowed = math.floor(Fraction(1, 4) * len(spec.edges))
        assert all(bin(b).count("1") <= allowed for b in feas)

    def test_weight_bounds_validated(self):
        spec, events = generate_random_instance(
            "road", seed=3, rows=1, cols=2, k_events=2, r_regimes=1, hop_limit=1
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            problem = encode_road_network(spec, events, weight_scale=10)
        assert validate_weight_bounds(problem)


class TestDiscretize:
    def test_direct_rounding(self):
        spec = NetworkSpec(2, ((0, 1),), (Fraction(1),), 0, 1, hop_limit=1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            problem = encode_road_network(spec, simple_events(), weight_scale=10)
        tables = problem.objectives[0].factors[0].table
        assert set(tables) == {Fraction(7), Fraction(3)}

    def test_scale_one_on_integers_is_identity(self):
        spec = NetworkSpec(2, ((0, 1),), (Fraction(1),), 0, 1, hop_limit=1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            problem = encode_road_network(spec, simple_events(), weight_scale=10)
            again = discretize_weights(problem, 1)
        assert again.objectives[0].factors == problem.objectives[0].factors

    def test_rounding_error_bound(self):
        # weighted sums before/after rounding differ by at most
        # (number of factors) * 0.5/scale per unit of probability mass
        spec = NetworkSpec(2, ((0, 1),), (Fraction(1),), 0, 1, hop_limit=1)
        raw_p = Fraction(29, 100)
        scale = 10
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            problem = encode_road_network(
                spec, simple_events(p=raw_p), weight_scale=scale
            )
        got = exact_objectives(problem, (0,))[0]
        exact_prob = 1 - raw_p
        assert abs(Fraction(got, scale) - exact_prob) <= Fraction(1, 2 * scale)

    def test_zero_weight_flagged(self):
        spec = NetworkSpec(2, ((0, 1),), (Fraction(1),), 0, 1, hop_limit=1)
        with pytest.warns(UserWarning, match="discretized to 0"):
            encode_road_network(
                spec, simple_events(p=Fraction(1, 100)), weight_scale=10
            )


class TestGenerators:
    def test_supply_deterministic(self):
        a, _ = generate_random_instance("supply", seed=7, n_nodes=5)
        b, _ = generate_random_instance("supply", seed=7, n_nodes=5)
        assert a == b

    def test_road_deterministic(self):
        a = generate_random_instance("road", seed=7, rows=2, cols=2)
        b = generate_random_instance("road", seed=7, rows=2, cols=2)
        assert a == b

    def test_size_limits(self):
        with pytest.raises(ValueError):
            generate_random_instance("supply", seed=0, n_nodes=40)
        with pytest.raises(ValueError):
            generate_random_instance("road", seed=0, rows=5, cols=5)
        with pytest.raises(ValueError):
            generate_random_instance("unknown", seed=0)

    def test_tsplib_complete_digraph(self, tmp_path):
        text = (
            "NAME: toy\nTYPE: TSP\nDIMENSION: 3\n"
            "NODE_COORD_SECTION\n1 0 0\n2 3 4\n3 0 8\nEOF\n"
        )
        path = tmp_path / "toy.tsp"
        path.write_text(text)
        spec = load_tsplib(path)
        assert spec.n_nodes == 3
        assert len(spec.edges) == 6
        dist = dict(zip(spec.edges, spec.distances))
        assert dist[(0, 1)] == Fraction(5)
        assert dist[(0, 2)] == Fraction(8)
        assert dist[(1, 2)] == dist[(2, 1)] == Fraction(5)


class TestNetworkSchema:
    def test_round_trip_with_events(self, tmp_path):
        from paretocount.scenarios import load_network, save_network

        spec, events = generate_random_instance(
            "road", seed=9, rows=2, cols=2, k_events=3, r_regimes=2, hop_limit=2
        )
        path = tmp_path / "net.json"
        save_network(path, spec, events)
        spec2, events2 = load_network(path)
        assert spec2 == spec and events2 == events

    def test_round_trip_supply(self, tmp_path):
        from paretocount.scenarios import load_network, save_network

        spec, _ = generate_random_instance("supply", seed=4, n_nodes=4)
        path = tmp_path / "net.json"
        save_network(path, spec)
        spec2, events2 = load_network(path)
        assert spec2 == spec and events2 is None
