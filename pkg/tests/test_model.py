import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paretocount.engine import count_models
from paretocount.model import (
    Formula,
    FrontierEntry,
    SmooProblem,
    UnweightedObjective,
    VariableSpace,
    Xor,
    build_space,
    compact_formula,
    dominates,
    lit,
    prune_nondominated,
    replicate_latent,
    restrict_formula,
    strictly_dominates,
    true_formula,
)


class TestBuildSpace:
    def test_layout(self):
        s = build_space(2, [3, 4])
        assert list(s.decision_range()) == [0, 1]
        assert list(s.block_range(0)) == [2, 3, 4]
        assert list(s.block_range(1)) == [5, 6, 7, 8]
        assert s.aux_count == 0

    def test_empty(self):
        s = build_space(0, [])
        assert s.total == 0

    def test_total_non_aux(self):
        assert build_space(4, [2, 3]).total == 9

    def test_partition_lookup(self):
        s = build_space(2, [3, 4])
        assert s.block_of(1) is None
        assert s.block_of(2) == 0
        assert s.block_of(5) == 1
        s2, fresh = s.with_aux(2, "t")
        assert s2.is_aux(fresh[0]) and s2.aux_owner(fresh[0]) == "t"
        assert s2.extends(s)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            build_space(-1, [])
        with pytest.raises(ValueError):
            build_space(0, [-2])


class TestDominance:
    def test_examples(self):
        assert dominates((3, 3), (2, 3))
        assert not dominates((1, 5), (2, 3))
        assert dominates((2, 4), (2, 4))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            dominates((1,), (1, 2))

    @given(st.lists(st.integers(0, 8), min_size=1, max_size=4))
    def test_reflexive(self, p):
        assert dominates(p, p)
        assert not strictly_dominates(p, p)

    @given(
        st.integers(1, 4).flatmap(
            lambda k: st.tuples(
                st.lists(st.integers(0, 6), min_size=k, max_size=k),
                st.lists(st.integers(0, 6), min_size=k, max_size=k),
                st.lists(st.integers(0, 6), min_size=k, max_size=k),
            )
        )
    )
    def test_transitive(self, pqr):
        p, q, r = pqr
        if dominates(p, q) and dominates(q, r):
            assert dominates(p, r)


def brute_prune(entries):
    """O(n^2) oracle: keep first representative per p, drop dominated."""
    seen, unique = set(), []
    for e in entries:
        if tuple(e.p) not in seen:
            seen.add(tuple(e.p))
            unique.append(e)
    return tuple(
        e
        for e in unique
        if not any(
            o.p != e.p and all(a >= b for a, b in zip(o.p, e.p))
            for o in unique
        )
    )


class TestPrune:
    def test_examples(self):
        e = [
            FrontierEntry((0,), (1, 4)),
            FrontierEntry((1,), (2, 2)),
            FrontierEntry((2,), (2, 4)),
        ]
        assert prune_nondominated(e) == (FrontierEntry((2,), (2, 4)),)
        assert prune_nondominated([]) == ()
        keep_both = [FrontierEntry((0,), (1, 4)), FrontierEntry((1,), (4, 1))]
        assert prune_nondominated(keep_both) == tuple(keep_both)

    def test_identical_p_keeps_first(self):
        e = [FrontierEntry((0,), (2, 2)), FrontierEntry((1,), (2, 2))]
        assert prune_nondominated(e) == (e[0],)

    @given(
        st.integers(1, 3).flatmap(
            lambda k: st.lists(
                st.lists(st.integers(0, 5), min_size=k, max_size=k),
                max_size=50,
            )
        )
    )
    @settings(max_examples=200)
    def test_matches_brute_oracle(self, vectors):
        entries = [FrontierEntry((i,), tuple(p)) for i, p in enumerate(vectors)]
        assert prune_nondominated(entries) == brute_prune(entries)

    @given(
        st.lists(
            st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=30
        )
    )
    @settings(max_examples=100)
    def test_idempotent(self, vectors):
        entries = [FrontierEntry((i,), p) for i, p in enumerate(vectors)]
        once = prune_nondominated(entries)
        assert prune_nondominated(once) == once


class TestReplicate:
    def test_renaming_only(self):
        sp = build_space(1, [1])
        f = Formula(sp, clauses=((lit(0), lit(1)),))
        copies, sp2, maps = replicate_latent(f, 0, 3)
        assert len(copies) == 3
        assert sp2.aux_count == 3
        for c, mp in zip(copies, maps):
            assert c.clauses == ((lit(0), lit(mp[1])),)

    def test_single_copy_preserves_count(self):
        sp = build_space(0, [3])
        f = Formula(sp, clauses=((lit(0), lit(1)),))
        copies, sp2, maps = replicate_latent(f, 0, 1)
        orig = count_models(f, sp.block_range(0))
        assert count_models(copies[0], maps[0].values()) == orig

    def test_true_formula_joint_count(self):
        # free 2-var block, 2 copies: 2^4 joint assignments (brute force)
        sp = build_space(0, [2])
        copies, sp2, maps = replicate_latent(true_formula(sp), 0, 2)
        allvars = [v for mp in maps for v in mp.values()]
        assert len(allvars) == 4
        joint = copies[0].conjoin(copies[1])
        assert count_models(joint, allvars) == 16

    def test_foreign_block_rejected(self):
        sp = build_space(0, [2, 2])
        f = Formula(sp, clauses=((lit(0), lit(2)),))
        with pytest.raises(ValueError):
            replicate_latent(f, 0, 2)


class TestProblemDiscipline:
    def test_foreign_latents_rejected(self):
        sp = build_space(1, [2, 2])
        bad = Formula(sp, clauses=((lit(1), lit(3)),))  # block-1 var in obj 0
        with pytest.raises(ValueError):
            UnweightedObjective(0, bad)

    def test_decision_constraints_x_only(self):
        sp = build_space(1, [2])
        obj = UnweightedObjective(0, true_formula(sp))
        bad_cons = Formula(sp, clauses=((lit(1),),))
        with pytest.raises(ValueError):
            SmooProblem(sp, (obj,), bad_cons)

    def test_heterogeneous_objectives_rejected(self):
        from fractions import Fraction

        from paretocount.model import WeightedObjective, WeightFactor

        sp = build_space(0, [1, 1])
        u = UnweightedObjective(0, true_formula(sp))
        w = WeightedObjective(
            1,
            true_formula(sp),
            (WeightFactor((1,), (Fraction(1), Fraction(2))),),
            Fraction(1),
            Fraction(2),
        )
        with pytest.raises(ValueError):
            SmooProblem(sp, (u, w), true_formula(sp))


class TestRestrictCompact:
    def test_restrict_clause_card_xor(self, rnd):
        from paretocount.engine import Assignment, evaluate

        for _ in range(50):
            n = rnd.randint(2, 7)
            from conftest import random_formula

            f = random_formula(rnd, n)
            fixed_vars = rnd.sample(range(n), rnd.randint(0, n))
            fixed = {v: rnd.getrandbits(1) for v in fixed_vars}
            g = restrict_formula(f, fixed)
            for bits in range(1 << n):
                if any((bits >> v) & 1 != val for v, val in fixed.items()):
                    continue
                a = Assignment(bits, n)
                assert evaluate(f, a) == evaluate(g, a), (f, fixed, bits)

    def test_compact_roundtrip_count(self, rnd):
        from conftest import random_formula

        for _ in range(20):
            f = random_formula(rnd)
            n = f.space.total
            comp, order = compact_formula(f, [])
            assert count_models(f, range(n)) == count_models(
                comp, range(len(order))
            ) << (n - len(order))
