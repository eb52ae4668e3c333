import random

import pytest

from conftest import random_formula
from paretocount.encodings import (
    encode_cardinality,
    encode_xor_to_cnf,
    gauss_eliminate,
    less_than_const,
    lower_cards,
    lower_xors,
)
from paretocount.engine import count_models
from paretocount.model import Card, Formula, Xor, build_space, lit


class TestXorToCnf:
    def test_empty_even_is_tautology(self):
        sp = build_space(0, [2])
        clauses, sp2 = encode_xor_to_cnf(Xor((), 0), sp)
        assert clauses == []

    def test_single_var_unit(self):
        sp = build_space(0, [2])
        clauses, _ = encode_xor_to_cnf(Xor((0,), 1), sp)
        assert clauses == [(lit(0),)]

    def test_five_vars_projected_count(self):
        # even-parity 5-cube has 16 assignments (brute force over 32)
        sp = build_space(0, [5])
        clauses, sp2 = encode_xor_to_cnf(Xor((0, 1, 2, 3, 4), 0), sp)
        f = Formula(sp2, tuple(clauses))
        assert count_models(f, range(5)) == 16

    @pytest.mark.parametrize("width", range(0, 9))
    @pytest.mark.parametrize("parity", [0, 1])
    def test_count_preserved_all_widths(self, width, parity):
        sp = build_space(0, [max(width, 1)])
        x = Xor(tuple(range(width)), parity)
        native = Formula(sp, xors=(x,))
        clauses, sp2 = encode_xor_to_cnf(x, sp)
        lowered = Formula(sp2, tuple(clauses))
        n = max(width, 1)
        assert count_models(native, range(n)) == count_models(lowered, range(n))

    def test_width_at_most_three_pieces(self):
        sp = build_space(0, [8])
        clauses, sp2 = encode_xor_to_cnf(Xor(tuple(range(8)), 1), sp)
        assert all(len(c) <= 3 for c in clauses)
        # each width-3 piece expands to 4 blocking clauses
        assert len(clauses) == 4 * (8 - 2)


class TestCardinality:
    def test_vacuous(self):
        sp = build_space(0, [3])
        clauses, _ = encode_cardinality(Card((lit(0), lit(1)), 0), sp)
        assert clauses == []

    def test_impossible_bound_is_contradiction(self):
        sp = build_space(0, [3])
        card = Card((lit(0), lit(1)), 2)
        # bound len+1 cannot be represented by Card itself; the encoder's
        # contradiction path is exercised through restriction instead
        clauses, _ = encode_cardinality(Card((lit(0),), 1), sp)
        assert clauses  # non-trivial

    def test_two_of_three_count(self):
        sp = build_space(0, [3])
        clauses, sp2 = encode_cardinality(
            Card((lit(0), lit(1), lit(2)), 2), sp
        )
        f = Formula(sp2, tuple(clauses))
        assert count_models(f, range(3)) == 4  # brute force over 8

    @pytest.mark.parametrize("n", range(1, 7))
    def test_exhaustive_counts(self, n):
        import math

        sp = build_space(0, [n])
        lits = tuple(lit(v, v % 2 == 0) for v in range(n))
        for bound in range(0, n + 1):
            clauses, sp2 = encode_cardinality(Card(lits, bound), sp)
            f = Formula(sp2, tuple(clauses))
            want = sum(math.comb(n, j) for j in range(bound, n + 1))
            assert count_models(f, range(n)) == want, (n, bound)


class TestLessThanConst:
    @pytest.mark.parametrize("b", range(0, 7))
    def test_exact_counts(self, b):
        for bound in range(0, (1 << b) + 1):
            sp = build_space(0, [max(b, 1)])
            clauses = less_than_const(tuple(lit(v) for v in range(b)), bound)
            f = Formula(sp, tuple(clauses))
            got = count_models(f, range(b))
            assert got == bound, (b, bound, got)


class TestGauss:
    def test_direct_inconsistency(self):
        ok, _ = gauss_eliminate((Xor((0, 1), 0), Xor((0, 1), 1)))
        assert not ok

    def test_derived_inconsistency(self):
        ok, _ = gauss_eliminate(
            (Xor((0, 1), 0), Xor((1, 2), 0), Xor((0, 2), 1))
        )
        assert not ok

    def test_consistent_reduction_preserves_solutions(self, rnd):
        for _ in range(60):
            n = rnd.randint(1, 7)
            xors = tuple(
                Xor(
                    tuple(rnd.sample(range(n), rnd.randint(0, n))),
                    rnd.getrandbits(1),
                )
                for _ in range(rnd.randint(1, 4))
            )
            ok, reduced = gauss_eliminate(xors)
            sp = build_space(0, [n])
            orig = count_models(Formula(sp, xors=xors), range(n))
            if not ok:
                assert orig == 0
            else:
                red = count_models(Formula(sp, xors=tuple(reduced)), range(n))
                assert red == orig


class TestLowering:
    def test_count_preservation_random(self, rnd):
        for _ in range(60):
            f = random_formula(rnd)
            n = f.space.total
            lowered = lower_xors(lower_cards(f))
            assert count_models(f, range(n)) == count_models(lowered, range(n))
