"""Problem representation shared by every other module.

Variables are dense non-negative integers partitioned as
``[decision | latent block 0 | ... | latent block k-1 | aux]``.
Literals use the DIMACS convention: literal ``+(v+1)`` asserts variable ``v``
is true, ``-(v+1)`` asserts it is false.  Clauses are tuples of literals,
parity constraints are sets of variables with a target parity, and
cardinality constraints are at-least bounds over literal lists.

Everything in this module is immutable after construction and safe to share
across worker threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

Clause = tuple[int, ...]


def lit(var: int, value: bool = True) -> int:
    """Literal asserting ``var == value`` (DIMACS style, vars 0-based)."""
    return (var + 1) if value else -(var + 1)


def lit_var(literal: int) -> int:
    return abs(literal) - 1


def lit_value(literal: int) -> bool:
    return literal > 0


@dataclass(frozen=True)
class Xor:
    """Parity constraint: XOR of ``vars`` equals ``parity``.

    Over the empty set, parity 1 is unsatisfiable and parity 0 is a
    tautology.
    """

    vars: tuple[int, ...]
    parity: int

    def __post_init__(self) -> None:
        vs = tuple(sorted(set(self.vars)))
        object.__setattr__(self, "vars", vs)
        if self.parity not in (0, 1):
            raise ValueError(f"parity must be 0 or 1, got {self.parity}")


@dataclass(frozen=True)
class Card:
    """At-least constraint: at least ``bound`` of ``lits`` are true."""

    lits: tuple[int, ...]
    bound: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "lits", tuple(self.lits))
        if not 0 <= self.bound <= len(self.lits):
            raise ValueError(
                f"bound {self.bound} outside [0, {len(self.lits)}]"
            )


@dataclass(frozen=True)
class AuxSegment:
    start: int
    count: int
    owner: str


@dataclass(frozen=True)
class VariableSpace:
    """Dense id layout: decisions, then latent blocks, then aux segments."""

    decision_count: int
    latent_blocks: tuple[int, ...] = ()
    aux_segments: tuple[AuxSegment, ...] = ()

    def __post_init__(self) -> None:
        if self.decision_count < 0:
            raise ValueError("decision_count must be >= 0")
        blocks = tuple(int(b) for b in self.latent_blocks)
        if any(b < 0 for b in blocks):
            raise ValueError("latent block sizes must be >= 0")
        object.__setattr__(self, "latent_blocks", blocks)
        object.__setattr__(self, "aux_segments", tuple(self.aux_segments))

    @property
    def k(self) -> int:
        return len(self.latent_blocks)

    @property
    def aux_count(self) -> int:
        return sum(seg.count for seg in self.aux_segments)

    @property
    def aux_start(self) -> int:
        return self.decision_count + sum(self.latent_blocks)

    @property
    def total(self) -> int:
        return self.aux_start + self.aux_count

    def decision_range(self) -> range:
        return range(self.decision_count)

    def block_start(self, i: int) -> int:
        return self.decision_count + sum(self.latent_blocks[:i])

    def block_range(self, i: int) -> range:
        start = self.block_start(i)
        return range(start, start + self.latent_blocks[i])

    def block_of(self, var: int) -> int | None:
        """Index of the latent block containing ``var``, else None."""
        off = var - self.decision_count
        if off < 0:
            return None
        for i, size in enumerate(self.latent_blocks):
            if off < size:
                return i
            off -= size
        return None

    def is_aux(self, var: int) -> bool:
        return var >= self.aux_start

    def aux_owner(self, var: int) -> str | None:
        for seg in self.aux_segments:
            if seg.start <= var < seg.start + seg.count:
                return seg.owner
        return None

    def with_aux(self, count: int, owner: str) -> tuple["VariableSpace", range]:
        """Extended space with ``count`` fresh aux ids (append-only)."""
        if count < 0:
            raise ValueError("aux count must be >= 0")
        start = self.total
        seg = AuxSegment(start, count, owner)
        space = VariableSpace(
            self.decision_count, self.latent_blocks, self.aux_segments + (seg,)
        )
        return space, range(start, start + count)

    def extends(self, other: "VariableSpace") -> bool:
        """True if this space equals ``other`` plus extra aux segments."""
        return (
            self.decision_count == other.decision_count
            and self.latent_blocks == other.latent_blocks
            and self.aux_segments[: len(other.aux_segments)] == other.aux_segments
        )


def build_space(n: int, latent_sizes: Sequence[int]) -> VariableSpace:
    """Partitioned id space for ``n`` decisions and the given latent blocks."""
    return VariableSpace(n, tuple(latent_sizes))


@dataclass(frozen=True)
class Formula:
    """Conjunction of clauses, parity constraints, and at-least constraints.

    The empty clause is permitted and denotes a contradiction.
    """

    space: VariableSpace
    clauses: tuple[Clause, ...] = ()
    xors: tuple[Xor, ...] = ()
    cards: tuple[Card, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "clauses", tuple(tuple(c) for c in self.clauses)
        )
        object.__setattr__(self, "xors", tuple(self.xors))
        object.__setattr__(self, "cards", tuple(self.cards))
        total = self.space.total
        for c in self.clauses:
            for l in c:
                if l == 0 or not (0 <= lit_var(l) < total):
                    raise ValueError(f"literal {l} outside space of {total} vars")
        for x in self.xors:
            for v in x.vars:
                if not 0 <= v < total:
                    raise ValueError(f"xor var {v} outside space")
        for cc in self.cards:
            for l in cc.lits:
                if l == 0 or not (0 <= lit_var(l) < total):
                    raise ValueError(f"card literal {l} outside space")

    def vars_mentioned(self) -> set[int]:
        out: set[int] = set()
        for c in self.clauses:
            out.update(lit_var(l) for l in c)
        for x in self.xors:
            out.update(x.vars)
        for cc in self.cards:
            out.update(lit_var(l) for l in cc.lits)
        return out

    @property
    def is_trivial(self) -> bool:
        return not (self.clauses or self.xors or self.cards)

    def conjoin(self, other: "Formula") -> "Formula":
        space = self.space if self.space.total >= other.space.total else other.space
        if not (space.extends(self.space) and space.extends(other.space)):
            raise ValueError("formulas live in incompatible spaces")
        return Formula(
            space,
            self.clauses + other.clauses,
            self.xors + other.xors,
            self.cards + other.cards,
        )

    def with_units(self, literals: Iterable[int]) -> "Formula":
        """Conjoin unit clauses (used to freeze decision variables)."""
        units = tuple((l,) for l in literals)
        return Formula(self.space, self.clauses + units, self.xors, self.cards)

    def in_space(self, space: VariableSpace) -> "Formula":
        """Same constraints viewed in an extended space."""
        if not space.extends(self.space):
            raise ValueError("target space does not extend the formula's space")
        return Formula(space, self.clauses, self.xors, self.cards)


def true_formula(space: VariableSpace) -> Formula:
    return Formula(space)


def remap_formula(formula: Formula, mapping: dict[int, int], space: VariableSpace) -> Formula:
    """Rename variables through ``mapping`` (identity where absent)."""

    def mv(v: int) -> int:
        return mapping.get(v, v)

    def ml(l: int) -> int:
        v = mv(lit_var(l))
        return lit(v, lit_value(l))

    return Formula(
        space,
        tuple(tuple(ml(l) for l in c) for c in formula.clauses),
        tuple(Xor(tuple(mv(v) for v in x.vars), x.parity) for x in formula.xors),
        tuple(Card(tuple(ml(l) for l in cc.lits), cc.bound) for cc in formula.cards),
    )


def restrict_formula(formula: Formula, fixed: dict[int, int]) -> Formula:
    """Substitute fixed variable values and simplify.

    Satisfied clauses vanish, falsified literals drop out (an emptied clause
    stays as the contradiction marker), parity constraints fold fixed bits
    into their parity, and at-least bounds absorb satisfied literals.
    """
    clauses: list[Clause] = []
    for c in formula.clauses:
        lits: list[int] = []
        sat = False
        for l in c:
            v = lit_var(l)
            if v in fixed:
                if fixed[v] == int(lit_value(l)):
                    sat = True
                    break
            else:
                lits.append(l)
        if not sat:
            clauses.append(tuple(lits))
    xors: list[Xor] = []
    for x in formula.xors:
        parity = x.parity
        vs = []
        for v in x.vars:
            if v in fixed:
                parity ^= fixed[v]
            else:
                vs.append(v)
        xors.append(Xor(tuple(vs), parity))
    cards: list[Card] = []
    for cc in formula.cards:
        bound = cc.bound
        lits = []
        for l in cc.lits:
            v = lit_var(l)
            if v in fixed:
                if fixed[v] == int(lit_value(l)):
                    bound -= 1
            else:
                lits.append(l)
        if bound <= 0:
            continue
        if bound > len(lits):
            clauses.append(())
            continue
        cards.append(Card(tuple(lits), bound))
    return Formula(formula.space, tuple(clauses), tuple(xors), tuple(cards))


def compact_formula(
    formula: Formula, keep: Sequence[int]
) -> tuple[Formula, list[int]]:
    """Renumber onto a dense space over ``keep`` plus mentioned variables.

    Returns the compacted formula and the ordered list of original ids
    (``keep`` first, in the given order) so bit ``j`` of an assignment over
    the compact space corresponds to original variable ``order[j]``.
    """
    order = list(dict.fromkeys(keep))
    extra = sorted(formula.vars_mentioned() - set(order))
    order += extra
    mapping = {v: j for j, v in enumerate(order)}
    space = VariableSpace(len(order))
    return remap_formula(formula, mapping, space), order


def _check_block_discipline(formula: Formula, block: int, what: str) -> None:
    space = formula.space
    for v in formula.vars_mentioned():
        b = space.block_of(v)
        if b is not None and b != block:
            raise ValueError(
                f"{what} mentions variable {v} of foreign latent block {b}"
            )


def replicate_latent(
    formula: Formula, block: int, copies: int
) -> tuple[list[Formula], VariableSpace, list[dict[int, int]]]:
    """Fresh structurally-identical copies with renamed latent variables.

    Block-``block`` latents (and any aux the formula mentions) are renamed
    into fresh disjoint aux ranges; decision variables stay shared.  Returns
    the copies, the extended space, and the per-copy variable maps.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    _check_block_discipline(formula, block, "replicated formula")
    space = formula.space
    # The whole block is copied (the count ranges over it, mentioned or
    # not), plus whatever aux the formula mentions.
    to_copy = list(space.block_range(block))
    to_copy += sorted(
        v for v in formula.vars_mentioned() if space.is_aux(v)
    )
    out: list[Formula] = []
    maps: list[dict[int, int]] = []
    current = space
    for c in range(copies):
        current, fresh = current.with_aux(
            len(to_copy), f"replica{c}:block{block}"
        )
        mapping = dict(zip(to_copy, fresh))
        maps.append(mapping)
        out.append(remap_formula(formula, mapping, current))
    out = [f.in_space(current) for f in out]
    return out, current, maps


@dataclass(frozen=True)
class UnweightedObjective:
    """0/1 objective: the count of latent-block models of ``formula``."""

    index: int
    formula: Formula
    # Optional factorization of `formula` into conjuncts over disjoint
    # latent sub-ranges (set by the pseudo-problem builder); the model set
    # of `formula` over the block is the product of the parts' model sets.
    parts: tuple[Formula, ...] | None = None

    def __post_init__(self) -> None:
        _check_block_discipline(self.formula, self.index, f"objective {self.index}")
        if self.parts is not None:
            object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class WeightFactor:
    """Nonnegative table over assignments of ``scope`` (scope[0] = LSB)."""

    scope: tuple[int, ...]
    table: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "scope", tuple(self.scope))
        tbl = tuple(Fraction(v) for v in self.table)
        object.__setattr__(self, "table", tbl)
        if len(tbl) != 1 << len(self.scope):
            raise ValueError("table length must be 2^len(scope)")
        if any(v < 0 for v in tbl):
            raise ValueError("weights must be nonnegative")

    def value(self, bits_of: dict[int, int]) -> Fraction:
        idx = 0
        for pos, v in enumerate(self.scope):
            idx |= bits_of[v] << pos
        return self.table[idx]


DEFAULT_SCOPE_LIMIT = 16


@dataclass(frozen=True)
class WeightedObjective:
    """Factored nonnegative weights with support restricted by a formula.

    The weight of an assignment is the product of its factor table entries,
    multiplied by the 0/1 value of ``hard_formula``; ``lower``/``upper``
    bound the weight on the support.
    """

    index: int
    hard_formula: Formula
    factors: tuple[WeightFactor, ...]
    lower: Fraction
    upper: Fraction
    scope_limit: int = DEFAULT_SCOPE_LIMIT

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "lower", Fraction(self.lower))
        object.__setattr__(self, "upper", Fraction(self.upper))
        _check_block_discipline(
            self.hard_formula, self.index, f"objective {self.index}"
        )
        space = self.hard_formula.space
        block = set(space.block_range(self.index))
        joint: set[int] = set()
        for f in self.factors:
            if not set(f.scope) <= block:
                raise ValueError(
                    f"factor scope {f.scope} outside latent block {self.index}"
                )
            joint.update(f.scope)
        if len(joint) > self.scope_limit:
            raise ValueError(
                f"joint factor scope has {len(joint)} variables, over the "
                f"table-mode limit of {self.scope_limit}"
            )
        if not self.upper > self.lower:
            raise ValueError("weight bounds require upper > lower")
        if self.lower < 0:
            raise ValueError("lower bound must be >= 0")

    @property
    def joint_scope(self) -> tuple[int, ...]:
        out: set[int] = set()
        for f in self.factors:
            out.update(f.scope)
        return tuple(sorted(out))

    def weight(self, bits_of: dict[int, int]) -> Fraction:
        w = Fraction(1)
        for f in self.factors:
            w *= f.value(bits_of)
        return w


Objective = Union[UnweightedObjective, WeightedObjective]


@dataclass(frozen=True)
class SmooProblem:
    """k counting objectives over shared decisions plus hard x-constraints."""

    space: VariableSpace
    objectives: tuple[Objective, ...]
    decision_constraints: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "objectives", tuple(self.objectives))
        if len(self.objectives) < 1:
            raise ValueError("need at least one objective")
        kinds = {type(o) for o in self.objectives}
        if len(kinds) != 1:
            raise ValueError("objective kinds must be homogeneous")
        for i, o in enumerate(self.objectives):
            if o.index != i:
                raise ValueError("objective indices must be 0..k-1 in order")
        n = self.space.decision_count
        for v in self.decision_constraints.vars_mentioned():
            if v >= n:
                raise ValueError(
                    "decision constraints may mention decision variables only"
                )

    @property
    def k(self) -> int:
        return len(self.objectives)

    @property
    def is_weighted(self) -> bool:
        return isinstance(self.objectives[0], WeightedObjective)

    def objective_formula(self, i: int) -> Formula:
        o = self.objectives[i]
        return o.formula if isinstance(o, UnweightedObjective) else o.hard_formula


class GridPoint(NamedTuple):
    exponents: tuple[int, ...]

    @property
    def thresholds(self) -> tuple[int, ...]:
        return tuple(1 << l for l in self.exponents)


class FrontierEntry(NamedTuple):
    x: tuple[int, ...]
    p: tuple

    def dominates(self, other: "FrontierEntry") -> bool:
        return dominates(self.p, other.p)


Frontier = tuple[FrontierEntry, ...]


def dominates(p: Sequence, q: Sequence) -> bool:
    """Element-wise ``p >= q`` (equality-inclusive, the pruning rule)."""
    if len(p) != len(q):
        raise ValueError("vectors must have equal length")
    return all(a >= b for a, b in zip(p, q))


def strictly_dominates(p: Sequence, q: Sequence) -> bool:
    """Pareto dominance: ``>=`` everywhere and ``>`` somewhere."""
    return dominates(p, q) and any(a > b for a, b in zip(p, q))


def prune_nondominated(entries: Sequence[FrontierEntry]) -> Frontier:
    """Non-dominated subset, one representative per identical p vector.

    An entry survives iff no entry with a distinct p vector dominates it;
    among entries sharing a p vector the first in input order is kept.
    """
    seen: set[tuple] = set()
    unique: list[FrontierEntry] = []
    for e in entries:
        key = tuple(e.p)
        if key not in seen:
            seen.add(key)
            unique.append(e)
    out = []
    for e in unique:
        if not any(
            other.p != e.p and dominates(other.p, e.p) for other in unique
        ):
            out.append(e)
    return tuple(out)


def pareto_front(entries: Sequence[FrontierEntry]) -> Frontier:
    """Strict-dominance non-dominated set (ties all kept, duplicates collapsed)."""
    seen: set[tuple[tuple, tuple]] = set()
    unique: list[FrontierEntry] = []
    for e in entries:
        key = (tuple(e.x), tuple(e.p))
        if key not in seen:
            seen.add(key)
            unique.append(e)
    return tuple(
        e
        for e in unique
        if not any(strictly_dominates(o.p, e.p) for o in unique)
    )
