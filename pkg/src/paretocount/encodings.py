"""CNF lowerings: parity chains, sequential counters, comparators, Gauss.

All encodings here are count-preserving under projection onto the original
variables: every auxiliary variable they introduce is a Boolean function of
the originals.
"""

from __future__ import annotations

import itertools

from .model import (
    Card,
    Clause,
    Formula,
    VariableSpace,
    Xor,
    lit,
    lit_value,
    lit_var,
)


def _direct_xor_clauses(literals: tuple[int, ...], parity: int) -> list[Clause]:
    """All clauses blocking wrong-parity assignments of <= 3 variables."""
    k = len(literals)
    if k == 0:
        return [] if parity == 0 else [()]
    out: list[Clause] = []
    for bits in itertools.product((0, 1), repeat=k):
        if sum(bits) % 2 != parity:
            # Block this assignment of the underlying variables.
            out.append(
                tuple(
                    -l if b else l
                    for l, b in zip(literals, bits)
                )
            )
    return out


def encode_xor_to_cnf(
    xor: Xor, space: VariableSpace
) -> tuple[list[Clause], VariableSpace]:
    """Chain decomposition of a parity constraint into width-<=3 pieces.

    Pieces wider than one variable expand to 4 (or 2) blocking clauses; chain
    variables are functionally determined, so projected model counts are
    preserved.
    """
    vars_ = list(xor.vars)
    if len(vars_) <= 3:
        return _direct_xor_clauses(tuple(lit(v) for v in vars_), xor.parity), space
    n_chain = len(vars_) - 3
    space, fresh = space.with_aux(n_chain, "xor-chain")
    chain = list(fresh)
    clauses: list[Clause] = []
    # chain[0] = v0 xor v1 ; chain[j] = chain[j-1] xor v_{j+1}
    clauses += _direct_xor_clauses(
        (lit(vars_[0]), lit(vars_[1]), lit(chain[0])), 0
    )
    for j in range(1, n_chain):
        clauses += _direct_xor_clauses(
            (lit(chain[j - 1]), lit(vars_[j + 1]), lit(chain[j])), 0
        )
    clauses += _direct_xor_clauses(
        (lit(chain[-1]), lit(vars_[-2]), lit(vars_[-1])), xor.parity
    )
    return clauses, space


def sequential_counter(
    lits: tuple[int, ...],
    upto: int,
    space: VariableSpace,
    owner: str = "card",
) -> tuple[list[Clause], VariableSpace, list[list[int]]]:
    """Biconditional unary counter over ``lits``.

    Returns registers ``R[i][j]`` (literals) with ``R[i][j] <-> at least j+1
    of the first i+1 literals are true``, defined for ``j < min(i+1, upto)``.
    Both implication directions are encoded, so the registers are functions
    of the inputs.
    """
    n = len(lits)
    upto = min(upto, n)
    regs: list[list[int]] = []
    count = sum(min(i + 1, upto) for i in range(n))
    space, fresh = space.with_aux(count, owner)
    it = iter(fresh)
    for i in range(n):
        regs.append([lit(next(it)) for _ in range(min(i + 1, upto))])
    clauses: list[Clause] = []
    for i in range(n):
        x = lits[i]
        width = len(regs[i])
        for j in range(width):
            r = regs[i][j]
            if i == 0:
                # R[0][0] <-> x
                clauses += [(-x, r), (-r, x)]
                continue
            prev_same = regs[i - 1][j] if j < len(regs[i - 1]) else None
            prev_less = regs[i - 1][j - 1] if j >= 1 else None
            # R[i][j] <-> R[i-1][j] or (x and R[i-1][j-1]); j = 0 uses
            # "at least 0 of the first i" == true for the second operand.
            if j == 0:
                # R[i][0] <-> R[i-1][0] or x
                clauses += [(-prev_same, r), (-x, r), (-r, prev_same, x)]
            elif prev_same is None:
                # count >= j+1 needs all of the first i+1 minus slack: here
                # j == i, so R[i][i] <-> x and R[i-1][i-1]
                clauses += [(-x, -prev_less, r), (-r, x), (-r, prev_less)]
            else:
                clauses += [
                    (-prev_same, r),
                    (-x, -prev_less, r),
                    (-r, prev_same, x),
                    (-r, prev_same, prev_less),
                ]
    return clauses, space, regs


def encode_cardinality(
    card: Card, space: VariableSpace
) -> tuple[list[Clause], VariableSpace]:
    """Sequential-counter lowering of an at-least constraint."""
    n = len(card.lits)
    if card.bound == 0:
        return [], space
    if card.bound > n:
        return [()], space
    clauses, space, regs = sequential_counter(card.lits, card.bound, space)
    clauses.append((regs[n - 1][card.bound - 1],))
    return clauses, space


def cardinality_indicator(
    card: Card, space: VariableSpace, owner: str = "card-ind"
) -> tuple[list[Clause], VariableSpace, int]:
    """Clauses plus a literal that is true iff the at-least bound holds."""
    n = len(card.lits)
    if card.bound == 0 or card.bound > n:
        space, fresh = space.with_aux(1, owner)
        g = lit(fresh[0])
        return [(g,) if card.bound == 0 else (-g,)], space, g
    clauses, space, regs = sequential_counter(
        card.lits, card.bound, space, owner
    )
    return clauses, space, regs[n - 1][card.bound - 1]


def clause_indicator(
    clause: Clause, space: VariableSpace, owner: str = "clause-ind"
) -> tuple[list[Clause], VariableSpace, int]:
    """Clauses plus a literal equivalent to the disjunction ``clause``."""
    space, fresh = space.with_aux(1, owner)
    g = lit(fresh[0])
    out: list[Clause] = [(-g,) + tuple(clause)]
    out += [(-l, g) for l in clause]
    return out, space, g


def xor_indicator(
    xor: Xor, space: VariableSpace, owner: str = "xor-ind"
) -> tuple[list[Xor], VariableSpace, int]:
    """A fresh literal g with ``g <-> (parity of vars == parity)``.

    Encoded as one wider parity constraint: ``xor(vars + {g}) = parity ^ 1``.
    """
    space, fresh = space.with_aux(1, owner)
    g = fresh[0]
    return [Xor(xor.vars + (g,), xor.parity ^ 1)], space, lit(g)


def less_than_const(zlits: tuple[int, ...], bound: int) -> list[Clause]:
    """Clauses over counter bits (LSB first) asserting binary value < bound."""
    b = len(zlits)
    if bound <= 0:
        return [()]
    if bound >= 1 << b:
        return []
    c = bound - 1  # encode value <= c
    out: list[Clause] = []
    for t in range(b):
        if (c >> t) & 1 == 0:
            clause = tuple(
                -zlits[s] for s in range(t + 1, b) if (c >> s) & 1
            ) + (-zlits[t],)
            out.append(clause)
    return out


def gauss_eliminate(
    xors: tuple[Xor, ...]
) -> tuple[bool, list[Xor]]:
    """Row-reduce the parity system; returns (consistent, reduced rows).

    Inconsistency (an empty row with parity 1) is reported without touching
    any clause reasoning.  Rows are reduced to echelon form over GF(2); the
    reduced system has exactly the same solution set.
    """
    rows: list[tuple[int, int]] = []  # (mask, parity)
    for x in xors:
        mask = 0
        for v in x.vars:
            mask |= 1 << v
        rows.append((mask, x.parity))
    pivots: dict[int, tuple[int, int]] = {}
    for mask, par in rows:
        while mask:
            pv = mask.bit_length() - 1
            if pv in pivots:
                pmask, ppar = pivots[pv]
                mask ^= pmask
                par ^= ppar
            else:
                pivots[pv] = (mask, par)
                break
        else:
            if par == 1:
                return False, []
    reduced = []
    for pv in sorted(pivots):
        mask, par = pivots[pv]
        vs = tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)
        reduced.append(Xor(vs, par))
    return True, reduced


def lower_cards(formula: Formula) -> Formula:
    """Formula with every cardinality constraint lowered to CNF."""
    if not formula.cards:
        return formula
    space = formula.space
    clauses = list(formula.clauses)
    for card in formula.cards:
        extra, space = encode_cardinality(card, space)
        clauses += extra
    return Formula(space, tuple(clauses), formula.xors, ())


def lower_xors(formula: Formula) -> Formula:
    """Formula with every parity constraint lowered to CNF."""
    if not formula.xors:
        return formula
    space = formula.space
    clauses = list(formula.clauses)
    for x in formula.xors:
        extra, space = encode_xor_to_cnf(x, space)
        clauses += extra
    return Formula(space, tuple(clauses), (), formula.cards)
