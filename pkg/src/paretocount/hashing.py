"""Random parity constraints and majority-amplified counting queries.

A sampled constraint includes each target variable independently with
probability 1/2 and carries a uniform constant parity bit (the standard
pairwise-independent hash family; without the constant the all-zero
assignment would survive every draw and the UNSAT-side guarantee degrades).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .encodings import (
    cardinality_indicator,
    clause_indicator,
    xor_indicator,
)
from .engine import SolverBackend, solve
from .model import (
    Card,
    Formula,
    VariableSpace,
    Xor,
    lit,
    replicate_latent,
)


def split_seed(master: int, index: int) -> int:
    """Deterministic child seed: sha256 of ``master:index``, 63 bits."""
    digest = hashlib.sha256(f"{master}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class XorSampler:
    """Seeded stream of random parity constraints over a fixed variable set."""

    def __init__(self, target_vars: Sequence[int], rng: np.random.Generator):
        self.vars = tuple(target_vars)
        self.rng = rng

    def sample_batch(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """``count`` (mask, parity) draws; mask bit j = self.vars[j]."""
        w = len(self.vars)
        if w > 64:
            raise ValueError("mask sampling limited to 64 target variables")
        raw = self.rng.bytes(8 * count) if count else b""
        masks = np.frombuffer(raw, dtype=np.uint64).copy()
        if w < 64:
            masks &= np.uint64((1 << w) - 1)
        parities = (self.rng.random(count) < 0.5).astype(np.uint8)
        return masks, parities

    def sample(self) -> Xor:
        masks, parities = self.sample_batch(1)
        return mask_to_xor(self.vars, int(masks[0]), int(parities[0]))


def mask_to_xor(target_vars: Sequence[int], mask: int, parity: int) -> Xor:
    vs = tuple(target_vars[j] for j in range(len(target_vars)) if (mask >> j) & 1)
    return Xor(vs, parity)


def sample_xor(target_vars: Sequence[int], rng: np.random.Generator) -> Xor:
    """One random parity constraint over ``target_vars``."""
    return XorSampler(target_vars, rng).sample()


def xor_counting(
    f: Formula,
    block: int,
    l: int,
    x0: Sequence[int],
    rng: np.random.Generator,
    backend: SolverBackend | None = None,
    seed: int = 0,
    step_limit: int | None = None,
) -> bool:
    """Single-shot threshold probe: is ``f(x0, .)`` with ``l`` fresh random
    parity constraints over the latent block satisfiable?"""
    if l < 0:
        raise ValueError("l must be >= 0")
    n = f.space.decision_count
    if len(x0) != n:
        raise ValueError(f"x0 must fix all {n} decision variables")
    sampler = XorSampler(tuple(f.space.block_range(block)), rng)
    xors = tuple(sampler.sample() for _ in range(l))
    units = [lit(v, bool(x0[v])) for v in range(n)]
    psi = Formula(
        f.space, f.clauses, f.xors + xors, f.cards
    ).with_units(units)
    return solve(psi, backend=backend, seed=seed, step_limit=step_limit).is_sat


def single_shot_success(l_star: int) -> Fraction:
    """Lower bound on one probe's success probability at gap ``l_star``."""
    if l_star < 2:
        raise ValueError("l_star must be >= 2 (success bound must exceed 1/2)")
    pow_ = 1 << l_star
    return 1 - Fraction(pow_, (pow_ - 1) ** 2)


def amplification_size(l_star: int, tau: float) -> int:
    """Number of majority voters: ceil(2p / (p - 1/2)^2 * tau)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    p = single_shot_success(l_star)
    ratio = 2 * p / (p - Fraction(1, 2)) ** 2
    return math.ceil(ratio * Fraction(tau))


@dataclass(frozen=True)
class AssembledQuery:
    """Materialized majority formula plus its bookkeeping."""

    formula: Formula
    indicator_lits: tuple[int, ...]
    copy_maps: tuple[dict[int, int], ...]
    copy_xors: tuple[tuple[Xor, ...], ...]


@dataclass
class AmplifiedQuery:
    """Majority-of-m query: copies of ``base`` with fresh parity constraints.

    ``masks``/``parities`` hold the draws relative to the block's variable
    ordering (row per copy).  The full conjunction is assembled lazily by
    :meth:`assemble`; satisfiability equals "more than m/2 copies are
    simultaneously satisfiable over their disjoint latent replicas".
    """

    base: Formula
    block: int
    l: int
    l_star: int
    tau: float
    m: int
    masks: np.ndarray  # uint64, shape (m, l)
    parities: np.ndarray  # uint8, shape (m, l)

    @property
    def majority_bound(self) -> int:
        return self.m // 2 + 1

    def block_vars(self) -> tuple[int, ...]:
        return tuple(self.base.space.block_range(self.block))

    def copy_xors_template(self) -> list[tuple[Xor, ...]]:
        """Per-copy constraints expressed over the template block vars."""
        bvars = self.block_vars()
        return [
            tuple(
                mask_to_xor(bvars, int(self.masks[j, q]), int(self.parities[j, q]))
                for q in range(self.l)
            )
            for j in range(self.m)
        ]

    def assemble(self, space: VariableSpace | None = None) -> AssembledQuery:
        """Build the single formula: per-copy indicators biconditionally tied
        to the copies, and a strict-majority bound over the indicators."""
        base = self.base if space is None else self.base.in_space(space)
        copies, cur, maps = replicate_latent(base, self.block, self.m)
        templates = self.copy_xors_template()
        clauses: list = []
        xors: list[Xor] = []
        indicator_lits: list[int] = []
        copy_xors: list[tuple[Xor, ...]] = []
        for j, copy in enumerate(copies):
            mapping = maps[j]
            sampled = tuple(
                Xor(tuple(mapping[v] for v in x.vars), x.parity)
                for x in templates[j]
            )
            copy_xors.append(sampled)
            components: list[int] = []
            for c in copy.clauses:
                extra, cur, g = clause_indicator(c, cur, f"copy{j}-clause")
                clauses += extra
                components.append(g)
            for x in copy.xors + sampled:
                extra_x, cur, g = xor_indicator(x, cur, f"copy{j}-xor")
                xors += extra_x
                components.append(g)
            for cc in copy.cards:
                extra, cur, g = cardinality_indicator(cc, cur, f"copy{j}-card")
                clauses += extra
                components.append(g)
            cur, fresh = cur.with_aux(1, f"copy{j}-vote")
            b = lit(fresh[0])
            indicator_lits.append(b)
            for g in components:
                clauses.append((-b, g))
            clauses.append((b,) + tuple(-g for g in components))
        card = Card(tuple(indicator_lits), self.majority_bound)
        formula = Formula(cur, tuple(clauses), tuple(xors), (card,))
        return AssembledQuery(
            formula, tuple(indicator_lits), tuple(maps), tuple(copy_xors)
        )


def build_amplified(
    f: Formula,
    block: int,
    l: int,
    l_star: int,
    tau: float,
    rng: np.random.Generator,
    m_override: int | None = None,
) -> AmplifiedQuery:
    """Draw all parity constraints for a majority-of-m counting query.

    ``m_override`` is a diagnostics hook for small-scale majority tests; the
    production entry points never set it.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    m = amplification_size(l_star, tau) if m_override is None else m_override
    sampler = XorSampler(tuple(f.space.block_range(block)), rng)
    masks, parities = sampler.sample_batch(m * l)
    return AmplifiedQuery(
        base=f,
        block=block,
        l=l,
        l_star=l_star,
        tau=tau,
        m=m,
        masks=masks.reshape(m, l),
        parities=parities.reshape(m, l),
    )
