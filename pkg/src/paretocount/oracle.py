"""Probabilistic threshold oracle over shared decision variables.

One oracle call asks: does some feasible ``x`` push every objective's
latent-model count past its threshold ``2^{l_i}``?  It builds one
majority-amplified query per objective (fresh parity constraints
throughout, never reused across copies or objectives) and decides the
single conjunction over the shared ``x``.

Two complete decision strategies are provided and proven equivalent in the
test suite:

* ``monolithic``: materialize the full conjunction (indicators + majority
  bounds) and hand it to the SAT engine in one call;
* ``split``: enumerate feasible ``x`` in ascending order; for fixed ``x``
  the copies decompose over disjoint latent replicas, so each objective's
  majority bound holds iff more than m/2 of its copies are individually
  satisfiable.  This is the same satisfiability question evaluated per
  component, and it is the only tractable route once m reaches the
  thousands that realistic confidence parameters demand.

Timeouts surface as a distinct ``indeterminate`` status, never as UNSAT.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .engine import (
    ENUM_VAR_LIMIT,
    SolveTimeout,
    SolverBackend,
    collect_models,
    get_backend,
    pack_formula,
    _kernel_args,
)
from .hashing import AmplifiedQuery, amplification_size, build_amplified, make_rng, split_seed
from .model import (
    Formula,
    SmooProblem,
    UnweightedObjective,
    compact_formula,
    restrict_formula,
    true_formula,
)

SPLIT_DECISION_LIMIT = 20
SPLIT_BLOCK_LIMIT = 60
SPLIT_MODEL_CAP = 1 << 17
FOLD_CAP = 1 << 22


def confidence_tau(k: int, n: int, eta: float) -> float:
    """Confidence parameter: max(ln k, n ln 2) + ln(2/eta)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    return max(math.log(k), n * math.log(2)) + math.log(2 / eta)


@dataclass(frozen=True)
class OracleQuery:
    problem: SmooProblem
    exponents: tuple[int, ...]
    l_star: int
    eta: float
    seed: int

    def __post_init__(self) -> None:
        if self.l_star < 2:
            raise ValueError("l_star must be >= 2")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        if len(self.exponents) != self.problem.k:
            raise ValueError("one exponent per objective required")
        for i, l in enumerate(self.exponents):
            hi = self.problem.space.latent_blocks[i]
            if not 0 <= l <= hi:
                raise ValueError(
                    f"exponent {l} outside grid range [0, {hi}] for objective {i}"
                )


@dataclass(frozen=True)
class OracleResult:
    status: str  # "sat" | "unsat" | "indeterminate"
    witness: tuple[int, ...] | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


class OracleContext:
    """Per-problem caches shared across grid points (thread-safe).

    Feasible decision assignments and per-(objective, x) latent model sets
    are independent of the sampled parity constraints, so they are computed
    once per problem rather than once per oracle call.
    """

    def __init__(self, problem: SmooProblem):
        if problem.is_weighted:
            raise ValueError("oracle queries operate on unweighted problems")
        self.problem = problem
        self._lock = threading.Lock()
        self._feasible: list[int] | None = None
        self._models: dict[tuple[int, int], np.ndarray] = {}

    def feasible_x(self) -> list[int]:
        with self._lock:
            if self._feasible is None:
                n = self.problem.space.decision_count
                if n > SPLIT_DECISION_LIMIT:
                    raise ValueError(
                        f"split strategy supports at most "
                        f"{SPLIT_DECISION_LIMIT} decision variables, got {n}"
                    )
                cons, order = compact_formula(
                    self.problem.decision_constraints, range(n)
                )
                models = collect_models(cons, range(n))
                self._feasible = [int(b) for b in models]
            return self._feasible

    def models(self, i: int, xbits: int) -> "ObjectiveModels":
        """Block-model bit patterns of objective ``i`` given ``x``.

        Bit ``j`` of a model corresponds to the j-th variable of block
        ``i``.  Product-structured objectives (pseudo problems) are
        enumerated factor by factor; the cartesian combination is
        materialized only while it stays small, otherwise the per-part sets
        are kept for the parity-signature evaluation.
        """
        key = (i, xbits)
        with self._lock:
            cached = self._models.get(key)
        if cached is not None:
            return cached
        obj = self.problem.objectives[i]
        assert isinstance(obj, UnweightedObjective)
        space = self.problem.space
        n = space.decision_count
        fixed = {v: (xbits >> v) & 1 for v in range(n)}
        parts = obj.parts if obj.parts else (obj.formula,)
        block = list(space.block_range(i))
        pos_of = {v: j for j, v in enumerate(block)}
        part_sets: list[np.ndarray] = []
        touched: set[int] = set()
        for part in parts:
            part_block = sorted(
                v for v in part.vars_mentioned() if space.block_of(v) == i
            )
            touched.update(part_block)
            compacted, _ = compact_formula(
                restrict_formula(part, fixed), part_block
            )
            local = collect_models(compacted, range(len(part_block)))
            shifted = np.zeros(local.shape, dtype=np.uint64)
            for j, v in enumerate(part_block):
                bit = (local >> np.uint64(j)) & np.uint64(1)
                shifted |= bit << np.uint64(pos_of[v])
            part_sets.append(np.unique(shifted))
        # Block variables no part mentions are free: two-model singletons.
        for v in block:
            if v not in touched:
                part_sets.append(
                    np.array([0, 1 << pos_of[v]], dtype=np.uint64)
                )
        result = ObjectiveModels(part_sets)
        with self._lock:
            self._models[key] = result
        return result


class ObjectiveModels:
    """Model set of one objective at a fixed x, possibly factored.

    ``parts`` hold per-factor model patterns over disjoint bit ranges; the
    full model set is their cartesian OR-combination, materialized in
    ``combined`` only while it fits the split-strategy cap.  Larger
    products are decided per copy without materialization: parts whose
    model sets are affine subspaces (counter-bit cubes are the common case)
    enter a GF(2) feasibility system, the rest are enumerated.
    """

    def __init__(self, parts: list[np.ndarray]):
        self.parts = [p for p in parts if not _is_free_zero(p)]
        self.empty = any(p.size == 0 for p in parts)
        self.combined: np.ndarray | None = None
        if self.empty:
            self.combined = np.zeros(0, dtype=np.uint64)
            return
        size = 1
        for p in self.parts:
            size *= int(p.size)
        if size <= SPLIT_MODEL_CAP:
            combined = np.zeros(1, dtype=np.uint64)
            for p in self.parts:
                combined = (combined[:, None] | p[None, :]).reshape(-1)
            self.combined = np.unique(combined)
            return
        # Decompose: affine parts contribute basis vectors, others are
        # enumerated as a (capped) product.
        self.affine_origin = 0
        basis: list[int] = []
        listed: list[np.ndarray] = []
        for p in self.parts:
            aff = _affine_decomposition(p)
            if aff is None:
                listed.append(p)
            else:
                origin, vecs = aff
                self.affine_origin ^= origin
                basis.extend(vecs)
        self.basis = np.array(basis, dtype=np.uint64)
        listed_size = 1
        for p in listed:
            listed_size *= int(p.size)
        if listed_size > SPLIT_MODEL_CAP:
            raise ValueError(
                "model set exceeds the split-strategy cap; use the "
                "monolithic strategy"
            )
        combined = np.zeros(1, dtype=np.uint64)
        for p in listed:
            combined = (combined[:, None] ^ p[None, :]).reshape(-1)
        self.listed = combined  # disjoint bit ranges: xor equals or

    def copy_flags(self, masks: np.ndarray, parities: np.ndarray) -> np.ndarray:
        """Per-copy satisfiability flags under (m, l) parity draws."""
        m, l = masks.shape
        if self.combined is not None:
            return kernels.copy_sat(
                self.combined, masks.reshape(-1), parities.reshape(-1), m, l
            )
        out = np.zeros(m, dtype=np.uint8)
        for j in range(m):
            out[j] = self._one_copy(masks[j], parities[j])
        return out

    def _one_copy(self, masks: np.ndarray, pars: np.ndarray) -> bool:
        """GF(2) feasibility: some product model meets every parity draw.

        With affine parts folded into a basis, a model is origin xor listed
        choice xor basis combination; the constraints become a linear
        system over the basis coefficients, feasible iff every left-null
        vector is orthogonal to the adjusted parity target.
        """
        l = masks.shape[0]
        if l == 0:
            return True
        shifts = np.arange(l, dtype=np.uint64)
        target = int(
            np.bitwise_or.reduce(pars.astype(np.uint64) << shifts)
        ) if l else 0
        origin_sig = _signature(
            np.array([self.affine_origin], dtype=np.uint64), masks, shifts
        )[0]
        base = np.uint64(target) ^ origin_sig
        targets = _signature(self.listed, masks, shifts) ^ base
        if self.basis.size == 0:
            return bool((targets == 0).any())
        alpha = _signature_columns(self.basis, masks)  # row per constraint
        nulls = _gf2_left_nullspace(alpha, l)
        if not nulls:
            return True  # full row rank: every target is reachable
        nv = np.array(nulls, dtype=np.uint64)
        bad = (
            np.bitwise_count(nv[:, None] & targets[None, :]) & np.uint64(1)
        ).any(axis=0)
        return bool((~bad).any())


def _signature(models: np.ndarray, masks: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Per-model parity pattern against each mask, packed into uint64."""
    if models.size == 0:
        return models
    par = (
        np.bitwise_count(models[:, None] & masks[None, :]) & np.uint64(1)
    ).astype(np.uint64)
    return np.bitwise_or.reduce(par << shifts[None, :], axis=1)


def _signature_columns(basis: np.ndarray, masks: np.ndarray) -> list[int]:
    """Row q = parity of each basis vector against mask q, packed over basis."""
    par = (
        np.bitwise_count(masks[:, None] & basis[None, :]) & np.uint64(1)
    ).astype(np.uint64)
    dshift = np.arange(basis.size, dtype=np.uint64)
    rows = np.bitwise_or.reduce(par << dshift[None, :], axis=1)
    return [int(r) for r in rows]


def _gf2_left_nullspace(rows: list[int], l: int) -> list[int]:
    """Tags u (bit q = row q) with xor of the tagged rows = 0."""
    pivots: dict[int, tuple[int, int]] = {}
    nulls: list[int] = []
    for q, row in enumerate(rows):
        tag = 1 << q
        while row:
            pv = row.bit_length() - 1
            if pv in pivots:
                prow, ptag = pivots[pv]
                row ^= prow
                tag ^= ptag
            else:
                pivots[pv] = (row, tag)
                break
        else:
            nulls.append(tag)
    return nulls


def _affine_decomposition(
    models: np.ndarray,
) -> tuple[int, list[int]] | None:
    """(origin, basis) when the model set is an affine GF(2) subspace."""
    size = int(models.size)
    if size == 0 or size & (size - 1):
        return None
    origin = int(models[0])
    by_msb: dict[int, int] = {}
    for v in models[1:]:
        row = int(v) ^ origin
        while row:
            msb = row.bit_length() - 1
            if msb in by_msb:
                row ^= by_msb[msb]
            else:
                by_msb[msb] = row
                break
    if 1 << len(by_msb) != size:
        return None
    return origin, list(by_msb.values())


def _is_free_zero(p: np.ndarray) -> bool:
    return p.size == 1 and int(p[0]) == 0


def _choose_strategy(query: OracleQuery, strategy: str) -> str:
    if strategy != "auto":
        return strategy
    problem = query.problem
    space = problem.space
    if space.decision_count > SPLIT_DECISION_LIMIT:
        return "monolithic"
    if any(b > SPLIT_BLOCK_LIMIT for b in space.latent_blocks):
        return "monolithic"
    return "split"


def xor_sat(
    query: OracleQuery,
    backend: SolverBackend | None = None,
    context: OracleContext | None = None,
    strategy: str = "auto",
    step_limit: int | None = None,
    time_limit: float | None = None,
    m_override: int | None = None,
    dump_path=None,
) -> OracleResult:
    """Decide joint threshold achievability; see the module docstring."""
    deadline = None if time_limit is None else time.monotonic() + time_limit
    problem = query.problem
    if problem.is_weighted:
        raise ValueError("embed weighted problems before querying the oracle")
    n = problem.space.decision_count
    tau = confidence_tau(problem.k, n, query.eta)
    backend = backend or get_backend()
    rng = make_rng(split_seed(query.seed, 0))
    amplified: list[AmplifiedQuery] = []
    for i in range(problem.k):
        obj = problem.objectives[i]
        amplified.append(
            build_amplified(
                obj.formula,
                i,
                query.exponents[i],
                query.l_star,
                tau,
                rng,
                m_override=m_override,
            )
        )
    chosen = _choose_strategy(query, strategy)
    if chosen == "split":
        context = context or OracleContext(problem)
        return _solve_split(query, amplified, context, deadline)
    return _solve_monolithic(
        query, amplified, backend, step_limit, deadline, dump_path
    )


def _solve_split(
    query: OracleQuery,
    amplified: Sequence[AmplifiedQuery],
    context: OracleContext,
    deadline: float | None = None,
) -> OracleResult:
    problem = query.problem
    n = problem.space.decision_count
    for xbits in context.feasible_x():
        ok = True
        for i, amp in enumerate(amplified):
            if deadline is not None and time.monotonic() > deadline:
                return OracleResult("indeterminate")
            models = context.models(i, xbits)
            flags = models.copy_flags(amp.masks, amp.parities)
            if int(flags.sum()) < amp.majority_bound:
                ok = False
                break
        if ok:
            witness = tuple((xbits >> v) & 1 for v in range(n))
            return OracleResult("sat", witness)
    return OracleResult("unsat")


def _solve_monolithic(
    query: OracleQuery,
    amplified: Sequence[AmplifiedQuery],
    backend: SolverBackend,
    step_limit: int | None,
    deadline: float | None,
    dump_path,
) -> OracleResult:
    problem = query.problem
    n = problem.space.decision_count
    space = problem.space
    conjunction: Formula | None = None
    for amp in amplified:
        assembled = amp.assemble(space)
        piece = assembled.formula
        space = piece.space
        conjunction = piece if conjunction is None else conjunction.in_space(space).conjoin(piece)
    full = (
        problem.decision_constraints.in_space(space)
        if conjunction is None
        else conjunction.conjoin(problem.decision_constraints.in_space(space))
    )
    if dump_path is not None:
        from .dimacs import to_dimacs

        with open(dump_path, "w", encoding="utf-8") as fh:
            fh.write(to_dimacs(full))
    try:
        res = backend.solve(
            full,
            seed=split_seed(query.seed, 1),
            step_limit=step_limit,
            deadline=deadline,
        )
    except SolveTimeout:
        return OracleResult("indeterminate")
    if not res.is_sat:
        return OracleResult("unsat")
    witness = tuple(res.assignment.value(v) for v in range(n))
    return OracleResult("sat", witness)
