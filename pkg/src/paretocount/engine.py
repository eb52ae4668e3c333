"""Satisfiability engine for clause/parity/cardinality formulas.

The reference backend is complete and deterministic given a seed: it runs a
Gaussian-elimination pass over the parity system, then either sweeps all
assignments (small formulas, mask kernels) or runs an iterative DPLL with
unit propagation and parity-counter propagation.  Resource exhaustion raises
:class:`SolveTimeout`; it is never conflated with UNSAT.
"""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .encodings import gauss_eliminate, lower_cards, lower_xors
from .model import (
    Card,
    Clause,
    Formula,
    Xor,
    compact_formula,
    lit_value,
    lit_var,
    restrict_formula,
)

ENUM_VAR_LIMIT = int(os.environ.get("PARETOCOUNT_ENUM_LIMIT", "26"))
PROJ_LIMIT = int(os.environ.get("PARETOCOUNT_PROJ_LIMIT", "24"))


class SolveTimeout(Exception):
    """Per-query resource budget exceeded (distinct from UNSAT)."""

    def __init__(self, steps: int):
        super().__init__(f"solver budget exhausted after {steps} steps")
        self.steps = steps


@dataclass(frozen=True)
class Assignment:
    """Total assignment over a space, packed as a bit pattern."""

    bits: int
    nvars: int

    def value(self, var: int) -> int:
        if not 0 <= var < self.nvars:
            raise IndexError(f"variable {var} outside assignment")
        return (self.bits >> var) & 1

    def values(self, vars_: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.value(v) for v in vars_)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> v) & 1 for v in range(self.nvars))


@dataclass(frozen=True)
class SolveResult:
    status: str  # "sat" | "unsat"
    assignment: Assignment | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


def evaluate(formula: Formula, a: Assignment) -> bool:
    """Truth of the formula under a total assignment (plain definition)."""
    if a.nvars < formula.space.total:
        raise ValueError(
            f"assignment covers {a.nvars} vars, space has {formula.space.total}"
        )
    for c in formula.clauses:
        if not any(a.value(lit_var(l)) == int(lit_value(l)) for l in c):
            return False
    for x in formula.xors:
        if sum(a.value(v) for v in x.vars) % 2 != x.parity:
            return False
    for cc in formula.cards:
        got = sum(
            1 for l in cc.lits if a.value(lit_var(l)) == int(lit_value(l))
        )
        if got < cc.bound:
            return False
    return True


# ---------------------------------------------------------------------------
# Mask packing for the enumeration kernels (<= 64 variables).


@dataclass(frozen=True)
class PackedFormula:
    nvars: int
    pos: np.ndarray
    neg: np.ndarray
    xm: np.ndarray
    xp: np.ndarray
    cpos: np.ndarray
    cneg: np.ndarray
    cb: np.ndarray


def pack_formula(formula: Formula, nvars: int | None = None) -> PackedFormula:
    nvars = formula.space.total if nvars is None else nvars
    if nvars > 64:
        raise ValueError("mask packing limited to 64 variables")
    pos = np.zeros(len(formula.clauses), dtype=np.uint64)
    neg = np.zeros(len(formula.clauses), dtype=np.uint64)
    for i, c in enumerate(formula.clauses):
        pm = nm = 0
        for l in c:
            if lit_value(l):
                pm |= 1 << lit_var(l)
            else:
                nm |= 1 << lit_var(l)
        pos[i], neg[i] = pm, nm
    xm = np.zeros(len(formula.xors), dtype=np.uint64)
    xp = np.zeros(len(formula.xors), dtype=np.uint8)
    for i, x in enumerate(formula.xors):
        m = 0
        for v in x.vars:
            m |= 1 << v
        xm[i], xp[i] = m, x.parity
    cpos = np.zeros(len(formula.cards), dtype=np.uint64)
    cneg = np.zeros(len(formula.cards), dtype=np.uint64)
    cb = np.zeros(len(formula.cards), dtype=np.int64)
    for i, cc in enumerate(formula.cards):
        pm = nm = 0
        for l in cc.lits:
            if lit_value(l):
                pm |= 1 << lit_var(l)
            else:
                nm |= 1 << lit_var(l)
        cpos[i], cneg[i], cb[i] = pm, nm, cc.bound
    return PackedFormula(nvars, pos, neg, xm, xp, cpos, cneg, cb)


def _kernel_args(p: PackedFormula):
    return p.pos, p.neg, p.xm, p.xp, p.cpos, p.cneg, p.cb


# ---------------------------------------------------------------------------
# Top-level unit propagation (cheap presimplification for all strategies).


def propagate_units(
    formula: Formula,
) -> tuple[dict[int, int] | None, Formula]:
    """Fixpoint of unit/forced-literal propagation.

    Returns (forced assignments, reduced formula); the assignments are None
    when propagation alone derives a contradiction.  Functionally-determined
    circuits collapse completely here, keeping the search strategies away
    from needless enumeration.
    """
    fixed: dict[int, int] = {}
    work = formula
    while True:
        new: dict[int, int] = {}

        def push(v: int, val: int) -> bool:
            if new.get(v, val) != val:
                return False
            new[v] = val
            return True

        for c in work.clauses:
            if len(c) == 0:
                return None, work
            if len(c) == 1:
                if not push(lit_var(c[0]), int(lit_value(c[0]))):
                    return None, work
        for x in work.xors:
            if not x.vars and x.parity == 1:
                return None, work
            if len(x.vars) == 1:
                if not push(x.vars[0], x.parity):
                    return None, work
        for cc in work.cards:
            if cc.bound == len(cc.lits):
                for l in cc.lits:
                    if not push(lit_var(l), int(lit_value(l))):
                        return None, work
        new = {v: val for v, val in new.items() if v not in fixed}
        if not new:
            return fixed, work
        fixed.update(new)
        work = restrict_formula(work, new)


# ---------------------------------------------------------------------------
# Iterative DPLL with unit propagation and parity-counter propagation.

_IMPLIED, _UNTRIED, _FLIPPED = 0, 1, 2


def _dpll(
    clauses: Sequence[Clause],
    xors: Sequence[Xor],
    nvars: int,
    order: Sequence[int],
    step_limit: int | None,
    deadline: float | None = None,
) -> int | None:
    """Bit pattern of a satisfying assignment, or None if UNSAT."""
    assign = [-1] * nvars
    watches: dict[int, list[int]] = {}
    clause_lits: list[tuple[int, ...]] = []
    units: list[int] = []
    for c in clauses:
        c = tuple(dict.fromkeys(c))
        if len(c) == 0:
            return None
        if any(-l in c for l in c):
            continue  # tautology
        if len(c) == 1:
            units.append(c[0])
            continue
        idx = len(clause_lits)
        clause_lits.append(c)
        watches.setdefault(c[0], []).append(idx)
        watches.setdefault(c[1], []).append(idx)
    watch_pair: list[list[int]] = [[c[0], c[1]] for c in clause_lits]

    xor_vars = [list(x.vars) for x in xors]
    xor_par = [x.parity for x in xors]
    xor_free = [len(v) for v in xor_vars]
    xor_acc = [0] * len(xors)
    occ: dict[int, list[int]] = {}
    for i, vs in enumerate(xor_vars):
        if not vs and xor_par[i] == 1:
            return None
        for v in vs:
            occ.setdefault(v, []).append(i)

    trail: list[tuple[int, int]] = []  # (var, flag)
    steps = 0

    def lit_state(l: int) -> int:
        v = assign[lit_var(l)]
        if v == -1:
            return -1
        return int(v == int(lit_value(l)))

    def unset_last() -> tuple[int, int, int]:
        var, flag = trail.pop()
        value = assign[var]
        assign[var] = -1
        for xi in occ.get(var, ()):
            xor_free[xi] += 1
            if value:
                xor_acc[xi] ^= 1
        return var, value, flag

    def propagate(first_lit: int, first_flag: int) -> bool:
        """Make ``first_lit`` true and exhaust implications; False = conflict."""
        nonlocal steps
        queue = [(first_lit, first_flag)]
        qi = 0
        while qi < len(queue):
            if step_limit is not None and steps > step_limit:
                raise SolveTimeout(steps)
            if deadline is not None and steps % 4096 == 0 and time.monotonic() > deadline:
                raise SolveTimeout(steps)
            l, flag = queue[qi]
            qi += 1
            v = lit_var(l)
            value = int(lit_value(l))
            if assign[v] != -1:
                if assign[v] != value:
                    return False
                continue
            steps += 1
            assign[v] = value
            trail.append((v, flag))
            parity_conflict = False
            for xi in occ.get(v, ()):
                # Every counter of v must be updated even after a conflict,
                # or the backtracking undo would drift.
                xor_free[xi] -= 1
                if value:
                    xor_acc[xi] ^= 1
                if xor_free[xi] == 0 and xor_acc[xi] != xor_par[xi]:
                    parity_conflict = True
                elif xor_free[xi] == 1 and not parity_conflict:
                    free = next(u for u in xor_vars[xi] if assign[u] == -1)
                    want = xor_acc[xi] ^ xor_par[xi]
                    queue.append(((free + 1) if want else -(free + 1), _IMPLIED))
            if parity_conflict:
                return False
            fl = -l
            wl = watches.get(fl)
            if not wl:
                continue
            keep: list[int] = []
            conflict = False
            for pos_i, ci in enumerate(wl):
                steps += 1
                pair = watch_pair[ci]
                other = pair[0] if pair[1] == fl else pair[1]
                if lit_state(other) == 1:
                    keep.append(ci)
                    continue
                moved = False
                for cand in clause_lits[ci]:
                    if cand == fl or cand == other:
                        continue
                    if lit_state(cand) != 0:
                        pair[0 if pair[0] == fl else 1] = cand
                        watches.setdefault(cand, []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                if lit_state(other) == 0:
                    keep.extend(wl[pos_i + 1 :])
                    conflict = True
                    break
                queue.append((other, _IMPLIED))
            watches[fl] = keep
            if conflict:
                return False
        return True

    # Top-level implications (no decisions yet): a conflict here is UNSAT.
    for l in units:
        if not propagate(l, _IMPLIED):
            return None
    for xi, vs in enumerate(xor_vars):
        if xor_free[xi] == 1:
            free = next(u for u in vs if assign[u] == -1)
            want = xor_acc[xi] ^ xor_par[xi]
            if not propagate((free + 1) if want else -(free + 1), _IMPLIED):
                return None

    while True:
        if step_limit is not None and steps > step_limit:
            raise SolveTimeout(steps)
        branch = next((v for v in order if assign[v] == -1), None)
        if branch is None:
            bits = 0
            for v in range(nvars):
                if assign[v] == 1:
                    bits |= 1 << v
            return bits
        ok = propagate(-(branch + 1), _UNTRIED)  # try False first
        while not ok:
            flip = None
            while trail:
                var, value, flag = unset_last()
                if flag == _UNTRIED:
                    flip = (var + 1) if value == 0 else -(var + 1)
                    break
            if flip is None:
                return None
            ok = propagate(flip, _FLIPPED)


# ---------------------------------------------------------------------------
# Backends


class SolverBackend:
    """Decision procedure behind :func:`solve`.

    ``native_xor`` backends receive parity constraints as-is; others get a
    pre-lowered CNF.  All shipped backends are deterministic given a seed.
    """

    name = "abstract"
    native_xor = True
    deterministic = True

    def solve(
        self,
        formula: Formula,
        seed: int = 0,
        step_limit: int | None = None,
        deadline: float | None = None,
    ) -> SolveResult:
        raise NotImplementedError


class ReferenceBackend(SolverBackend):
    """Complete reference: Gauss pass, then exhaustive sweep or DPLL."""

    name = "reference"
    native_xor = True

    def __init__(self, enum_limit: int | None = None):
        self.enum_limit = ENUM_VAR_LIMIT if enum_limit is None else enum_limit

    def solve(self, formula, seed=0, step_limit=None, deadline=None):
        nvars = formula.space.total
        consistent, reduced = gauss_eliminate(formula.xors)
        if not consistent:
            return SolveResult("unsat")
        work = Formula(formula.space, formula.clauses, tuple(reduced), formula.cards)
        fixed, work = propagate_units(work)
        if fixed is None:
            return SolveResult("unsat")
        compacted, order = compact_formula(work, [])
        free = len(order)
        if free <= self.enum_limit and free <= 64:
            sub = kernels.first_sat(*_kernel_args(pack_formula(compacted)), free)
            if sub < 0:
                return SolveResult("unsat")
            sub = int(sub)
        else:
            lowered = lower_cards(compacted)
            branch = list(range(lowered.space.total))
            random.Random(seed).shuffle(branch)
            sub = _dpll(
                lowered.clauses, lowered.xors, lowered.space.total, branch,
                step_limit, deadline,
            )
            if sub is None:
                return SolveResult("unsat")
        bits = 0
        for v, val in fixed.items():
            bits |= val << v
        for j, v in enumerate(order):
            bits |= ((sub >> j) & 1) << v
        result = SolveResult("sat", Assignment(bits & ((1 << nvars) - 1), nvars))
        assert evaluate(formula, result.assignment), "unsound sat result"
        return result


class LoweredBackend(SolverBackend):
    """Same search, but parity constraints are lowered to CNF first."""

    name = "lowered"
    native_xor = False

    def __init__(self):
        self._inner = ReferenceBackend()

    def solve(self, formula, seed=0, step_limit=None, deadline=None):
        consistent, reduced = gauss_eliminate(formula.xors)
        if not consistent:
            return SolveResult("unsat")
        work = lower_xors(
            Formula(formula.space, formula.clauses, tuple(reduced), formula.cards)
        )
        res = self._inner.solve(
            work, seed=seed, step_limit=step_limit, deadline=deadline
        )
        if not res.is_sat:
            return res
        nvars = formula.space.total
        mask = (1 << nvars) - 1
        out = SolveResult("sat", Assignment(res.assignment.bits & mask, nvars))
        assert evaluate(formula, out.assignment), "unsound sat result"
        return out


_BACKENDS = {
    "reference": ReferenceBackend,
    "lowered": LoweredBackend,
}


def get_backend(name: str | None = None) -> SolverBackend:
    if name is None:
        name = os.environ.get("PARETOCOUNT_BACKEND", "reference")
    try:
        return _BACKENDS[name]()
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}"
        ) from None


def solve(
    formula: Formula,
    backend: SolverBackend | None = None,
    seed: int = 0,
    step_limit: int | None = None,
    deadline: float | None = None,
) -> SolveResult:
    """Decide satisfiability; SAT results carry a verified witness."""
    backend = backend or get_backend()
    return backend.solve(
        formula, seed=seed, step_limit=step_limit, deadline=deadline
    )


def count_models(
    formula: Formula,
    projection: Sequence[int],
    enum_limit: int | None = None,
) -> int:
    """Exact number of projections of satisfying assignments.

    Small formulas are swept with the mask kernels; otherwise each
    projection assignment is decided separately by the full solver.
    """
    proj = sorted(set(projection))
    limit = PROJ_LIMIT if enum_limit is None else enum_limit
    if len(proj) > limit:
        raise ValueError(
            f"projection of {len(proj)} variables exceeds the exhaustive "
            f"limit of {limit}"
        )
    nvars = formula.space.total
    if any(not 0 <= v < nvars for v in proj):
        raise ValueError("projection variable outside the formula's space")
    consistent, reduced = gauss_eliminate(formula.xors)
    if not consistent:
        return 0
    work = Formula(formula.space, formula.clauses, tuple(reduced), formula.cards)
    fixed, work = propagate_units(work)
    if fixed is None:
        return 0
    compacted, order = compact_formula(work, [])
    pos = {v: j for j, v in enumerate(order)}
    sub_proj = [pos[v] for v in proj if v in pos]
    n_free = sum(1 for v in proj if v not in pos and v not in fixed)
    free = len(order)
    if free <= ENUM_VAR_LIMIT and free <= 64:
        packed = pack_formula(compacted)
        sub = int(kernels.count_projected(*_kernel_args(packed), free, sub_proj))
    else:
        backend = ReferenceBackend()
        sub = 0
        for bits in range(1 << len(sub_proj)):
            units = [
                (v + 1) if (bits >> j) & 1 else -(v + 1)
                for j, v in enumerate(sub_proj)
            ]
            if backend.solve(compacted.with_units(units)).is_sat:
                sub += 1
    return sub << n_free


def collect_models(
    formula: Formula, projection: Sequence[int]
) -> np.ndarray:
    """Sorted distinct projections (uint64 bit patterns, proj order = bit order)."""
    proj = list(projection)
    if len(proj) > PROJ_LIMIT:
        raise ValueError(
            f"projection of {len(proj)} variables exceeds the exhaustive "
            f"limit of {PROJ_LIMIT}"
        )
    consistent, reduced = gauss_eliminate(formula.xors)
    if not consistent:
        return np.zeros(0, dtype=np.uint64)
    work = Formula(formula.space, formula.clauses, tuple(reduced), formula.cards)
    fixed, work = propagate_units(work)
    if fixed is None:
        return np.zeros(0, dtype=np.uint64)
    compacted, order = compact_formula(work, [])
    pos = {v: j for j, v in enumerate(order)}
    sub_proj = [pos[v] for v in proj if v in pos]
    free = len(order)
    if free <= ENUM_VAR_LIMIT and free <= 64:
        packed = pack_formula(compacted)
        sub = kernels.collect_projected(*_kernel_args(packed), free, sub_proj)
    else:
        backend = ReferenceBackend()
        found = []
        for bits in range(1 << len(sub_proj)):
            units = [
                (v + 1) if (bits >> j) & 1 else -(v + 1)
                for j, v in enumerate(sub_proj)
            ]
            if backend.solve(compacted.with_units(units)).is_sat:
                found.append(bits)
        sub = np.array(sorted(found), dtype=np.uint64)
    # Re-expand: fixed projection bits are constants, unconstrained ones free.
    out = sub
    k = len(sub_proj)
    result = np.zeros(sub.shape, dtype=np.uint64)
    sub_iter = iter(range(k))
    for j, v in enumerate(proj):
        if v in pos:
            q = next(sub_iter)
            result |= ((out >> np.uint64(q)) & np.uint64(1)) << np.uint64(j)
        elif v in fixed and fixed[v]:
            result |= np.uint64(1 << j)
    free_pos = [j for j, v in enumerate(proj) if v not in pos and v not in fixed]
    for j in free_pos:
        result = np.concatenate([result, result | np.uint64(1 << j)])
    return np.unique(result)
