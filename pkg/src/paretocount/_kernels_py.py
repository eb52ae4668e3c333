"""Pure-Python (numpy) kernels: the fallback twin of the compiled core.

All functions operate on a mask-packed constraint form over at most 64
variables: assignment ``a`` is a bit pattern (variable v = bit v),

* a clause with positive-literal mask ``pos`` and negative-literal mask
  ``neg`` holds iff ``(a & pos) != 0 or (~a & neg) != 0``;
* a parity constraint with mask ``xm`` and parity ``xp`` holds iff
  ``popcount(a & xm) & 1 == xp``;
* an at-least constraint holds iff
  ``popcount(a & cpos) + popcount(~a & cneg) >= bound``.

Semantics here are the contract; `_kernels` (Cython) must match bit-for-bit.
"""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 16


def _satisfied(a, pos, neg, xm, xp, cpos, cneg, cb):
    """Boolean array: which assignments in ``a`` satisfy every constraint."""
    ok = np.ones(a.shape, dtype=bool)
    na = ~a
    for j in range(len(pos)):
        ok &= ((a & pos[j]) != 0) | ((na & neg[j]) != 0)
        if not ok.any():
            return ok
    for j in range(len(xm)):
        ok &= (np.bitwise_count(a & xm[j]) & 1) == xp[j]
        if not ok.any():
            return ok
    for j in range(len(cpos)):
        cnt = np.bitwise_count(a & cpos[j]) + np.bitwise_count(na & cneg[j])
        ok &= cnt >= cb[j]
        if not ok.any():
            return ok
    return ok


def first_sat(pos, neg, xm, xp, cpos, cneg, cb, nvars):
    """Smallest satisfying assignment (as an int) or -1."""
    total = 1 << nvars
    for start in range(0, total, CHUNK):
        end = min(start + CHUNK, total)
        a = np.arange(start, end, dtype=np.uint64)
        ok = _satisfied(a, pos, neg, xm, xp, cpos, cneg, cb)
        idx = np.flatnonzero(ok)
        if idx.size:
            return int(a[idx[0]])
    return -1


def count_projected(pos, neg, xm, xp, cpos, cneg, cb, nvars, proj_vars):
    """Number of distinct projections of satisfying assignments."""
    proj_vars = np.asarray(proj_vars, dtype=np.uint64)
    seen = np.zeros(1 << len(proj_vars), dtype=bool)
    total = 1 << nvars
    for start in range(0, total, CHUNK):
        end = min(start + CHUNK, total)
        a = np.arange(start, end, dtype=np.uint64)
        ok = _satisfied(a, pos, neg, xm, xp, cpos, cneg, cb)
        sat = a[ok]
        if sat.size:
            seen[_project(sat, proj_vars)] = True
    return int(seen.sum())


def collect_projected(pos, neg, xm, xp, cpos, cneg, cb, nvars, proj_vars):
    """Sorted distinct projections of satisfying assignments (uint64)."""
    proj_vars = np.asarray(proj_vars, dtype=np.uint64)
    seen = np.zeros(1 << len(proj_vars), dtype=bool)
    total = 1 << nvars
    for start in range(0, total, CHUNK):
        end = min(start + CHUNK, total)
        a = np.arange(start, end, dtype=np.uint64)
        ok = _satisfied(a, pos, neg, xm, xp, cpos, cneg, cb)
        sat = a[ok]
        if sat.size:
            seen[_project(sat, proj_vars)] = True
    return np.flatnonzero(seen).astype(np.uint64)


def _project(a, proj_vars):
    out = np.zeros(a.shape, dtype=np.uint64)
    for j, v in enumerate(proj_vars):
        out |= ((a >> v) & np.uint64(1)) << np.uint64(j)
    return out


def copy_sat(models, masks, pars, m, l):
    """Per-copy satisfiability under per-copy parity constraints.

    ``models``: uint64 bit patterns of the base formula's block models;
    ``masks``/``pars``: ``m*l`` parity constraints, copy-major.  Copy ``j``
    is satisfiable iff some model passes all ``l`` of its constraints.
    Returns a uint8 array of length ``m``.
    """
    models = np.asarray(models, dtype=np.uint64)
    out = np.zeros(m, dtype=np.uint8)
    if models.size == 0 or m == 0:
        return out
    if l == 0:
        out[:] = 1
        return out
    masks = np.asarray(masks, dtype=np.uint64).reshape(m, l)
    pars = np.asarray(pars, dtype=np.uint8).reshape(m, l)
    step = max(1, (1 << 22) // (l * models.size))
    for start in range(0, m, step):
        end = min(start + step, m)
        par = (
            np.bitwise_count(masks[start:end, :, None] & models[None, None, :])
            & np.uint64(1)
        ).astype(np.uint8)
        good = (par == pars[start:end, :, None]).all(axis=1).any(axis=1)
        out[start:end] = good.astype(np.uint8)
    return out
