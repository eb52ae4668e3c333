# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: the hot twin of ``_kernels_py``.

Same mask-packed constraint semantics; see the fallback module for the
contract.  Loops here release the GIL and early-exit per assignment.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define PC_POPCOUNT64(x) __builtin_popcountll(x)
    #else
    static inline int PC_POPCOUNT64(unsigned long long v) {
        int c = 0;
        while (v) { v &= v - 1; c++; }
        return c;
    }
    #endif
    """
    int PC_POPCOUNT64(uint64_t x) nogil


cdef inline bint _sat_one(
    uint64_t a,
    const uint64_t[:] pos, const uint64_t[:] neg, Py_ssize_t ncl,
    const uint64_t[:] xm, const uint8_t[:] xp, Py_ssize_t nx,
    const uint64_t[:] cpos, const uint64_t[:] cneg, const int64_t[:] cb,
    Py_ssize_t nc, uint64_t full,
) nogil:
    cdef Py_ssize_t j
    cdef uint64_t na = a ^ full
    for j in range(ncl):
        if (a & pos[j]) == 0 and (na & neg[j]) == 0:
            return False
    for j in range(nx):
        if (PC_POPCOUNT64(a & xm[j]) & 1) != xp[j]:
            return False
    for j in range(nc):
        if PC_POPCOUNT64(a & cpos[j]) + PC_POPCOUNT64(na & cneg[j]) < cb[j]:
            return False
    return True


def first_sat(pos, neg, xm, xp, cpos, cneg, cb, int nvars):
    """Smallest satisfying assignment (as an int) or -1."""
    cdef const uint64_t[:] pos_v = np.ascontiguousarray(pos, dtype=np.uint64)
    cdef const uint64_t[:] neg_v = np.ascontiguousarray(neg, dtype=np.uint64)
    cdef const uint64_t[:] xm_v = np.ascontiguousarray(xm, dtype=np.uint64)
    cdef const uint8_t[:] xp_v = np.ascontiguousarray(xp, dtype=np.uint8)
    cdef const uint64_t[:] cpos_v = np.ascontiguousarray(cpos, dtype=np.uint64)
    cdef const uint64_t[:] cneg_v = np.ascontiguousarray(cneg, dtype=np.uint64)
    cdef const int64_t[:] cb_v = np.ascontiguousarray(cb, dtype=np.int64)
    cdef Py_ssize_t ncl = pos_v.shape[0], nx = xm_v.shape[0], nc = cpos_v.shape[0]
    cdef uint64_t full = ~(<uint64_t>0) if nvars == 64 else ((<uint64_t>1 << nvars) - 1)
    cdef uint64_t a
    cdef uint64_t total_minus_1 = full
    cdef int64_t found = -1
    with nogil:
        a = 0
        while True:
            if _sat_one(a, pos_v, neg_v, ncl, xm_v, xp_v, nx,
                        cpos_v, cneg_v, cb_v, nc, full):
                found = <int64_t>a
                break
            if a == total_minus_1:
                break
            a += 1
    return found


def count_projected(pos, neg, xm, xp, cpos, cneg, cb, int nvars, proj_vars):
    """Number of distinct projections of satisfying assignments."""
    arr = collect_projected(pos, neg, xm, xp, cpos, cneg, cb, nvars, proj_vars)
    return arr.shape[0]


def collect_projected(pos, neg, xm, xp, cpos, cneg, cb, int nvars, proj_vars):
    """Sorted distinct projections of satisfying assignments (uint64)."""
    cdef const uint64_t[:] pos_v = np.ascontiguousarray(pos, dtype=np.uint64)
    cdef const uint64_t[:] neg_v = np.ascontiguousarray(neg, dtype=np.uint64)
    cdef const uint64_t[:] xm_v = np.ascontiguousarray(xm, dtype=np.uint64)
    cdef const uint8_t[:] xp_v = np.ascontiguousarray(xp, dtype=np.uint8)
    cdef const uint64_t[:] cpos_v = np.ascontiguousarray(cpos, dtype=np.uint64)
    cdef const uint64_t[:] cneg_v = np.ascontiguousarray(cneg, dtype=np.uint64)
    cdef const int64_t[:] cb_v = np.ascontiguousarray(cb, dtype=np.int64)
    cdef const uint64_t[:] pv = np.ascontiguousarray(proj_vars, dtype=np.uint64)
    cdef Py_ssize_t ncl = pos_v.shape[0], nx = xm_v.shape[0], nc = cpos_v.shape[0]
    cdef Py_ssize_t np_ = pv.shape[0]
    cdef uint64_t full = ~(<uint64_t>0) if nvars == 64 else ((<uint64_t>1 << nvars) - 1)
    seen_arr = np.zeros(1 << np_, dtype=np.uint8)
    cdef uint8_t[:] seen = seen_arr
    cdef uint64_t a, key
    cdef Py_ssize_t j
    with nogil:
        a = 0
        while True:
            if _sat_one(a, pos_v, neg_v, ncl, xm_v, xp_v, nx,
                        cpos_v, cneg_v, cb_v, nc, full):
                key = 0
                for j in range(np_):
                    key |= ((a >> pv[j]) & 1) << j
                seen[key] = 1
            if a == full:
                break
            a += 1
    return np.flatnonzero(seen_arr).astype(np.uint64)


def copy_sat(models, masks, pars, Py_ssize_t m, Py_ssize_t l):
    """Per-copy satisfiability under per-copy parity constraints."""
    cdef const uint64_t[:] mod_v = np.ascontiguousarray(models, dtype=np.uint64)
    cdef const uint64_t[:] mask_v = np.ascontiguousarray(
        np.asarray(masks, dtype=np.uint64).reshape(-1)
    )
    cdef const uint8_t[:] par_v = np.ascontiguousarray(
        np.asarray(pars, dtype=np.uint8).reshape(-1)
    )
    out_arr = np.zeros(m, dtype=np.uint8)
    cdef uint8_t[:] out = out_arr
    cdef Py_ssize_t nmod = mod_v.shape[0]
    cdef Py_ssize_t j, q, t
    cdef bint good
    cdef uint64_t model
    if nmod == 0 or m == 0:
        return out_arr
    if l == 0:
        out_arr[:] = 1
        return out_arr
    with nogil:
        for j in range(m):
            for t in range(nmod):
                model = mod_v[t]
                good = True
                for q in range(l):
                    if (PC_POPCOUNT64(model & mask_v[j * l + q]) & 1) != par_v[j * l + q]:
                        good = False
                        break
                if good:
                    out[j] = 1
                    break
    return out_arr
