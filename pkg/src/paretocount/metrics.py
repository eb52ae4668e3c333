"""Frontier quality metrics: GD, IGD, HV, SP, plus normalization helpers.

All metrics treat points as maximization objectives.  Hypervolume is exact
for two objectives (descending sweep over rectangle strips); higher
dimensions use a Monte-Carlo estimate with a reported standard error.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

PointSet = np.ndarray  # shape (n_points, k)


def as_points(points) -> PointSet:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2:
        raise ValueError("point set must be two-dimensional")
    if not np.isfinite(arr).all():
        raise ValueError("point set must be finite")
    return arr


def _pairwise_min_dist(a: PointSet, b: PointSet) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt((diff**2).sum(axis=2)).min(axis=1)


def gd(candidate, reference) -> float:
    """Mean distance from each candidate point to its nearest reference."""
    cand, ref = as_points(candidate), as_points(reference)
    if cand.size == 0 or ref.size == 0:
        raise ValueError("point sets must be nonempty")
    if cand.shape[1] != ref.shape[1]:
        raise ValueError("dimension mismatch")
    return float(_pairwise_min_dist(cand, ref).mean())


def igd(candidate, reference) -> float:
    """Mean distance from each reference point to its nearest candidate."""
    return gd(reference, candidate)


def hv(candidate, ref_point) -> float:
    """Dominated volume between the points and ``ref_point``.

    Exact for k = 2; for k >= 3 this returns the Monte-Carlo estimate of
    :func:`hv_monte_carlo` with default sampling.
    """
    cand = as_points(candidate)
    ref = np.asarray(ref_point, dtype=float)
    if cand.shape[1] != ref.shape[0]:
        raise ValueError("reference point dimension mismatch")
    if (cand < ref[None, :]).any():
        raise ValueError("every point must weakly dominate the reference point")
    if cand.shape[1] == 1:
        return float((cand[:, 0] - ref[0]).max())
    if cand.shape[1] == 2:
        return _hv2(cand, ref)
    value, _stderr = hv_monte_carlo(cand, ref)
    return value


def _hv2(cand: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((-cand[:, 1], -cand[:, 0]))
    pts = cand[order]
    total = 0.0
    top = ref[1]
    for x, y in pts:
        if y > top:
            total += (x - ref[0]) * (y - top)
            top = y
    return float(total)


def hv_monte_carlo(
    candidate, ref_point, samples: int = 1_000_000, seed: int = 0
) -> tuple[float, float]:
    """Monte-Carlo hypervolume for k >= 3: (estimate, standard error)."""
    cand = as_points(candidate)
    ref = np.asarray(ref_point, dtype=float)
    if (cand < ref[None, :]).any():
        raise ValueError("every point must weakly dominate the reference point")
    hi = cand.max(axis=0)
    box = float(np.prod(hi - ref))
    if box == 0.0:
        return 0.0, 0.0
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    done = 0
    chunk = 65536
    while done < samples:
        n = min(chunk, samples - done)
        u = rng.uniform(ref, hi, size=(n, ref.shape[0]))
        covered = (u[:, None, :] <= cand[None, :, :]).all(axis=2).any(axis=1)
        hits += int(covered.sum())
        done += n
    p = hits / samples
    stderr = box * math.sqrt(max(p * (1 - p), 0.0) / samples)
    return box * p, stderr


def sp(candidate) -> float:
    """Spacing: sample deviation of nearest-neighbor distances."""
    cand = as_points(candidate)
    if cand.shape[0] < 2:
        raise ValueError("spacing needs at least two points")
    diff = cand[:, None, :] - cand[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    d = dist.min(axis=1)
    mean = d.mean()
    return float(math.sqrt(((d - mean) ** 2).sum() / (len(d) - 1)))


@dataclass(frozen=True)
class AffineMap:
    """Per-dimension [0,1] min-max map; zero-span dimensions map to 0."""

    mins: tuple[float, ...]
    spans: tuple[float, ...]
    degenerate: tuple[bool, ...]

    def apply(self, points) -> PointSet:
        pts = as_points(points)
        mins = np.asarray(self.mins)
        spans = np.asarray(self.spans)
        out = (pts - mins[None, :]) / np.where(spans == 0.0, 1.0, spans)[None, :]
        out[:, np.asarray(self.degenerate)] = 0.0
        return out

    @property
    def has_degenerate_dimension(self) -> bool:
        return any(self.degenerate)


def normalize(sets: Sequence) -> tuple[list[PointSet], AffineMap]:
    """Min-max over the union of all sets, mapped to [0, 1] per dimension."""
    arrays = [as_points(s) for s in sets]
    if not arrays or all(a.size == 0 for a in arrays):
        raise ValueError("need at least one nonempty point set")
    union = np.vstack([a for a in arrays if a.size])
    mins = union.min(axis=0)
    maxs = union.max(axis=0)
    spans = maxs - mins
    degenerate = spans == 0.0
    mapping = AffineMap(
        tuple(float(v) for v in mins),
        tuple(float(v) for v in spans),
        tuple(bool(v) for v in degenerate),
    )
    return [mapping.apply(a) for a in arrays], mapping


def merge_reference(sets: Sequence) -> PointSet:
    """Strict-dominance non-dominated subset of the union, deduplicated."""
    arrays = [as_points(s) for s in sets if as_points(s).size]
    if not arrays:
        return np.zeros((0, 0))
    union = np.unique(np.vstack(arrays), axis=0)
    keep = []
    for i in range(union.shape[0]):
        p = union[i]
        dominated = (
            (union >= p[None, :]).all(axis=1) & (union > p[None, :]).any(axis=1)
        ).any()
        if not dominated:
            keep.append(i)
    return union[keep]


def read_points_csv(path) -> PointSet:
    """One point per row; '#' comment lines and a non-numeric header allowed."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if rows:
                    raise
                continue  # header line
    if not rows:
        raise ValueError(f"no points found in {path}")
    return as_points(rows)
