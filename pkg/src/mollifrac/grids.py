"""Graded 1D axes, clipped trapezoid weights, tensor interpolation.

Grids are rectilinear: a node array per axis.  Refinement bands resolve
mollification layers (spacing <= eps/8 near jumps) and grow geometrically
into the coarse background spacing, so a 1D axis costs O(log(1/eps)) nodes
outside the O(1/eps)-dense layer itself.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np


def _merge_bands(bands: list[tuple[float, float, float]],
                 lo: float, hi: float) -> list[tuple[float, float, float]]:
    """Clip bands to [lo, hi] and merge overlaps, keeping the finest spacing."""
    clipped = []
    for s, e, h in bands:
        s, e = max(s, lo), min(e, hi)
        if e > s and h > 0:
            clipped.append((s, e, h))
    clipped.sort()
    merged: list[list[float]] = []
    for s, e, h in clipped:
        if merged and s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
            merged[-1][2] = min(merged[-1][2], h)
        else:
            merged.append([s, e, h])
    return [tuple(b) for b in merged]


def _fill_gap(a: float, b: float, ha: float, hb: float,
              coarse: float, growth: float) -> list[float]:
    """Strictly interior nodes of (a, b), growing geometrically from both ends."""
    nodes_left: list[float] = []
    nodes_right: list[float] = []
    x, y = a, b
    hx, hy = min(ha, coarse), min(hb, coarse)
    while True:
        hx, hy = min(hx, coarse), min(hy, coarse)
        if y - x <= 1.6 * max(hx, hy):
            break
        if hx <= hy:
            x += hx
            nodes_left.append(x)
            hx *= growth
        else:
            y -= hy
            nodes_right.append(y)
            hy *= growth
    return nodes_left + nodes_right[::-1]


def graded_axis(lo: float, hi: float, coarse_h: float,
                bands: list[tuple[float, float, float]],
                growth: float = 1.5) -> np.ndarray:
    """Sorted nodes on [lo, hi]: uniform fine spacing inside each band
    (center-aligned so no node falls exactly on a band center), geometric
    transitions, coarse spacing elsewhere."""
    merged = _merge_bands(bands, lo, hi)
    nodes = [lo, hi]
    cursor = lo
    h_at_cursor = coarse_h
    for s, e, h in merged:
        nodes.extend(_fill_gap(cursor, s, h_at_cursor, h, coarse_h, growth))
        n = max(1, int(math.ceil((e - s) / h)))
        nodes.extend(np.linspace(s, e, n + 1).tolist())
        cursor, h_at_cursor = e, h
    nodes.extend(_fill_gap(cursor, hi, h_at_cursor, coarse_h, coarse_h, growth))
    arr = np.unique(np.asarray(nodes, dtype=float))
    # drop near-duplicates that would create degenerate cells
    keep = np.concatenate([[True], np.diff(arr) > 1e-13 * max(1.0, hi - lo)])
    arr = arr[keep]
    if arr[-1] != hi:
        arr[-1] = hi
    return arr


def trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    w = np.zeros_like(nodes)
    d = np.diff(nodes)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def clipped_trapezoid_weights(nodes: np.ndarray, a: float, b: float) -> np.ndarray:
    """Weights w with sum_i w_i v_i = integral over (a, b) of the piecewise
    linear interpolant of v on the node axis.  (a, b) is intersected with
    the node range; empty intersections give zero weights."""
    n = nodes.size
    w = np.zeros(n)
    if b <= a or b <= nodes[0] or a >= nodes[-1]:
        return w
    t0, t1 = nodes[:-1], nodes[1:]
    c = np.maximum(t0, a)
    d = np.minimum(t1, b)
    m = np.clip(d - c, 0.0, None)
    mid = 0.5 * (c + d)
    L = t1 - t0
    w[:-1] += m * (t1 - mid) / L
    w[1:] += m * (mid - t0) / L
    return w


def axis_interp(nodes: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower cell index and fractional coordinate for linear interpolation.

    Queries outside the node range are clamped to the boundary value.
    """
    idx = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, nodes.size - 2)
    frac = (x - nodes[idx]) / (nodes[idx + 1] - nodes[idx])
    return idx, np.clip(frac, 0.0, 1.0)


def tensor_interp(values: np.ndarray, axes: tuple[np.ndarray, ...],
                  queries: tuple[np.ndarray, ...]) -> np.ndarray:
    """Multilinear interpolation of a tensor-grid field at a tensor of queries.

    values has shape (n_1, ..., n_N, d); queries is one coordinate array per
    axis (lengths m_k); the result has shape (m_1, ..., m_N, d).
    """
    dim = len(axes)
    interps = [axis_interp(axes[k], queries[k]) for k in range(dim)]
    out = None
    for corner in product((0, 1), repeat=dim):
        idx = tuple(interps[k][0] + corner[k] for k in range(dim))
        wgt = None
        for k in range(dim):
            f = interps[k][1] if corner[k] else 1.0 - interps[k][1]
            wgt = f if wgt is None else np.multiply.outer(wgt, f)
        contrib = values[np.ix_(*idx)] * wgt[..., None]
        out = contrib if out is None else out + contrib
    return out
