"""Planar convex hulls and containment tests for rate regions."""

from __future__ import annotations

import numpy as np


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull2d(points) -> np.ndarray:
    """Convex hull by Andrew's monotone chain.

    Returns the hull vertices counterclockwise, starting at the
    lexicographically smallest point, with collinear points dropped.  A
    single distinct point yields one vertex, collinear input yields the two
    extreme points.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return np.empty((0, 2))
    uniq = np.unique(pts, axis=0)  # sorted by (x, y)
    if len(uniq) <= 2:
        return uniq
    P = [tuple(p) for p in uniq]

    lower: list[tuple[float, float]] = []
    for p in P:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(P):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    h = lower[:-1] + upper[:-1]
    if len(h) == 2 and h[0] == h[1]:
        h = h[:1]
    return np.array(h, dtype=float)


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.hypot(*(p - (a + t * ab))))


def outside_distance(point, hull: np.ndarray) -> float:
    """Euclidean distance from ``point`` to the polygon; 0 when inside."""
    p = np.asarray(point, dtype=float)
    h = np.asarray(hull, dtype=float)
    n = len(h)
    if n == 0:
        return float("inf")
    if n == 1:
        return float(np.hypot(*(p - h[0])))
    if n >= 3:
        inside = True
        for k in range(n):
            if _cross(h[k], h[(k + 1) % n], p) < 0:
                inside = False
                break
        if inside:
            return 0.0
    edges = range(n) if n >= 3 else range(1)
    return min(_segment_distance(p, h[k], h[(k + 1) % n]) for k in edges)


def max_violation(a_hull: np.ndarray, b_hull: np.ndarray) -> float:
    """Largest distance of a vertex of ``a_hull`` outside ``b_hull``."""
    if len(a_hull) == 0:
        return 0.0
    return max(outside_distance(v, b_hull) for v in a_hull)


def hull_subset(a_hull: np.ndarray, b_hull: np.ndarray, tol: float = 1e-9) -> bool:
    return max_violation(a_hull, b_hull) <= tol


def diagonal_reach(hull: np.ndarray) -> float:
    """Largest ``r`` with ``(r, r)`` inside the polygon (polygon must contain the origin)."""
    h = np.asarray(hull, dtype=float)
    best = 0.0
    n = len(h)
    for k in range(n):
        a, b = h[k], h[(k + 1) % n]
        da, db = a[1] - a[0], b[1] - b[0]   # signed distance to the diagonal (up to sqrt 2)
        if da == 0:
            best = max(best, a[0])
        if db == 0:
            best = max(best, b[0])
        if da * db < 0:
            t = da / (da - db)
            best = max(best, a[0] + t * (b[0] - a[0]))
    return float(best)
