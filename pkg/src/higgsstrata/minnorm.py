"""Exact minimum-norm point in a convex hull, and closest-point index sets.

The primary solver is Wolfe's method run entirely in rational arithmetic,
which terminates finitely and returns the exact minimiser together with an
exact KKT certificate.  A brute-force oracle projects the origin onto the
affine hull of every subset and keeps the feasible minimum; it exists so the
two routes can be compared with zero tolerance.  No floating point fast path
is provided anywhere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceeded
from .linalg import Vec, dot, nullspace, solve_unique, vec

DEFAULT_SUPPORT_CAP = 100_000


@dataclass(frozen=True)
class PointCloud:
    """Finitely many rational points of a common dimension."""

    dim: int
    points: tuple[Vec, ...]

    def __post_init__(self):
        pts = tuple(vec(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("a point cloud needs at least one point")
        if any(len(p) != self.dim for p in pts):
            raise ValueError("all points must share the cloud dimension")

    @classmethod
    def from_points(cls, points) -> "PointCloud":
        pts = [vec(p) for p in points]
        if not pts:
            raise ValueError("a point cloud needs at least one point")
        return cls(len(pts[0]), tuple(pts))


def _as_points(cloud) -> tuple[Vec, ...]:
    if isinstance(cloud, PointCloud):
        return cloud.points
    return PointCloud.from_points(cloud).points


def _affine_minimizer(points: list[Vec]) -> tuple[list[Fraction], Vec] | None:
    """Min-norm point of the affine hull, as barycentric weights and the point.

    None when the points are affinely dependent (the bordered Gram system is
    then singular and a smaller subset spans the same hull).
    """
    k = len(points)
    gram = [[dot(p, q) for q in points] for p in points]
    rows = [tuple(gram[i] + [Fraction(1)]) for i in range(k)]
    rows.append(tuple([Fraction(1)] * k + [Fraction(0)]))
    rhs = [Fraction(0)] * k + [Fraction(1)]
    sol = solve_unique(tuple(rows), rhs)
    if sol is None:
        return None
    lam = list(sol[:k])
    y = tuple(
        sum((l * p[i] for l, p in zip(lam, points)), Fraction(0))
        for i in range(len(points[0]))
    )
    return lam, y


def _affine_dependence(points: list[Vec]) -> list[Fraction] | None:
    """Coefficients c (not all zero, summing to zero) with sum c_i p_i = 0."""
    cols = len(points)
    rows = [tuple(p[i] for p in points) for i in range(len(points[0]))]
    rows.append(tuple(Fraction(1) for _ in range(cols)))
    basis = nullspace(tuple(rows))
    if not basis:
        return None
    return list(basis[0])


def wolfe_min_norm(points) -> Vec:
    """Wolfe's minimum-norm-point method over the rationals.

    Maintains a corral with positive barycentric weights; each major cycle
    strictly decreases the norm, so the run visits each corral at most once
    and terminates with the exact minimiser.
    """
    pts = list(_as_points(points))
    x = min(pts, key=lambda p: dot(p, p))
    corral = [pts.index(x)]
    weights = [Fraction(1)]
    while True:
        xx = dot(x, x)
        best_val, best_idx = None, None
        for idx, p in enumerate(pts):
            val = dot(x, p)
            if best_val is None or val < best_val:
                best_val, best_idx = val, idx
        if best_val >= xx:
            return x
        corral.append(best_idx)
        weights.append(Fraction(0))
        while True:
            sub = [pts[i] for i in corral]
            solved = _affine_minimizer(sub)
            if solved is None:
                # Affinely dependent corral: retire one point along a dependence.
                c = _affine_dependence(sub)
                steps = [
                    (weights[i] / c[i], i) for i in range(len(c)) if c[i] > 0
                ]
                if not steps:
                    steps = [
                        (weights[i] / c[i], i) for i in range(len(c)) if c[i] < 0
                    ]
                    theta = max(t for t, _ in steps)
                else:
                    theta = min(t for t, _ in steps)
                weights = [w - theta * ci for w, ci in zip(weights, c)]
                drop = next(i for i, w in enumerate(weights) if w == 0)
                corral.pop(drop)
                weights.pop(drop)
                continue
            alpha, y = solved
            if all(a >= 0 for a in alpha):
                x = y
                pairs = [
                    (c, a) for c, a in zip(corral, alpha) if a > 0
                ]
                corral = [c for c, _ in pairs]
                weights = [a for _, a in pairs]
                break
            # Walk from x toward y until a weight hits zero, then drop it.
            theta = min(
                weights[i] / (weights[i] - alpha[i])
                for i in range(len(alpha))
                if alpha[i] < 0
            )
            weights = [
                (1 - theta) * w + theta * a for w, a in zip(weights, alpha)
            ]
            x = tuple(
                sum((w * p[i] for w, p in zip(weights, sub)), Fraction(0))
                for i in range(len(x))
            )
            drop = next(i for i, w in enumerate(weights) if w == 0)
            corral.pop(drop)
            weights.pop(drop)


def min_norm_point_by_faces(points) -> Vec:
    """Brute-force oracle: project the origin onto every affine face.

    For each nonempty subset, the origin is projected onto the subset's
    affine hull; projections with nonnegative barycentric weights are convex
    combinations, and the best of those is the answer.  Exponential in the
    number of points; intended as an independent check.
    """
    pts = list(_as_points(points))
    best = None
    for size in range(1, len(pts) + 1):
        for subset in itertools.combinations(pts, size):
            solved = _affine_minimizer(list(subset))
            if solved is None:
                continue
            lam, y = solved
            if any(l < 0 for l in lam):
                continue
            if best is None or dot(y, y) < dot(best, best):
                best = y
    return best


def min_norm_point(cloud, method: str = "wolfe") -> Vec:
    """Exact closest point to the origin of the convex hull of the cloud.

    ``method`` is "wolfe" (default) or "faces" (the exhaustive oracle, for
    small clouds).  The result is certified: every point pairs with it at
    least as much as its squared norm.
    """
    if method not in ("wolfe", "faces"):
        raise ValueError("method must be 'wolfe' or 'faces'")
    pts = _as_points(cloud)
    if len(pts) == 1:
        return pts[0]
    if method == "wolfe":
        x = wolfe_min_norm(pts)
    else:
        x = min_norm_point_by_faces(pts)
    assert kkt_certificate(pts, x), "exact KKT certificate failed"
    return x


def kkt_certificate(points, x: Vec) -> bool:
    """Exact optimality certificate: <p, x> >= <x, x> for every point p."""
    xx = dot(x, x)
    return all(dot(p, x) >= xx for p in _as_points(points))


def hull_contains_origin(points, method: str = "minnorm") -> bool:
    """Whether the origin lies in the convex hull, by two independent routes.

    "minnorm" tests whether the minimum-norm point vanishes; "feasibility"
    runs an exact phase-1 simplex on the convex-combination system.
    """
    pts = _as_points(points)
    if method == "minnorm":
        return all(x == 0 for x in min_norm_point(pts))
    if method == "feasibility":
        dim = len(pts[0])
        columns = [tuple(p) + (Fraction(1),) for p in pts]
        target = tuple([Fraction(0)] * dim) + (Fraction(1),)
        return nonneg_combination_exists(columns, target)
    raise ValueError("method must be 'minnorm' or 'feasibility'")


def nonneg_combination_exists(columns, target) -> bool:
    """Exact phase-1 simplex: does some x >= 0 solve (columns as matrix) x = b?

    Columns and target are rational vectors of a common length.  Bland's rule
    keeps the run finite; arithmetic is exact throughout.
    """
    cols = [vec(c) for c in columns]
    b = vec(target)
    nrows, ncols = len(b), len(cols)
    # Flip rows so the right-hand side is nonnegative.
    rows = []
    rhs = []
    for i in range(nrows):
        sign = -1 if b[i] < 0 else 1
        rows.append([sign * cols[j][i] for j in range(ncols)])
        rhs.append(sign * b[i])
    # Tableau with artificial basis; minimise the artificial sum.
    tableau = [row + [Fraction(0)] * nrows + [rhs[i]] for i, row in enumerate(rows)]
    for i in range(nrows):
        tableau[i][ncols + i] = Fraction(1)
    basis = [ncols + i for i in range(nrows)]
    width = ncols + nrows
    cost = [Fraction(0)] * (width + 1)
    for i in range(nrows):
        for j in range(width + 1):
            cost[j] += tableau[i][j]
    while True:
        enter = next(
            (j for j in range(ncols) if cost[j] > 0), None
        )
        if enter is None:
            break
        ratios = [
            (tableau[i][width] / tableau[i][enter], i)
            for i in range(nrows)
            if tableau[i][enter] > 0
        ]
        if not ratios:
            break  # unbounded cannot happen in phase 1; defensive
        _, pivot_row = min(ratios, key=lambda t: (t[0], basis[t[1]]))
        piv = tableau[pivot_row][enter]
        tableau[pivot_row] = [x / piv for x in tableau[pivot_row]]
        for i in range(nrows):
            if i != pivot_row and tableau[i][enter] != 0:
                f = tableau[i][enter]
                tableau[i] = [
                    x - f * y for x, y in zip(tableau[i], tableau[pivot_row])
                ]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, tableau[pivot_row])]
        basis[pivot_row] = enter
    return cost[width] == 0


def index_set_B(
    weights,
    restrict_to_chamber: bool = True,
    cap: int = DEFAULT_SUPPORT_CAP,
    max_support_size: int | None = None,
    method: str = "wolfe",
) -> list[Vec]:
    """Closest-to-origin points of the hulls of all weight supports.

    Every nonempty subset of the (deduplicated) weights contributes the
    minimum-norm point of its hull; results are deduplicated and, when
    ``restrict_to_chamber`` is set, replaced by their weakly decreasing
    rearrangement, discarding representatives whose largest coordinate is
    negative (a nonzero trace-free closest point always has a positive
    largest coordinate, so nothing relevant is lost).  Returns a
    lexicographically sorted list.
    """
    pts = sorted(set(_as_points(weights)))
    n = len(pts)
    sizes = range(1, n + 1) if max_support_size is None else range(
        1, min(n, max_support_size) + 1
    )
    count = sum(math.comb(n, s) for s in sizes)
    if count > cap:
        raise CapExceeded(count, cap)
    found: set[Vec] = set()
    for size in sizes:
        for support in itertools.combinations(pts, size):
            v = min_norm_point(PointCloud.from_points(support), method=method)
            if restrict_to_chamber:
                rep = tuple(sorted(v, reverse=True))
                if rep and rep[0] < 0:
                    continue
                found.add(rep)
            else:
                found.add(v)
    return sorted(found)
