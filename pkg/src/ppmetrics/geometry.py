"""Ground distances on R^D and the geometric primitives built on them.

A point pattern is represented throughout the package as a float ndarray of
shape ``(m, D)``; an empty pattern has ``m == 0``. The ground distance is
the Euclidean distance capped at a cutoff value, which keeps every
point-level distance in ``[0, cap]``.
"""

import random
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatchError

__all__ = [
    "GroundMetricSpec",
    "Ball",
    "as_pattern",
    "ground_distance",
    "pairwise_ground_distances",
    "min_enclosing_ball",
    "capped_ball_diameter",
    "nn_distances",
]


@dataclass(frozen=True)
class GroundMetricSpec:
    """Capped Euclidean ground distance ``min(|x - y|, cap)``.

    ``theory_mode=True`` enforces ``cap <= 1``, the regime in which the
    pattern metrics built on top are bounded by 1 and all metric-theoretic
    guarantees hold.
    """

    cap: float = 1.0
    dimension: int = 2
    theory_mode: bool = True

    def __post_init__(self):
        if not np.isfinite(self.cap) or self.cap <= 0:
            raise ValueError(f"cap must be a finite positive real, got {self.cap}")
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.theory_mode and self.cap > 1:
            raise ValueError(
                "theory mode requires cap <= 1; construct with theory_mode=False "
                "to use a larger cutoff"
            )


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball given by center and radius."""

    center: np.ndarray
    radius: float


def as_pattern(points, dim=None):
    """Validate and convert a point pattern to a float64 ``(m, D)`` array.

    ``points`` may be an ndarray, a sequence of coordinate sequences, or an
    empty sequence (``dim`` then fixes the dimension; it defaults to 1).
    Duplicated points are allowed; patterns are counted multisets.
    """
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        d = int(dim) if dim is not None else (arr.shape[1] if arr.ndim == 2 else 1)
        return np.empty((0, d))
    if arr.ndim == 1:
        # a flat sequence is read as m one-dimensional points
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"pattern must be a (m, D) array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("pattern contains non-finite coordinates")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatchError(
            f"pattern has dimension {arr.shape[1]}, expected {dim}"
        )
    return arr


def common_dimension(*patterns):
    """Shared coordinate dimension of the given patterns.

    Empty patterns are dimension-agnostic and match anything; if all
    patterns are empty the reported dimension is that of the first.
    """
    dims = {p.shape[1] for p in patterns if len(p) > 0}
    if len(dims) > 1:
        raise DimensionMismatchError(f"patterns mix dimensions {sorted(dims)}")
    if dims:
        return dims.pop()
    return patterns[0].shape[1]


def ground_distance(x, y, spec=GroundMetricSpec()):
    """Capped Euclidean distance ``min(|x - y|, cap)`` between two points."""
    xa = np.asarray(x, dtype=float).ravel()
    ya = np.asarray(y, dtype=float).ravel()
    if xa.shape != ya.shape:
        raise DimensionMismatchError(
            f"points have dimensions {xa.size} and {ya.size}"
        )
    if not (np.isfinite(xa).all() and np.isfinite(ya).all()):
        raise ValueError("points contain non-finite coordinates")
    return min(float(np.linalg.norm(xa - ya)), spec.cap)


def pairwise_ground_distances(xi, eta, spec=GroundMetricSpec()):
    """Matrix of capped Euclidean distances between two patterns."""
    xi = as_pattern(xi)
    eta = as_pattern(eta)
    common_dimension(xi, eta)
    if len(xi) == 0 or len(eta) == 0:
        return np.empty((len(xi), len(eta)))
    return np.minimum(cdist(xi, eta), spec.cap)


def _circle_two(a, b):
    center = 0.5 * (a + b)
    radius = float(np.linalg.norm(a - b)) / 2.0
    return Ball(center, radius)


def _circle_three(a, b, c):
    # circumcircle; None for (near-)collinear triples
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    center = np.array([ux, uy])
    radius = float(np.linalg.norm(center - a))
    return Ball(center, radius)


def _ball_of_boundary(boundary):
    if not boundary:
        return Ball(np.zeros(2), 0.0)
    if len(boundary) == 1:
        return Ball(np.array(boundary[0], dtype=float), 0.0)
    if len(boundary) == 2:
        return _circle_two(np.asarray(boundary[0]), np.asarray(boundary[1]))
    ball = _circle_three(*(np.asarray(p) for p in boundary))
    if ball is None:
        # collinear support: widest pair already encloses the third
        best = None
        pts = [np.asarray(p) for p in boundary]
        for i in range(3):
            for j in range(i + 1, 3):
                cand = _circle_two(pts[i], pts[j])
                if _contains(cand, pts[3 - i - j]):
                    if best is None or cand.radius < best.radius:
                        best = cand
        return best
    return ball


def _contains(ball, point, tol=1e-12):
    return float(np.linalg.norm(point - ball.center)) <= ball.radius * (1 + tol) + tol


def _welzl(points, boundary, rnd):
    if not points or len(boundary) == 3:
        return _ball_of_boundary(boundary)
    p = points.pop(rnd.randrange(len(points)))
    ball = _welzl(points, boundary, rnd)
    if ball is not None and _contains(ball, p):
        points.append(p)
        return ball
    ball = _welzl(points, boundary + [p], rnd)
    points.append(p)
    return ball


def min_enclosing_ball(points):
    """Smallest enclosing ball of a planar point set (Welzl's algorithm).

    Only ``D == 2`` is supported. The internal shuffle uses a fixed seed so
    repeated calls on the same input return the identical ball.
    """
    pts = as_pattern(points)
    if len(pts) == 0:
        raise ValueError("min_enclosing_ball requires at least one point")
    if pts.shape[1] != 2:
        raise ValueError(
            f"min_enclosing_ball supports dimension 2 only, got {pts.shape[1]}"
        )
    if len(pts) == 1:
        return Ball(pts[0].copy(), 0.0)
    rnd = random.Random(0x5EB)
    order = list(pts)
    rnd.shuffle(order)
    ball = _welzl(order, [], rnd)
    # guard against accumulated tolerance slack: grow to cover every input
    reach = float(np.max(np.linalg.norm(pts - ball.center, axis=1)))
    return Ball(ball.center, max(ball.radius, reach))


def capped_ball_diameter(ball, cap=1.0):
    """Diameter of a ball under the capped metric: ``min(2 * radius, cap)``."""
    return min(2.0 * ball.radius, cap)


def nn_distances(pattern, spec=GroundMetricSpec()):
    """Capped nearest-neighbor distance of every point in a pattern.

    Entry ``i`` is ``min over j != i`` of the ground distance from point
    ``i`` to point ``j``; a duplicated point has nearest-neighbor distance
    exactly 0. Requires at least two points.
    """
    pts = as_pattern(pattern)
    if len(pts) < 2:
        raise ValueError("nn_distances requires at least 2 points")
    dmat = cdist(pts, pts)
    np.fill_diagonal(dmat, np.inf)
    return np.minimum(dmat.min(axis=1), spec.cap)
