"""Distances between point patterns and between their distributions.

``d1`` is the classical normalized matching distance that jumps to 1 as
soon as two patterns differ in cardinality; ``dbar1`` refines it by charging
each unmatched point the cutoff instead, blending positional error with the
relative difference in counts. ``dbar1_pc`` generalizes to an order
parameter ``p`` and a cutoff ``c``; note that it normalizes by ``1/n``
*outside* the p-th root, exactly as defined here (for ``p > 1`` this differs
from the OSPA convention that puts ``1/n`` inside the root).

``dbar2_empirical`` lifts the pattern distance to uniform empirical
distributions of patterns, where the Wasserstein distance reduces to one
pattern-level assignment problem; ``dRW`` is the analogous lift of the
relative count difference ``dR`` to count distributions.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from scipy.stats import binom, poisson

from .assignment import solve_transportation
from .geometry import GroundMetricSpec, as_pattern, common_dimension

__all__ = [
    "MetricParams",
    "CountDistribution",
    "d1",
    "dbar1",
    "dbar1_pc",
    "dR",
    "dRW",
    "dbar2_empirical",
    "dbar2_transport",
    "dW_empirical",
    "pattern_distance_matrix",
    "matching_details",
    "MAX_DBAR2_CELLS",
]

# N * M cap for the unequal-size transportation fallback of dbar2
MAX_DBAR2_CELLS = 250_000


@dataclass(frozen=True)
class MetricParams:
    """Order parameter ``p >= 1`` and cutoff ``c > 0`` for ``dbar1_pc``."""

    order: float = 1.0
    cutoff: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.order) or self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if not np.isfinite(self.cutoff) or self.cutoff <= 0:
            raise ValueError(f"cutoff must be > 0, got {self.cutoff}")


@dataclass(frozen=True)
class CountDistribution:
    """Finitely supported probability distribution on the nonnegative integers."""

    support: tuple
    probs: tuple

    def __post_init__(self):
        sup = np.asarray(self.support)
        pr = np.asarray(self.probs, dtype=float)
        if sup.ndim != 1 or pr.ndim != 1 or sup.size != pr.size or sup.size == 0:
            raise ValueError("support and probs must be matching nonempty vectors")
        if not np.array_equal(sup, sup.astype(int)) or (sup < 0).any():
            raise ValueError("support must consist of nonnegative integers")
        if len(np.unique(sup)) != sup.size or (np.diff(sup) <= 0).any():
            raise ValueError("support must be strictly ascending and distinct")
        if (pr < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if abs(math.fsum(pr.tolist()) - 1.0) > 1e-10:
            raise ValueError("probabilities must sum to 1 within 1e-10")
        object.__setattr__(self, "support", tuple(int(k) for k in sup))
        object.__setattr__(self, "probs", tuple(float(p) for p in pr))

    @classmethod
    def delta(cls, k):
        """Point mass at the count ``k``."""
        return cls(support=(int(k),), probs=(1.0,))

    @classmethod
    def binomial(cls, n, p):
        """Binomial(n, p) counts on the full support 0..n."""
        ks = np.arange(n + 1)
        pr = binom.pmf(ks, n, p)
        return cls(support=tuple(ks), probs=tuple(pr / pr.sum()))

    @classmethod
    def poisson_truncated(cls, lam, tail=1e-9):
        """Poisson(lam) truncated at its ``1 - tail`` quantile, renormalized.

        The truncation perturbs any transportation value built on this pmf
        by at most ``2 * tail``.
        """
        if lam <= 0:
            raise ValueError(f"lam must be > 0, got {lam}")
        kmax = int(poisson.ppf(1.0 - tail, lam))
        ks = np.arange(kmax + 1)
        pr = poisson.pmf(ks, lam)
        return cls(support=tuple(ks), probs=tuple(pr / pr.sum()))

    def prob_positive(self):
        """Probability of a strictly positive count."""
        return math.fsum(p for k, p in zip(self.support, self.probs) if k > 0)


def _theory_warning(cutoff):
    if cutoff > 1:
        warnings.warn(
            f"cutoff {cutoff} > 1: distances are bounded by the cutoff, "
            "not by 1, and the theory-mode guarantees do not apply",
            stacklevel=3,
        )


def _ground_matrix(xi, eta, spec):
    """Pairwise ground distances; plain Euclidean when spec is None."""
    if len(xi) == 0 or len(eta) == 0:
        return np.empty((len(xi), len(eta)))
    d = cdist(xi, eta)
    if spec is not None:
        np.minimum(d, spec.cap, out=d)
    return d


def _pc_value(a, b, p, c, spec):
    """(p, c) matching distance of two validated patterns."""
    if len(a) > len(b):
        a, b = b, a
    m, n = len(a), len(b)
    if n == 0:
        return 0.0
    if m == 0:
        total = n * c ** p
    else:
        d = cdist(a, b)
        if spec is not None:
            np.minimum(d, spec.cap, out=d)
        np.minimum(d, c, out=d)
        if p != 1.0:
            np.power(d, p, out=d)
        total, _, _ = _padded_min_cost(d, c ** p)
    return total ** (1.0 / p) / n


def _padded_min_cost(costs, fill):
    """Minimum injection cost of the smaller side plus fill per unmatched.

    ``costs`` has shape (m, n) with m <= n; returns (total, rows, cols)
    where total includes ``(n - m) * fill`` and (rows, cols) is the matched
    block of the optimal square assignment on the fill-padded matrix.
    """
    m, n = costs.shape
    if m == n:
        rows, cols = linear_sum_assignment(costs)
        return math.fsum(costs[rows, cols].tolist()), rows, cols
    padded = np.full((n, n), fill)
    padded[:m, :] = costs
    rows, cols = linear_sum_assignment(padded)
    matched = rows < m
    total = math.fsum(costs[rows[matched], cols[matched]].tolist()) + (n - m) * fill
    return total, rows[matched], cols[matched]


def d1(xi, eta, spec=GroundMetricSpec()):
    """Normalized matching distance; exactly 1 when cardinalities differ.

    For two patterns of common size ``n >= 1`` this is the mean ground
    distance under an optimal pairing; ``d1(empty, empty) = 0``.
    """
    xi = as_pattern(xi)
    eta = as_pattern(eta)
    common_dimension(xi, eta)
    _theory_warning(spec.cap)
    if len(xi) != len(eta):
        return 1.0
    return _pc_value(xi, eta, 1.0, spec.cap, None)


def dbar1(xi, eta, spec=GroundMetricSpec()):
    """Matching distance with unmatched points charged the cutoff.

    With ``m = min(|xi|, |eta|)`` and ``n = max(...) >= 1`` this equals
    ``(min over injections of the m matched ground distances + (n - m)
    * cap) / n``; both patterns empty gives 0.
    """
    xi = as_pattern(xi)
    eta = as_pattern(eta)
    common_dimension(xi, eta)
    _theory_warning(spec.cap)
    return _pc_value(xi, eta, 1.0, spec.cap, None)


def dbar1_pc(xi, eta, params=MetricParams(), spec=None):
    """Order-``p`` cutoff-``c`` matching distance between two patterns.

    Value is ``(min over injections of sum(min(c, d0)^p) + c^p (n - m))
    ** (1/p) / n``; the ground distance ``d0`` is plain Euclidean unless a
    ``spec`` imposes an additional cap. The normalization divides by ``n``
    after taking the p-th root, so for any inputs the value is at most
    ``c`` (and at most ``c * n**(1/p - 1)``).
    """
    xi = as_pattern(xi)
    eta = as_pattern(eta)
    common_dimension(xi, eta)
    _theory_warning(params.cutoff)
    return _pc_value(xi, eta, params.order, params.cutoff, spec)


def matching_details(xi, eta, params=MetricParams(), spec=None, metric="dbar1"):
    """Distance plus the optimal pairing, for reporting.

    Returns ``(value, pairs)`` where ``pairs`` is a list of ``(i, j)`` with
    ``i`` an index into ``xi`` or None (unmatched) and likewise ``j`` for
    ``eta``. For ``metric="d1"`` with differing cardinalities there is no
    pairing and the list is empty.
    """
    xi = as_pattern(xi)
    eta = as_pattern(eta)
    common_dimension(xi, eta)
    p, c = params.order, params.cutoff
    m, n = len(xi), len(eta)
    if metric == "d1" and m != n:
        return c, []
    if max(m, n) == 0:
        return 0.0, []
    swapped = m > n
    a, b = (eta, xi) if swapped else (xi, eta)
    costs = np.minimum(_ground_matrix(a, b, spec), c) ** p
    total, rows, cols = _padded_min_cost(costs, c ** p)
    value = total ** (1.0 / p) / max(m, n)
    matched_b = set()
    pairs = []
    for i, j in zip(rows.tolist(), cols.tolist()):
        matched_b.add(j)
        pairs.append((j, i) if swapped else (i, j))
    for j in range(len(b)):
        if j not in matched_b:
            pairs.append((None, j) if not swapped else (j, None))
    return value, sorted(pairs, key=lambda t: (t[0] is None, t[0], t[1]))


def dR(m, n):
    """Relative count difference ``|m - n| / max(m, n)``; ``dR(0, 0) = 0``."""
    m, n = int(m), int(n)
    if m < 0 or n < 0:
        raise ValueError(f"counts must be nonnegative, got ({m}, {n})")
    if max(m, n) == 0:
        return 0.0
    return abs(m - n) / max(m, n)


def dRW(mu, nu):
    """Wasserstein lift of ``dR`` between two count distributions.

    Returns ``(value, coupling)`` where the coupling is an optimal
    transport plan over the product of the two supports attaining the value.
    """
    if not isinstance(mu, CountDistribution) or not isinstance(nu, CountDistribution):
        raise ValueError("dRW expects CountDistribution inputs")
    ms = np.asarray(mu.support, dtype=float)
    ns = np.asarray(nu.support, dtype=float)
    denom = np.maximum.outer(ms, ns)
    with np.errstate(invalid="ignore", divide="ignore"):
        cost = np.abs(np.subtract.outer(ms, ns)) / denom
    cost[denom == 0] = 0.0
    plan = solve_transportation(mu.probs, nu.probs, cost)
    return plan.total_cost, plan


def _pattern_metric(params, spec, metric):
    p, c = params.order, params.cutoff
    if metric == "d1":
        def dist(a, b):
            if len(a) != len(b):
                return c
            return _pc_value(a, b, p, c, spec)
    else:
        def dist(a, b):
            return _pc_value(a, b, p, c, spec)
    return dist


def _as_collection(patterns):
    pats = [as_pattern(p) for p in patterns]
    if len(pats) == 0:
        raise ValueError("a pattern collection must contain at least one pattern")
    common_dimension(*pats)
    return pats


def pattern_distance_matrix(ps, qs, params=MetricParams(), spec=None, metric="dbar1"):
    """Matrix of pairwise pattern distances between two collections."""
    if metric not in ("dbar1", "d1"):
        raise ValueError(f"unknown pattern metric {metric!r}")
    ps = _as_collection(ps)
    qs = _as_collection(qs)
    common_dimension(*ps, *qs)
    dist = _pattern_metric(params, spec, metric)
    out = np.empty((len(ps), len(qs)))
    for i, a in enumerate(ps):
        for j, b in enumerate(qs):
            out[i, j] = dist(a, b)
    return out


def dbar2_empirical(ps, qs, params=MetricParams(), spec=None, metric="dbar1"):
    """Wasserstein distance between two uniform empirical pattern collections.

    For equal collection sizes ``N`` this is the mean pattern distance under
    an optimal pattern-level pairing (one N x N assignment). Unequal sizes
    are rejected; use :func:`dbar2_transport` for that case.
    """
    if len(ps) != len(qs):
        raise ValueError(
            f"collections have sizes {len(ps)} and {len(qs)}; unequal sizes "
            "require the transportation route, see dbar2_transport"
        )
    dmat = pattern_distance_matrix(ps, qs, params, spec, metric)
    total, _, _ = _padded_min_cost(dmat, 0.0)
    return total / len(ps)


def dbar2_transport(ps, qs, params=MetricParams(), spec=None, metric="dbar1"):
    """Wasserstein distance between uniform empirical collections of any sizes.

    Solves the transportation problem with uniform weights over the
    ``N x M`` matrix of pattern distances; limited to ``N * M`` up to
    ``MAX_DBAR2_CELLS`` cells.
    """
    if len(ps) * len(qs) > MAX_DBAR2_CELLS:
        raise ValueError(
            f"{len(ps)} x {len(qs)} exceeds the {MAX_DBAR2_CELLS}-cell limit"
        )
    dmat = pattern_distance_matrix(ps, qs, params, spec, metric)
    n, m = dmat.shape
    plan = solve_transportation(np.full(n, 1.0 / n), np.full(m, 1.0 / m), dmat)
    return plan.total_cost


def dW_empirical(xs, ys, spec=GroundMetricSpec()):
    """Empirical Wasserstein distance between two equal-size point samples.

    The mean capped ground distance under an optimal one-to-one matching of
    the samples; a consistent estimator of the Wasserstein distance between
    the sampled location distributions.
    """
    xs = as_pattern(xs)
    ys = as_pattern(ys)
    common_dimension(xs, ys)
    if len(xs) != len(ys):
        raise ValueError(f"sample sizes differ: {len(xs)} vs {len(ys)}")
    if len(xs) == 0:
        raise ValueError("samples must be nonempty")
    total, _, _ = _padded_min_cost(_ground_matrix(xs, ys, spec), spec.cap)
    return total / len(xs)
