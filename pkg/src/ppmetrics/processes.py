"""Seedable point-process samplers.

Every sampler is a pure function of an :class:`RngStream` value: calling it
twice with the same stream reproduces the identical pattern bit for bit,
and distinct stream indices (or substream paths) yield statistically
independent draws. Monte Carlo drivers allocate one substream per
replicate, so runs parallelize deterministically.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import as_pattern
from .metrics import CountDistribution

__all__ = [
    "RngStream",
    "Window",
    "UNIT_SQUARE",
    "uniform_sampler",
    "sample_poisson_homogeneous",
    "sample_poisson_fkappa",
    "sample_bernoulli_process",
    "sample_binomial_process",
    "sample_iid_process",
    "sample_collection",
    "evolve_immigration_death",
]


@dataclass(frozen=True)
class RngStream:
    """Addressable randomness source: a seed plus a stream coordinate.

    ``substream(k)`` derives a child stream; children with distinct paths
    are independent. ``generator()`` always starts from the beginning of
    the stream, which is what makes samplers pure functions of the value.
    """

    seed: int
    stream_index: int = 0
    path: tuple = field(default=())

    def substream(self, k):
        return RngStream(self.seed, self.stream_index, self.path + (int(k),))

    def generator(self):
        seq = np.random.SeedSequence(
            entropy=int(self.seed), spawn_key=(int(self.stream_index),) + self.path
        )
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class Window:
    """Axis-aligned box in R^D, the carrier of the planar samplers."""

    lower: tuple = (0.0, 0.0)
    upper: tuple = (1.0, 1.0)

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size == 0:
            raise ValueError("window corners must be matching coordinate vectors")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("window corners must be finite")
        if not (lo < hi).all():
            raise ValueError("window must satisfy lower < upper coordinatewise")
        object.__setattr__(self, "lower", tuple(float(v) for v in lo))
        object.__setattr__(self, "upper", tuple(float(v) for v in hi))

    @property
    def dimension(self):
        return len(self.lower)

    def sample_uniform(self, n, gen):
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return lo + (hi - lo) * gen.random((n, self.dimension))

    @property
    def center(self):
        return tuple(
            0.5 * (a + b) for a, b in zip(self.lower, self.upper)
        )


UNIT_SQUARE = Window((0.0, 0.0), (1.0, 1.0))


def uniform_sampler(window=UNIT_SQUARE):
    """Location sampler drawing i.i.d. uniform points from the window."""

    def draw(n, gen):
        return window.sample_uniform(n, gen)

    return draw


def sample_poisson_homogeneous(lambda_total, window=UNIT_SQUARE, rng=RngStream(0)):
    """Homogeneous Poisson process: Poisson(lambda_total) count, uniform points."""
    if lambda_total <= 0:
        raise ValueError(f"lambda_total must be > 0, got {lambda_total}")
    gen = rng.generator()
    n = int(gen.poisson(lambda_total))
    return window.sample_uniform(n, gen)


def sample_poisson_fkappa(lambda_total, kappa, rng=RngStream(0)):
    """Poisson process on the unit square with a tilted first coordinate.

    The x-coordinates follow the normalized truncated-exponential density
    ``kappa * exp(-kappa x) / (1 - exp(-kappa))`` on [0, 1] (sampled by
    inverse CDF, stable for small kappa), the y-coordinates are uniform.
    """
    if lambda_total <= 0 or kappa <= 0:
        raise ValueError(
            f"lambda_total and kappa must be > 0, got ({lambda_total}, {kappa})"
        )
    gen = rng.generator()
    n = int(gen.poisson(lambda_total))
    u = gen.random(n)
    # x = -log(1 - u * (1 - e^{-kappa})) / kappa via expm1/log1p
    x = -np.log1p(u * np.expm1(-kappa)) / kappa
    y = gen.random(n)
    return np.column_stack([x, y]) if n else np.empty((0, 2))


def sample_bernoulli_process(n, p, rng=RngStream(0)):
    """Independent coin flips on the grid {1/n, 2/n, ..., 1} (1-d pattern)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    gen = rng.generator()
    keep = gen.random(n) < p
    grid = np.arange(1, n + 1, dtype=float) / n
    return grid[keep].reshape(-1, 1)


def sample_binomial_process(n, p, rng=RngStream(0)):
    """Binomial(n, p) count with i.i.d. uniform locations on [0, 1] (1-d)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    gen = rng.generator()
    count = int(gen.binomial(n, p))
    return gen.random((count, 1))


def sample_iid_process(counts, location_sampler, rng=RngStream(0)):
    """Pattern with a drawn count and i.i.d. locations, drawn independently.

    ``counts`` is a :class:`~ppmetrics.metrics.CountDistribution`;
    ``location_sampler(n, gen)`` must return an ``(n, D)`` array.
    """
    if not isinstance(counts, CountDistribution):
        raise ValueError("counts must be a CountDistribution")
    gen = rng.generator()
    count = int(gen.choice(np.asarray(counts.support), p=np.asarray(counts.probs)))
    return as_pattern(location_sampler(count, gen)) if count else _empty_like(
        location_sampler
    )


def _empty_like(location_sampler):
    # probe the sampler's dimension with a throwaway generator
    probe = np.asarray(location_sampler(1, np.random.default_rng(0)))
    return np.empty((0, probe.shape[1]))


def sample_collection(n_patterns, sampler, rng):
    """Draw ``n_patterns`` independent patterns, one substream each."""
    return [sampler(rng.substream(i)) for i in range(n_patterns)]


def evolve_immigration_death(initial, lambda_total, window=UNIT_SQUARE, t=0.0,
                             rng=RngStream(0)):
    """Exact time-``t`` marginal of the spatial immigration-death process.

    The process has constant immigration intensity ``lambda_total`` (uniform
    over the window) and unit per-capita death rate, so the time-``t`` state
    decomposes into independent thinning of the initial pattern with
    retention ``exp(-t)`` plus a fresh Poisson pattern with mean count
    ``lambda_total * (1 - exp(-t))``. No event-by-event simulation is run;
    the marginal law is exact. The stationary law (``t -> inf``) is the
    Poisson process with total intensity ``lambda_total``.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if lambda_total <= 0:
        raise ValueError(f"lambda_total must be > 0, got {lambda_total}")
    pts = as_pattern(initial, dim=window.dimension)
    gen = rng.generator()
    if t == 0:
        return pts.copy()
    keep = gen.random(len(pts)) < np.exp(-t)
    survivors = pts[keep]
    fresh_count = int(gen.poisson(lambda_total * -np.expm1(-t)))
    fresh = window.sample_uniform(fresh_count, gen)
    return np.vstack([survivors, fresh])
