"""Halting-time statistics.

Normalization, empirical CDFs and two-sample KS distances, histograms,
top-gap statistics and the ``(epsilon, N)`` scaling-region test.  The
ensemble constant that multiplies both the scaled gap and the scaled Toda
time is left out of both on purpose: it cancels in every comparison made
here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGap, DegenerateSample, ScalingViolation

__all__ = [
    "EmpiricalDistribution",
    "Histogram",
    "GapSample",
    "normalize_times",
    "ks_distance",
    "freedman_diaconis_edges",
    "histogram",
    "gap_statistic",
    "scaled_t1",
    "check_scaling_region",
    "clt_sanity",
]

GAP_THRESHOLD = 1e-14


@dataclass(frozen=True)
class EmpiricalDistribution:
    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size < 2:
            raise ValueError("an empirical distribution needs at least two samples")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def cdf(self, x):
        """Right-continuous ECDF evaluated at ``x``."""
        return np.searchsorted(self.values, x, side="right") / self.values.size


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    normalization: str = "count"

    @property
    def widths(self):
        return np.diff(self.bin_edges)

    @property
    def density(self):
        total = self.counts.sum()
        return self.counts / (total * self.widths)

    @property
    def values(self):
        return self.counts if self.normalization == "count" else self.density


@dataclass(frozen=True)
class GapSample:
    lambda1: float
    lambda2: float
    n: int
    scaled_inverse_gap: float


def normalize_times(samples):
    """Center by the sample mean and scale by the sample SD (``n-1`` denominator).

    Raises
    ------
    DegenerateSample
        For fewer than two samples or zero spread.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise DegenerateSample("need at least two samples")
    sd = x.std(ddof=1)
    if sd == 0 or not np.isfinite(sd):
        raise DegenerateSample("sample standard deviation is zero")
    return (x - x.mean()) / sd


def _sorted(a):
    if isinstance(a, EmpiricalDistribution):
        return a.values
    v = np.sort(np.asarray(a, dtype=float).ravel())
    if v.size == 0:
        raise ValueError("empty sample")
    return v


def ks_distance(a, b):
    """Two-sample Kolmogorov-Smirnov distance ``sup_x |F_a(x) - F_b(x)|``.

    Exact: both ECDFs are step functions, so the supremum is attained at
    one of the pooled sample points.
    """
    a = _sorted(a)
    b = _sorted(b)
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def freedman_diaconis_edges(values):
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        return np.array([lo - 0.5, hi + 0.5])
    q75, q25 = np.percentile(v, [75, 25])
    width = 2.0 * (q75 - q25) * v.size ** (-1.0 / 3.0)
    nbins = 1 if width <= 0 else max(1, int(math.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, nbins + 1)


def histogram(values, bins=None, normalization="count"):
    """Bin ``values``.

    ``bins`` may be a bin count, an explicit ascending edge array, or
    ``None`` for Freedman-Diaconis edges spanning ``[min, max]``.  A value
    on an interior edge lands in the bin to its right; the maximum edge is
    closed so the largest value lands in the last bin.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("histogram of an empty sample")
    if normalization not in ("count", "density"):
        raise ValueError("normalization must be 'count' or 'density'")
    if bins is None:
        edges = freedman_diaconis_edges(v)
    elif np.isscalar(bins):
        nb = int(bins)
        if nb < 1:
            raise ValueError("bin count must be at least 1")
        lo, hi = float(v.min()), float(v.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, nb + 1)
    else:
        edges = np.asarray(bins, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly ascending with at least two entries")
    if v.min() < edges[0] or v.max() > edges[-1]:
        raise ValueError("values fall outside the bin edges")
    nb = edges.size - 1
    idx = np.searchsorted(edges, v, side="right") - 1
    idx[idx >= nb] = nb - 1
    counts = np.bincount(idx, minlength=nb)
    return Histogram(edges, counts, normalization)


def gap_statistic(eig, n=None):
    """Top gap on the edge scale: ``1 / (n**(2/3) (lambda1 - lambda2))``.

    ``eig`` is an :class:`~haltlab.linalg.EigenDecomposition` or a
    descending eigenvalue array.
    """
    lam = np.asarray(getattr(eig, "eigenvalues", eig), dtype=float)
    if n is None:
        n = lam.size
    if n < 2 or lam.size < 2:
        raise ValueError("gap needs at least two eigenvalues")
    l1, l2 = float(lam[0]), float(lam[1])
    gap = l1 - l2
    if gap <= GAP_THRESHOLD:
        raise DegenerateGap(f"top gap {gap:g} below {GAP_THRESHOLD:g}")
    return GapSample(l1, l2, int(n), 1.0 / (n ** (2.0 / 3.0) * gap))


def scaled_t1(t1, n, epsilon):
    """``t1 / (n**(2/3) (log(1/epsilon) - (2/3) log n))``."""
    denom = n ** (2.0 / 3.0) * (math.log(1.0 / epsilon) - (2.0 / 3.0) * math.log(n))
    if denom <= 0:
        raise ScalingViolation(f"log(1/eps) - (2/3) log n <= 0 for eps={epsilon:g}, n={n}")
    return np.asarray(t1, dtype=float) / denom if np.ndim(t1) else float(t1) / denom


def check_scaling_region(epsilon, n, sigma):
    """Whether ``log(1/epsilon) / log(n) >= 5/3 + sigma/2``."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < sigma < 1:
        raise ValueError("sigma must lie in (0, 1)")
    return math.log(1.0 / epsilon) / math.log(n) >= 5.0 / 3.0 + sigma / 2.0


def clt_sanity(n_terms, n_samples=2000, base="gaussian", seed=0):
    """KS distance between normalized iid sums and a Gaussian sample.

    Exercises the normalization + KS pipeline on a case with a known
    limit.  ``base`` is one of ``gaussian``, ``bernoulli`` (Rademacher),
    ``uniform`` or ``exponential``.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    rng = np.random.default_rng(seed)
    shape = (n_samples, n_terms)
    if base == "gaussian":
        draws = rng.standard_normal(shape)
    elif base == "bernoulli":
        draws = rng.integers(0, 2, size=shape) * 2.0 - 1.0
    elif base == "uniform":
        draws = rng.uniform(-1.0, 1.0, size=shape)
    elif base == "exponential":
        draws = rng.exponential(size=shape)
    else:
        raise ValueError(f"unknown base law {base!r}")
    sums = draws.sum(axis=1)
    reference = rng.standard_normal(n_samples)
    return ks_distance(normalize_times(sums), reference)
