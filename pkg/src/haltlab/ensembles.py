"""Reproducible random matrix and random linear-system ensembles.

All Wigner-type samplers are normalized so that off-diagonal entries have
variance ``1/n`` and the limiting spectrum is the semicircle on ``[-2, 2]``.

Every draw is a pure function of ``(spec, seed_path)``.  The random stream
for a sample is a ``PCG64`` generator seeded through ``numpy``'s
``SeedSequence`` hash of ``(master_seed, sample_index)``; both algorithms
are fixed and platform independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import AspectTooSmall, ProfileInvalid

__all__ = [
    "KINDS",
    "EnsembleSpec",
    "SeedPath",
    "generator",
    "sample_goe",
    "sample_bernoulli_wigner",
    "sample_uniform_wigner",
    "sample_generalized_wigner",
    "sample_wishart_system",
    "sample",
    "flat_profile",
    "two_band_profile",
    "validate_profile",
]

KINDS = ("GOE", "BernoulliWigner", "UniformWigner", "GeneralizedWigner", "WishartSystem")


@dataclass(frozen=True)
class EnsembleSpec:
    """Which ensemble to draw from.

    ``extra`` holds kind-specific parameters:

    * ``GeneralizedWigner``: ``profile`` (an ``n x n`` array, or the name
      ``"flat"`` / ``"two_band"``).
    * ``WishartSystem``: ``aspect`` (``m/n``, default 2) and ``factor``
      (``"gaussian"`` or ``"bernoulli"``, default gaussian).
    """

    kind: str
    n: int
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        if int(self.n) < 1:
            raise ValueError("n must be positive")


@dataclass(frozen=True)
class SeedPath:
    master_seed: int
    sample_index: int

    def __str__(self):
        return f"{self.master_seed}:{self.sample_index}"


def generator(seed_path):
    """Independent ``numpy`` generator for one sample."""
    ss = np.random.SeedSequence([int(seed_path.master_seed) & (2**64 - 1),
                                 int(seed_path.sample_index)])
    return np.random.Generator(np.random.PCG64(ss))


def _wigner_from_upper(upper):
    # upper: full n x n draw; only its upper triangle (with diagonal) is used
    m = np.triu(upper)
    return m + np.triu(upper, 1).T


def _check_kind(spec, kind):
    if spec.kind != kind:
        raise ValueError(f"expected a {kind} spec, got {spec.kind}")


def sample_goe(spec, seed_path):
    """GOE draw: off-diagonal N(0, 1/n), diagonal N(0, 2/n)."""
    _check_kind(spec, "GOE")
    n = spec.n
    rng = generator(seed_path)
    g = rng.standard_normal((n, n)) / math.sqrt(n)
    m = _wigner_from_upper(g)
    m[np.diag_indices(n)] *= math.sqrt(2.0)
    return m


def sample_bernoulli_wigner(spec, seed_path):
    """Symmetric matrix with iid entries uniform on ``{-1/sqrt(n), +1/sqrt(n)}``.

    The diagonal uses the same law as the off-diagonal entries.
    """
    _check_kind(spec, "BernoulliWigner")
    n = spec.n
    rng = generator(seed_path)
    signs = rng.integers(0, 2, size=(n, n)) * 2.0 - 1.0
    return _wigner_from_upper(signs / math.sqrt(n))


def sample_uniform_wigner(spec, seed_path):
    """Symmetric matrix with iid entries uniform on ``[-sqrt(3/n), sqrt(3/n)]``."""
    _check_kind(spec, "UniformWigner")
    n = spec.n
    rng = generator(seed_path)
    half = math.sqrt(3.0 / n)
    return _wigner_from_upper(rng.uniform(-half, half, size=(n, n)))


def flat_profile(n):
    return np.full((n, n), 1.0 / n)


def two_band_profile(n, width=None, contrast=3.0):
    """Circulant two-level variance profile with unit row sums.

    Entries whose cyclic distance ``min(|i-j|, n-|i-j|)`` is at most
    ``width`` (default ``n // 4``) get ``contrast`` times the variance of
    the remaining entries.  Every row contains the same number of in-band
    entries, so one normalization constant makes all rows sum to 1.
    """
    if width is None:
        width = n // 4
    idx = np.arange(n)
    dist = np.abs(idx[:, None] - idx[None, :])
    dist = np.minimum(dist, n - dist)
    inband = dist <= width
    k = int(inband[0].sum())
    low = 1.0 / (contrast * k + (n - k))
    return np.where(inband, contrast * low, low)


def validate_profile(profile, n):
    s = np.asarray(profile, dtype=float)
    if s.shape != (n, n):
        raise ProfileInvalid(f"profile must have shape {(n, n)}, got {s.shape}")
    if not np.array_equal(s, s.T):
        raise ProfileInvalid("profile must be symmetric")
    if np.any(s < 0):
        raise ProfileInvalid("profile has negative entries")
    rows = s.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > 1e-12:
        raise ProfileInvalid("profile rows must sum to 1")
    return s


def _resolve_profile(spec):
    profile = spec.extra.get("profile", "two_band")
    if isinstance(profile, str):
        if profile == "flat":
            profile = flat_profile(spec.n)
        elif profile == "two_band":
            profile = two_band_profile(spec.n)
        else:
            raise ProfileInvalid(f"unknown named profile {profile!r}")
    return validate_profile(profile, spec.n)


def sample_generalized_wigner(spec, seed_path):
    """Gaussian Wigner matrix with entry variances ``s_ij`` from a profile.

    Raises
    ------
    ProfileInvalid
        If the profile is negative somewhere or a row does not sum to 1.
    """
    _check_kind(spec, "GeneralizedWigner")
    s = _resolve_profile(spec)
    rng = generator(seed_path)
    g = rng.standard_normal((spec.n, spec.n)) * np.sqrt(s)
    return _wigner_from_upper(g)


def sample_wishart_system(spec, seed_path):
    """Random SPD system ``(H, b)`` with ``H = X X^T / m``.

    ``X`` is ``n x m`` with ``m = ceil(aspect * n)`` and iid standard
    Gaussian or Rademacher entries; ``b`` is uniform on the unit sphere.
    """
    _check_kind(spec, "WishartSystem")
    n = spec.n
    aspect = float(spec.extra.get("aspect", 2.0))
    factor = spec.extra.get("factor", "gaussian")
    m = math.ceil(aspect * n)
    if m <= n:
        raise AspectTooSmall(f"need m > n, got m={m}, n={n}")
    rng = generator(seed_path)
    if factor == "gaussian":
        x = rng.standard_normal((n, m))
    elif factor == "bernoulli":
        x = rng.integers(0, 2, size=(n, m)) * 2.0 - 1.0
    else:
        raise ValueError(f"unknown Wishart factor {factor!r}")
    h = x @ x.T / m
    h = np.tril(h) + np.tril(h, -1).T
    b = rng.standard_normal(n)
    b /= np.linalg.norm(b)
    return h, b


_SAMPLERS = {
    "GOE": sample_goe,
    "BernoulliWigner": sample_bernoulli_wigner,
    "UniformWigner": sample_uniform_wigner,
    "GeneralizedWigner": sample_generalized_wigner,
    "WishartSystem": sample_wishart_system,
}


def sample(spec, seed_path):
    """Dispatch to the sampler for ``spec.kind``."""
    return _SAMPLERS[spec.kind](spec, seed_path)
