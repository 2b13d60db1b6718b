import math

import numpy as np
import pytest

from haltlab.ensembles import (
    EnsembleSpec,
    SeedPath,
    flat_profile,
    sample,
    sample_bernoulli_wigner,
    sample_generalized_wigner,
    sample_goe,
    sample_uniform_wigner,
    sample_wishart_system,
    two_band_profile,
    validate_profile,
)
from haltlab.errors import AspectTooSmall, ProfileInvalid
from haltlab.linalg import eigen_oracle

WIGNER = ["GOE", "BernoulliWigner", "UniformWigner", "GeneralizedWigner"]


def mean_tr2(kind, n=200, draws=100, **extra):
    spec = EnsembleSpec(kind, n, extra)
    return np.mean([np.sum(sample(spec, SeedPath(5, i)) ** 2) / n for i in range(draws)])


def test_goe_degenerate_size():
    m = sample_goe(EnsembleSpec("GOE", 1), SeedPath(0, 0))
    assert m.shape == (1, 1) and np.isfinite(m[0, 0])


@pytest.mark.parametrize("kind", WIGNER)
def test_second_moment_normalization(kind):
    assert 0.95 <= mean_tr2(kind) <= 1.05


def test_goe_top_eigenvalue_near_edge():
    spec = EnsembleSpec("GOE", 200)
    lam1 = [eigen_oracle(sample_goe(spec, SeedPath(8, i))).eigenvalues[0] for i in range(100)]
    assert 1.85 <= np.mean(lam1) <= 2.00


def test_goe_entry_variances():
    spec = EnsembleSpec("GOE", 300)
    m = sample_goe(spec, SeedPath(2, 0))
    off = m[np.triu_indices(300, 1)]
    assert abs(off.var() * 300 - 1) < 0.05
    assert abs(np.diag(m).var() * 300 - 2) < 0.4


def test_bernoulli_support():
    m1 = sample_bernoulli_wigner(EnsembleSpec("BernoulliWigner", 1), SeedPath(0, 3))
    assert m1[0, 0] in (-1.0, 1.0)
    n = 50
    m = sample_bernoulli_wigner(EnsembleSpec("BernoulliWigner", n), SeedPath(0, 0))
    np.testing.assert_allclose(np.abs(m), 1 / math.sqrt(n), rtol=0, atol=0)


def test_uniform_wigner_range_and_mean():
    m1 = sample_uniform_wigner(EnsembleSpec("UniformWigner", 1), SeedPath(0, 0))
    assert abs(m1[0, 0]) <= math.sqrt(3)
    m = sample_uniform_wigner(EnsembleSpec("UniformWigner", 200), SeedPath(0, 1))
    assert np.all(np.abs(m) <= math.sqrt(3 / 200))
    assert -0.02 <= m.mean() <= 0.02


def test_profiles_valid():
    for n in (2, 7, 40, 200):
        validate_profile(two_band_profile(n), n)
        validate_profile(flat_profile(n), n)
    s = two_band_profile(40)
    assert s.max() / s.min() == pytest.approx(3.0)


def test_profile_invalid():
    n = 4
    bad = flat_profile(n) * 1.1
    with pytest.raises(ProfileInvalid):
        validate_profile(bad, n)
    neg = flat_profile(n)
    neg[0, 1] = neg[1, 0] = -0.1
    neg[0, 0] = neg[1, 1] = 0.25 + 0.35
    with pytest.raises(ProfileInvalid):
        validate_profile(neg, n)
    with pytest.raises(ProfileInvalid):
        sample_generalized_wigner(EnsembleSpec("GeneralizedWigner", n, {"profile": bad}), SeedPath(0, 0))


def test_flat_profile_matches_goe_off_diagonal_law():
    n = 300
    m = sample_generalized_wigner(EnsembleSpec("GeneralizedWigner", n, {"profile": "flat"}), SeedPath(1, 0))
    off = m[np.triu_indices(n, 1)]
    assert abs(off.var() * n - 1) < 0.05


def test_wishart_trivial_and_positive():
    h, b = sample_wishart_system(EnsembleSpec("WishartSystem", 1, {"aspect": 2}), SeedPath(0, 0))
    assert h.shape == (1, 1) and h[0, 0] > 0 and abs(b[0]) == 1.0
    for factor in ("gaussian", "bernoulli"):
        spec = EnsembleSpec("WishartSystem", 30, {"aspect": 2, "factor": factor})
        for i in range(5):
            h, b = sample_wishart_system(spec, SeedPath(3, i))
            assert np.all(eigen_oracle(h).eigenvalues > 0)
            assert np.linalg.norm(b) == pytest.approx(1.0, abs=1e-14)
            assert np.array_equal(h, h.T)


def test_wishart_marchenko_pastur_edge():
    spec = EnsembleSpec("WishartSystem", 100, {"aspect": 2})
    lam1 = [eigen_oracle(sample_wishart_system(spec, SeedPath(9, i))[0]).eigenvalues[0] for i in range(100)]
    assert 2.6 <= np.mean(lam1) <= 3.2


def test_wishart_aspect_too_small():
    with pytest.raises(AspectTooSmall):
        sample_wishart_system(EnsembleSpec("WishartSystem", 10, {"aspect": 1.0}), SeedPath(0, 0))


@pytest.mark.parametrize("kind", WIGNER + ["WishartSystem"])
def test_determinism_and_symmetry(kind):
    spec = EnsembleSpec(kind, 12)
    a = sample(spec, SeedPath(123, 4))
    b = sample(spec, SeedPath(123, 4))
    c = sample(spec, SeedPath(123, 5))
    if kind == "WishartSystem":
        (a, ab), (b, bb), (c, _) = a, b, c
        assert np.array_equal(ab, bb)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.array_equal(a, a.T)


def test_unknown_kind():
    with pytest.raises(ValueError):
        EnsembleSpec("GUE", 4)
