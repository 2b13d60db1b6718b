import numpy as np
import pytest

from haltlab.discrete import (
    block_norms,
    cg_halting_time,
    cg_residuals,
    compute_spectrum_with_deflation,
    deflation_time,
    deflation_time_k,
    iterate,
    jacobi_step,
    off_norm2,
    qr_shifted_step,
    qr_step,
)
from haltlab.ensembles import EnsembleSpec, SeedPath, sample_wishart_system
from haltlab.errors import IterationLimitExceeded, NotPositiveDefinite
from haltlab.linalg import eigen_oracle

from conftest import goe, random_symmetric

A = np.array([[2.0, 1.0], [1.0, 2.0]])


def test_qr_step_examples():
    np.testing.assert_array_equal(qr_step(np.diag([3.0, 1.0])), np.diag([3.0, 1.0]))
    np.testing.assert_allclose(qr_step(A), [[2.8, 0.6], [0.6, 1.2]], atol=1e-12)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(qr_step(swap), swap, atol=1e-15)


def test_qr_shifted_step_examples():
    d = np.diag([3.0, -1.0, 0.5])
    np.testing.assert_allclose(qr_shifted_step(d), d, atol=1e-15)
    assert abs(qr_shifted_step(A)[1, 0]) < abs(qr_step(A)[1, 0])


def test_shifted_qr_deflates_faster():
    shifted, plain = [], []
    for i in range(50):
        m = goe(30, i)
        shifted.append(deflation_time(m, 1e-10, "QRShifted").t)
        plain.append(deflation_time(m, 1e-10, "QR").t)
    assert np.median(shifted) < np.median(plain)


def test_jacobi_examples(rng):
    d = np.diag([1.0, 4.0])
    np.testing.assert_array_equal(jacobi_step(d), d)
    np.testing.assert_allclose(jacobi_step(A), np.diag([3.0, 1.0]), atol=1e-15)
    x = random_symmetric(rng, 10)
    for _ in range(30):
        big = np.max(np.abs(np.triu(x, 1)))
        y = jacobi_step(x)
        assert off_norm2(y) == pytest.approx(off_norm2(x) - 2 * big**2, rel=1e-13, abs=1e-13)
        assert np.array_equal(y, y.T)
        x = y


def test_jacobi_pivot_tie_break():
    x = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    y = jacobi_step(x)
    assert y[0, 1] == 0.0


@pytest.mark.parametrize("algorithm", ["QR", "QRShifted", "Jacobi"])
def test_isospectral_steps(algorithm):
    m = goe(10, 7)
    ref = eigen_oracle(m).eigenvalues
    tol = 1e-10 * 10 * np.linalg.norm(m)
    for k, x in enumerate(iterate(m, algorithm)):
        if k % 10 == 0:
            assert np.max(np.abs(eigen_oracle(x).eigenvalues - ref)) <= tol
        assert np.array_equal(x, x.T)
        if k == 50:
            break


def test_block_norms_brute_force(rng):
    for n in (2, 3, 9):
        x = random_symmetric(rng, n)
        expect = [np.linalg.norm(x[:k, k:]) for k in range(1, n)]
        np.testing.assert_allclose(block_norms(x), expect, rtol=1e-13)


def test_deflation_time_k_examples():
    assert deflation_time_k(np.diag([1.0, 2.0, 3.0]), 2, 1e-12) == 0
    assert deflation_time_k(A, 1, 1.0) == 0
    assert deflation_time_k(A, 1, 0.5) == 2


def test_deflation_time_toda_delegates():
    t = deflation_time_k(np.array([[0.0, 1.0], [1.0, 0.0]]), 1, 1e-4, "Toda")
    assert t == pytest.approx(np.arccosh(1e4) / 2, abs=1e-9)
    with pytest.raises(ValueError):
        deflation_time_k(np.eye(3), 2, 1e-4, "Toda")


def test_deflation_time_examples():
    rec = deflation_time(np.diag([1.0, 2.0, 3.0]), 1e-12)
    assert (rec.t, rec.k_hat) == (0, 1)
    rec = deflation_time(A, 0.5)
    assert (rec.t, rec.k_hat) == (2, 1)
    assert rec.block_norm <= 0.5


def test_deflation_time_equals_min_over_k_goe10():
    m = goe(10, 1)
    rec = deflation_time(m, 1e-10, "QR")
    ks = [deflation_time_k(m, k, 1e-10, "QR") for k in range(1, 10)]
    assert rec.t == min(ks)
    assert rec.k_hat == 1 + int(np.argmin(ks))


def test_iteration_limit():
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(IterationLimitExceeded):
        deflation_time(swap, 1e-3, "QR", max_steps=50)


def test_spectrum_diagonal():
    est = compute_spectrum_with_deflation(np.diag([1.0, 5.0, -2.0, 0.5]), 1e-10, "QR")
    np.testing.assert_array_equal(est.eigenvalues, [5.0, 1.0, 0.5, -2.0])
    assert est.deflation_count == 3
    assert est.block_steps == [0, 0, 0]


def test_spectrum_2x2():
    est = compute_spectrum_with_deflation(A, 1e-10, "QRShifted")
    np.testing.assert_allclose(est.eigenvalues, [3.0, 1.0], atol=1e-9)


@pytest.mark.parametrize("algorithm", ["QRShifted", "Jacobi"])
def test_spectrum_goe20(algorithm):
    m = goe(20, 4)
    est = compute_spectrum_with_deflation(m, 1e-10, algorithm)
    assert est.deflation_count == 19
    np.testing.assert_allclose(est.eigenvalues, eigen_oracle(m).eigenvalues, atol=1e-8)


def test_cg_identity_and_two_distinct_eigenvalues(rng):
    b = rng.standard_normal(5)
    b /= np.linalg.norm(b)
    assert cg_halting_time(np.eye(5), b, 1e-10) == 1
    b = rng.standard_normal(4)
    b /= np.linalg.norm(b)
    assert cg_halting_time(np.diag([1.0, 1.0, 4.0, 4.0]), b, 1e-12) <= 2


def test_cg_wishart_range_and_monotone_residuals():
    spec = EnsembleSpec("WishartSystem", 100, {"aspect": 2})
    times = []
    for i in range(500):
        h, b = sample_wishart_system(spec, SeedPath(21, i))
        times.append(cg_halting_time(h, b, 1e-10))
        if i < 100:
            hist = cg_residuals(h, b, 1e-10)
            assert np.all(np.diff(hist) <= 1e-12)
    times = np.array(times)
    assert np.mean((times >= 10) & (times <= 60)) >= 0.95


def test_cg_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        cg_halting_time(np.diag([1.0, -1.0]), np.array([0.0, 1.0]), 1e-10)


def test_cg_iteration_cap():
    h = np.diag(np.logspace(0, 12, 30))
    b = np.ones(30) / np.sqrt(30)
    with pytest.raises(IterationLimitExceeded):
        cg_halting_time(h, b, 1e-14, max_iter=5)
