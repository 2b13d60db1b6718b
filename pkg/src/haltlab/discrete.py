"""Discrete isospectral iterations, deflation times and conjugate gradient.

The block norm used throughout is the Frobenius norm of the ``k x (n-k)``
upper-right block.  For ``k = 1`` its square is exactly the first-row
energy the Toda stopping rule uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import IterationLimitExceeded, NotPositiveDefinite
from .linalg import as_symmetric, qr_factorize, symmetrize, tridiagonalize
from .toda import solve_t1, spectral_data

__all__ = [
    "ALGORITHMS",
    "DeflationRecord",
    "SpectrumEstimate",
    "qr_step",
    "qr_shifted_step",
    "wilkinson_shift",
    "jacobi_step",
    "jacobi_pivot",
    "off_norm2",
    "block_norms",
    "iterate",
    "deflation_time_k",
    "deflation_time",
    "compute_spectrum_with_deflation",
    "cg_halting_time",
    "cg_residuals",
]

MAX_STEPS = 10**6


@dataclass(frozen=True)
class DeflationRecord:
    t: float
    k_hat: int
    block_norm: float


class SpectrumEstimate(NamedTuple):
    eigenvalues: np.ndarray
    deflation_count: int
    block_steps: list


def qr_step(x):
    """One unshifted QR step: ``X = QR -> RQ``."""
    q, r = qr_factorize(x)
    return symmetrize(r @ q)


def wilkinson_shift(x):
    """Eigenvalue of the trailing 2x2 block closest to its last entry."""
    a = x[-2, -2]
    b = x[-1, -2]
    c = x[-1, -1]
    if b == 0.0:
        return float(c)
    delta = 0.5 * (a - c)
    sign = 1.0 if delta >= 0 else -1.0
    return float(c - sign * b * b / (abs(delta) + math.hypot(delta, b)))


def qr_shifted_step(x):
    """One QR step with the Wilkinson shift ``mu``: ``X - mu I = QR -> RQ + mu I``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < 2:
        return x.copy()
    mu = wilkinson_shift(x)
    eye = np.eye(n)
    q, r = qr_factorize(x - mu * eye)
    return symmetrize(r @ q + mu * eye)


def off_norm2(x):
    """Sum of squared off-diagonal entries."""
    x = np.asarray(x)
    return float(np.sum(x * x) - np.sum(np.diag(x) ** 2))


def jacobi_pivot(x):
    """Largest ``|x_pq|`` above the diagonal; ties go to the smallest ``(p, q)``."""
    rows, cols = np.triu_indices(x.shape[0], 1)
    j = int(np.argmax(np.abs(x[rows, cols])))
    return int(rows[j]), int(cols[j])


def jacobi_step(x):
    """One classical Jacobi rotation annihilating the largest off-diagonal entry.

    The rotation angle ``theta`` satisfies ``tan(2 theta) = 2 x_pq / (x_pp - x_qq)``
    with ``|theta| <= pi/4``, so the larger diagonal entry grows.
    """
    x = np.array(x, dtype=float)
    n = x.shape[0]
    if n < 2:
        return x
    p, q = jacobi_pivot(x)
    apq = x[p, q]
    if apq == 0.0:
        return x
    tau = (x[p, p] - x[q, q]) / (2.0 * apq)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.hypot(1.0, t)
    s = t * c
    app = x[p, p] + t * apq
    aqq = x[q, q] - t * apq
    colp = x[:, p].copy()
    colq = x[:, q].copy()
    x[:, p] = c * colp + s * colq
    x[:, q] = -s * colp + c * colq
    x[p, :] = x[:, p]
    x[q, :] = x[:, q]
    x[p, p] = app
    x[q, q] = aqq
    x[p, q] = x[q, p] = 0.0
    return x


_STEPS = {
    "QR": qr_step,
    "QRShifted": qr_shifted_step,
    "Jacobi": jacobi_step,
}
ALGORITHMS = tuple(_STEPS)


def _step_fn(algorithm):
    try:
        return _STEPS[algorithm]
    except KeyError:
        raise ValueError(f"unknown discrete algorithm {algorithm!r}; expected one of {ALGORITHMS}") from None


def iterate(x0, algorithm) -> Iterator[np.ndarray]:
    """Lazily yield ``X_0, X_1, ...`` for a discrete algorithm."""
    step = _step_fn(algorithm)
    x = as_symmetric(x0)
    while True:
        yield x
        x = step(x)


def block_norms(x):
    """Frobenius norms of the upper-right ``k x (n-k)`` blocks, ``k = 1..n-1``.

    Computed from one suffix/prefix cumulative sum in ``O(n**2)``.
    """
    x = np.asarray(x)
    n = x.shape[0]
    sq = np.triu(x, 1) ** 2
    suffix = np.cumsum(sq[:, ::-1], axis=1)[:, ::-1]  # suffix[i, k] = sum_{j>=k} sq[i, j]
    prefix = np.cumsum(suffix, axis=0)  # prefix[i, k] = sum_{r<=i} suffix[r, k]
    k = np.arange(1, n)
    return np.sqrt(prefix[k - 1, k])


def _block_norm_k(x, k):
    return float(np.linalg.norm(x[:k, k:]))


def deflation_time_k(x0, k, epsilon, algorithm="QR", max_steps=MAX_STEPS):
    """Smallest iterate index whose ``k``-th off-diagonal block has norm ``<= epsilon``.

    ``algorithm="Toda"`` is accepted for ``k = 1`` only and returns the
    (real-valued) Toda flow time.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    x0 = as_symmetric(x0)
    n = x0.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in 1..{n - 1}")
    if algorithm == "Toda":
        if k != 1:
            raise ValueError("continuous-time deflation is only available for k = 1")
        return solve_t1(spectral_data(x0), epsilon).t_halt
    for m, x in enumerate(iterate(x0, algorithm)):
        if _block_norm_k(x, k) <= epsilon:
            return m
        if m >= max_steps:
            raise IterationLimitExceeded(f"no {k}-deflation within {max_steps} steps")


def deflation_time(x0, epsilon, algorithm="QR", max_steps=MAX_STEPS, return_state=False):
    """First iterate at which any block decouples, with the smallest such ``k``.

    With ``return_state=True`` also returns the matrix at the deflation step.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    for m, x in enumerate(iterate(x0, algorithm)):
        norms = block_norms(x)
        hits = np.flatnonzero(norms <= epsilon)
        if hits.size:
            rec = DeflationRecord(m, int(hits[0]) + 1, float(norms[hits[0]]))
            return (rec, x) if return_state else rec
        if m >= max_steps:
            raise IterationLimitExceeded(f"no deflation within {max_steps} steps")


def compute_spectrum_with_deflation(x0, epsilon, algorithm="QRShifted",
                                    max_steps=MAX_STEPS, tridiagonal=False):
    """All eigenvalues by repeated deflation.

    Runs the algorithm on a block until its first deflation, replaces the
    block by ``diag(X11, X22)`` and recurses on both halves.  ``1 x 1``
    blocks are eigenvalue estimates.

    Returns
    -------
    SpectrumEstimate
        Estimates sorted descending, the number of deflations performed
        (always ``n - 1``), and the iteration count spent on each block in
        the order the blocks were processed.
    """
    x0 = as_symmetric(x0)
    if tridiagonal:
        x0 = tridiagonalize(x0)[0]
    estimates = []
    steps = []
    count = 0
    stack = [x0]
    while stack:
        x = stack.pop()
        if x.shape[0] == 1:
            estimates.append(float(x[0, 0]))
            continue
        rec, state = deflation_time(x, epsilon, algorithm, max_steps, return_state=True)
        steps.append(rec.t)
        count += 1
        k = rec.k_hat
        stack.append(state[k:, k:].copy())
        stack.append(state[:k, :k].copy())
    return SpectrumEstimate(np.sort(np.array(estimates))[::-1], count, steps)


def cg_residuals(h, b, epsilon, max_iter=None):
    """Conjugate gradient from ``x = 0``; returns the residual-norm history.

    ``history[k]`` is ``||b - H x_k||`` tracked through the usual recurrence.
    Iteration stops as soon as the residual is ``<= epsilon`` or after
    ``max_iter`` (default ``10 n``) steps.
    """
    h = np.asarray(h, dtype=float)
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if max_iter is None:
        max_iter = 10 * n
    r = b.copy()
    p = r.copy()
    rr = float(r @ r)
    history = [math.sqrt(rr)]
    for _ in range(max_iter):
        if history[-1] <= epsilon:
            break
        hp = h @ p
        curv = float(p @ hp)
        if curv <= 0.0:
            raise NotPositiveDefinite(f"non-positive curvature p^T H p = {curv:g}")
        alpha = rr / curv
        r -= alpha * hp
        rr_new = float(r @ r)
        history.append(math.sqrt(rr_new))
        p = r + (rr_new / rr) * p
        rr = rr_new
    return np.array(history)


def cg_halting_time(h, b, epsilon, max_iter=None):
    """Number of conjugate gradient iterations until ``||b - H x_k|| <= epsilon``.

    Raises
    ------
    IterationLimitExceeded
        If the tolerance is not met within ``10 n`` iterations.
    NotPositiveDefinite
        If a search direction has non-positive curvature.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n = np.asarray(b).shape[0]
    cap = 10 * n if max_iter is None else max_iter
    hist = cg_residuals(h, b, epsilon, cap)
    if hist[-1] > epsilon:
        raise IterationLimitExceeded(f"CG did not reach {epsilon:g} within {cap} iterations")
    return len(hist) - 1
