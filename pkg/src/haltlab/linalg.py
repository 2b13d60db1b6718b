"""Dense real symmetric linear algebra.

Matrices are plain ``numpy`` arrays.  Symmetry is enforced by
:func:`symmetrize`, which treats the lower triangle as authoritative and
mirrors it, so ``a[i, j] == a[j, i]`` holds bit-for-bit afterwards.

The eigen-oracle is a Householder tridiagonalization followed by implicit
Wilkinson-shifted QL sweeps on the tridiagonal (the EISPACK ``tql2``
scheme), with the Givens rotations accumulated into the Householder basis.
"""
from __future__ import annotations

from typing import NamedTuple

import numba
import numpy as np

from .errors import IterationLimitExceeded

__all__ = [
    "EigenDecomposition",
    "symmetrize",
    "as_symmetric",
    "qr_factorize",
    "tridiagonalize",
    "eigen_oracle",
    "sturm_count",
    "bisection_eigenvalues",
]

#: Relative scale below which a tridiagonal off-diagonal entry is dropped.
DEFLATION_TOL = 1e-15
#: Maximum implicit-shift sweeps allowed for a single eigenvalue.
MAX_SWEEPS = 50


class EigenDecomposition(NamedTuple):
    """Eigenvalues in descending order with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def symmetrize(a):
    """Return a copy of ``a`` whose upper triangle mirrors its lower triangle."""
    a = np.asarray(a, dtype=float)
    low = np.tril(a)
    return low + np.tril(a, -1).T


def as_symmetric(a):
    """Validate a square finite array and return its symmetrized copy."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("matrix dimension must be positive")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return symmetrize(a)


def qr_factorize(m):
    """QR factorization with a non-negative diagonal on ``R``.

    Backed by LAPACK Householder QR; the column signs of ``Q`` (and row
    signs of ``R``) are flipped so that ``diag(R) >= 0``, which makes the
    factorization unique for full-rank input.

    Returns
    -------
    q, r : ndarray
        Orthogonal ``q`` and upper-triangular ``r`` with ``q @ r == m``.
    """
    m = np.asarray(m, dtype=float)
    q, r = np.linalg.qr(m)
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    q = q * signs
    r = signs[:, None] * r
    return q, np.triu(r)


def tridiagonalize(m):
    """Householder reduction of a symmetric matrix to tridiagonal form.

    Returns ``(t, q)`` with ``q.T @ m @ q == t`` up to rounding and ``t``
    exactly zero outside the three central diagonals.  Columns that are
    already in tridiagonal form are skipped, so diagonal and tridiagonal
    input comes back unchanged with ``q = I``.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        alpha = -np.copysign(np.hypot(x[0], tail), x[0])
        v = x
        v[0] -= alpha
        v /= np.linalg.norm(v)
        # a <- H a H with H = I - 2 v v^T acting on rows/cols k+1:
        a[k + 1:, :] -= 2.0 * np.outer(v, v @ a[k + 1:, :])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v)
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v)
    d = np.diag(a).copy()
    e = 0.5 * (np.diag(a, -1) + np.diag(a, 1))
    t = np.diag(d)
    if n > 1:
        t += np.diag(e, 1) + np.diag(e, -1)
    return t, q


@numba.njit(cache=True)
def _tql2(d, e, z, tol, max_sweeps):
    # Implicit QL with Wilkinson-type shift.  e[i] couples d[i] and d[i+1];
    # e[n-1] is scratch.  Rotations are applied to the columns of z.
    # Returns 0 on success, otherwise 1 + index of the failing eigenvalue.
    n = d.shape[0]
    nz = z.shape[0]
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= tol * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                return l + 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            early = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    early = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(nz):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if early:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def eigen_oracle(m):
    """Full symmetric eigen-decomposition, eigenvalues descending.

    Raises
    ------
    IterationLimitExceeded
        If one eigenvalue needs more than 50 implicit-shift sweeps.
    """
    t, q = tridiagonalize(m)
    n = t.shape[0]
    d = np.diag(t).copy()
    e = np.zeros(n)
    if n > 1:
        e[:-1] = np.diag(t, -1)
    z = np.array(q, order="C")
    status = _tql2(d, e, z, DEFLATION_TOL, MAX_SWEEPS)
    if status:
        raise IterationLimitExceeded(
            f"eigenvalue {status - 1} needed more than {MAX_SWEEPS} sweeps"
        )
    order = np.argsort(-d, kind="stable")
    return EigenDecomposition(d[order], z[:, order])


def sturm_count(diag, off, x):
    """Number of eigenvalues of the tridiagonal ``(diag, off)`` below ``x``."""
    count = 0
    q = 1.0
    for i in range(len(diag)):
        b2 = off[i - 1] ** 2 if i > 0 else 0.0
        q = diag[i] - x - (b2 / q if i > 0 else 0.0)
        if q == 0.0:
            q = -1e-300
        if q < 0.0:
            count += 1
    return count


def bisection_eigenvalues(m, tol=1e-13):
    """Eigenvalues (descending) by Sturm-sequence bisection.

    Slow, independent of :func:`eigen_oracle`'s QL iteration; kept as a
    second reference for tests.
    """
    t, _ = tridiagonalize(m)
    diag = np.diag(t)
    off = np.diag(t, -1)
    n = len(diag)
    radius = np.zeros(n)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo0 = float(np.min(diag - radius)) - 1e-12
    hi0 = float(np.max(diag + radius)) + 1e-12
    out = np.empty(n)
    for j in range(n):
        # j-th smallest: smallest x with count(x) > j
        lo, hi = lo0, hi0
        while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if sturm_count(diag, off, mid) > j:
                hi = mid
            else:
                lo = mid
        out[j] = 0.5 * (lo + hi)
    return out[::-1]
