"""Toda flow: closed-form spectral engine and a Lax-pair ODE integrator.

The spectral engine evaluates the first row of ``X(t)`` from the
eigenvalues of ``X(0)`` and the squared first components of its
eigenvectors.  Weights evolve as a softmax,

    w_j(t) = w_j exp(2 lambda_j t) / sum_k w_k exp(2 lambda_k t),

from which ``X11(t) = sum_j lambda_j w_j(t)`` and the off-diagonal energy
``E(t) = sum_j (lambda_j - X11(t))**2 w_j(t) = sum_{j>=2} X_1j(t)**2``.

The integrator solves ``dX/dt = X B(X) - B(X) X`` with
``B(X) = tril(X, -1) - tril(X, -1).T`` by classical RK4 and serves as an
independent cross-check of the closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import HorizonExceeded, StepInvalid
from .linalg import as_symmetric, eigen_oracle

__all__ = [
    "SpectralData",
    "TodaHaltingResult",
    "spectral_data",
    "toda_weights_at",
    "toda_x11",
    "toda_energy",
    "solve_t1",
    "lax_rhs",
    "lax_rk4",
    "lax_energy",
    "lax_solve_t1",
]

GRID_STEP = 0.25
HORIZON = 1e7


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (descending) and first-row eigenvector weights of ``X(0)``."""

    lambdas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if lam.shape != w.shape or lam.ndim != 1:
            raise ValueError("lambdas and weights must be 1-d arrays of equal length")
        if np.any(np.diff(lam) > 0):
            raise ValueError("lambdas must be non-increasing")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative and sum to 1")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class TodaHaltingResult:
    t_halt: float
    x11_at_halt: float
    energy_at_halt: float


def spectral_data(m):
    """Spectral data of a symmetric matrix via :func:`eigen_oracle`."""
    eig = eigen_oracle(m)
    w = eig.eigenvectors[0] ** 2
    return SpectralData(eig.eigenvalues, w / w.sum())


def toda_weights_at(sd, t):
    """Squared first eigenvector components ``|u_1j(t)|**2`` at time ``t``.

    Exponents are shifted by their maximum before exponentiation, so the
    computation never overflows.
    """
    with np.errstate(divide="ignore"):
        logw = np.log(sd.weights) + 2.0 * sd.lambdas * t
    logw -= np.max(logw)
    w = np.exp(logw)
    return w / w.sum()


def toda_x11(sd, t):
    return float(sd.lambdas @ toda_weights_at(sd, t))


def _energy_and_x11(sd, t):
    w = toda_weights_at(sd, t)
    x11 = float(sd.lambdas @ w)
    return float(((sd.lambdas - x11) ** 2) @ w), x11


def toda_energy(sd, t):
    """Off-diagonal first-row energy ``E(t)``."""
    return _energy_and_x11(sd, t)[0]


def solve_t1(sd, epsilon, grid_step=GRID_STEP, rtol=1e-12):
    """First time the Toda flow's first-row energy drops to ``epsilon**2``.

    The crossing is bracketed on the doubling grid ``grid_step * 2**k`` and
    refined by bisection until the bracket is below ``rtol * (1 + t)``.
    The returned time always satisfies ``E(t) <= epsilon**2``.

    Raises
    ------
    HorizonExceeded
        If no grid point up to ``t = 1e7`` reaches the tolerance, which
        happens for a numerically degenerate top gap.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    target = epsilon * epsilon
    e0, x0 = _energy_and_x11(sd, 0.0)
    if e0 <= target:
        return TodaHaltingResult(0.0, x0, e0)
    lo, hi = 0.0, grid_step
    e_hi, x_hi = _energy_and_x11(sd, hi)
    while e_hi > target:
        lo, hi = hi, 2.0 * hi
        if hi > HORIZON:
            raise HorizonExceeded(f"no crossing of E(t) = {target:g} before t = {HORIZON:g}")
        e_hi, x_hi = _energy_and_x11(sd, hi)
    for _ in range(200):
        if hi - lo <= rtol * (1.0 + hi):
            break
        mid = 0.5 * (lo + hi)
        e_mid, x_mid = _energy_and_x11(sd, mid)
        if e_mid <= target:
            hi, e_hi, x_hi = mid, e_mid, x_mid
        else:
            lo = mid
    return TodaHaltingResult(hi, x_hi, e_hi)


@numba.njit(cache=True)
def _rhs(x):
    low = np.tril(x, -1)
    b = low - low.T
    out = x @ b - b @ x
    return 0.5 * (out + out.T)


@numba.njit(cache=True)
def _rk4_step(x, h):
    k1 = _rhs(x)
    k2 = _rhs(x + 0.5 * h * k1)
    k3 = _rhs(x + 0.5 * h * k2)
    k4 = _rhs(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@numba.njit(cache=True)
def _rk4_run(x, dt, steps):
    for _ in range(steps):
        x = _rk4_step(x, dt)
    return x


@numba.njit(cache=True)
def _first_row_energy(x):
    s = 0.0
    for j in range(1, x.shape[1]):
        s += x[0, j] * x[0, j]
    return s


@numba.njit(cache=True)
def _rk4_until(x, dt, target, max_steps):
    # Advance until the next step would cross below target; return the
    # state before the crossing and the number of steps taken.
    for k in range(max_steps):
        y = _rk4_step(x, dt)
        if _first_row_energy(y) <= target:
            return x, k, True
        x = y
    return x, max_steps, False


def lax_rhs(x):
    """Toda vector field ``X B(X) - B(X) X``."""
    x = np.ascontiguousarray(as_symmetric(x))
    return _rhs(x)


def lax_rk4(x0, t_end, dt=1e-3):
    """Integrate the Toda flow from ``x0`` to ``t_end`` with classical RK4.

    Uses ``floor(t_end / dt)`` steps of size ``dt`` and one final shorter
    step for any remainder.
    """
    if dt <= 0:
        raise StepInvalid("dt must be positive")
    if t_end < 0:
        raise StepInvalid("t_end must be non-negative")
    x = np.ascontiguousarray(as_symmetric(x0))
    if t_end == 0:
        return x
    if dt > t_end:
        raise StepInvalid("dt exceeds t_end")
    steps = int(math.floor(t_end / dt + 1e-9))
    x = _rk4_run(x, float(dt), steps)
    rest = t_end - steps * dt
    if rest > 1e-12 * max(1.0, t_end):
        x = _rk4_step(x, float(rest))
    return x


def lax_energy(x):
    """``sum_{j>=2} X_1j**2`` read directly off a matrix."""
    x = np.asarray(x)
    return float(np.sum(x[0, 1:] ** 2))


def lax_solve_t1(x0, epsilon, dt=1e-3, t_max=1e4, rtol=1e-12):
    """First-row energy crossing time found by integrating the Lax equation.

    Steps with RK4 until ``E`` falls to ``epsilon**2``, then bisects the
    length of a single RK4 step from the last state above tolerance.
    """
    if dt <= 0:
        raise StepInvalid("dt must be positive")
    target = epsilon * epsilon
    x = np.ascontiguousarray(as_symmetric(x0))
    if _first_row_energy(x) <= target:
        return TodaHaltingResult(0.0, float(x[0, 0]), _first_row_energy(x))
    max_steps = int(math.ceil(t_max / dt))
    x, k, found = _rk4_until(x, float(dt), target, max_steps)
    if not found:
        raise HorizonExceeded(f"no crossing before t = {t_max:g}")
    t0 = k * dt
    lo, hi = 0.0, dt
    y = _rk4_step(x, hi)
    for _ in range(200):
        if hi - lo <= rtol * (1.0 + t0 + hi):
            break
        mid = 0.5 * (lo + hi)
        ym = _rk4_step(x, mid)
        if _first_row_energy(ym) <= target:
            hi, y = mid, ym
        else:
            lo = mid
    return TodaHaltingResult(t0 + hi, float(y[0, 0]), _first_row_energy(y))
