# %% [markdown]
# # The Toda flow on a 2x2 matrix
#
# For X0 = [[0, 1], [1, 0]] the eigenvalues are +1 and -1 and both carry
# half of the first-row weight.  The flow then has a closed form:
# X11(t) = tanh(2t) and the off-diagonal energy is sech(2t)**2.
# We check the spectral engine and the RK4 integrator against it.

# %%
import math

import numpy as np

from haltlab import spectral_data, solve_t1, toda_energy, toda_x11
from haltlab.toda import lax_energy, lax_rk4, lax_solve_t1

x0 = np.array([[0.0, 1.0], [1.0, 0.0]])
sd = spectral_data(x0)
print("eigenvalues", sd.lambdas, "weights", sd.weights)

# %%
print(f"{'t':>5} {'X11':>12} {'tanh(2t)':>12} {'E spectral':>12} {'E rk4':>12}")
for t in (0.25, 0.5, 1.0, 2.0):
    x = lax_rk4(x0, t, dt=1e-3)
    print(f"{t:5.2f} {toda_x11(sd, t):12.9f} {math.tanh(2 * t):12.9f} "
          f"{toda_energy(sd, t):12.3e} {lax_energy(x):12.3e}")

# %% [markdown]
# The halting time is when the energy first reaches eps**2, which here is
# arccosh(1/eps) / 2.

# %%
for eps in (1e-2, 1e-5, 1e-10):
    closed = math.acosh(1 / eps) / 2
    print(f"eps={eps:g}: closed form {closed:.10f}  spectral {solve_t1(sd, eps).t_halt:.10f}  "
          f"rk4 {lax_solve_t1(x0, eps).t_halt:.10f}")
