# %% [markdown]
# # QR, shifted QR and Jacobi
#
# All three iterations preserve the spectrum.  They differ in how fast the
# top-left entry decouples.  We watch one 40x40 GOE draw.

# %%
import numpy as np

from haltlab import EnsembleSpec, SeedPath, eigen_oracle, sample
from haltlab.discrete import block_norms, deflation_time, iterate

m = sample(EnsembleSpec("GOE", 40), SeedPath(2024, 0))
lam = eigen_oracle(m).eigenvalues
print("top eigenvalues", lam[:3])

# %%
for algorithm in ("QR", "QRShifted", "Jacobi"):
    rec = deflation_time(m, 1e-10, algorithm)
    print(f"{algorithm:>9}: first deflation after {rec.t} steps at k = {rec.k_hat}")

# %% [markdown]
# Unshifted QR drives the eigenvalue of largest magnitude into the top-left
# corner (here that is lambda1).
# The first-row norm decays like |lambda2 / lambda1|**k.

# %%
for k, x in enumerate(iterate(m, "QR")):
    if k % 50 == 0:
        drift = np.max(np.abs(eigen_oracle(x).eigenvalues - lam))
        print(f"step {k:4d}  |X_1,2:| = {block_norms(x)[0]:.3e}  X11 = {x[0, 0]:+.6f}  spectrum drift {drift:.1e}")
    if k == 300:
        break
