# %% [markdown]
# # Conjugate gradient and full-spectrum deflation
#
# CG on a Wishart system halts after a tightly concentrated number of
# iterations.  The same deflation rule used above, applied recursively,
# recovers every eigenvalue.

# %%
import numpy as np

from haltlab import EnsembleSpec, SeedPath, eigen_oracle, sample
from haltlab.discrete import cg_halting_time, cg_residuals, compute_spectrum_with_deflation

spec = EnsembleSpec("WishartSystem", 100, {"aspect": 2.0, "factor": "gaussian"})
h, b = sample(spec, SeedPath(9, 0))
res = cg_residuals(h, b, 1e-10)
print("CG iterations:", cg_halting_time(h, b, 1e-10))
print("residuals every 10 steps:", np.array2string(res[::10], precision=1))

times = [cg_halting_time(*sample(spec, SeedPath(9, i)), 1e-10) for i in range(200)]
vals, counts = np.unique(times, return_counts=True)
print("halting times over 200 draws:", {int(v): int(c) for v, c in zip(vals, counts)})

# %%
m = sample(EnsembleSpec("GOE", 20), SeedPath(9, 1))
est = compute_spectrum_with_deflation(m, 1e-10, "QRShifted")
print("deflations:", est.deflation_count, " steps per block:", est.block_steps)
print("max error vs oracle:", np.max(np.abs(est.eigenvalues - eigen_oracle(m).eigenvalues)))
