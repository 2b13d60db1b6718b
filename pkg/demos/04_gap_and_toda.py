# %% [markdown]
# # Toda halting time and the top gap
#
# The Toda time is about log(1/eps) / (lambda1 - lambda2).  After edge
# scaling, its distribution should match the scaled inverse gap.

# %%
import numpy as np

from haltlab import ExperimentConfig, run_experiment
from haltlab.stats import check_scaling_region, ks_distance, scaled_t1

n, eps = 60, 1e-8
print("inside the scaling region:", check_scaling_region(eps, n, 0.5))
art = run_experiment(ExperimentConfig(ensemble="GOE", algorithm="TodaT1", n=n,
                                      epsilon=eps, samples=800, master_seed=5))
kept = art.retained
t = scaled_t1(np.array([r.t for r in kept]), n, eps)
g = 1.0 / (n ** (2 / 3) * np.array([r.gap for r in kept]))
print("KS(scaled T, scaled 1/gap) =", round(ks_distance(t, g), 4))
print("median ratio", round(float(np.median(t / g)), 4))

# %% [markdown]
# At the halting time the top-left entry already equals lambda1 to within eps.

# %%
err = np.array([abs(r.lambda1_est - r.lambda1_true) for r in kept])
print(f"max |X11(T) - lambda1| = {err.max():.2e}  (eps = {eps:g})")
