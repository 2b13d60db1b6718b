# %% [markdown]
# # Halting-time universality
#
# Normalized QR halting times look the same for Gaussian and for
# Bernoulli Wigner matrices.  QR and the Toda flow differ from each other, though.
# Sample sizes here are smaller than in the acceptance runs so this
# finishes in under a minute.

# %%
import numpy as np

from haltlab import ExperimentConfig, compare_runs, run_experiment
from haltlab.stats import histogram, ks_distance, normalize_times


def run(ensemble, algorithm, eps):
    cfg = ExperimentConfig(ensemble=ensemble, algorithm=algorithm, n=40,
                           epsilon=eps, samples=600, master_seed=3)
    return run_experiment(cfg)


qr_goe = run("GOE", "QR", 1e-10)
qr_ber = run("BernoulliWigner", "QR", 1e-10)
toda_goe = run("GOE", "TodaT1", 1e-8)
print("QR GOE vs Bernoulli KS:", round(compare_runs(qr_goe, qr_ber)["ks"], 4))
print("QR vs Toda (GOE) KS:   ",
      round(ks_distance(normalize_times(qr_goe.times()), normalize_times(toda_goe.times())), 4))

# %% [markdown]
# A text histogram over shared bins makes the comparison visible.

# %%
a, b = normalize_times(qr_goe.times()), normalize_times(qr_ber.times())
edges = np.linspace(-2.5, 4.5, 15)
ha = histogram(np.clip(a, -2.5, 4.5), edges, "density")
hb = histogram(np.clip(b, -2.5, 4.5), edges, "density")
for lo, da, db in zip(edges[:-1], ha.density, hb.density):
    print(f"{lo:+5.1f} {'#' * int(25 * da):<30}| {'*' * int(25 * db)}")
