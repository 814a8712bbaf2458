# Simulating the protocol round by round and comparing with the closed forms.

import numpy as np

from lm05.montecarlo import NoiseSpec, SimConfig, closed_form_targets, simulate, z_scores

cfg = SimConfig(d=3, rounds=200_000, seed=7, noise=NoiseSpec.parse("dep:ind:0.3"))
stats = simulate(cfg)
targets = closed_form_targets(cfg)

print("Q_k per basis", stats.Q_k_hat, "target", targets["Q_k_hat"])
print("Q_t per basis", stats.Q_t_hat, "target", targets["Q_t_hat"])
print("z scores", {k: np.round(v, 2) for k, v in z_scores(stats, targets).items()})

# same seed, more threads: identical counts
again = simulate(cfg, workers=4)
print("reproducible:", np.array_equal(stats.key_table, again.key_table))

# the cloning attack, with Eve's guesses tallied against Alice's key
cfg = SimConfig(d=2, rounds=200_000, seed=7, cloning_theta=np.pi / 2)
stats = simulate(cfg)
t = closed_form_targets(cfg)
print("P_det", stats.P_det_hat, "target", t["P_det_hat"])
print("P_AB (Fourier)", stats.P_AB_hat[1], "target", t["P_AB_hat"][1])
print("I_AE estimate", round(stats.I_AE_hat, 4))
