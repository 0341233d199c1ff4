# Who gets served, by distance: with plain round-robin pilots the edge of the
# deployment starves first, because far devices need the freshest channel
# knowledge but get it no more often than anyone else.  Ranking pilot slots by
# expected resource savings lifts the edge without hurting the total.
#
# Writes out/fairness.csv.  About two minutes.

import os

from urllc_alloc import SimConfig, run_simulation
from urllc_alloc.cli import emit_fairness

os.makedirs("out", exist_ok=True)

BINS = 6
results = []
for policy in ("round-robin", "dynamic"):
    cfg = SimConfig(N=150, C=7, gamma=0.97, eta=0.4, W=2, pilot_policy=policy,
                    n_cycles=30, n_topologies=5, rng_seed=1010)
    m = run_simulation(cfg, fairness_bins=BINS)
    results.append((policy, m.fairness_bin_centers, m.fairness_fractions))
    shown = ["   -" if f is None else f"{f:.2f}" for f in m.fairness_fractions]
    print(f"{policy:18s} overall {m.fraction_served_mean:.3f}  by distance: {shown}")

emit_fairness(results, "out/fairness.csv")
print("wrote out/fairness.csv (bin centers in meters)")
