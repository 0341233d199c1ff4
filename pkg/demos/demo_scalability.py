# Scaling the network: the matching-based allocator beats the greedy baseline
# even after charging it extra pipeline delay for its longer computation.
# The sweep compares an idealized fast variant (same W as the greedy) with a
# realistic one whose W grows with the network size.
#
# Writes out/scalability.csv.  Several minutes.

import os

from urllc_alloc import SimConfig
from urllc_alloc.cli import SweepSpec, run_sweep

os.makedirs("out", exist_ok=True)

SIZES = (100, 150, 200, 250)
base = SimConfig(C=10, gamma=0.95, eta=0.4, W=2, n_cycles=30, n_topologies=5,
                 rng_seed=808)

# greedy baseline and the idealized fast variant both run at W=2
fast = run_sweep(SweepSpec(
    base=base,
    param="N", values=SIZES, output_path="out/scalability_fast.csv",
    allocators=("gba", "bca"),
))
# realistic variant: one extra cycle of delay beyond N=130, two beyond N=190
real = run_sweep(SweepSpec(
    base=base,
    param="N", values=SIZES, output_path="out/scalability_real.csv",
    allocators=("gba",),
    w_overrides={150: 3, 200: 3, 250: 4},
))

by_fast = {(r["value"], r["allocator"]): r["frac_served_mean"] for r in fast}
by_real = {r["value"]: r["frac_served_mean"] for r in real}
print(f"{'N':>5} {'bca W=2':>9} {'fast gba W=2':>13} {'real gba':>9}")
for n in SIZES:
    print(f"{n:5d} {by_fast[n, 'bca']:9.3f} {by_fast[n, 'gba']:13.3f} {by_real[n]:9.3f}")
print("wrote out/scalability_fast.csv and out/scalability_real.csv")
