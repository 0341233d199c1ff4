# The pilot-overhead sweet spot: sweeping the fraction of slots reserved for
# pilots.  Too few pilots leave the scheduler guessing (memoryless worst-case
# provisioning); too many starve the data plane.  The served fraction peaks
# around eta ~= 0.4 and collapses as eta -> 1.
#
# Writes out/eta_tradeoff.csv.  About two minutes with the settings below.

import os

from urllc_alloc import SimConfig
from urllc_alloc.cli import SweepSpec, run_sweep

os.makedirs("out", exist_ok=True)

base = SimConfig(N=100, C=5, W=2, n_cycles=30, n_topologies=5, rng_seed=2024)
spec = SweepSpec(
    base=base,
    param="eta",
    values=[round(0.1 * k, 1) for k in range(10)],
    output_path="out/eta_tradeoff.csv",
    allocators=("gba", "bca"),
)
rows = run_sweep(spec)

print(f"{'eta':>5} {'gba':>7} {'bca':>7}")
by = {(r["value"], r["allocator"]): r["frac_served_mean"] for r in rows}
for eta in spec.values:
    print(f"{eta:5.1f} {by[eta, 'gba']:7.3f} {by[eta, 'bca']:7.3f}")
print("wrote out/eta_tradeoff.csv")
