# How fading knowledge ages: the conditional distribution of the squared
# coefficient spreads out as a measurement gets older, and the number of
# resource units needed for five-nines reliability moves accordingly --
# sharply down while a good measurement is fresh, above the no-knowledge
# baseline when a bad measurement goes stale.
#
# Writes out/channel_aging_pdf.csv and out/ru_vs_age.csv (plus PNGs when
# matplotlib is available).  Runs in a few seconds.

import csv
import math
import os

import numpy as np

from urllc_alloc import (
    DirectQuantiles,
    LinkParams,
    conditional_pdf,
    gm_params,
    required_rus_no_csi,
    required_rus_with_csi,
)

GAMMA = 0.95
RHO = 0.99999
LP = LinkParams.from_db(100.0, 3.0, 100, 180e3, 0.144e-3)

os.makedirs("out", exist_ok=True)

# 1) conditional pdf of |h|^2 given a measurement z=1.5, for growing age
ages = [1, 2, 5, 10, 50]
x = np.linspace(0.0, 6.0, 601)
with open("out/channel_aging_pdf.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["x"] + [f"age_{t}" for t in ages])
    curves = [conditional_pdf(x, 1.5, gm_params(GAMMA, t)) for t in ages]
    for i, xv in enumerate(x):
        w.writerow([f"{xv:.3f}"] + [f"{c[i]:.6f}" for c in curves])
print("out/channel_aging_pdf.csv: density tightens around a^2*z+b when fresh,"
      " relaxes to exp(-x) as the measurement ages")

# 2) RUs needed at d=40 m vs measurement age, for several measured values
quantiles = DirectQuantiles(GAMMA, RHO)
d, lam = 40.0, 1.0
baseline = required_rus_no_csi(d, lam, RHO, LP)
zs = [0.2, 0.5, 1.0, 1.5, 3.0]
ages = list(range(1, 26))
with open("out/ru_vs_age.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["age"] + [f"z_{z}" for z in zs] + ["no_csi"])
    for t in ages:
        counts = [required_rus_with_csi(d, lam, RHO, t, z, LP, quantiles) for z in zs]
        w.writerow([t] + counts + [baseline])
print(f"out/ru_vs_age.csv: no-knowledge baseline is {baseline} RUs;"
      " fresh z=3.0 needs 1, stale z=0.5 needs more than the baseline")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    for t in [1, 2, 5, 10, 50]:
        ax1.plot(x, conditional_pdf(x, 1.5, gm_params(GAMMA, t)), label=f"age {t}")
    ax1.plot(x, np.exp(-x), "k--", label="no knowledge")
    ax1.set(xlabel="fading power", ylabel="density", title="conditional pdf, z=1.5")
    ax1.legend()
    for z in zs:
        ax2.plot(ages, [required_rus_with_csi(d, lam, RHO, t, z, LP, quantiles)
                        for t in ages], marker=".", label=f"z={z}")
    ax2.axhline(baseline, color="k", ls="--", label="no knowledge")
    ax2.set(xlabel="measurement age (cycles)", ylabel="required RUs",
            title=f"d={d:.0f} m, rho={RHO}")
    ax2.legend()
    fig.tight_layout()
    fig.savefig("out/channel_aging.png", dpi=120)
    print("out/channel_aging.png")
except ImportError:
    pass
