"""
Path-loss models: CI and FI fits through shadow fading
======================================================
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import chansounder as cs

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# Spot checks of the closed-form models.
print("FSPL(1 m, 1 GHz)            = %.2f dB" % cs.eval_fspl(1.0, 1.0))
print("CI  (10 m, 6 GHz, n=3.37)   = %.2f dB" % cs.eval_ci(10.0, 6.0, 3.37))
print("FI  (10 m, a=1.25, b=41.23) = %.2f dB" % cs.eval_fi(10.0, 1.25, 41.23))

# ---------------------------------------------------------------------------
# Synthetic measurement set: 150 positions, 1-41 m, FI truth with 3 dB
# lognormal shadow fading, then recover both model fits.
ALPHA, BETA, SIGMA = 1.75, 48.93, 3.0
F_GHZ = 5.0

rng = np.random.default_rng(11)
d = np.exp(rng.uniform(np.log(1.0), np.log(41.0), 150))
pl = np.array([cs.eval_fi(x, ALPHA, BETA) for x in d]) + rng.normal(0, SIGMA, d.size)

samples = [
    cs.PlSample("P%03d" % i, float(d[i]), F_GHZ, float(pl[i]), cs.Scenario.LOS)
    for i in range(d.size)
]

fi = cs.fit_fi(samples)
ci = cs.fit_ci(samples)
print("FI fit: alpha=%.3f beta=%.2f dB sigma=%.2f dB (truth %.2f / %.2f / %.2f)"
      % (fi.ple, fi.offset_db, fi.sigma_db, ALPHA, BETA, SIGMA))
print("CI fit: n=%.3f sigma=%.2f dB (1 m FSPL anchor at %.2f GHz)"
      % (ci.ple, ci.sigma_db, F_GHZ))

# CI is anchored at the 1 m free-space intercept, so with FI truth it trades
# intercept error for slope error; its sigma is the price of the anchor.
dd = np.logspace(0, np.log10(41.0), 200)
fig, ax = plt.subplots(figsize=(8, 5))
ax.semilogx(d, pl, ".", ms=4, alpha=0.5, label="samples")
ax.semilogx(dd, [fi.evaluate(x) for x in dd], "r-",
            label="FI fit (a=%.2f, b=%.1f)" % (fi.ple, fi.offset_db))
ax.semilogx(dd, [ci.evaluate(x, F_GHZ) for x in dd], "g--",
            label="CI fit (n=%.2f)" % ci.ple)
ax.set_xlabel("distance  [m]")
ax.set_ylabel("path loss  [dB]")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "pathloss_fits.png", dpi=120)
print("wrote", OUT / "pathloss_fits.png")
