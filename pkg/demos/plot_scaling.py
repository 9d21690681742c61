"""
Ballistic versus diffusive spreading
====================================

The width of the quantum walk grows linearly with the number of steps,
sigma ~ 0.54 N, while a classical random walk spreads as sqrt(N).
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qwalk.tomography import scaling_curve

rows = scaling_curve(range(1, 25))
n = np.array([r[0] for r in rows])
sq = np.array([r[1] for r in rows])
sc = np.array([r[2] for r in rows])

# least-squares slope through the origin over N = 4..24
sel = n >= 4
a = np.dot(n[sel], sq[sel]) / np.dot(n[sel], n[sel])
print(f"sigma = {a:.4f} N   (large-N limit {np.sqrt(1 - 1 / np.sqrt(2)):.4f})")

plt.plot(n, sq, "o-", label="quantum walk")
plt.plot(n, sc, "s-", label="random walk")
plt.plot(n, a * n, "k--", lw=0.8, label=f"{a:.3f} N")
plt.xlabel("steps N")
plt.ylabel("standard deviation (sites)")
plt.legend()
plt.savefig("scaling.svg")
print("wrote scaling.svg")
