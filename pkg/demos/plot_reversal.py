"""
Undoing the walk
================

Applying the inverse shift and inverse coin N times returns the walker to the
origin.  Dephasing during the sequence spoils the refocusing; a scan over the
dephasing probability shows how fast.
"""

import numpy as np

from qwalk import (
    NoiseModel,
    WalkPlan,
    calibrate_refocus,
    new_localized,
    position_distribution,
    refocus_analysis,
    refocus_scan,
    run_noisy_walk_exact,
    run_walk,
    spin_vector,
    time_reverse,
)

plan = WalkPlan(6, new_localized(0, spin_vector("symmetric")))
back = time_reverse(run_walk(plan), plan)
print(f"noiseless: P(origin) = {position_distribution(back)[0]:.12f}")

# %%
# Fully dephased, the last forward shift and the first inverse shift cancel
# (no coin acts between them), so 10 classical steps remain:
# P(origin) = C(10, 5) / 2**10.

rho = run_noisy_walk_exact(plan, NoiseModel(coin_dephase_p=1.0), reverse=True)
print(f"fully dephased: P(origin) = {position_distribution(rho)[0]:.6f}  (1008/4096 = {1008 / 4096:.6f})")

for p, f in refocus_scan(np.linspace(0, 0.5, 6)):
    print(f"p = {p:.1f}   refocused fraction {f:.3f}")

p30 = calibrate_refocus(0.30)
print(f"30% refocusing at p = {p30:.4f}")
r = refocus_analysis(position_distribution(run_noisy_walk_exact(plan, NoiseModel(coin_dephase_p=p30), reverse=True)))
print(f"  background width {r.background_width:.2f} sites, origin peak {r.origin_probability:.3f}")
