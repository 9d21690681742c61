"""
Site-resolved spin tomography
=============================

Six readout settings give the population of each Pauli eigenstate at every
site.  Their differences, divided by the total, are the local Bloch vectors.
"""

import numpy as np

from qwalk import (
    NoiseModel,
    WalkPlan,
    consistency_check,
    measure_all_axes,
    new_localized,
    position_distribution,
    reconstruct_bloch,
    run_noisy_walk_exact,
    spin_vector,
)

plan = WalkPlan(3, new_localized(0, spin_vector("symmetric")))

for p in (0.0, 0.3):
    rho = run_noisy_walk_exact(plan, NoiseModel(coin_dephase_p=p))
    six = measure_all_axes(rho)
    field = reconstruct_bloch(six, position_distribution(rho))
    print(f"dephasing p = {p}")
    for rec, norm in zip(field.records(), field.norms()):
        if rec["valid"]:
            print(f"  site {rec['site']:+d}: P = {rec['population']:.3f}  "
                  f"b = ({rec['bx']:+.3f}, {rec['by']:+.3f}, {rec['bz']:+.3f})  |b| = {norm:.3f}")

# %%
# With a finite number of atoms per setting the sum rule P+ + P- = P holds
# only within shot noise.

rho = run_noisy_walk_exact(plan, NoiseModel())
six = measure_all_axes(rho, shots=4000, master_seed=5)
total = position_distribution(rho)
total = type(total)(total.sites, total.probabilities, shots=4000,
                    sigma_stat=np.sqrt(total.probabilities * (1 - total.probabilities) / 4000))
for axis, c in consistency_check(six, total).items():
    print(f"{axis}: worst deviation {c.max_deviation:.2f} sigma")
