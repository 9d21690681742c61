"""
From quantum to classical
=========================

Dephasing the coin at every step turns the walk into a classical one.  The
density-matrix engine and the trajectory engine give the same answer; the
trajectory engine can also model a static detuning, which the spin echo
removes.
"""

import numpy as np

from qwalk import (
    NoiseModel,
    WalkPlan,
    new_localized,
    position_distribution,
    quantum_to_classical_scan,
    run_noisy_walk_exact,
    run_trajectories,
    run_walk,
    spin_vector,
)

plan = WalkPlan(10, new_localized(0, spin_vector("symmetric")))
for p, sigma in quantum_to_classical_scan(plan, np.linspace(0, 1, 6)):
    print(f"p = {p:.1f}   sigma = {sigma:.3f}")
print(f"classical sqrt(N) = {np.sqrt(10):.3f}")

# %%
# Same noise, sampled.  Trial i always draws from stream (seed, i).

noise = NoiseModel(coin_dephase_p=0.3)
exact = position_distribution(run_noisy_walk_exact(plan, noise))
mc = run_trajectories(plan, noise, trials=20_000, master_seed=1)
print("site   exact    mc      sigma_stat")
for x in range(-10, 11, 2):
    i = int(np.flatnonzero(mc.sites == x)[0])
    print(f"{x:+3d}  {exact[x]:.4f}  {mc.probabilities[i]:.4f}  {mc.sigma_stat[i]:.4f}")

# %%
# A detuning that is constant within a shot but random between shots.

plan6 = WalkPlan(6, new_localized(0, spin_vector("symmetric")))
ideal = position_distribution(run_walk(plan6)).as_dict()
for echo in (True, False):
    d = run_trajectories(plan6, NoiseModel(static_detuning_sigma=0.3, echo_enabled=echo), 20_000, 2)
    tv = 0.5 * sum(abs(d[x] - ideal.get(x, 0.0)) for x in d.sites.tolist())
    print(f"echo {'on ' if echo else 'off'}: distance from ideal {tv:.4f}")
