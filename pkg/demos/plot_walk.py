"""
A six-step quantum walk
=======================

A walker starts at the origin with its spin in (|0> + i|1>)/sqrt(2).  Six
coin/shift steps later the distribution is symmetric and concentrated near
the edges, unlike the central hump of a classical random walk.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qwalk import WalkPlan, binomial_distribution, ClassicalWalkSpec, new_localized, position_distribution, run_walk, spin_vector

plan = WalkPlan(6, new_localized(0, spin_vector("symmetric")))
quantum = position_distribution(run_walk(plan))
classical = binomial_distribution(ClassicalWalkSpec(6))

for x, p, q in zip(quantum.sites, quantum.probabilities, classical.probabilities):
    print(f"{x:+3d}  quantum {p:.4f}  classical {q:.4f}")

# %%
# Starting in |0> instead breaks the symmetry: the walk drifts to one side.
# With the roles of |0> and |1> exchanged on every other step it drifts the
# other way.

asym = {}
for name in ("zero", "one"):
    asym[name] = position_distribution(run_walk(WalkPlan(6, new_localized(0, spin_vector(name)))))

fig, ax = plt.subplots(1, 3, figsize=(11, 3), sharey=True)
for a, (label, d) in zip(ax, [("symmetric", quantum), ("|0>", asym["zero"]), ("|1>", asym["one"])]):
    a.bar(d.sites, d.probabilities)
    a.set_title(label)
    a.set_xlabel("site")
ax[0].set_ylabel("probability")
fig.tight_layout()
fig.savefig("walk.svg")
print("wrote walk.svg")
