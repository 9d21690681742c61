"""
Spin-dependent transport
========================

Rotating the polarization of one lattice beam by theta moves the two
circular lattice components apart by theta * lambda / (2 pi).  Ramping the
angle in a time tau excites vibrations unless tau is a multiple of the axial
oscillation period.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qwalk import Spin
from qwalk.transport import LatticeParams, displacement, excitation_probability, optimal_ramp_times, potential_for_state

params = LatticeParams()
print(f"site pitch {params.site_pitch * 1e9:.2f} nm, displacement at theta = pi {displacement(np.pi) * 1e9:.2f} nm")
print("excitation zeros (us):", ", ".join(f"{t * 1e6:.2f}" for t in optimal_ramp_times(params, 3)))

x = np.linspace(-params.wavelength / 2, params.wavelength / 2, 400)
fig, ax = plt.subplots(1, 2, figsize=(10, 3.5))
for theta in (0, np.pi / 2, np.pi):
    ax[0].plot(x * 1e9, potential_for_state(Spin.ZERO, x, theta), label=f"|0>, theta={theta:.2f}")
    ax[0].plot(x * 1e9, potential_for_state(Spin.ONE, x, theta), "--", label=f"|1>, theta={theta:.2f}")
ax[0].set_xlabel("x (nm)")
ax[0].set_ylabel("depth (uK)")
ax[0].legend(fontsize=6)

tau = np.linspace(0, 30e-6, 600)
ax[1].semilogy(tau * 1e6, excitation_probability(tau) + 1e-6)
ax[1].set_xlabel("ramp time (us)")
ax[1].set_ylabel("relative excitation")
fig.tight_layout()
fig.savefig("transport.svg")
print("wrote transport.svg")
