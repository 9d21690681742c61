"""Spin-dependent lattice transport in a lin-theta-lin standing wave.

These are analytic estimates of when the walk's perfect, instantaneous
shift is a good idealization; the walk engine itself does not use them.
The measured 19 us ramp optimum is not hard-coded: with the nominal
axial frequency the second zero of the sinc^2 law falls at 16.7 us.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .state import Spin

__all__ = [
    "LatticeParams",
    "displacement",
    "potential_for_state",
    "excitation_probability",
    "optimal_ramp_times",
]


@dataclass(frozen=True)
class LatticeParams:
    wavelength: float = 865.9e-9  # m
    depth_V0: float = 80.0  # k_B x uK
    omega_ax: float = 2 * np.pi * 120e3  # rad/s

    def __post_init__(self):
        for name in ("wavelength", "depth_V0", "omega_ax"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def k(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def site_pitch(self) -> float:
        return self.wavelength / 2


def displacement(theta: ArrayLike, params: LatticeParams = LatticeParams()):
    """Relative displacement theta * lambda / (2 pi) of the two circular lattices."""
    return np.asarray(theta) * params.wavelength / (2 * np.pi)


def _u(x, theta, params, sign):
    return params.depth_V0 * np.cos(params.k * (np.asarray(x) + sign * displacement(theta, params) / 2)) ** 2


def potential_for_state(spin: Spin, x: ArrayLike, theta: ArrayLike, params: LatticeParams = LatticeParams()):
    """Optical potential seen by ``spin`` at position ``x`` (m).

    U_0 = U+, U_1 = 7/8 U- + 1/8 U+, with U+- = V0 cos^2(k (x +- dx/2)).
    """
    u_plus = _u(x, theta, params, +1)
    if Spin(spin) is Spin.ZERO:
        return u_plus
    return 7 / 8 * _u(x, theta, params, -1) + 1 / 8 * u_plus


def excitation_probability(tau: ArrayLike, params: LatticeParams = LatticeParams()):
    """Relative vibrational excitation sinc^2(omega_ax tau / 2) for a ramp of duration ``tau``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("ramp time must be non-negative")
    # numpy's sinc is sin(pi x)/(pi x)
    return np.sinc(params.omega_ax * tau / (2 * np.pi)) ** 2


def optimal_ramp_times(params: LatticeParams = LatticeParams(), count: int = 2) -> list[float]:
    """First ``count`` zeros of the excitation law, tau_k = 2 pi k / omega_ax."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return [2 * np.pi * k / params.omega_ax for k in range(1, count + 1)]
