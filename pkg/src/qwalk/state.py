"""Basis bookkeeping and state containers for a walker on a 1D lattice.

The joint basis is |site> (x) |spin>, with sites held in a contiguous
integer window ``[site_min, site_max]``.  Pure states store amplitudes as an
``(n_sites, 2)`` array; mixed states store the dense density matrix with the
flattened index ``2 * (site - site_min) + spin``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "Spin",
    "WalkerState",
    "DensityState",
    "PositionDistribution",
    "WindowError",
    "spin_vector",
    "new_localized",
    "to_density",
    "position_distribution",
    "site_spin_block",
    "resize_window",
    "distribution_sigma",
]

NORM_TOL = 1e-10

SQRT_HALF = 1.0 / np.sqrt(2.0)

# Named internal states used by the walk protocols.
_NAMED_SPINS = {
    "zero": (1.0, 0.0),
    "one": (0.0, 1.0),
    "symmetric": (SQRT_HALF, 1j * SQRT_HALF),
    "antisymmetric": (SQRT_HALF, -1j * SQRT_HALF),
    "plus": (SQRT_HALF, SQRT_HALF),
    "minus": (SQRT_HALF, -SQRT_HALF),
}


class Spin(IntEnum):
    """Internal state label: ZERO is |F=4, m_F=4>, ONE is |F=3, m_F=3>."""

    ZERO = 0
    ONE = 1


class WindowError(ValueError):
    """Raised when an operation would push amplitude outside the site window."""


def spin_vector(name: str) -> NDArray[np.complex128]:
    """Return the named spinor (``zero``, ``one``, ``symmetric``, ...)."""
    try:
        return np.array(_NAMED_SPINS[name], dtype=np.complex128)
    except KeyError:
        raise ValueError(
            f"unknown spin state {name!r}; expected one of {sorted(_NAMED_SPINS)}"
        ) from None


def _readonly(a: NDArray) -> NDArray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WalkerState:
    """Pure walker state over ``[site_min, site_min + n_sites - 1]``."""

    amplitudes: NDArray[np.complex128]
    site_min: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise ValueError(f"amplitudes must have shape (n_sites, 2), got {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"walker state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", _readonly(amps))
        object.__setattr__(self, "site_min", int(self.site_min))

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def site_max(self) -> int:
        return self.site_min + self.n_sites - 1

    @property
    def sites(self) -> NDArray[np.int64]:
        return np.arange(self.site_min, self.site_max + 1)

    def amplitude(self, site: int, spin: int) -> complex:
        i = site - self.site_min
        if 0 <= i < self.n_sites:
            return complex(self.amplitudes[i, int(spin)])
        return 0j

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def fidelity(self, other: "WalkerState") -> float:
        """|<self|other>|^2, aligning the two windows."""
        lo = min(self.site_min, other.site_min)
        hi = max(self.site_max, other.site_max)
        a = resize_window(self, lo, hi).amplitudes
        b = resize_window(other, lo, hi).amplitudes
        return float(abs(np.vdot(a, b)) ** 2)


@dataclass(frozen=True, eq=False)
class DensityState:
    """Mixed walker state; ``matrix`` is ``(2 n_sites, 2 n_sites)``."""

    matrix: NDArray[np.complex128]
    site_min: int

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] % 2:
            raise ValueError(f"density matrix must be square with even size, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        object.__setattr__(self, "matrix", _readonly(rho))
        object.__setattr__(self, "site_min", int(self.site_min))

    @property
    def n_sites(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def site_max(self) -> int:
        return self.site_min + self.n_sites - 1

    @property
    def sites(self) -> NDArray[np.int64]:
        return np.arange(self.site_min, self.site_max + 1)

    def tensor(self) -> NDArray[np.complex128]:
        """View as ``rho[x, s, x', s']``."""
        n = self.n_sites
        return self.matrix.reshape(n, 2, n, 2)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


@dataclass(frozen=True, eq=False)
class PositionDistribution:
    """Probability of finding the walker at each site of a window.

    ``shots`` and ``sigma_stat`` are set for sampled distributions, where
    ``probabilities`` equals counts / shots exactly.
    """

    sites: NDArray[np.int64]
    probabilities: NDArray[np.float64]
    shots: int | None = None
    counts: NDArray[np.int64] | None = None
    sigma_stat: NDArray[np.float64] | None = field(default=None)

    def __post_init__(self):
        sites = np.asarray(self.sites, dtype=np.int64)
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if sites.shape != probs.shape or sites.ndim != 1:
            raise ValueError("sites and probabilities must be 1D arrays of equal length")
        if sites.size and np.any(np.diff(sites) <= 0):
            raise ValueError("sites must be strictly ascending")
        object.__setattr__(self, "sites", _readonly(sites))
        object.__setattr__(self, "probabilities", _readonly(probs))
        if self.counts is not None:
            object.__setattr__(self, "counts", _readonly(np.asarray(self.counts, dtype=np.int64)))
        if self.sigma_stat is not None:
            object.__setattr__(
                self, "sigma_stat", _readonly(np.asarray(self.sigma_stat, dtype=np.float64))
            )

    @classmethod
    def from_counts(cls, sites: ArrayLike, counts: ArrayLike, shots: int | None = None):
        """Empirical distribution; ``shots`` defaults to the total count.

        A ``shots`` larger than the total is allowed for post-selected
        measurements where some shots leave no atom behind.
        """
        counts = np.asarray(counts, dtype=np.int64)
        shots = int(counts.sum()) if shots is None else int(shots)
        if shots <= 0:
            raise ValueError("shots must be positive")
        p = counts / shots
        return cls(sites, p, shots=shots, counts=counts, sigma_stat=np.sqrt(p * (1.0 - p) / shots))

    @classmethod
    def from_mapping(cls, probs: Mapping[int, float]):
        sites = sorted(probs)
        return cls(np.array(sites, dtype=np.int64), np.array([probs[s] for s in sites]))

    def __getitem__(self, site: int) -> float:
        i = np.searchsorted(self.sites, site)
        if i < self.sites.size and self.sites[i] == site:
            return float(self.probabilities[i])
        return 0.0

    def as_dict(self, drop_zeros: bool = False) -> dict[int, float]:
        return {
            int(s): float(p)
            for s, p in zip(self.sites, self.probabilities)
            if not (drop_zeros and p == 0.0)
        }

    def total(self) -> float:
        return float(self.probabilities.sum())

    def on_sites(self, sites: ArrayLike) -> NDArray[np.float64]:
        """Probabilities evaluated on an arbitrary site list (0 outside)."""
        return np.array([self[int(s)] for s in np.asarray(sites)])

    def mirrored(self) -> "PositionDistribution":
        """Distribution of -site."""
        sig = None if self.sigma_stat is None else self.sigma_stat[::-1]
        cnt = None if self.counts is None else self.counts[::-1]
        return PositionDistribution(
            -self.sites[::-1], self.probabilities[::-1], self.shots, cnt, sig
        )


State = Union[WalkerState, DensityState]


def new_localized(site: int, spin: ArrayLike, halfwidth: int = 1) -> WalkerState:
    """Walker at ``site`` with internal state ``spin`` (a unit 2-vector).

    The window extends ``halfwidth`` sites on either side of ``site``.
    """
    spin = np.asarray(spin, dtype=np.complex128).reshape(-1)
    if spin.shape != (2,):
        raise ValueError("spin must be a complex 2-vector")
    if abs(np.vdot(spin, spin).real - 1.0) > 1e-12:
        raise ValueError(f"spin vector must have unit norm, got |spin|^2 = {np.vdot(spin, spin).real!r}")
    if halfwidth < 0:
        raise ValueError("halfwidth must be non-negative")
    amps = np.zeros((2 * halfwidth + 1, 2), dtype=np.complex128)
    amps[halfwidth] = spin
    return WalkerState(amps, site - halfwidth)


def resize_window(state: State, site_min: int, site_max: int) -> State:
    """Re-embed ``state`` into ``[site_min, site_max]``.

    Raises WindowError if nonzero weight would be cut off.
    """
    if site_max < site_min:
        raise ValueError("empty window")
    n_new = site_max - site_min + 1
    off = state.site_min - site_min
    lo, hi = max(0, -off), min(state.n_sites, n_new - off)
    if isinstance(state, WalkerState):
        kept = np.zeros(state.amplitudes.shape, dtype=bool)
        kept[lo:hi] = True
        if np.any(state.amplitudes[~kept] != 0):
            raise WindowError("resize would drop nonzero amplitudes")
        amps = np.zeros((n_new, 2), dtype=np.complex128)
        amps[off + lo : off + hi] = state.amplitudes[lo:hi]
        return WalkerState(amps, site_min)
    rho = state.tensor()
    diag = np.einsum("xsxs->x", rho).real
    if np.any(diag[:lo] != 0) or np.any(diag[hi:] != 0):
        raise WindowError("resize would drop nonzero populations")
    new = np.zeros((n_new, 2, n_new, 2), dtype=np.complex128)
    new[off + lo : off + hi, :, off + lo : off + hi, :] = rho[lo:hi, :, lo:hi, :]
    return DensityState(new.reshape(2 * n_new, 2 * n_new), site_min)


def to_density(state: WalkerState) -> DensityState:
    """Projector |psi><psi| on the same window."""
    v = state.amplitudes.reshape(-1)
    return DensityState(np.outer(v, v.conj()), state.site_min)


def position_distribution(state: State) -> PositionDistribution:
    """Site marginal, summing over the internal state."""
    if isinstance(state, WalkerState):
        p = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
    else:
        p = np.einsum("xsxs->x", state.tensor()).real.copy()
    return PositionDistribution(state.sites, p)


def site_spin_block(density: DensityState, site: int) -> NDArray[np.complex128]:
    """2x2 spin block of ``density`` at ``site``; zeros outside the window."""
    i = site - density.site_min
    if not 0 <= i < density.n_sites:
        return np.zeros((2, 2), dtype=np.complex128)
    return np.array(density.tensor()[i, :, i, :])


def distribution_sigma(dist: PositionDistribution) -> float:
    """Standard deviation of the site about the distribution mean."""
    x = dist.sites.astype(np.float64)
    p = dist.probabilities
    mean = np.dot(x, p)
    # centered form; E[x^2] - E[x]^2 cancels badly for narrow distributions
    var = np.dot((x - mean) ** 2, p)
    return float(np.sqrt(var))
