"""Decoherence channels and the Monte Carlo trajectory engine.

Two engines evolve a walk under the same :class:`NoiseModel`:

* :func:`run_noisy_walk_exact` propagates the density matrix through the
  dephasing channel after every coin.
* :func:`run_trajectories` samples pure-state trajectories in which the
  same dephasing appears as a random projective z measurement, and which
  can additionally carry a per-trajectory static detuning.

Every trajectory draws its random numbers from its own counter-based
Philox stream keyed by ``(master_seed, trial_index)``, so results do not
depend on how trials are chunked or distributed over workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from numpy.typing import NDArray

from .operators import (
    WalkPlan,
    _coin_density,
    _coin_pure,
    _shift_density,
    _shift_pure,
    step_directions,
    walk_window,
)
from .state import (
    DensityState,
    PositionDistribution,
    WalkerState,
    distribution_sigma,
    position_distribution,
    resize_window,
    to_density,
)

__all__ = [
    "NoiseModel",
    "TrajectoryRng",
    "UnsupportedNoiseError",
    "dephase_coin",
    "run_noisy_walk_exact",
    "run_trajectories",
    "trajectory_final_state",
    "quantum_to_classical_scan",
]

DEFAULT_CHUNK = 8192


class UnsupportedNoiseError(ValueError):
    """The exact engine cannot represent a per-trajectory static detuning."""


@dataclass(frozen=True)
class NoiseModel:
    """Per-step noise parameters.

    coin_dephase_p
        Probability per step that the spin is projected onto {|0>, |1>}.
    step_fidelity
        Probability per step that no error event occurs; an error event is
        modelled as the same projection.
    static_detuning_sigma
        Spread (rad/step) of a detuning that is constant within a trajectory
        and accrues phase on |1> during each transport.
    echo_enabled
        Whether the pi pulse embedded in the coin refocuses that phase.
    """

    coin_dephase_p: float = 0.0
    step_fidelity: float = 1.0
    static_detuning_sigma: float = 0.0
    echo_enabled: bool = True

    def __post_init__(self):
        for name in ("coin_dephase_p", "step_fidelity"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if self.static_detuning_sigma < 0:
            raise ValueError("static_detuning_sigma must be >= 0")

    @property
    def effective_dephase_p(self) -> float:
        """Probability that a step ends with a projective spin measurement."""
        return 1.0 - self.step_fidelity * (1.0 - self.coin_dephase_p)


@dataclass(frozen=True)
class TrajectoryRng:
    """Identifies the random stream of one trajectory."""

    master_seed: int
    trial_index: int

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.trial_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def dephase_coin(density: DensityState, p: float) -> DensityState:
    """rho -> (1-p) rho + p sum_s P_s rho P_s, with P_s projecting spin s on every site."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dephasing probability must lie in [0, 1], got {p!r}")
    rho = _dephase_tensor(np.array(density.tensor()), p)
    n = density.n_sites
    return DensityState(rho.reshape(2 * n, 2 * n), density.site_min)


def _dephase_tensor(rho: NDArray, p: float) -> NDArray:
    if p == 0.0:
        return rho
    out = rho.copy()
    # spin-changing coherences rho[x, s, x', s'] with s != s'
    out[:, 0, :, 1] *= 1.0 - p
    out[:, 1, :, 0] *= 1.0 - p
    return out


def _forward_and_back(plan: WalkPlan, reverse: bool):
    """Yield (step_index, inverted) for the forward walk and optional reversal."""
    for k in range(1, plan.steps + 1):
        yield k, False
    if reverse:
        for k in range(plan.steps, 0, -1):
            yield k, True


def run_noisy_walk_exact(
    plan: WalkPlan, noise: NoiseModel, reverse: bool = False
) -> DensityState:
    """Density-matrix evolution: per step coin, dephasing channel, shift.

    With ``reverse`` the N forward steps are followed by N reversed steps
    (inverse shift, inverse coin, dephasing channel).
    """
    if noise.static_detuning_sigma > 0:
        raise UnsupportedNoiseError(
            "static detuning varies per trajectory; use run_trajectories instead"
        )
    initial = plan.initial
    if isinstance(initial, WalkerState):
        initial = to_density(initial)
    total = plan.steps * (2 if reverse else 1)
    state = resize_window(initial, *walk_window(initial, total))
    p = noise.effective_dephase_p
    rho = np.array(state.tensor())
    for k, inverted in _forward_and_back(plan, reverse):
        d0, d1 = step_directions(k, plan.shift)
        u = plan.coin_at(k).matrix
        if inverted:
            rho = _shift_density(rho, (-d0, -d1))
            rho = _coin_density(rho, u.conj().T)
        else:
            rho = _coin_density(rho, u)
        rho = _dephase_tensor(rho, p)
        if not inverted:
            rho = _shift_density(rho, (d0, d1))
    n = state.n_sites
    return DensityState(rho.reshape(2 * n, 2 * n), state.site_min)


# -- trajectories ----------------------------------------------------------


def _draws(master_seed: int, trials: range, total_steps: int):
    """Per-trial detuning normals and uniforms, in a fixed per-stream layout.

    Layout of trial i's stream: one standard normal, then ``total_steps``
    event uniforms, ``total_steps`` outcome uniforms and one position uniform.
    """
    normals = np.empty(len(trials))
    uniforms = np.empty((len(trials), 2 * total_steps + 1))
    for j, i in enumerate(trials):
        g = TrajectoryRng(master_seed, i).generator()
        normals[j] = g.standard_normal()
        uniforms[j] = g.random(2 * total_steps + 1)
    return normals, uniforms


def _project_spin(psi: NDArray, mask: NDArray, u: NDArray) -> None:
    """In-place z measurement of the spin for the trajectories in ``mask``."""
    if not mask.any():
        return
    sub = psi[mask]
    p1 = np.sum(np.abs(sub[..., 1]) ** 2, axis=-1)
    got_one = u[mask] < p1
    keep = np.where(got_one, p1, 1.0 - p1)
    sub[got_one, :, 0] = 0
    sub[~got_one, :, 1] = 0
    sub /= np.sqrt(keep)[:, None, None]
    psi[mask] = sub


def _detuning_phase(delta: NDArray, noise: NoiseModel) -> NDArray | None:
    """Phase factor imprinted on |1> during one transport, or None if trivial."""
    if noise.static_detuning_sigma == 0:
        return None
    if noise.echo_enabled:
        # The echo pi pulse reverses the phase accrued before it, so a detuning
        # that is constant over the trajectory leaves no residual phase.
        return None
    return np.exp(1j * delta)


def _evolve_batch(plan, noise, psi0, normals, uniforms, reverse):
    total = plan.steps * (2 if reverse else 1)
    psi = np.broadcast_to(psi0, (len(normals),) + psi0.shape).copy()
    phase = _detuning_phase(noise.static_detuning_sigma * normals, noise)
    p = noise.effective_dephase_p
    for t, (k, inverted) in enumerate(_forward_and_back(plan, reverse)):
        d0, d1 = step_directions(k, plan.shift)
        u = plan.coin_at(k).matrix
        if inverted:
            if phase is not None:
                psi[..., 1] *= phase[:, None]
            psi = _shift_pure(psi, (-d0, -d1))
            psi = _coin_pure(psi, u.conj().T)
        else:
            psi = _coin_pure(psi, u)
        if p > 0:
            _project_spin(psi, uniforms[:, t] < p, uniforms[:, total + t])
        if not inverted:
            if phase is not None:
                psi[..., 1] *= phase[:, None]
            psi = _shift_pure(psi, (d0, d1))
    return psi


def _prepare(plan: WalkPlan, reverse: bool) -> WalkerState:
    if not isinstance(plan.initial, WalkerState):
        raise TypeError("the trajectory engine needs a pure initial state")
    total = plan.steps * (2 if reverse else 1)
    return resize_window(plan.initial, *walk_window(plan.initial, total))


def _count_chunk(plan, noise, state, master_seed, trials, reverse):
    total = plan.steps * (2 if reverse else 1)
    normals, uniforms = _draws(master_seed, trials, total)
    psi = _evolve_batch(plan, noise, state.amplitudes, normals, uniforms, reverse)
    weights = np.sum(np.abs(psi) ** 2, axis=-1)
    cdf = np.cumsum(weights, axis=1)
    target = uniforms[:, -1] * cdf[:, -1]
    idx = np.minimum(np.sum(cdf <= target[:, None], axis=1), state.n_sites - 1)
    return np.bincount(idx, minlength=state.n_sites)


def run_trajectories(
    plan: WalkPlan,
    noise: NoiseModel,
    trials: int,
    master_seed: int,
    reverse: bool = False,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> PositionDistribution:
    """Sample ``trials`` independent trajectories and histogram the final site."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    state = _prepare(plan, reverse)
    chunks = [range(a, min(a + chunk_size, trials)) for a in range(0, trials, chunk_size)]

    def work(r):
        return _count_chunk(plan, noise, state, master_seed, r, reverse)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(r) for r in chunks]
    counts = np.sum(parts, axis=0)
    return PositionDistribution.from_counts(state.sites, counts, shots=trials)


def trajectory_final_state(
    plan: WalkPlan,
    noise: NoiseModel,
    master_seed: int,
    trial_index: int,
    reverse: bool = False,
) -> WalkerState:
    """Final pure state of a single trajectory (before the position readout)."""
    state = _prepare(plan, reverse)
    total = plan.steps * (2 if reverse else 1)
    normals, uniforms = _draws(master_seed, range(trial_index, trial_index + 1), total)
    psi = _evolve_batch(plan, noise, state.amplitudes, normals, uniforms, reverse)
    return WalkerState(psi[0], state.site_min)


def quantum_to_classical_scan(
    plan: WalkPlan,
    p_values: Iterable[float],
    engine: Literal["exact", "mc"] = "exact",
    trials: int = 10_000,
    master_seed: int = 0,
    base_noise: NoiseModel | None = None,
) -> list[tuple[float, float]]:
    """Distribution width as a function of the per-step dephasing probability."""
    base = base_noise or NoiseModel()
    rows = []
    for p in p_values:
        noise = NoiseModel(
            coin_dephase_p=float(p),
            step_fidelity=base.step_fidelity,
            static_detuning_sigma=base.static_detuning_sigma,
            echo_enabled=base.echo_enabled,
        )
        if engine == "exact":
            dist = position_distribution(run_noisy_walk_exact(plan, noise))
        elif engine == "mc":
            dist = run_trajectories(plan, noise, trials, master_seed)
        else:
            raise ValueError(f"unknown engine {engine!r}")
        rows.append((float(p), distribution_sigma(dist)))
    return rows
