"""Coin pulses, state-dependent shifts, the walk engine and its time reversal."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .state import DensityState, State, WalkerState, WindowError, resize_window

__all__ = [
    "PulseSpec",
    "CoinOperator",
    "Direction",
    "ShiftConvention",
    "WalkPlan",
    "rotation_from_pulse",
    "hadamard_coin",
    "inverse_coin",
    "identity_coin",
    "apply_coin",
    "apply_shift",
    "step_directions",
    "run_walk",
    "time_reverse",
    "walk_window",
    "INIT_PULSE",
    "COIN_PULSE",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY = np.eye(2, dtype=np.complex128)

UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class PulseSpec:
    """Resonant microwave pulse: rotation ``area`` about an equatorial axis at ``phase``."""

    area: float
    phase: float = 0.0

    def __post_init__(self):
        if self.area < 0:
            raise ValueError("pulse area must be non-negative")
        object.__setattr__(self, "phase", float(self.phase) % (2 * np.pi))


@dataclass(frozen=True, eq=False)
class CoinOperator:
    """A 2x2 unitary acting on the internal state at every site."""

    matrix: NDArray[np.complex128]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError("coin must be 2x2")
        if np.max(np.abs(m.conj().T @ m - IDENTITY)) > UNITARY_TOL:
            raise ValueError("coin matrix is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def inverse(self) -> "CoinOperator":
        return CoinOperator(self.matrix.conj().T)

    def __matmul__(self, other: "CoinOperator") -> "CoinOperator":
        return CoinOperator(self.matrix @ other.matrix)

    def __call__(self, spinor: ArrayLike) -> NDArray[np.complex128]:
        return self.matrix @ np.asarray(spinor, dtype=np.complex128)


# Initialization pulse |0> -> (|0> + i|1>)/sqrt(2) and the 3pi/2 coin pulse with
# its embedded echo.
INIT_PULSE = PulseSpec(np.pi / 2, np.pi)
COIN_PULSE = PulseSpec(3 * np.pi / 2, np.pi / 2)


def rotation_from_pulse(pulse: PulseSpec) -> CoinOperator:
    """exp(-i area/2 (cos(phase) sx + sin(phase) sy))."""
    half = pulse.area / 2
    axis = np.cos(pulse.phase) * SIGMA_X + np.sin(pulse.phase) * SIGMA_Y
    return CoinOperator(np.cos(half) * IDENTITY - 1j * np.sin(half) * axis)


def hadamard_coin() -> CoinOperator:
    """Hadamard-type coin: |0> -> (|0> - |1>)/sqrt2, |1> -> (|0> + |1>)/sqrt2."""
    return CoinOperator(np.array([[1, 1], [-1, 1]], dtype=np.complex128) / np.sqrt(2))


def inverse_coin() -> CoinOperator:
    """Exact inverse of :func:`hadamard_coin` (its adjoint)."""
    return hadamard_coin().inverse()


def identity_coin() -> CoinOperator:
    return CoinOperator(IDENTITY)


class Direction(Enum):
    ZERO_RIGHT = 1
    ZERO_LEFT = -1


@dataclass(frozen=True)
class ShiftConvention:
    """Which way each internal state moves.

    With ``alternate_roles`` the directions of |0> and |1> are swapped on
    every even step (2, 4, 6, ...), as in the experiment's transport scheme.
    """

    alternate_roles: bool = True
    first_step_direction: Direction = Direction.ZERO_RIGHT


FIXED_SHIFT = ShiftConvention(alternate_roles=False)


def step_directions(step_index: int, convention: ShiftConvention) -> tuple[int, int]:
    """Displacement (in sites) of |0> and |1> on the 1-based step ``step_index``."""
    d0 = convention.first_step_direction.value
    if convention.alternate_roles and step_index % 2 == 0:
        d0 = -d0
    return d0, -d0


@dataclass(frozen=True, eq=False)
class WalkPlan:
    """N coin+shift steps applied to ``initial``.

    ``coin`` is either one coin used on every step or a sequence of length
    ``steps`` giving a time-dependent schedule.
    """

    steps: int
    initial: State
    coin: Union[CoinOperator, Sequence[CoinOperator]] = field(default_factory=hadamard_coin)
    shift: ShiftConvention = field(default_factory=ShiftConvention)

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not isinstance(self.coin, CoinOperator):
            coins = tuple(self.coin)
            if len(coins) != self.steps:
                raise ValueError(f"coin schedule has {len(coins)} entries for {self.steps} steps")
            object.__setattr__(self, "coin", coins)

    def coin_at(self, step_index: int) -> CoinOperator:
        """Coin for the 1-based step ``step_index``."""
        if isinstance(self.coin, CoinOperator):
            return self.coin
        return self.coin[step_index - 1]


# -- array-level kernels ---------------------------------------------------
# Pure amplitudes have shape (..., n_sites, 2); density tensors (n, 2, n, 2).


def _coin_pure(amps: NDArray, u: NDArray) -> NDArray:
    return amps @ u.T


def _coin_density(rho: NDArray, u: NDArray) -> NDArray:
    return np.einsum("ab,xbyc,dc->xayd", u, rho, u.conj(), optimize=True)


def _roll_sites(a: NDArray, d: int, axis: int) -> NDArray:
    """Translate by ``d`` sites along ``axis``; the wrapped edge must be empty."""
    if d == 0:
        return a
    edge = [slice(None)] * a.ndim
    edge[axis] = slice(-d, None) if d > 0 else slice(None, -d)
    if np.any(a[tuple(edge)] != 0):
        raise WindowError("shift would move amplitude outside the site window")
    return np.roll(a, d, axis=axis)


def _shift_pure(amps: NDArray, dirs: tuple[int, int]) -> NDArray:
    out = np.empty_like(amps)
    for s, d in enumerate(dirs):
        out[..., s] = _roll_sites(amps[..., s], d, axis=-1)
    return out


def _shift_density(rho: NDArray, dirs: tuple[int, int]) -> NDArray:
    out = np.empty_like(rho)
    for s, d in enumerate(dirs):
        out[:, s] = _roll_sites(rho[:, s], d, axis=0)
    res = np.empty_like(out)
    for s, d in enumerate(dirs):
        res[..., s] = _roll_sites(out[..., s], d, axis=2)
    return res


def _unwrap(state: State) -> NDArray:
    if isinstance(state, WalkerState):
        return np.array(state.amplitudes)
    return np.array(state.tensor())


def _wrap(arr: NDArray, like: State) -> State:
    if isinstance(like, WalkerState):
        return WalkerState(arr, like.site_min)
    n = arr.shape[0]
    return DensityState(arr.reshape(2 * n, 2 * n), like.site_min)


def _coin_any(arr: NDArray, u: NDArray, pure: bool) -> NDArray:
    return _coin_pure(arr, u) if pure else _coin_density(arr, u)


def _shift_any(arr: NDArray, dirs: tuple[int, int], pure: bool) -> NDArray:
    return _shift_pure(arr, dirs) if pure else _shift_density(arr, dirs)


# -- public operations -----------------------------------------------------


def apply_coin(state: State, coin: CoinOperator) -> State:
    """Apply ``coin`` to the internal state at every site."""
    pure = isinstance(state, WalkerState)
    return _wrap(_coin_any(_unwrap(state), coin.matrix, pure), state)


def apply_shift(
    state: State, step_index: int, convention: ShiftConvention, inverted: bool = False
) -> State:
    """State-dependent translation for step ``step_index`` (or its inverse)."""
    d0, d1 = step_directions(step_index, convention)
    if inverted:
        d0, d1 = -d0, -d1
    pure = isinstance(state, WalkerState)
    return _wrap(_shift_any(_unwrap(state), (d0, d1), pure), state)


def _support(state: State) -> tuple[int, int]:
    if isinstance(state, WalkerState):
        w = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
    else:
        w = np.einsum("xsxs->x", state.tensor()).real
    nz = np.flatnonzero(w)
    return state.site_min + int(nz[0]), state.site_min + int(nz[-1])


def walk_window(state: State, steps: int) -> tuple[int, int]:
    """Window covering every site reachable in ``steps`` steps, plus one site of headroom."""
    lo, hi = _support(state)
    return lo - steps - 1, hi + steps + 1


def run_walk(plan: WalkPlan) -> State:
    """Apply N x (shift . coin) to ``plan.initial``; the coin acts first."""
    state = resize_window(plan.initial, *walk_window(plan.initial, plan.steps))
    pure = isinstance(state, WalkerState)
    arr = _unwrap(state)
    for k in range(1, plan.steps + 1):
        arr = _coin_any(arr, plan.coin_at(k).matrix, pure)
        arr = _shift_any(arr, step_directions(k, plan.shift), pure)
    return _wrap(arr, state)


def time_reverse(state: State, plan: WalkPlan, steps: int | None = None) -> State:
    """Undo ``plan``: for k = N..1 apply the inverse shift of step k, then the inverse coin.

    ``steps`` undoes only the last ``steps`` steps of the plan (0 is the identity).
    """
    steps = plan.steps if steps is None else steps
    if not 0 <= steps <= plan.steps:
        raise ValueError(f"can undo between 0 and {plan.steps} steps, got {steps}")
    if steps == 0:
        return state
    state = resize_window(state, *walk_window(state, steps))
    pure = isinstance(state, WalkerState)
    arr = _unwrap(state)
    for k in range(plan.steps, plan.steps - steps, -1):
        d0, d1 = step_directions(k, plan.shift)
        arr = _shift_any(arr, (-d0, -d1), pure)
        arr = _coin_any(arr, plan.coin_at(k).matrix.conj().T, pure)
    return _wrap(arr, state)
