"""Site-resolved tomography and the statistics used to characterize a walk.

Local tomography measures, for each of the six Pauli eigenstates, the
population distribution that survives a readout pulse followed by removal
of |0> atoms.  The Bloch vector at each site follows from differences of
opposite-eigenstate distributions.  The module also holds the width
scaling table, the refocusing analysis of forward+reverse sequences, and
an estimator for spin-changing position coherences built from extra shift
operations before the final coin.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import OptimizeWarning, brentq, curve_fit

from .classical import classical_sigma
from .decoherence import NoiseModel, run_noisy_walk_exact, run_trajectories
from .operators import (
    CoinOperator,
    PulseSpec,
    ShiftConvention,
    WalkPlan,
    _shift_pure,
    hadamard_coin,
    rotation_from_pulse,
)
from .state import (
    DensityState,
    PositionDistribution,
    WalkerState,
    WindowError,
    distribution_sigma,
    new_localized,
    position_distribution,
    resize_window,
    spin_vector,
    to_density,
)

__all__ = [
    "PauliAxis",
    "TOMOGRAPHY_AXES",
    "BlochField",
    "AxisConsistency",
    "RefocusReport",
    "measure_axis_population",
    "measure_all_axes",
    "reconstruct_bloch",
    "bloch_vectors",
    "consistency_check",
    "distribution_sigma",
    "scaling_curve",
    "refocus_analysis",
    "refocus_scan",
    "calibrate_refocus",
    "offdiag_protocol",
]

S = 1 / np.sqrt(2)

_EIGENSTATES = {
    ("Z", +1): (1, 0),
    ("Z", -1): (0, 1),
    ("X", +1): (S, S),
    ("X", -1): (S, -S),
    ("Y", +1): (S, 1j * S),
    ("Y", -1): (S, -1j * S),
}

# Pulse that rotates the eigenstate onto |1>, which survives the push-out.
_READOUT = {
    ("Z", +1): PulseSpec(np.pi, 0.0),
    ("Z", -1): PulseSpec(0.0, 0.0),
    ("X", +1): PulseSpec(np.pi / 2, np.pi / 2),
    ("X", -1): PulseSpec(np.pi / 2, 3 * np.pi / 2),
    ("Y", +1): PulseSpec(np.pi / 2, np.pi),
    ("Y", -1): PulseSpec(np.pi / 2, 0.0),
}


@dataclass(frozen=True)
class PauliAxis:
    axis: str  # "X", "Y" or "Z"
    sign: int  # +1 or -1

    def __post_init__(self):
        if (self.axis, self.sign) not in _EIGENSTATES:
            raise ValueError(f"invalid Pauli eigenstate {self.axis}{self.sign:+d}")

    @property
    def eigenstate(self) -> NDArray[np.complex128]:
        return np.array(_EIGENSTATES[self.axis, self.sign], dtype=np.complex128)

    @property
    def readout_pulse(self) -> PulseSpec:
        return _READOUT[self.axis, self.sign]

    @property
    def label(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.axis.lower()


# display order: +z, -y, +x in the first row, their partners below
TOMOGRAPHY_AXES = (
    PauliAxis("Z", +1),
    PauliAxis("Y", -1),
    PauliAxis("X", +1),
    PauliAxis("Z", -1),
    PauliAxis("Y", +1),
    PauliAxis("X", -1),
)


def _as_density(state) -> DensityState:
    return to_density(state) if isinstance(state, WalkerState) else state


def measure_axis_population(
    density: DensityState | WalkerState,
    axis: PauliAxis,
    shots: int | None = None,
    rng: np.random.Generator | int | None = None,
) -> PositionDistribution:
    """Population of the ``axis`` eigenstate at every site.

    The readout pulse maps the eigenstate to |1>; the |1> population is what
    remains after |0> atoms are pushed out.  With ``shots`` the surviving
    atoms are sampled; lost atoms count towards ``shots`` but no site.
    """
    rho = _as_density(density)
    u = rotation_from_pulse(axis.readout_pulse).matrix
    blocks = u @ np.einsum("xaxb->xab", rho.tensor()) @ u.conj().T
    q = np.clip(blocks[:, 1, 1].real, 0.0, None)
    if shots is None:
        return PositionDistribution(rho.sites, q)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng)
    lost = max(0.0, 1.0 - q.sum())
    pvals = np.append(q, lost)
    counts = rng.multinomial(shots, pvals / pvals.sum())
    return PositionDistribution.from_counts(rho.sites, counts[:-1], shots=shots)


def measure_all_axes(density, shots: int | None = None, master_seed: int = 0):
    """Six-axis measurement with an independent shot budget per axis."""
    seeds = np.random.SeedSequence(master_seed).spawn(len(TOMOGRAPHY_AXES))
    return {
        ax: measure_axis_population(density, ax, shots, np.random.default_rng(ss))
        for ax, ss in zip(TOMOGRAPHY_AXES, seeds)
    }


@dataclass(frozen=True, eq=False)
class BlochField:
    """Per-site population and Bloch vector; ``bloch`` rows are NaN where ``valid`` is False."""

    sites: NDArray[np.int64]
    population: NDArray[np.float64]
    bloch: NDArray[np.float64]
    valid: NDArray[np.bool_]

    def norms(self) -> NDArray[np.float64]:
        return np.linalg.norm(self.bloch, axis=1)

    def records(self) -> list[dict]:
        out = []
        for s, p, b, v in zip(self.sites, self.population, self.bloch, self.valid):
            out.append(
                {
                    "site": int(s),
                    "population": float(p),
                    "bx": float(b[0]) if v else None,
                    "by": float(b[1]) if v else None,
                    "bz": float(b[2]) if v else None,
                    "valid": bool(v),
                }
            )
        return out


def _by_axis(six: Mapping[PauliAxis, PositionDistribution], axis: str, sign: int):
    try:
        return six[PauliAxis(axis, sign)]
    except KeyError:
        raise ValueError(f"missing distribution for {PauliAxis(axis, sign).label}") from None


def reconstruct_bloch(
    six: Mapping[PauliAxis, PositionDistribution],
    total: PositionDistribution,
    floor: float | None = None,
) -> BlochField:
    """b_i = (P_{+i} - P_{-i}) / P_N per site.

    Sites with P_N below ``floor`` get no Bloch vector.  The default floor
    is 1e-6 for exact data and 5 counts for sampled data.
    """
    if floor is None:
        floor = 5.0 / total.shots if total.shots else 1e-6
    sites = total.sites
    pn = total.probabilities
    valid = pn >= floor
    b = np.full((sites.size, 3), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        for col, ax in enumerate("XYZ"):
            diff = _by_axis(six, ax, +1).on_sites(sites) - _by_axis(six, ax, -1).on_sites(sites)
            b[valid, col] = diff[valid] / pn[valid]
    return BlochField(sites, pn.copy(), b, valid)


def bloch_vectors(density: DensityState | WalkerState) -> BlochField:
    """Bloch vectors computed directly from the site blocks of ``density``."""
    rho = _as_density(density)
    blocks = np.einsum("xaxb->xab", rho.tensor())
    pn = np.einsum("xaa->x", blocks).real
    valid = pn >= 1e-6
    b = np.full((pn.size, 3), np.nan)
    r = blocks[valid]
    p = pn[valid]
    b[valid, 0] = 2 * r[:, 0, 1].real / p
    b[valid, 1] = -2 * r[:, 0, 1].imag / p
    b[valid, 2] = (r[:, 0, 0] - r[:, 1, 1]).real / p
    return BlochField(rho.sites, pn, b, valid)


@dataclass(frozen=True)
class AxisConsistency:
    axis: str
    max_deviation: float
    in_sigma: bool  # False: absolute deviation for exact data
    ok: bool


def consistency_check(
    six: Mapping[PauliAxis, PositionDistribution],
    total: PositionDistribution,
    threshold: float = 3.0,
    exact_tol: float = 1e-12,
) -> dict[str, AxisConsistency]:
    """Compare P_{+i} + P_{-i} with the total distribution P_N, per axis.

    For sampled data the deviation is in units of the combined statistical
    error; without ``sigma_stat`` it is absolute and checked against
    ``exact_tol``.
    """
    sites = total.sites
    pn = total.probabilities
    out = {}
    for ax in "XYZ":
        plus, minus = _by_axis(six, ax, +1), _by_axis(six, ax, -1)
        dev = np.abs(plus.on_sites(sites) + minus.on_sites(sites) - pn)
        sampled = all(d.sigma_stat is not None for d in (plus, minus, total))
        if sampled:
            var = (
                _sigma_on(plus, sites) ** 2 + _sigma_on(minus, sites) ** 2 + total.sigma_stat**2
            )
            sig = np.sqrt(var)
            with np.errstate(divide="ignore", invalid="ignore"):
                z = np.where(sig > 0, dev / sig, np.where(dev > 0, np.inf, 0.0))
            worst = float(z.max(initial=0.0))
            out[ax] = AxisConsistency(ax, worst, True, worst < threshold)
        else:
            worst = float(dev.max(initial=0.0))
            out[ax] = AxisConsistency(ax, worst, False, worst <= exact_tol)
    return out


def _sigma_on(dist: PositionDistribution, sites) -> NDArray[np.float64]:
    lookup = dict(zip(dist.sites.tolist(), dist.sigma_stat.tolist()))
    return np.array([lookup.get(int(s), 0.0) for s in sites])


def scaling_curve(
    n_values: Iterable[int],
    engine: str = "exact",
    noise: NoiseModel | None = None,
    initial: str = "symmetric",
    coin: CoinOperator | None = None,
    shift: ShiftConvention | None = None,
    trials: int = 10_000,
    master_seed: int = 0,
    max_steps: int = 24,
) -> list[tuple[int, float, float]]:
    """Rows (N, sigma_quantum, sigma_classical) for each N."""
    noise = noise or NoiseModel()
    shift = shift or ShiftConvention()
    coin = coin or hadamard_coin()
    rows = []
    for n in n_values:
        n = int(n)
        if not 1 <= n <= max_steps:
            raise ValueError(f"N must lie in [1, {max_steps}], got {n}")
        plan = WalkPlan(n, new_localized(0, spin_vector(initial)), coin, shift)
        if engine == "exact":
            dist = position_distribution(run_noisy_walk_exact(plan, noise))
        elif engine == "mc":
            dist = run_trajectories(plan, noise, trials, master_seed)
        else:
            raise ValueError(f"unknown engine {engine!r}")
        rows.append((n, distribution_sigma(dist), classical_sigma(n)))
    return rows


@dataclass(frozen=True)
class RefocusReport:
    refocused_fraction: float
    origin_probability: float
    background_amplitude: float
    background_width: float
    background_center: float
    fit_residual: float
    fit_valid: bool


# background sites below this count as empty (round-off of an exact refocus)
POPULATED = 1e-12


def _gauss(x, a, c, w):
    return a * np.exp(-0.5 * ((x - c) / w) ** 2)


def refocus_analysis(dist: PositionDistribution, origin: int = 0) -> RefocusReport:
    """Fraction refocused onto ``origin`` above a Gaussian background.

    The Gaussian is fitted to the sites of the origin's parity sublattice,
    excluding the origin itself (a forward+reverse sequence has an even
    number of steps, so the other sublattice is empty).
    """
    p0 = dist[origin]
    x = dist.sites
    mask = ((x - origin) % 2 == 0) & (x != origin)
    xs, ys = x[mask].astype(float), dist.probabilities[mask]
    if np.count_nonzero(ys > POPULATED) < 4:
        return RefocusReport(min(max(p0, 0.0), 1.0), p0, 0.0, 0.0, float(origin), 0.0, False)
    w0 = max(np.sqrt(np.sum(ys * (xs - origin) ** 2) / ys.sum()), 1.0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            (a, c, w), _ = curve_fit(_gauss, xs, ys, p0=(ys.max(), float(origin), w0), maxfev=10_000)
    except RuntimeError:
        return RefocusReport(min(max(p0, 0.0), 1.0), p0, 0.0, 0.0, float(origin), 0.0, False)
    w = abs(w)
    resid = float(np.sqrt(np.mean((ys - _gauss(xs, a, c, w)) ** 2)))
    frac = p0 - _gauss(origin, a, c, w)
    return RefocusReport(float(min(max(frac, 0.0), 1.0)), p0, float(a), w, float(c), resid, True)


def refocus_scan(
    p_values: Iterable[float],
    steps: int = 6,
    initial: str = "symmetric",
    shift: ShiftConvention | None = None,
) -> list[tuple[float, float]]:
    """Refocused fraction after ``steps`` forward and reverse steps, per dephasing p (exact engine)."""
    plan = WalkPlan(steps, new_localized(0, spin_vector(initial)), shift=shift or ShiftConvention())
    rows = []
    for p in p_values:
        rho = run_noisy_walk_exact(plan, NoiseModel(coin_dephase_p=float(p)), reverse=True)
        rows.append((float(p), refocus_analysis(position_distribution(rho)).refocused_fraction))
    return rows


def calibrate_refocus(
    target: float = 0.30, steps: int = 6, initial: str = "symmetric", grid: int = 11
) -> float:
    """Dephasing probability at which the refocused fraction equals ``target``."""
    ps = np.linspace(0, 1, grid)
    table = refocus_scan(ps, steps, initial)
    fr = np.array([f for _, f in table])
    hits = np.flatnonzero((fr[:-1] - target) * (fr[1:] - target) <= 0)
    if hits.size == 0:
        raise ValueError(f"refocused fraction never crosses {target} on the scan grid")
    i = hits[0]

    def f(p):
        return refocus_scan([p], steps, initial)[0][1] - target

    return float(brentq(f, ps[i], ps[i + 1], xtol=1e-10))


def offdiag_protocol(
    state: WalkerState, j: int, coin: CoinOperator | None = None
) -> dict[tuple[int, int], complex]:
    """Estimate <x,0| rho |x',1> for x' = x +- 2j from local populations.

    ``j`` extra shifts bring |x,0> and |x+2j,1> (or, with the shift
    inverted, |x,0> and |x-2j,1>) onto a common site y.  Local z populations
    are recorded without a coin, after ``coin`` and after ``coin`` preceded
    by a pi/2 phase on |1>; together they fix the complex coherence of the
    overlapped spin block.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    if 2 * j > state.n_sites - 1:
        raise WindowError(f"separation 2j = {2 * j} exceeds the state window")
    u = (coin or hadamard_coin()).matrix
    c = u[1, 0] * np.conj(u[1, 1])
    if abs(c) < 1e-12:
        raise ValueError("coin does not mix |0> and |1>; coherences are unobservable")
    v = u @ np.diag([1, 1j])
    padded = resize_window(state, state.site_min - j, state.site_max + j)
    out: dict[tuple[int, int], complex] = {}
    for sign in (+1, -1):
        moved = _shift_pure(np.array(padded.amplitudes), (sign * j, -sign * j))
        z0 = np.abs(moved[:, 0]) ** 2
        z1 = np.abs(moved[:, 1]) ** 2
        p_u = np.abs(moved @ u.T)[:, 1] ** 2
        p_v = np.abs(moved @ v.T)[:, 1] ** 2
        diag = abs(u[1, 0]) ** 2 * z0 + abs(u[1, 1]) ** 2 * z1
        b01 = ((p_u - diag) + 1j * (p_v - diag)) / (2 * c)
        for i, y in enumerate(padded.sites):
            x, xp = int(y) - sign * j, int(y) + sign * j
            if state.site_min <= x <= state.site_max and state.site_min <= xp <= state.site_max:
                out[(x, xp)] = complex(b01[i])
    return out
