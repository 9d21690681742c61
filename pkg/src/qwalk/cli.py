"""Command-line scenario runner.

Each subcommand reproduces one experimental protocol and writes data files,
optional SVG plots and a ``manifest.json`` into the output directory::

    qwalk walk --steps 6 --initial symmetric --out runs/walk
    qwalk scaling --steps 24 --dephase-p 0.05
    qwalk reverse --steps 6 --engine mc --dephase-p 1 --shots 100000

Exit status is 0 on success, 2 for usage/configuration errors and 3 for
runtime failures.  ``QWALK_OUT`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classical import ClassicalWalkSpec, binomial_distribution, classical_walk_mc
from .config import ConfigError, Scenario, ScenarioName, parse_coin, parse_config
from .decoherence import NoiseModel, run_noisy_walk_exact, run_trajectories
from .io import emit_bloch_json, emit_distribution_csv, emit_json, emit_svg_plot, emit_table_csv
from .operators import ShiftConvention, WalkPlan, run_walk
from .state import distribution_sigma, new_localized, position_distribution, spin_vector
from .tomography import (
    TOMOGRAPHY_AXES,
    consistency_check,
    measure_all_axes,
    reconstruct_bloch,
    refocus_analysis,
    scaling_curve,
)
from .transport import (
    LatticeParams,
    displacement,
    excitation_probability,
    optimal_ramp_times,
    potential_for_state,
)

log = logging.getLogger("qwalk")

OUT_ENV = "QWALK_OUT"
EXIT_USAGE = 2
EXIT_RUNTIME = 3


@dataclass
class RunManifest:
    tool_version: str
    scenario: str
    parameters: dict
    master_seed: int
    command: list
    outputs: list = field(default_factory=list)
    duration_s: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def build_plan(s: Scenario) -> WalkPlan:
    return WalkPlan(
        s.steps,
        new_localized(0, spin_vector(s.initial)),
        parse_coin(s.coin),
        ShiftConvention(alternate_roles=s.alternate_shift),
    )


def build_noise(s: Scenario) -> NoiseModel:
    return NoiseModel(s.dephase_p, s.step_fidelity, s.detuning_sigma, s.echo)


def _walk_distribution(s: Scenario, reverse: bool = False):
    plan, noise = build_plan(s), build_noise(s)
    if s.engine == "mc":
        return run_trajectories(plan, noise, s.trials(), s.seed, reverse=reverse)
    if noise == NoiseModel() and not reverse:
        return position_distribution(run_walk(plan))
    return position_distribution(run_noisy_walk_exact(plan, noise, reverse=reverse))


class _Outputs:
    def __init__(self, root: Path):
        self.root = root
        self.files: list[str] = []

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.root / name

    def cleanup(self):
        for name in self.files:
            (self.root / name).unlink(missing_ok=True)


def _bar(dist):
    return (dist.sites, dist.probabilities) + (() if dist.sigma_stat is None else (dist.sigma_stat,))


def _run_walk(s, out):
    dist = _walk_distribution(s)
    emit_distribution_csv(dist, out.path("distribution.csv"))
    emit_json({"sigma": distribution_sigma(dist), "mean": float(np.dot(dist.sites, dist.probabilities))},
              out.path("summary.json"))
    if s.plot:
        emit_svg_plot("bar", {f"N={s.steps}": _bar(dist)}, out.path("distribution.svg"),
                      title=f"quantum walk, {s.initial} initial state")


def _run_classical(s, out):
    spec = ClassicalWalkSpec(s.steps)
    dist = classical_walk_mc(spec, s.trials(), s.seed) if s.engine == "mc" else binomial_distribution(spec)
    emit_distribution_csv(dist, out.path("distribution.csv"))
    if s.plot:
        emit_svg_plot("bar", {f"N={s.steps}": _bar(dist)}, out.path("distribution.svg"),
                      title="classical random walk")


def _run_scaling(s, out):
    rows = scaling_curve(
        range(1, s.steps + 1), engine=s.engine, noise=build_noise(s), initial=s.initial,
        coin=parse_coin(s.coin), shift=ShiftConvention(alternate_roles=s.alternate_shift),
        trials=s.trials(), master_seed=s.seed, max_steps=max(24, s.steps),
    )
    emit_table_csv(["N", "sigma_quantum", "sigma_classical"], rows, out.path("scaling.csv"))
    if s.plot:
        n = [r[0] for r in rows]
        emit_svg_plot("line", {"quantum walk": (n, [r[1] for r in rows]),
                               "random walk": (n, [r[2] for r in rows])},
                      out.path("scaling.svg"), xlabel="steps N", ylabel="standard deviation (sites)")


def _run_tomography(s, out):
    if s.engine != "exact":
        raise ConfigError("tomography needs the exact engine (use --shots for sampled measurements)")
    rho = run_noisy_walk_exact(build_plan(s), build_noise(s))
    six = measure_all_axes(rho, shots=s.shots, master_seed=s.seed)
    total = position_distribution(rho)
    if s.shots is not None:
        rng = np.random.default_rng(np.random.SeedSequence([s.seed, 6]))
        counts = rng.multinomial(s.shots, total.probabilities / total.probabilities.sum())
        total = type(total).from_counts(total.sites, counts)
    for ax in TOMOGRAPHY_AXES:
        sign = "plus" if ax.sign > 0 else "minus"
        emit_distribution_csv(six[ax], out.path(f"population_{sign}_{ax.axis.lower()}.csv"))
    emit_distribution_csv(total, out.path("total.csv"))
    field_ = reconstruct_bloch(six, total)
    emit_bloch_json(field_, out.path("bloch.json"))
    checks = consistency_check(six, total)
    emit_json({k: asdict(v) for k, v in checks.items()}, out.path("consistency.json"))
    if s.plot:
        emit_svg_plot("bar", {ax.label: _bar(six[ax]) for ax in TOMOGRAPHY_AXES},
                      out.path("populations.svg"), title="local tomography")


def _run_reverse(s, out):
    dist = _walk_distribution(s, reverse=True)
    emit_distribution_csv(dist, out.path("distribution.csv"))
    emit_json(asdict(refocus_analysis(dist, origin=0)), out.path("refocus.json"))
    if s.plot:
        emit_svg_plot("bar", {f"{s.steps}+{s.steps} steps": _bar(dist)}, out.path("distribution.svg"),
                      title="time-reversed walk")


def _run_transport(s, out):
    params = LatticeParams()
    zeros = optimal_ramp_times(params, count=3)
    emit_json(
        {
            "wavelength_m": params.wavelength,
            "site_pitch_m": params.site_pitch,
            "displacement_at_pi_m": float(displacement(np.pi, params)),
            "omega_ax_rad_s": params.omega_ax,
            "excitation_zeros_s": zeros,
            "excitation_at_19us": float(excitation_probability(19e-6, params)),
        },
        out.path("transport.json"),
    )
    tau = np.linspace(0, 30e-6, 301)
    emit_table_csv(["tau_s", "excitation"], zip(tau, excitation_probability(tau, params)),
                   out.path("excitation.csv"))
    x = np.linspace(-params.wavelength / 2, params.wavelength / 2, 201)
    rows = [(xi, *(float(potential_for_state(sp, xi, th, params)) for th in (0, np.pi / 2, np.pi) for sp in (0, 1)))
            for xi in x]
    emit_table_csv(["x_m", "U0_theta0", "U1_theta0", "U0_theta_half_pi", "U1_theta_half_pi",
                    "U0_theta_pi", "U1_theta_pi"], rows, out.path("potentials.csv"))
    if s.plot:
        emit_svg_plot("line", {"sinc^2": (tau * 1e6, excitation_probability(tau, params))},
                      out.path("excitation.svg"), xlabel="ramp time (us)", ylabel="relative excitation")


_RUNNERS = {
    ScenarioName.WALK: _run_walk,
    ScenarioName.CLASSICAL: _run_classical,
    ScenarioName.SCALING: _run_scaling,
    ScenarioName.TOMOGRAPHY: _run_tomography,
    ScenarioName.REVERSE: _run_reverse,
    ScenarioName.TRANSPORT: _run_transport,
}


def run_scenario(scenario: Scenario, output_dir) -> RunManifest:
    """Run ``scenario``, writing its files and ``manifest.json`` into ``output_dir``.

    On failure every file written so far is removed before re-raising.
    """
    root = Path(output_dir)
    root.mkdir(parents=True, exist_ok=True)
    out = _Outputs(root)
    t0 = time.perf_counter()
    try:
        _RUNNERS[scenario.name](scenario, out)
        manifest = RunManifest(
            tool_version=__version__,
            scenario=scenario.name.value,
            parameters=scenario.to_dict(),
            master_seed=scenario.seed,
            command=["qwalk"] + scenario.command(),
            outputs=list(out.files),
            duration_s=time.perf_counter() - t0,
        )
        emit_json(manifest.to_dict(), out.path("manifest.json"))
    except BaseException:
        out.cleanup()
        raise
    return manifest


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key = value configuration file")
    common.add_argument("--out", metavar="DIR", help=f"output directory (default ${OUT_ENV} or ./qwalk-out)")
    common.add_argument("--steps", help="number of walk steps N")
    common.add_argument("--initial", choices=["zero", "one", "symmetric", "antisymmetric"])
    common.add_argument("--coin", help="hadamard | pulse:AREA,PHASE")
    common.add_argument("--alternate-shift", choices=["on", "off"])
    common.add_argument("--engine", choices=["exact", "mc"])
    common.add_argument("--shots", help="Monte Carlo trials or tomography shots per axis")
    common.add_argument("--seed", help="master seed")
    common.add_argument("--dephase-p", help="per-step coin dephasing probability")
    common.add_argument("--detuning-sigma", help="static detuning spread, rad/step (mc engine)")
    common.add_argument("--echo", choices=["on", "off"])
    common.add_argument("--step-fidelity", help="probability of an error-free step")
    common.add_argument("--plot", choices=["on", "off"])
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="qwalk", description="Quantum walk scenario runner")
    p.add_argument("--version", action="version", version=f"qwalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ScenarioName:
        sub.add_parser(name.value, parents=[common])
    return p


_FLAG_KEYS = ("steps", "initial", "coin", "alternate_shift", "engine", "shots", "seed",
              "dephase_p", "detuning_sigma", "echo", "step_fidelity", "plot")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {k: getattr(args, k) for k in _FLAG_KEYS}
    overrides["scenario"] = args.command
    try:
        scenario = parse_config(args.config, overrides)
    except (ConfigError, OSError) as e:
        print(f"qwalk: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = args.out or os.environ.get(OUT_ENV) or "qwalk-out"
    try:
        manifest = run_scenario(scenario, out_dir)
    except ConfigError as e:
        print(f"qwalk: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001 - reported, not swallowed
        print(f"qwalk: runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    log.info("wrote %d files to %s in %.2f s", len(manifest.outputs), out_dir, manifest.duration_s)
    return 0


if __name__ == "__main__":
    sys.exit(main())
