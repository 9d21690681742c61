"""Scenario configuration: a plain ``key = value`` file overridden by flags.

Defaults (used for keys absent from both the file and the flags)::

    scenario        walk
    steps           6
    initial         symmetric      (zero | one | symmetric | antisymmetric)
    coin            hadamard       (hadamard | pulse:AREA,PHASE, radians, "pi" allowed)
    alternate_shift on
    engine          exact          (exact | mc)
    shots           none           (Monte Carlo trials / tomography shots per axis)
    seed            0
    dephase_p       0.0
    detuning_sigma  0.0
    echo            on
    step_fidelity   1.0
    plot            on

Blank lines and ``#`` comments are ignored; keys may use ``-`` or ``_``.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .operators import CoinOperator, PulseSpec, hadamard_coin, rotation_from_pulse

__all__ = ["ScenarioName", "Scenario", "ConfigError", "parse_config", "parse_coin", "DEFAULT_MC_TRIALS"]

DEFAULT_MC_TRIALS = 10_000


class ConfigError(ValueError):
    """Invalid configuration; reported as a usage error."""


class ScenarioName(str, Enum):
    WALK = "walk"
    CLASSICAL = "classical"
    SCALING = "scaling"
    TOMOGRAPHY = "tomography"
    REVERSE = "reverse"
    TRANSPORT = "transport"


INITIAL_STATES = ("zero", "one", "symmetric", "antisymmetric")
ENGINES = ("exact", "mc")


@dataclass(frozen=True)
class Scenario:
    name: ScenarioName = ScenarioName.WALK
    steps: int = 6
    initial: str = "symmetric"
    coin: str = "hadamard"
    alternate_shift: bool = True
    engine: str = "exact"
    shots: int | None = None
    seed: int = 0
    dephase_p: float = 0.0
    detuning_sigma: float = 0.0
    echo: bool = True
    step_fidelity: float = 1.0
    plot: bool = True

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["name"] = self.name.value
        return d

    def trials(self) -> int:
        return self.shots if self.shots is not None else DEFAULT_MC_TRIALS

    def command(self) -> list[str]:
        """Command line equivalent to this scenario."""
        onoff = {True: "on", False: "off"}
        argv = [self.name.value, "--steps", str(self.steps), "--initial", self.initial,
                "--coin", self.coin, "--alternate-shift", onoff[self.alternate_shift],
                "--engine", self.engine, "--seed", str(self.seed),
                "--dephase-p", repr(self.dephase_p), "--detuning-sigma", repr(self.detuning_sigma),
                "--echo", onoff[self.echo], "--step-fidelity", repr(self.step_fidelity),
                "--plot", onoff[self.plot]]
        if self.shots is not None:
            argv += ["--shots", str(self.shots)]
        return argv


_FIELDS = {f.name: f for f in fields(Scenario)}
VALID_KEYS = sorted(["scenario"] + [k for k in _FIELDS if k != "name"])

_ANGLE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*(pi)?\s*(?:/\s*(\d+\.?\d*))?\s*$")


def _angle(text: str) -> float:
    m = _ANGLE.match(text)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ValueError(f"cannot parse angle {text!r}")
    value = float(m.group(1)) if m.group(1) is not None else 1.0
    if m.group(2):
        value *= np.pi
    if m.group(3):
        value /= float(m.group(3))
    return value


def parse_coin(spec: str) -> CoinOperator:
    """``hadamard`` or ``pulse:AREA,PHASE`` (e.g. ``pulse:3pi/2,pi/2``)."""
    if spec == "hadamard":
        return hadamard_coin()
    if spec.startswith("pulse:"):
        parts = spec[len("pulse:"):].split(",")
        if len(parts) == 2:
            return rotation_from_pulse(PulseSpec(_angle(parts[0]), _angle(parts[1])))
    raise ValueError(f"coin must be 'hadamard' or 'pulse:AREA,PHASE', got {spec!r}")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _convert(key: str, raw: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    if key == "scenario":
        try:
            return ScenarioName(raw.strip().lower())
        except ValueError:
            raise ValueError(f"expected one of {[s.value for s in ScenarioName]}, got {raw!r}") from None
    if key in ("steps", "seed"):
        return int(raw)
    if key == "shots":
        return None if raw.strip().lower() == "none" else int(raw)
    if key in ("dephase_p", "detuning_sigma", "step_fidelity"):
        return float(raw)
    if key in ("alternate_shift", "echo", "plot"):
        return _bool(raw)
    return raw.strip()


def _read_file(path) -> list[tuple[int, str, str]]:
    entries = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        entries.append((lineno, key.replace("-", "_"), value))
    return entries


def _validate(s: Scenario) -> None:
    if s.steps < 1:
        raise ConfigError("steps must be ≥ 1")
    if s.initial not in INITIAL_STATES:
        raise ConfigError(f"initial must be one of {list(INITIAL_STATES)}, got {s.initial!r}")
    if s.engine not in ENGINES:
        raise ConfigError(f"engine must be one of {list(ENGINES)}, got {s.engine!r}")
    if s.shots is not None and s.shots < 1:
        raise ConfigError("shots must be ≥ 1")
    if s.seed < 0:
        raise ConfigError("seed must be non-negative")
    for key in ("dephase_p", "step_fidelity"):
        v = getattr(s, key)
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"{key} must lie in [0, 1], got {v!r}")
    if s.detuning_sigma < 0:
        raise ConfigError("detuning_sigma must be ≥ 0")
    if s.detuning_sigma > 0 and s.engine == "exact":
        raise ConfigError("detuning_sigma > 0 requires --engine mc")
    try:
        parse_coin(s.coin)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def parse_config(file=None, overrides: Mapping[str, Any] | None = None) -> Scenario:
    """Resolve defaults, then ``file`` values, then ``overrides`` (flags)."""
    values: dict[str, Any] = {}
    if file is not None:
        for lineno, key, raw in _read_file(file):
            if key not in VALID_KEYS:
                raise ConfigError(f"{file}:{lineno}: unknown key {key!r}; valid keys: {', '.join(VALID_KEYS)}")
            try:
                values[key] = _convert(key, raw)
            except ValueError as e:
                raise ConfigError(f"{file}:{lineno}: {key}: {e}") from None
    for key, raw in (overrides or {}).items():
        key = key.replace("-", "_")
        if raw is None:
            continue
        if key not in VALID_KEYS:
            raise ConfigError(f"unknown option {key!r}; valid keys: {', '.join(VALID_KEYS)}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as e:
            raise ConfigError(f"--{key.replace('_', '-')}: {e}") from None
    if "scenario" in values:
        values["name"] = values.pop("scenario")
    scenario = replace(Scenario(), **values)
    _validate(scenario)
    return scenario
