"""Line-oriented run configuration: ``key = value`` entries under sections.

Sections:

    [run]     units (natural|si), epsilon, seed, threads, cap, figures
    [params]  base setup values (see SGParams field names)
    [sweep]   per-parameter ranges, value forms lin:lo:hi:n, log:lo:hi:n
              or list:v1,v2,...
    [times]   t1 = comma separated evaluation times
    [solver]  nx, nz, dt overrides for the validation battery

With ``units = natural`` the base parameters default to mass = moment =
sigma0 = hbar = 1; with ``units = si`` they default to the neutron values.
Unknown sections or keys are rejected with their location named.
"""

from __future__ import annotations

import configparser
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .params import HBAR_SI, NEUTRON_MASS, NEUTRON_MOMENT, SGParams

SWEEPABLE = ("b0", "gradient", "tau", "sigma0", "vy")
PARAM_KEYS = ("mass", "moment", "b0", "gradient", "tau", "sigma0", "vy", "hbar")
RUN_KEYS = ("units", "epsilon", "seed", "threads", "cap", "figures")
SOLVER_KEYS = ("nx", "nz", "dt")
DEFAULT_CAP = 1_000_000


@dataclass(frozen=True)
class SweepConfig:
    """Parsed configuration for the sweep and report paths."""

    base: SGParams
    axes: tuple = ()
    t1_values: tuple = (0.0,)
    units: str = "natural"
    epsilon: float = 1e-3
    seed: int = 0
    threads: int = 1
    cap: int = DEFAULT_CAP
    figures: bool = True
    solver: dict = field(default_factory=dict)

    def n_points(self) -> int:
        n = 1
        for _, values in self.axes:
            n *= len(values)
        return n

    def expand(self):
        """Yield every parameter point of the cartesian sweep, in order."""
        names = [name for name, _ in self.axes]
        grids = [values for _, values in self.axes]
        for combo in itertools.product(*grids):
            yield _replace_params(self.base, dict(zip(names, combo)))


def _replace_params(base: SGParams, updates: dict) -> SGParams:
    fields = {k: getattr(base, k) for k in PARAM_KEYS}
    fields.update(updates)
    try:
        return SGParams(**fields)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: must be finite, got {raw!r}")
    return value


def _parse_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}") from exc


def _parse_bool(section: str, key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"[{section}] {key}: not a boolean: {raw!r}")


def parse_range(section: str, key: str, raw: str) -> np.ndarray:
    """Parse lin:lo:hi:n, log:lo:hi:n or list:v1,v2,... into values."""
    head, _, rest = raw.strip().partition(":")
    if head == "list":
        if not rest:
            raise ConfigError(f"[{section}] {key}: empty list range")
        return np.array([_parse_float(section, key, v)
                         for v in rest.split(",")])
    if head in ("lin", "log"):
        parts = rest.split(":")
        if len(parts) != 3:
            raise ConfigError(
                f"[{section}] {key}: expected {head}:lo:hi:n, got {raw!r}")
        lo = _parse_float(section, key, parts[0])
        hi = _parse_float(section, key, parts[1])
        n = _parse_int(section, key, parts[2])
        if n < 1:
            raise ConfigError(f"[{section}] {key}: need n >= 1, got {n}")
        if head == "lin":
            return np.linspace(lo, hi, n)
        if lo <= 0 or hi <= 0:
            raise ConfigError(
                f"[{section}] {key}: log range endpoints must be positive")
        return np.geomspace(lo, hi, n)
    raise ConfigError(
        f"[{section}] {key}: unknown range form {raw!r} "
        f"(expected lin:lo:hi:n, log:lo:hi:n or list:...)")


def _base_defaults(units: str) -> dict:
    if units == "natural":
        return {"mass": 1.0, "moment": 1.0, "b0": 0.0, "gradient": 0.0,
                "tau": 0.0, "sigma0": 1.0, "vy": 0.0, "hbar": 1.0}
    return {"mass": NEUTRON_MASS, "moment": NEUTRON_MOMENT, "b0": 0.0,
            "gradient": 0.0, "tau": 0.0, "sigma0": 1e-4, "vy": 0.0,
            "hbar": HBAR_SI}


def load_config(path) -> SweepConfig:
    """Read and validate a configuration file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",),
                                       interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    known_sections = {"run", "params", "sweep", "times", "solver"}
    for section in parser.sections():
        if section not in known_sections:
            raise ConfigError(f"unknown section [{section}]")

    run = dict(parser.items("run")) if parser.has_section("run") else {}
    for key in run:
        if key not in RUN_KEYS:
            raise ConfigError(f"unknown key '{key}' in [run]")
    units = run.get("units", "natural").strip().lower()
    if units not in ("natural", "si"):
        raise ConfigError(f"[run] units must be natural or si, got {units!r}")
    epsilon = _parse_float("run", "epsilon", run.get("epsilon", "1e-3"))
    if epsilon <= 0:
        raise ConfigError("[run] epsilon must be positive")
    seed = _parse_int("run", "seed", run.get("seed", "0"))
    threads = _parse_int("run", "threads", run.get("threads", "1"))
    if threads < 1:
        raise ConfigError("[run] threads must be >= 1")
    cap = _parse_int("run", "cap", run.get("cap", str(DEFAULT_CAP)))
    if cap < 1:
        raise ConfigError("[run] cap must be >= 1")
    figures = _parse_bool("run", "figures", run.get("figures", "true"))

    fields = _base_defaults(units)
    if parser.has_section("params"):
        for key, raw in parser.items("params"):
            if key not in PARAM_KEYS:
                raise ConfigError(f"unknown key '{key}' in [params]")
            fields[key] = _parse_float("params", key, raw)
    try:
        base = SGParams(**fields)
    except ValueError as exc:
        raise ConfigError(f"[params] {exc}") from exc

    axes = []
    if parser.has_section("sweep"):
        for key, raw in parser.items("sweep"):
            if key not in SWEEPABLE:
                raise ConfigError(
                    f"unknown key '{key}' in [sweep]; sweepable: "
                    f"{', '.join(SWEEPABLE)}")
            values = parse_range("sweep", key, raw)
            # the field constraints are independent, so checking each value
            # against the base point validates every grid combination
            for value in values:
                try:
                    _replace_params(base, {key: float(value)})
                except ValueError as exc:
                    raise ConfigError(f"[sweep] {key}: {exc}") from exc
            axes.append((key, values))

    t1_values = (0.0,)
    if parser.has_section("times"):
        for key, raw in parser.items("times"):
            if key != "t1":
                raise ConfigError(f"unknown key '{key}' in [times]")
            values = tuple(_parse_float("times", "t1", v)
                           for v in raw.split(","))
            if not values or any(v < 0 for v in values):
                raise ConfigError("[times] t1 values must be nonnegative")
            t1_values = values

    solver: dict = {}
    if parser.has_section("solver"):
        for key, raw in parser.items("solver"):
            if key not in SOLVER_KEYS:
                raise ConfigError(f"unknown key '{key}' in [solver]")
            if key in ("nx", "nz"):
                solver[key] = _parse_int("solver", key, raw)
            else:
                solver[key] = _parse_float("solver", key, raw)

    config = SweepConfig(base=base, axes=tuple(axes), t1_values=t1_values,
                         units=units, epsilon=epsilon, seed=seed,
                         threads=threads, cap=cap, figures=figures,
                         solver=solver)
    total = config.n_points() * len(config.t1_values)
    if total > config.cap:
        raise ConfigError(
            f"sweep would produce {total} rows, above the cap {config.cap}")
    return config
