"""Sweep engine: closed-form metrics over parameter grids, written as CSV.

Output contract.  Files are UTF-8 with newline line endings, a leading
schema comment line, then a mandatory header row; floats are written in
scientific notation with 17 significant digits so a reread reproduces the
exact doubles.  Two runs from the same configuration produce byte-identical
delimited output.  On any failure, partially written files are removed; a
Forbidden verdict anywhere in the grid suppresses all output.

Row order is the cartesian order of the configured axes with the
evaluation times innermost.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import SweepConfig
from .errors import ForbiddenRegimeError
from .metrics import (MetricsRecord, Regime, cauchy_schwarz, metrics_record,
                      m_saturated_log, overlap_m_log, saturation_time)
from .params import SGParams, derive

SCHEMA_LINE = "# sg-sweep-schema 1"

COLUMNS = (
    "index", "mass", "moment", "b0", "gradient", "tau", "sigma0", "vy",
    "hbar", "vz", "ky", "kz", "P", "K", "r", "t_spread", "t1", "I",
    "inner_re", "inner_im", "M_t", "M_s", "alpha2", "beta2", "y_mass",
    "t_s", "already_saturated", "delta_max", "regime", "constraint_ok",
    "underflow",
)

PLOTDATA_FILES = ("overlap_vs_groups.csv", "saturation_curve.csv",
                  "audit_scatter.csv")


def _fmt(value: float) -> str:
    return format(value, ".16e")


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


@dataclass(frozen=True)
class SweepRow:
    index: int
    params: SGParams
    record: MetricsRecord

    def values(self) -> list:
        p = self.params
        d = derive(p)
        r = self.record
        return [
            str(self.index),
            _fmt(p.mass), _fmt(p.moment), _fmt(p.b0), _fmt(p.gradient),
            _fmt(p.tau), _fmt(p.sigma0), _fmt(p.vy), _fmt(p.hbar),
            _fmt(d.vz), _fmt(d.ky), _fmt(d.kz), _fmt(d.p_sep),
            _fmt(d.k_sep), _fmt(d.field_ratio), _fmt(d.t_spread),
            _fmt(r.t1), _fmt(r.i_value), _fmt(r.inner_complex.real),
            _fmt(r.inner_complex.imag), _fmt(r.m_t), _fmt(r.m_sat),
            _fmt(r.alpha2), _fmt(r.beta2), _fmt(r.y_mass), _fmt(r.t_s),
            _fmt_bool(r.already_saturated), _fmt(r.i_value),
            r.regime.value, _fmt_bool(r.constraint_ok),
            _fmt_bool(r.underflow),
        ]


@dataclass(frozen=True)
class SweepSummary:
    rows: int
    ideal: int
    general_nonideal: int
    forbidden: int
    min_margin: float
    max_delta_max: float
    files: tuple

    @property
    def all_ok(self) -> bool:
        return self.forbidden == 0

    def as_dict(self) -> dict:
        return {
            "rows": self.rows,
            "ideal": self.ideal,
            "general_nonideal": self.general_nonideal,
            "forbidden": self.forbidden,
            "min_margin": self.min_margin,
            "max_delta_max": self.max_delta_max,
            "all_ok": self.all_ok,
            "files": list(self.files),
        }


def compute_rows(config: SweepConfig, threads: int | None = None) -> list:
    """Evaluate the closed-form metric set at every (point, time) pair."""
    tasks = []
    for params in config.expand():
        for t1 in config.t1_values:
            tasks.append((params, t1))

    def one(indexed) -> SweepRow:
        index, (params, t1) = indexed
        record = metrics_record(params, t1, epsilon=config.epsilon,
                                raise_on_forbidden=False)
        return SweepRow(index=index, params=params, record=record)

    workers = threads if threads is not None else config.threads
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, enumerate(tasks)))
    return [one(item) for item in enumerate(tasks)]


def _write_csv(path, header, rows) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SCHEMA_LINE + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    os.replace(tmp, path)


def emit_plotdata(rows: list, base: SGParams, out_dir) -> list:
    """Write the reduced delimited series the report figures are drawn from."""
    written = []

    path = os.path.join(out_dir, "overlap_vs_groups.csv")
    table = []
    for row in rows:
        d = derive(row.params)
        ratio = (row.record.i_value / row.record.m_sat
                 if row.record.m_sat > 0 else math.nan)
        table.append([_fmt(d.p_sep), _fmt(d.k_sep), _fmt(row.record.i_value),
                      _fmt(row.record.m_sat), _fmt(ratio)])
    _write_csv(path, ("P", "K", "I", "M_s", "ratio"), table)
    written.append(path)

    path = os.path.join(out_dir, "saturation_curve.csv")
    sat = saturation_time(base)
    d = derive(base)
    horizon = max(3.0 * sat.t_s, 5.0 * d.t_spread)
    t_grid = np.linspace(0.0, horizon, 201)
    ms_log = m_saturated_log(base)
    table = [[_fmt(t1), _fmt(math.exp(overlap_m_log(base, t1))
                             if overlap_m_log(base, t1) > -700 else 0.0),
              _fmt(math.exp(ms_log) if ms_log > -700 else 0.0)]
             for t1 in t_grid]
    _write_csv(path, ("t1", "M_t", "M_s"), table)
    written.append(path)

    path = os.path.join(out_dir, "audit_scatter.csv")
    table = [[_fmt(row.record.i_value), _fmt(row.record.m_sat),
              _fmt(row.record.m_sat - row.record.i_value)] for row in rows]
    _write_csv(path, ("delta_max", "M_s", "margin"), table)
    written.append(path)

    return written


def summarize(rows: list) -> SweepSummary:
    counts = {Regime.IDEAL: 0, Regime.GENERAL_NONIDEAL: 0, Regime.FORBIDDEN: 0}
    min_margin = math.inf
    max_delta = 0.0
    for row in rows:
        counts[row.record.regime] += 1
        min_margin = min(min_margin, row.record.m_sat - row.record.i_value)
        max_delta = max(max_delta, row.record.i_value)
    return SweepSummary(
        rows=len(rows),
        ideal=counts[Regime.IDEAL],
        general_nonideal=counts[Regime.GENERAL_NONIDEAL],
        forbidden=counts[Regime.FORBIDDEN],
        min_margin=min_margin if rows else math.nan,
        max_delta_max=max_delta,
        files=(),
    )


def run_sweep(config: SweepConfig, out_dir, threads: int | None = None,
              figures: bool | None = None) -> SweepSummary:
    """Compute the grid, then write sweep.csv, plot data and a summary.

    Raises :class:`~sglab.errors.ForbiddenRegimeError` without writing
    anything if any point violates the overlap bound, and removes written
    files if emission fails partway.
    """
    os.makedirs(out_dir, exist_ok=True)
    rows = compute_rows(config, threads)
    summary = summarize(rows)
    if summary.forbidden:
        raise ForbiddenRegimeError(
            f"{summary.forbidden} of {summary.rows} rows violate the "
            f"overlap bound; no output written")

    written = []
    try:
        csv_path = os.path.join(out_dir, "sweep.csv")
        _write_csv(csv_path, COLUMNS, [row.values() for row in rows])
        written.append(csv_path)
        written.extend(emit_plotdata(rows, config.base, out_dir))

        want_figures = config.figures if figures is None else figures
        if want_figures:
            from .figures import render_sweep_figures
            written.extend(render_sweep_figures(rows, config.base, out_dir))

        summary_path = os.path.join(out_dir, "summary.json")
        _write_summary(summary_path, summary, written)
        written.append(summary_path)
    except BaseException:
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        raise
    return SweepSummary(rows=summary.rows, ideal=summary.ideal,
                        general_nonideal=summary.general_nonideal,
                        forbidden=summary.forbidden,
                        min_margin=summary.min_margin,
                        max_delta_max=summary.max_delta_max,
                        files=tuple(written))


def _write_summary(path, summary: SweepSummary, files: list) -> None:
    import json

    payload = summary.as_dict()
    payload["files"] = [os.path.basename(f) for f in files]
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# randomized Cauchy-Schwarz campaign


@dataclass(frozen=True)
class SchwarzTrials:
    trials: int
    min_margin: float
    equality_worst: float
    violations: int

    @property
    def all_ok(self) -> bool:
        return self.violations == 0


def _random_wave(rng: np.random.Generator, x: np.ndarray) -> np.ndarray:
    """Mixture of complex Gaussians with random chirps and plane waves."""
    out = np.zeros_like(x, dtype=complex)
    for _ in range(rng.integers(1, 4)):
        amp = rng.normal() + 1j * rng.normal()
        center = rng.uniform(-3.0, 3.0)
        width = rng.uniform(0.4, 2.0)
        chirp = rng.uniform(-1.0, 1.0)
        wave = rng.uniform(-4.0, 4.0)
        out += amp * np.exp(-((x - center) ** 2) * (1.0 / (4.0 * width**2)
                                                    + 1j * chirp)
                            + 1j * wave * x)
    dx = x[1] - x[0]
    norm = math.sqrt(float((np.abs(out) ** 2).sum() * dx))
    return out / norm


def run_schwarz_trials(n_trials: int = 1000, seed: int = 0,
                       nodes: int = 2049, half_width: float = 16.0,
                       slack: float = 1e-10) -> SchwarzTrials:
    """Drive the overlap inequality over randomized function pairs.

    Trials rotate through independent pairs, pairs differing by a smooth
    phase mask (equal moduli) and identical pairs; the identical pairs
    must reach equality to 1e-12.
    """
    rng = np.random.default_rng(seed)
    x = np.linspace(-half_width, half_width, nodes)
    dx = x[1] - x[0]
    min_margin = math.inf
    equality_worst = 0.0
    violations = 0
    for trial in range(n_trials):
        f = _random_wave(rng, x)
        kind = trial % 3
        if kind == 0:
            g = _random_wave(rng, x)
        elif kind == 1:
            phase = (rng.uniform(-2.0, 2.0) * x
                     + rng.uniform(-0.5, 0.5) * x**2
                     + rng.uniform(0, 2 * np.pi))
            g = f * np.exp(1j * phase)
        else:
            g = f
        result = cauchy_schwarz(f, g, dx, slack=slack)
        min_margin = min(min_margin, result.margin)
        if not result.ok:
            violations += 1
        if kind == 2:
            equality_worst = max(equality_worst,
                                 abs(result.lhs - result.rhs))
    return SchwarzTrials(trials=n_trials, min_margin=min_margin,
                         equality_worst=equality_worst, violations=violations)
