"""Figure rendering for the report path.

Everything here is presentation only: each figure is drawn from the same
arrays that back the delimited output, so deleting this module (or passing
--no-figures) changes nothing numerically.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import m_saturated_log, overlap_m_log, saturation_time
from .params import SGParams, derive

_DPI = 150


def render_sweep_figures(rows: list, base: SGParams, out_dir) -> list:
    written = []
    written.append(_overlap_map(rows, out_dir))
    written.append(_saturation_curve(base, out_dir))
    written.append(_audit_scatter(rows, out_dir))
    return written


def _overlap_map(rows: list, out_dir) -> str:
    p_vals = np.array([derive(r.params).p_sep for r in rows])
    k_vals = np.array([derive(r.params).k_sep for r in rows])
    i_vals = np.array([r.record.i_value for r in rows])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if len(rows):
        sc = ax.scatter(p_vals, k_vals, c=i_vals, s=18, cmap="viridis",
                        vmin=0.0, vmax=1.0)
        fig.colorbar(sc, ax=ax, label="distinguishability I")
    ax.set_xlabel("P (spatial separation / width)")
    ax.set_ylabel("K (momentum separation x width)")
    ax.set_title("branch overlap across the sweep")
    path = os.path.join(out_dir, "overlap_map.png")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def _saturation_curve(base: SGParams, out_dir) -> str:
    sat = saturation_time(base)
    d = derive(base)
    horizon = max(3.0 * sat.t_s, 5.0 * d.t_spread)
    t_grid = np.linspace(0.0, horizon, 400)
    m_vals = [math.exp(overlap_m_log(base, t)) if overlap_m_log(base, t) > -700
              else 0.0 for t in t_grid]
    ms_log = m_saturated_log(base)
    ms = math.exp(ms_log) if ms_log > -700 else 0.0
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(t_grid, m_vals, label="M(t1)")
    ax.axhline(ms, color="tab:red", ls="--", label="saturation value")
    if not sat.already_saturated:
        ax.axvline(sat.t_s, color="tab:gray", ls=":",
                   label=f"t_s = {sat.t_s:.3g}")
    ax.set_xlabel("time after exit t1")
    ax.set_ylabel("modulus overlap M")
    ax.set_title("overlap decay toward saturation")
    ax.legend()
    path = os.path.join(out_dir, "saturation_curve.png")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def _audit_scatter(rows: list, out_dir) -> str:
    deltas = np.array([r.record.i_value for r in rows])
    msat = np.array([r.record.m_sat for r in rows])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if len(rows):
        ax.scatter(msat, deltas, s=14, alpha=0.7, label="sweep points")
    lim = np.linspace(0.0, 1.0, 2)
    ax.plot(lim, lim, color="tab:red", ls="--", label="bound delta = M_s")
    ax.set_xlabel("saturated overlap M_s")
    ax.set_ylabel("max expectation shift delta_max")
    ax.set_title("signaling bound audit")
    ax.legend()
    path = os.path.join(out_dir, "audit_scatter.png")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def render_validation_figures(report, out_dir) -> list:
    """Draw the error map and decoupling trend from a validation report."""
    written = []
    if report.error_map is not None:
        path = os.path.join(out_dir, "error_map.png")
        extent = report.error_extent
        fig, ax = plt.subplots(figsize=(6.0, 4.8))
        im = ax.imshow(report.error_map.T, origin="lower", extent=extent,
                       aspect="auto", cmap="magma")
        fig.colorbar(im, ax=ax, label="|numeric - reference|")
        ax.set_xlabel("x")
        ax.set_ylabel("z")
        ax.set_title("pointwise solver error at exit")
        fig.savefig(path, dpi=_DPI, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    if report.trend:
        path = os.path.join(out_dir, "decoupling_trend.png")
        ratios = [t[0] for t in report.trend]
        dists = [t[1] for t in report.trend]
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        ax.loglog(ratios, dists, "o-")
        ax.set_xlabel("field ratio b*sigma0 / B0")
        ax.set_ylabel("L2 distance coupled vs decoupled")
        ax.set_title("decoupling error vs bias field strength")
        ax.invert_xaxis()
        fig.savefig(path, dpi=_DPI, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    return written
