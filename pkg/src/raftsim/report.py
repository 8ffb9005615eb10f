"""Figure rendering for run artifacts.

Uses the object-oriented matplotlib API (Figure + Agg canvas, no pyplot) so
imports never touch an interactive backend, and strips the Software
metadata chunk so repeated runs produce byte-identical PNGs.
"""

from __future__ import annotations

import math

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

DPI = 110


def _figure(width: float, height: float) -> Figure:
    fig = Figure(figsize=(width, height), dpi=DPI)
    FigureCanvasAgg(fig)
    return fig


def _save(fig: Figure, path) -> None:
    fig.savefig(path, dpi=DPI, metadata={"Software": None})


def save_response_figure(result, scn, path) -> None:
    """Speed, heading, and per-cycle command/clearance panels for one run."""
    fig = _figure(8.0, 8.5)
    axes = fig.subplots(3, 1, sharex=True)
    t = result.series["t_s"]

    ax = axes[0]
    ax.plot(t, result.series["v_surge_mps"], color="tab:blue", label="surge speed")
    ax.plot(t, result.series["surge_target_mps"], color="tab:gray", ls="--",
            label="target")
    ax.plot(t, result.series["v_cmd_mps"], color="tab:orange", lw=0.8,
            label="commanded")
    ax.set_ylabel("speed (m/s)")
    ax.legend(loc="lower right", fontsize=8)

    ax = axes[1]
    ax.plot(t, result.series["yaw_rad"], color="tab:blue", label="heading")
    ax.plot(t, result.series["yaw_target_rad"], color="tab:gray", ls="--",
            label="target")
    ax.set_ylabel("heading (rad)")
    ax.legend(loc="lower right", fontsize=8)

    ax = axes[2]
    tc = np.asarray(result.cycle_start_times)
    amps = np.array([[cmd.amplitude for cmd in cmds] for cmds in result.cycle_commands])
    for i in range(amps.shape[1]):
        ax.step(tc, amps[:, i], where="post", lw=0.8)
    ax.set_ylabel("tail amplitude (rad)")
    ax.set_xlabel("time (s)")
    if result.certificates:
        ax2 = ax.twinx()
        clear = [c.min_clearance for c in result.certificates]
        ax2.step(tc, np.asarray(clear) * 1e3, where="post", color="tab:red", lw=1.0)
        ax2.axhline(0.0, color="tab:red", lw=0.5, ls=":")
        ax2.set_ylabel("min clearance (mm)", color="tab:red")
    fig.suptitle(f"{scn.mode} run, {result.cycles} cycles")
    fig.tight_layout()
    _save(fig, path)


def save_trajectory_figure(result, scn, path) -> None:
    """World-frame path of the centre of mass with sparse heading arrows."""
    fig = _figure(6.5, 6.5)
    ax = fig.subplots()
    x = result.series["x_m"]
    y = result.series["y_m"]
    yaw = result.series["yaw_rad"]
    ax.plot(x, y, color="tab:blue", lw=1.2)
    ax.plot([x[0]], [y[0]], marker="o", color="tab:green", ms=8, label="start")
    ax.plot([x[-1]], [y[-1]], marker="s", color="tab:red", ms=7, label="end")
    step = max(1, x.size // 24)
    sel = np.arange(0, x.size, step)
    # heading 0 points along world +y
    ax.quiver(x[sel], y[sel], -np.sin(yaw[sel]), np.cos(yaw[sel]),
              width=0.004, scale=30, color="tab:gray", alpha=0.8)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(f"trajectory ({scn.mode})")
    fig.tight_layout()
    _save(fig, path)


def save_collision_map_figure(space, path) -> None:
    """Collide/clear picture over both tail angles; colliding cells dark."""
    fig = _figure(6.5, 6.0)
    ax = fig.subplots()
    ax.imshow(
        space.collides.T,
        origin="lower",
        extent=(-math.pi, math.pi, -math.pi, math.pi),
        cmap="Greys",
        vmin=0.0,
        vmax=1.0,
        interpolation="nearest",
        aspect="equal",
    )
    ax.set_xlabel("tail angle 1 (rad)")
    ax.set_ylabel("tail angle 2 (rad)")
    dx, dy = space.offset
    ax.set_title(f"collision map, neighbor offset ({dx:+.4f}, {dy:+.4f}) m")
    fig.tight_layout()
    _save(fig, path)


def save_gamma_sweep_figure(search, path) -> None:
    """Minimum clearance vs amplitude-ratio slope, with the found limit."""
    fig = _figure(7.0, 5.0)
    ax = fig.subplots()
    trace = sorted(search.trace)
    gs = [g for g, _ in trace]
    cl = [c * 1e3 for _, c in trace]
    ax.plot(gs, cl, marker="o", ms=3, lw=0.9, color="tab:blue")
    ax.axhline(0.0, color="tab:gray", lw=0.8, ls=":")
    if search.constrained:
        ax.axvline(search.gamma_max, color="tab:red", lw=1.0, ls="--",
                   label=f"limit {search.gamma_max:.4f}")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("amplitude ratio (rear / front)")
    ax.set_ylabel("min clearance along trajectory (mm)")
    bound = "unbounded line" if search.amplitude_bound is None else (
        f"amplitudes bounded at {search.amplitude_bound:g} rad")
    ax.set_title(f"ratio sweep, {bound}")
    fig.tight_layout()
    _save(fig, path)


def save_fit_figure(x, observed, fitted, path, *, ylabel: str,
                    xlabel: str = "time (s)", groups=None) -> None:
    """Data against the fitted curve, residuals below.

    With `groups` (same length as x), each group gets its own data/fit
    series — used for the per-rank thrust-slope fit.
    """
    x = np.asarray(x, dtype=float)
    observed = np.asarray(observed, dtype=float)
    fitted = np.asarray(fitted, dtype=float)
    fig = _figure(7.0, 6.0)
    axes = fig.subplots(2, 1, sharex=True, height_ratios=[3, 1])
    if groups is None:
        parts = [(None, np.arange(x.size))]
    else:
        groups = np.asarray(groups)
        parts = [(g, np.nonzero(groups == g)[0]) for g in sorted(set(groups.tolist()))]
    for g, idx in parts:
        order = idx[np.argsort(x[idx], kind="stable")]
        label = "data" if g is None else f"group {g}"
        line, = axes[0].plot(x[order], observed[order], ls="none", marker="o",
                             ms=3, label=label)
        axes[0].plot(x[order], fitted[order], color=line.get_color(), lw=1.2)
    axes[0].set_ylabel(ylabel)
    axes[0].legend(loc="best", fontsize=8)
    axes[1].plot(x, observed - fitted, ls="none", marker=".", ms=3,
                 color="tab:gray")
    axes[1].axhline(0.0, color="tab:gray", lw=0.6, ls=":")
    axes[1].set_ylabel("residual")
    axes[1].set_xlabel(xlabel)
    fig.tight_layout()
    _save(fig, path)
