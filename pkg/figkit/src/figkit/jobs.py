"""Figure jobs: contour pairs, line series, the momentum comparison and
the resolution table, plus the batch 'all' driver.

Rendering decisions (fixed for determinism): PNG at 150 dpi, 20 linear
contour levels from 0 to the field maximum, constant style parameters and
no timestamps in the image metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    SchemaError,
    read_diag,
    read_series,
    read_snapshot,
    read_table,
)

__all__ = ["FigureJob", "plot_contour_pair", "plot_series",
           "plot_momentum_comparison", "render_table", "run_all"]

DPI = 150
N_LEVELS = 20
PNG_METADATA = {"Software": "figkit"}  # fixed: no version, no timestamp


@dataclass(frozen=True)
class FigureJob:
    """One figure to render from solver CSV output."""

    kind: str                       # contour_pair | line_series | table
    inputs: tuple                   # CSV paths, in kind-specific order
    output: str                     # image path
    columns: tuple = ()             # line_series: y-columns
    x_column: str = "t"
    log_y: bool = False
    labels: dict = field(default_factory=dict)  # axis-label overrides

    def __post_init__(self):
        if self.kind not in ("contour_pair", "line_series", "table",
                             "momentum"):
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        for path in self.inputs:
            if not Path(path).exists():
                raise SchemaError(f"no such file: {path}")


def _save(fig, out):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata=PNG_METADATA)
    plt.close(fig)
    return out


def _levels(vmax):
    if vmax <= 0.0:
        vmax = 1.0  # all-zero snapshot: render a valid blank contour
    return np.linspace(0.0, vmax, N_LEVELS + 1)


def plot_contour_pair(snapshot_f, snapshot_g, out, diag=None):
    """Side-by-side filled contours of the physical and rescaled fields.

    `snapshot_f` is plotted in (x, v), `snapshot_g` in (x, xi), sharing the
    x-axis.  With `diag` given, the velocity-support diameter read from it
    must have contracted between the first and last record (the qualitative
    signature the pair of snapshots is meant to display); a violation is a
    SchemaError so batch runs fail loudly rather than render a misleading
    figure.
    """
    xf, v, fvals, fcoord = read_snapshot(snapshot_f)
    xg, xi, gvals, gcoord = read_snapshot(snapshot_g)
    if fcoord != "v" or gcoord != "xi":
        raise SchemaError("contour pair expects a v-snapshot and an "
                          f"xi-snapshot, got {fcoord!r} and {gcoord!r}")
    if diag is not None:
        d = read_diag(diag)
        if d["V"].size >= 2 and not d["V"][-1] < d["V"][0]:
            raise SchemaError(
                f"velocity support did not contract: V(start) = "
                f"{d['V'][0]:g}, V(end) = {d['V'][-1]:g}")

    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6), sharex=True,
                             constrained_layout=True)
    for ax, (x, c, vals, name) in zip(
            axes, [(xf, v, fvals, "v"), (xg, xi, gvals, r"$\xi$")]):
        cs = ax.contourf(x, c, vals.T, levels=_levels(vals.max()),
                         cmap="viridis")
        fig.colorbar(cs, ax=ax, shrink=0.9)
        ax.set_xlabel("x")
        ax.set_ylabel(name)
    axes[0].set_title("physical distribution f(x, v)")
    axes[1].set_title(r"rescaled distribution g(x, $\xi$)")
    return _save(fig, out)


def plot_series(path, columns, out, x_column="t", log_y=False, labels=None):
    """Line plot of one or more columns of a solver time-series CSV."""
    if not columns:
        raise SchemaError("no columns requested")
    data = read_series(path, required=(x_column, *columns))
    labels = labels or {}
    fig, ax = plt.subplots(figsize=(6.0, 3.8), constrained_layout=True)
    x = data[x_column]
    for name in columns:
        if x.size == 1:
            ax.plot(x, data[name], marker="o", label=name)
        else:
            ax.plot(x, data[name], label=name)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(labels.get("x", x_column))
    ax.set_ylabel(labels.get("y", ", ".join(columns)))
    if len(columns) > 1:
        ax.legend()
    return _save(fig, out)


def plot_momentum_comparison(path, out, mcu_bound=1e-13, upwind_floor=1e-3):
    """Momentum drift of the flux families on the anti-drift problem.

    Asserts, from the CSV values themselves, that both corrected-flux
    curves stay below `mcu_bound` while the plain upwind curve exceeds
    `upwind_floor` — the figure's entire point.  Violations raise
    SchemaError (nonzero exit from the CLI).
    """
    data = read_series(path, required=("t", "M_upwind", "M_mcu1", "M_mcu0"))
    worst_mcu = max(np.abs(data["M_mcu1"]).max(),
                    np.abs(data["M_mcu0"]).max())
    peak_upwind = np.abs(data["M_upwind"]).max()
    if worst_mcu > mcu_bound:
        raise SchemaError(f"corrected-flux momentum {worst_mcu:.2e} exceeds "
                          f"{mcu_bound:g}")
    if peak_upwind <= upwind_floor:
        raise SchemaError(f"upwind momentum {peak_upwind:.2e} does not "
                          f"exceed {upwind_floor:g}")

    fig, ax = plt.subplots(figsize=(6.0, 3.8), constrained_layout=True)
    t = data["t"]
    ax.semilogy(t, np.maximum(np.abs(data["M_upwind"]), 1e-20),
                label="upwind")
    ax.semilogy(t, np.maximum(np.abs(data["M_mcu1"]), 1e-20),
                label="corrected (theta=1)")
    ax.semilogy(t, np.maximum(np.abs(data["M_mcu0"]), 1e-20),
                label="corrected (theta=0)")
    ax.axhline(mcu_bound, color="gray", linestyle=":", linewidth=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("|M(t)|")
    ax.legend()
    return _save(fig, out)


def render_table(path, out):
    """Resolution table of peak momentum errors, rendered as an image."""
    data = read_table(path)
    cols = ["Nxi", "maxM_upwind", "maxM_mcu1", "maxM_mcu0"]
    cells = [[f"{int(n)}"] + [f"{data[c][k]:.3e}" for c in cols[1:]]
             for k, n in enumerate(data["Nxi"])]
    fig, ax = plt.subplots(figsize=(6.0, 0.5 + 0.4 * (len(cells) + 1)),
                           constrained_layout=True)
    ax.axis("off")
    table = ax.table(cellText=cells, colLabels=cols, loc="center")
    table.scale(1.0, 1.4)
    return _save(fig, out)


def run_all(indir, outdir):
    """Regenerate every figure supported by the files present in `indir`.

    Returns the list of written image paths.  Unknown files are ignored;
    recognized files with broken schemas raise SchemaError.
    """
    indir, outdir = Path(indir), Path(outdir)
    written = []

    if (indir / "moment_test1.csv").exists():
        written.append(plot_momentum_comparison(
            indir / "moment_test1.csv", outdir / "momentum_comparison.png"))
    if (indir / "table1.csv").exists():
        written.append(render_table(indir / "table1.csv",
                                    outdir / "momentum_table.png"))
    if (indir / "crosscheck.csv").exists():
        written.append(plot_series(
            indir / "crosscheck.csv", ("l1_error",),
            outdir / "crosscheck_error.png", x_column="nv", log_y=True,
            labels={"x": "velocity cells", "y": "L1 distance to reference"}))
    if (indir / "diag.csv").exists():
        written.append(plot_series(
            indir / "diag.csv", ("max_f",), outdir / "growth_max_f.png",
            log_y=True, labels={"y": "max f"}))
        written.append(plot_series(
            indir / "diag.csv", ("momentum_residual",),
            outdir / "momentum_residual.png", log_y=True))
        written.append(plot_series(
            indir / "diag.csv", ("S", "V"), outdir / "support_diameters.png",
            labels={"y": "support diameter"}))

    # snapshot pairs: matching f/g files for each time label
    for fsnap in sorted(indir.glob("snapshot_f_t*.csv")):
        label = fsnap.stem.removeprefix("snapshot_f_")
        gsnap = indir / f"snapshot_g_{label}.csv"
        if gsnap.exists():
            written.append(plot_contour_pair(
                fsnap, gsnap, outdir / f"contour_pair_{label}.png"))

    # standalone profile snapshots (the anti-drift comparison run)
    profiles = sorted(indir.glob("snapshot_g_*.csv"))
    profiles = [p for p in profiles
                if not p.stem.removeprefix("snapshot_g_").startswith("t")]
    if profiles:
        written.append(_plot_profiles(profiles, outdir / "profiles.png"))

    if not written:
        raise SchemaError(f"no recognized solver outputs in {indir}")
    return written


def _plot_profiles(paths, out):
    """Overlay of final 1-D velocity profiles (single-x snapshots)."""
    fig, ax = plt.subplots(figsize=(6.0, 3.8), constrained_layout=True)
    for path in paths:
        _, c, vals, _ = read_snapshot(path)
        label = Path(path).stem.removeprefix("snapshot_g_")
        if vals.shape[0] != 1:
            raise SchemaError(f"{path}: expected a single-x profile")
        ax.plot(c, vals[0], label=label)
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel("g")
    ax.legend()
    return _save(fig, out)
