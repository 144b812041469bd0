"""Command-line driver: configuration, the three standard tests, CSV output.

Commands:
  flockkit test1|test2|test3|crosscheck|run [--config PATH] [--out DIR]
           [--set key=value ...]

Configuration is flat UTF-8 "key = value" text, one pair per line, `#`
comments; unknown keys are rejected.  Every run writes its resolved
configuration and a content hash to manifest.json next to the CSV files.
Exit codes: 0 success, 2 configuration error, 3 numerical failure
(CFL violation, vacuum, nonpositive omega).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import claw
from .diagnostics import default_v_grid, diagnostics, reconstruct_f
from .direct import DirectState, step_direct
from .errors import CFLViolation, ConfigError, FlockkitError, VacuumError
from .grid import make_grid, moments_of
from .homogeneous import exact_f_homog, propagate_u_homog
from .kinetic import KineticSolver, stable_dt
from .mcu import DriftFluxSpec, step_toy
from .operators import indicator, inverse_sqrt, kernel_matrix

__all__ = ["RunConfig", "parse_config", "main",
           "run_test1", "run_test2", "run_test3", "run_crosscheck", "run_custom"]

FMT = "%.17g"
DT_CAP = 2e-3  # upper bound on adaptive steps (keeps snapshots well resolved)


# --------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters (defaults are per-test, see TEST_DEFAULTS)."""

    test: str = "custom"
    model: str = "MT"                # MT | CS
    flux_family: str = "mcu"         # upwind | mcu (Test-1 comparisons run all)
    theta_mcu: str = "0"             # float literal or "adaptive"
    f5_variant: str = "paired"       # paired | simple
    nx: int = 16
    nxi: int = 33
    x_min: float = -0.5
    x_max: float = 0.5
    xi_min: float = -4.0
    xi_max: float = 4.0
    dt: float = 0.0                  # 0 -> derive from cfl
    cfl: float = 0.5
    t_end: float = 1.0
    max_steps: int = 500_000         # step budget; the run stops honestly
                                     # (t_reached < t_end in the summary)
                                     # rather than stalling if the adaptive
                                     # step collapses. 0 = unlimited.
    snapshot_times: tuple = ()
    output_dir: str = "out"
    oracle: str = "off"              # off | direct | homogeneous

    def theta(self):
        if self.theta_mcu == "adaptive":
            return "adaptive"
        return float(self.theta_mcu)


TEST_DEFAULTS = {
    "test1": dict(test="test1", nxi=101, xi_min=-3.5, xi_max=3.5,
                  dt=1.0 / 300.0, t_end=0.3, nx=3),
    # dt = 0: time step chosen each step from the joint CFL bound (stable_dt).
    # The historically quoted fixed steps (1/1500 and 1/1200) violate that
    # bound during the early pressure-driven transient of these data and blow
    # up; see the repository notes.
    # max_steps: after the velocity-tail instability sets in (t ~ 4 at this
    # resolution) the adaptive step collapses and the run would stall; the
    # budget makes it stop and report t_reached instead.
    "test2": dict(test="test2", model="MT", nx=75, nxi=101,
                  x_min=-0.5, x_max=0.5, xi_min=-15.0, xi_max=15.0,
                  dt=0.0, cfl=0.9, t_end=5.0, max_steps=400_000,
                  snapshot_times=(0.0, 0.5, 2.5, 5.0), theta_mcu="0"),
    "test3": dict(test="test3", model="CS", nx=75, nxi=75,
                  x_min=-0.5, x_max=0.5, xi_min=-10.0, xi_max=10.0,
                  dt=0.0, cfl=0.9, t_end=15.0,
                  snapshot_times=(0.0, 1.0, 2.0, 15.0), theta_mcu="0"),
    "crosscheck": dict(test="crosscheck", model="MT", nx=16, nxi=33,
                       x_min=-0.5, x_max=0.5, xi_min=-4.0, xi_max=4.0,
                       dt=0.002, t_end=0.25),
    "custom": dict(test="custom"),
}

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CHOICES = {
    "test": {"test1", "test2", "test3", "crosscheck", "custom"},
    "model": {"MT", "CS"},
    "flux_family": {"upwind", "mcu"},
    "f5_variant": {"paired", "simple"},
    "oracle": {"off", "direct", "homogeneous"},
}


def _convert(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    raw = raw.strip()
    try:
        if key == "snapshot_times":
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        kind = _FIELD_TYPES[key]
        if kind == "int" or kind is int:
            return int(raw)
        if kind == "float" or kind is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None


def parse_config(text: str) -> dict:
    """Parse flat key=value configuration text into a typed dict."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key=value, got {body!r}")
        key, raw = body.split("=", 1)
        out[key.strip()] = _convert(key.strip(), raw)
    return out


def resolve_config(test: str, file_text: str | None, overrides: list[str]) -> RunConfig:
    merged = dict(TEST_DEFAULTS.get(test) or {})
    if test not in TEST_DEFAULTS:
        raise ConfigError(f"unknown test {test!r}")
    if file_text is not None:
        merged.update(parse_config(file_text))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        merged[key.strip()] = _convert(key.strip(), raw)
    merged["test"] = test
    cfg = RunConfig(**merged)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    for name in ("nx", "nxi"):
        if getattr(cfg, name) < 3:
            raise ConfigError(f"{name} must be >= 3")
    for name in ("cfl", "t_end"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name} must be positive")
    if cfg.dt < 0:
        raise ConfigError("dt must be >= 0 (0 means: derive from cfl)")
    if cfg.max_steps < 0:
        raise ConfigError("max_steps must be >= 0 (0 means: unlimited)")
    for key, allowed in _CHOICES.items():
        if getattr(cfg, key) not in allowed:
            raise ConfigError(f"{key} must be one of {sorted(allowed)}")
    if cfg.theta_mcu != "adaptive":
        try:
            th = float(cfg.theta_mcu)
        except ValueError:
            raise ConfigError("theta_mcu must be a number or 'adaptive'") from None
        if not -1.0 <= th <= 1.0:
            raise ConfigError("theta_mcu must lie in [-1, 1]")
    bad = [t for t in cfg.snapshot_times if not 0.0 <= t <= cfg.t_end + 1e-12]
    if bad:
        raise ConfigError(f"snapshot times outside [0, t_end]: {bad}")


# --------------------------------------------------------------------------
# output helpers

def _fmt(x) -> str:
    return FMT % float(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_snapshot(path: Path, x: np.ndarray, coords: np.ndarray,
                   values: np.ndarray, coord_name: str) -> None:
    """Long-format field snapshot: one row per (x, coord) cell."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"x,{coord_name},value\n")
        for i in range(x.size):
            xi_s = _fmt(x[i])
            for j in range(coords.size):
                fh.write(f"{xi_s},{_fmt(coords[j])},{_fmt(values[i, j])}\n")


def write_manifest(outdir: Path, cfg: RunConfig, extra: dict | None = None) -> None:
    resolved = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    resolved["snapshot_times"] = list(cfg.snapshot_times)
    payload = json.dumps(resolved, sort_keys=True).encode()
    digest = hashlib.sha1(b"blob %d\0" % len(payload) + payload).hexdigest()
    doc = {"config": resolved, "content_hash": digest}
    if extra:
        doc.update(extra)
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------------------
# initial data (unit-mass normalized where the printed data is not a
# probability density; see the repository notes for the rationale)

T1_T = 0.01
T1_C1, T1_C2 = 0.9375, -0.3125


def test1_g0(xi):
    """Two off-center Gaussians with exactly zero mean, total mass 1."""
    z = 1.0 / np.sqrt(2.0 * np.pi * T1_T)
    raw = z * (0.5 * np.exp(-((xi - T1_C1) ** 2) / (2 * T1_T))
               + 1.5 * np.exp(-((xi - T1_C2) ** 2) / (2 * T1_T)))
    return raw / 2.0


def test2_rho(x):
    T = 0.01
    return 0.01 + np.exp(-(x ** 2) / (2 * T)) / np.sqrt(2 * np.pi * T)


def test2_u(x):
    return 5.0 + np.sin(2.0 * np.pi * x)


def test2_f0(x, v):
    return test2_rho(x) / np.sqrt(2 * np.pi) * np.exp(-((v - test2_u(x)) ** 2) / 2)


def test3_f0(x, v):
    """Phase-space box indicator, normalized to unit mass (raw mass 2)."""
    ind = (np.abs(x) <= 0.25) & (np.abs(v) <= 2.0)
    return 0.5 * np.where(ind, 1.0, 0.0)


# --------------------------------------------------------------------------
# runs

def _toy_momentum_series(grid, dt, t_end, spec):
    g = test1_g0(grid.xi_centers())
    n = int(round(t_end / dt))
    times = np.empty(n + 1)
    M = np.empty(n + 1)
    times[0] = 0.0
    M[0] = moments_of(g, grid).M
    for k in range(n):
        g = step_toy(g, grid, spec, dt, check_cfl=False)
        times[k + 1] = (k + 1) * dt
        M[k + 1] = moments_of(g, grid).M
    return times, M, g


_TABLE_DT = {101: 1.0 / 300.0, 201: 1.0 / 600.0, 401: 1.0 / 1200.0}


def run_test1(cfg: RunConfig, outdir: Path) -> dict:
    """Anti-drift comparison: upwind vs MCU-1 vs MCU-0, plus the moment table."""
    specs = {
        "upwind": DriftFluxSpec(c=1.0, family="upwind"),
        "mcu1": DriftFluxSpec(c=1.0, theta=1.0),
        "mcu0": DriftFluxSpec(c=1.0, theta=0.0),
    }
    grid = make_grid(3, cfg.nxi, cfg.x_min, cfg.x_max, cfg.xi_min, cfg.xi_max)
    series = {}
    final = {}
    for name, spec in specs.items():
        times, M, g_end = _toy_momentum_series(grid, cfg.dt, cfg.t_end, spec)
        series[name] = (times, M)
        final[name] = g_end
    t = series["upwind"][0]
    write_csv(outdir / "moment_test1.csv",
              ["t", "M_upwind", "M_mcu1", "M_mcu0"],
              zip(t, series["upwind"][1], series["mcu1"][1], series["mcu0"][1]))

    # final profiles plus a refined second-order reference
    xi = grid.xi_centers()
    for name, g_end in final.items():
        write_snapshot(outdir / f"snapshot_g_{name}.csv",
                       np.zeros(1), xi, g_end[None, :], "xi")
    ref = _test1_reference(cfg)
    write_snapshot(outdir / "snapshot_g_reference.csv",
                   np.zeros(1), ref[0], ref[1][None, :], "xi")

    table = []
    summary = {}
    for nxi in (101, 201, 401):
        tgrid = make_grid(3, nxi, cfg.x_min, cfg.x_max, cfg.xi_min, cfg.xi_max)
        dt = _TABLE_DT.get(nxi, cfg.dt * 101.0 / nxi)
        row = [nxi]
        for name in ("upwind", "mcu1", "mcu0"):
            times, M, _ = _toy_momentum_series(tgrid, dt, 0.2, specs[name])
            peak = float(np.max(np.abs(M)))
            row.append(peak)
            summary[f"maxM_{name}_{nxi}"] = peak
        table.append(row)
    write_csv(outdir / "table1.csv",
              ["Nxi", "maxM_upwind", "maxM_mcu1", "maxM_mcu0"], table)
    return summary


def _test1_reference(cfg, n_ref=2000, dt_ref=1.0 / 1500.0):
    """Second-order flux-limited solution of the anti-drift equation."""
    from .grid import XGrid

    xg = XGrid(n_ref, cfg.xi_min, cfg.xi_max, "outflow")
    xi = xg.centers()
    g = test1_g0(xi)
    n = int(round(cfg.t_end / dt_ref))
    for _ in range(n):
        g = claw.advect_conservative(g, xi, xg, dt_ref, cfl_mode="error")
    return xi, g


def _run_kinetic(cfg: RunConfig, outdir: Path, f0, phi, omega0) -> dict:
    grid = make_grid(cfg.nx, cfg.nxi, cfg.x_min, cfg.x_max,
                     cfg.xi_min, cfg.xi_max)
    solver = KineticSolver(grid, cfg.model, phi, theta_mcu=cfg.theta(),
                           f5_variant=cfg.f5_variant, cfl_mode="warn",
                           vacuum_tol=(1e-12 if cfg.model == "CS" else None))
    state = solver.initial_state(f0, omega0=omega0)
    v_grid = default_v_grid(state)

    snaps = sorted(set(cfg.snapshot_times))
    records = [diagnostics(state, v_grid)]
    pending = list(snaps)
    worst_residual = records[0].momentum_residual
    mass0 = records[0].mass

    def maybe_snapshot(st, tol):
        while pending and st.t >= pending[0] - tol:
            tlab = pending.pop(0)
            label = ("%g" % tlab).replace("-", "m").replace(".", "p")
            write_snapshot(outdir / f"snapshot_g_t{label}.csv",
                           grid.x_centers(), grid.xi_centers(), st.g, "xi")
            f = reconstruct_f(st.g, st.u, st.omega, grid, v_grid)
            write_snapshot(outdir / f"snapshot_f_t{label}.csv",
                           grid.x_centers(), v_grid, f, "v")

    maybe_snapshot(state, 1e-12)
    n = 0
    # Momentum and mass are tracked every step (cheap moment sums); the full
    # diagnostics record, which reconstructs f on the v-grid, is sampled on a
    # fixed time stride so diag.csv stays a few thousand rows for long runs.
    diag_stride = cfg.t_end / 2000.0
    next_diag = diag_stride
    while state.t < cfg.t_end - 1e-12 and (cfg.max_steps == 0
                                           or n < cfg.max_steps):
        if cfg.dt > 0:
            dt = min(cfg.dt, cfg.t_end - state.t)
        else:
            dt = stable_dt(state, cfg.cfl, dt_max=DT_CAP)
            dt = min(dt, cfg.t_end - state.t)
            if pending:  # land exactly on the next snapshot instant
                dt = min(dt, max(pending[0] - state.t, 1e-12))
        state = solver.step(state, dt)
        n += 1
        mom = moments_of(state.g, grid)
        worst_residual = max(worst_residual, float(np.abs(mom.M).max()))
        if state.t >= next_diag or state.t >= cfg.t_end - 1e-12:
            records.append(diagnostics(state, v_grid))
            next_diag += diag_stride * (1 + (state.t - next_diag) // diag_stride)
        maybe_snapshot(state, 1e-12 if cfg.dt == 0 else 0.5 * cfg.dt)

    if records[-1].t < state.t:
        records.append(diagnostics(state, v_grid))
    write_csv(outdir / "diag.csv",
              ["t", "mass", "max_f", "max_g", "momentum_residual", "S", "V"],
              [(r.t, r.mass, r.max_f, r.max_g, r.momentum_residual, r.S, r.V)
               for r in records])
    mass_end = records[-1].mass
    return {
        "worst_momentum_residual": worst_residual,
        "mass_rel_drift": abs(mass_end - mass0) / mass0,
        "n_steps": n,
        "t_reached": state.t,
    }


def run_test2(cfg: RunConfig, outdir: Path) -> dict:
    return _run_kinetic(cfg, outdir, test2_f0, indicator(0.1), omega0=1.0)


def run_test3(cfg: RunConfig, outdir: Path) -> dict:
    return _run_kinetic(cfg, outdir, test3_f0, inverse_sqrt(), omega0=1.0)


def run_custom(cfg: RunConfig, outdir: Path) -> dict:
    phi = indicator(0.1) if cfg.model == "MT" else inverse_sqrt()
    f0 = test2_f0 if cfg.model == "MT" else test3_f0
    return _run_kinetic(cfg, outdir, f0, phi, omega0=1.0)


def run_crosscheck(cfg: RunConfig, outdir: Path) -> dict:
    """Rescaled-vs-direct L1 comparison over 3 refinement levels + timings."""
    phi = indicator(0.25)
    t_end = min(cfg.t_end, 0.5)
    rows = []
    report = {}
    for level, (nx, nv) in enumerate([(cfg.nx, cfg.nxi),
                                      (cfg.nx, 2 * cfg.nxi - 1),
                                      (cfg.nx, 4 * cfg.nxi - 3)]):
        err, t_kin, t_dir = _crosscheck_level(cfg, phi, nx, nv, t_end)
        rows.append((level, nx, nv, err, t_kin, t_dir, t_dir / t_kin))
        report[f"l1_err_level{level}"] = err
        report[f"ratio_level{level}"] = t_dir / t_kin
    write_csv(outdir / "crosscheck.csv",
              ["level", "nx", "nv", "l1_error", "seconds_kinetic",
               "seconds_direct", "wallclock_ratio"], rows)
    errs = [r[3] for r in rows]
    if errs[0] > 0 and errs[-1] > 0:
        report["empirical_order"] = float(np.log(errs[0] / errs[-1]) / np.log(4.0))
    return report


def _crosscheck_level(cfg, phi, nx, nv, t_end):
    grid = make_grid(nx, nv, cfg.x_min, cfg.x_max, cfg.xi_min, cfg.xi_max)
    f0 = _crosscheck_f0
    # direct run on the same (x, v) box
    W = kernel_matrix(phi, grid)
    x, v = grid.x_centers(), grid.xi_centers()
    fstate = DirectState(f=f0(x[:, None], v[None, :]), t=0.0, model="MT",
                         phi=phi, grid=grid)
    dt = min(cfg.dt, 0.4 * grid.dx / max(abs(grid.xi_min), abs(grid.xi_max)))
    n = max(1, int(round(t_end / dt)))
    dt = t_end / n
    t0 = time.perf_counter()
    for _ in range(n):
        fstate = step_direct(fstate, dt, kernel=W)
    t_dir = time.perf_counter() - t0

    solver = KineticSolver(grid, "MT", phi, theta_mcu=0.0, cfl_mode="off")
    state = solver.initial_state(f0)
    t0 = time.perf_counter()
    for _ in range(n):
        state = solver.step(state, dt)
    t_kin = time.perf_counter() - t0

    f_rec = reconstruct_f(state.g, state.u, state.omega, grid, v)
    err = grid.dx * grid.dxi * float(np.abs(f_rec - fstate.f).sum())
    return err, max(t_kin, 1e-9), max(t_dir, 1e-9)


def _crosscheck_f0(x, v):
    """Smooth, strictly positive data well inside the velocity box."""
    return ((0.05 + np.exp(-(x ** 2) / 0.02))
            * np.exp(-((v - 0.5 * np.sin(2 * np.pi * x)) ** 2) / 0.5))


# --------------------------------------------------------------------------
# entry point

_RUNNERS = {
    "test1": run_test1,
    "test2": run_test2,
    "test3": run_test3,
    "crosscheck": run_crosscheck,
    "run": run_custom,
}


def _apply_thread_cap():
    raw = os.environ.get("FLOCKKIT_THREADS", "").strip()
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"FLOCKKIT_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ConfigError("FLOCKKIT_THREADS must be >= 0 (0 = auto)")
    if n > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, str(n))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="flockkit",
        description="Finite-volume solvers for kinetic flocking models "
                    "with momentum-conservative velocity rescaling.")
    parser.add_argument("command", choices=sorted(_RUNNERS))
    parser.add_argument("--config", type=Path, default=None,
                        help="key=value configuration file")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (default: from config)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config key")
    args = parser.parse_args(argv)

    try:
        _apply_thread_cap()
        text = None
        if args.config is not None:
            try:
                text = args.config.read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}")
        test = args.command if args.command != "run" else "custom"
        cfg = resolve_config(test, text, args.overrides)
        outdir = args.out if args.out is not None else Path(cfg.output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        summary = _RUNNERS[args.command](cfg, outdir)
        summary["seconds"] = time.perf_counter() - t0
        write_manifest(outdir, cfg, extra={"summary": summary})
    except ConfigError as exc:
        print(f"flockkit: configuration error: {exc}", file=sys.stderr)
        return 2
    except (CFLViolation, VacuumError) as exc:
        print(f"flockkit: numerical failure: {exc}", file=sys.stderr)
        return 3
    except FlockkitError as exc:
        print(f"flockkit: numerical failure: {exc}", file=sys.stderr)
        return 3
    for key, val in summary.items():
        print(f"{key} = {val}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
