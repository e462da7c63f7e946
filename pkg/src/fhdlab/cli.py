"""Command-line front end for the soliton laboratory.

Workflows: existence scanning, pseudopotential and phase-portrait tables,
profile construction by both methods, PDE evolution, zero-curvature
verification and the flow-reduction check. Runs are configured by a JSON
document, by flags, or both (flags win). All pipelines are deterministic:
identical configurations produce bit-identical outputs.

Exit codes: 0 success, 2 validation error, 3 numerical failure, 64 unknown
command.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .core import Field, NumericalError, SolitonParams, make_grid
from .evolution import (
    EvolveConfig,
    conservation_drift,
    evolve,
    measure_speed,
    shape_error,
)
from .lax import reduction_check, zc_residual
from .output import write_csv, write_json
from .profiles import (
    MIN_DECAY_LENGTHS,
    decay_rate,
    profile_by_quadrature,
    profile_by_shooting,
    profile_metrics,
    translated_trajectory,
)
from .pseudopotential import existence_check, phase_samples, potential_samples

COMMANDS = (
    "scan-existence",
    "potential",
    "profile",
    "evolve",
    "verify-lax",
    "reduce-check",
)

USAGE = """usage: fhdlab <command> [flags]

commands:
  scan-existence   flag admissible wave speeds over a lambda range
  potential        tabulate the pseudopotential and phase portrait
  profile          construct the travelling-wave profile (both methods)
  evolve           evolve a soliton with the full PDE and measure it
  verify-lax       zero-curvature residuals on an exact travelling wave
  reduce-check     algebraic reduction of the matrix flow to the PDE

flags:
  --config <path>  JSON run configuration (flags override file values)
  --lambda <f> --v0 <f> --lambda-spec <f>
  --xmin <f> --xmax <f> --n <int>
  --t-final <f> --cfl <f> --output-stride <int> --per-frame
  --lambda-min <f> --lambda-max <f> --steps <int>
  --output-dir <path> (or env FHD_OUTPUT_DIR) --emit-plots
"""


@dataclass
class RunConfig:
    """Fully resolved run configuration; one instance drives one workflow."""

    command: str
    lambda_speed: float = 0.5
    v0: float = 1.0
    lambda_spec: float = 1.0
    x_min: float | None = None
    x_max: float | None = None
    n: int = 2048
    t_final: float = 5.0
    cfl_constant: float = 0.1
    output_stride: int = 1000
    positivity_floor: float | None = None
    lambda_min: float = 0.0
    lambda_max: float = 2.0
    steps: int = 41
    n_points: int = 800
    tail_cut: float | None = None
    lax_frames: int = 17
    lax_frame_dt: float = 0.05
    per_frame: bool = False
    output_dir: str = "fhd_out"
    emit_plots: bool = False

    @property
    def params(self) -> SolitonParams:
        return SolitonParams(self.lambda_speed, self.v0)

    def meta(self) -> dict:
        return {"config": asdict(self)}


_FLAG_PATHS = {
    "lambda_speed": ("params", "lambda"),
    "v0": ("params", "v0"),
    "lambda_spec": ("lambda_spec",),
    "x_min": ("grid", "x_min"),
    "x_max": ("grid", "x_max"),
    "n": ("grid", "n"),
    "t_final": ("evolve", "t_final"),
    "cfl_constant": ("evolve", "cfl_constant"),
    "output_stride": ("evolve", "output_stride"),
    "positivity_floor": ("evolve", "positivity_floor"),
    "lambda_min": ("scan", "lambda_min"),
    "lambda_max": ("scan", "lambda_max"),
    "steps": ("scan", "steps"),
    "n_points": ("profile", "n_points"),
    "tail_cut": ("profile", "tail_cut"),
    "lax_frames": ("lax", "frames"),
    "lax_frame_dt": ("lax", "frame_dt"),
    "per_frame": ("per_frame",),
    "output_dir": ("output_dir",),
    "emit_plots": ("emit_plots",),
}


def _lookup(document: dict, path: tuple) -> object:
    node = document
    for key in path:
        if not isinstance(node, dict) or key not in node:
            return None
        node = node[key]
    return node


def build_parser(command: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=f"fhdlab {command}")
    add = parser.add_argument
    add("--config", type=Path, default=None)
    add("--lambda", dest="lambda_speed", type=float, default=None)
    add("--v0", type=float, default=None)
    add("--lambda-spec", dest="lambda_spec", type=float, default=None)
    add("--xmin", dest="x_min", type=float, default=None)
    add("--xmax", dest="x_max", type=float, default=None)
    add("--n", type=int, default=None)
    add("--t-final", dest="t_final", type=float, default=None)
    add("--cfl", dest="cfl_constant", type=float, default=None)
    add("--output-stride", dest="output_stride", type=int, default=None)
    add("--lambda-min", dest="lambda_min", type=float, default=None)
    add("--lambda-max", dest="lambda_max", type=float, default=None)
    add("--steps", type=int, default=None)
    add("--per-frame", dest="per_frame", action="store_true", default=None)
    add("--output-dir", dest="output_dir", type=str, default=None)
    add("--emit-plots", dest="emit_plots", action="store_true", default=None)
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and flags into one RunConfig."""
    document: dict = {}
    if args.config is not None:
        document = json.loads(Path(args.config).read_text())
    config = RunConfig(command=command)
    for field, path in _FLAG_PATHS.items():
        file_value = _lookup(document, path)
        if file_value is not None:
            setattr(config, field, file_value)
        flag_value = getattr(args, field, None)
        if flag_value is not None:
            setattr(config, field, flag_value)
    if args.output_dir is None and _lookup(document, ("output_dir",)) is None:
        config.output_dir = os.environ.get("FHD_OUTPUT_DIR", config.output_dir)

    if config.x_min is None or config.x_max is None:
        half = 40.0
        try:
            kappa = decay_rate(config.params)
            half = max(half, math.ceil(1.1 * MIN_DECAY_LENGTHS / kappa))
        except ValueError:
            pass  # inadmissible params; the workflow's existence gate reports it
        config.x_min = -half if config.x_min is None else config.x_min
        config.x_max = half if config.x_max is None else config.x_max
    return config


def _require_existence(config: RunConfig) -> None:
    report = existence_check(config.params)
    if not report.admissible:
        raise ValueError(
            f"soliton existence violated: lambda={config.lambda_speed}, "
            f"v0={config.v0} needs 0 < lambda < v0^3 = {config.v0**3:.6g} "
            f"(S''(v0) = {report.s_second_at_v0:.6g}, must be negative)"
        )


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_scan_existence(config: RunConfig) -> dict:
    lambdas = np.linspace(config.lambda_min, config.lambda_max, config.steps)
    admissible = np.zeros(lambdas.size)
    curvature = np.zeros(lambdas.size)
    for i, lam in enumerate(lambdas):
        report = existence_check(SolitonParams(float(lam), config.v0))
        admissible[i] = 1.0 if report.admissible else 0.0
        curvature[i] = report.s_second_at_v0
    out = _out_dir(config)
    write_csv(
        out / "existence.csv",
        ["lambda", "admissible", "s_second_v0"],
        [lambdas, admissible, curvature],
        meta=config.meta(),
    )
    inside = lambdas[admissible == 1.0]
    return {
        "n_samples": int(lambdas.size),
        "n_admissible": int(admissible.sum()),
        "lambda_first_admissible": float(inside[0]) if inside.size else None,
        "lambda_last_admissible": float(inside[-1]) if inside.size else None,
    }


def run_potential(config: RunConfig) -> dict:
    _require_existence(config)
    params = config.params
    v_pot, s_pot = potential_samples(params, n=1000)
    v_orb, vp_plus, vp_minus = phase_samples(params, n=1000)
    out = _out_dir(config)
    write_csv(out / "potential.csv", ["v", "S"], [v_pot, s_pot], meta=config.meta())
    write_csv(
        out / "phase.csv",
        ["v", "vp_plus", "vp_minus"],
        [v_orb, vp_plus, vp_minus],
        meta=config.meta(),
    )
    if config.emit_plots:
        _emit_plot_script(out / "plot_potential.py", _POTENTIAL_PLOT)
    return {
        "v_turn": float(v_orb[0]),
        "s_min": float(s_pot.min()),
        "files": ["potential.csv", "phase.csv"],
    }


def run_profile(config: RunConfig) -> dict:
    _require_existence(config)
    params = config.params
    quad = profile_by_quadrature(
        params, n_points=config.n_points, tail_cut=config.tail_cut
    )
    grid = make_grid(config.x_min, config.x_max, config.n, periodic=True)
    shoot = profile_by_shooting(params, grid)
    mq = profile_metrics(quad)
    ms = profile_metrics(shoot)
    out = _out_dir(config)
    write_csv(out / "profile.csv", ["xi", "v"], [quad.xi, quad.v], meta=config.meta())
    write_csv(
        out / "profile_shooting.csv",
        ["xi", "v"],
        [shoot.xi, shoot.v],
        meta=config.meta(),
    )
    records = [
        {
            "lambda": config.lambda_speed,
            "v0": config.v0,
            "depth": m.depth,
            "fwhm": m.fwhm,
            "method": prof.method,
        }
        for m, prof in ((mq, quad), (ms, shoot))
    ]
    write_json(out / "metrics.json", records, meta=config.meta())
    if config.emit_plots:
        _emit_plot_script(out / "plot_profile.py", _PROFILE_PLOT)
    return {
        "min_v": float(quad.v.min()),
        "depth": mq.depth,
        "fwhm_quadrature": mq.fwhm,
        "fwhm_shooting": ms.fwhm,
    }


def run_evolve(config: RunConfig) -> dict:
    _require_existence(config)
    params = config.params
    grid = make_grid(config.x_min, config.x_max, config.n, periodic=True)
    initial = Field(grid, profile_by_shooting(params, grid).v)
    evolve_config = EvolveConfig(
        t_final=config.t_final,
        cfl_constant=config.cfl_constant,
        output_stride=config.output_stride,
        positivity_floor=config.positivity_floor,
    )
    trajectory = evolve(initial, evolve_config)

    out = _out_dir(config)
    if config.per_frame:
        for k, (t, frame) in enumerate(zip(trajectory.times, trajectory.frames)):
            write_csv(
                out / f"frame_{k:05d}.csv",
                ["t", "x", "v"],
                [np.full(grid.n, t), grid.x, frame.values],
                meta=config.meta(),
            )
    else:
        t_col = np.repeat(trajectory.times, grid.n)
        x_col = np.tile(grid.x, len(trajectory.frames))
        v_col = trajectory.values.ravel()
        write_csv(
            out / "trajectory.csv", ["t", "x", "v"], [t_col, x_col, v_col],
            meta=config.meta(),
        )

    stride_dt = float(np.median(np.diff(trajectory.times)))
    summary = {
        "lambda": config.lambda_speed,
        "v0": config.v0,
        "n": config.n,
        "dt_mean": stride_dt / config.output_stride,
        "speed_measured": measure_speed(trajectory),
        "conservation_drift": conservation_drift(trajectory),
        "shape_error": shape_error(trajectory, config.v0),
    }
    write_json(out / "summary.json", summary, meta=config.meta())
    if config.emit_plots:
        _emit_plot_script(out / "plot_trajectory.py", _TRAJECTORY_PLOT)
    return summary


def run_verify_lax(config: RunConfig) -> dict:
    _require_existence(config)
    grid = make_grid(config.x_min, config.x_max, config.n, periodic=True)
    times = config.lax_frame_dt * np.arange(config.lax_frames)
    trajectory = translated_trajectory(config.params, grid, times)
    report = zc_residual(trajectory, config.lambda_spec)
    payload = report.to_dict()
    payload.update({"lambda": config.lambda_speed, "v0": config.v0})
    out = _out_dir(config)
    write_json(out / "lax_report.json", payload, meta=config.meta())
    return {
        "entry_norm_21": float(report.entry_norms[1, 0]),
        "max_off_entry": float(
            max(report.entry_norms[i, j] for i, j in ((0, 0), (0, 1), (1, 1)))
        ),
        "convergence_order": report.convergence_order,
        "pass": report.passed,
    }


def run_reduce_check(config: RunConfig) -> dict:
    grid = make_grid(config.x_min, config.x_max, config.n, periodic=True)
    k = 2.0 * np.pi / grid.length
    field = Field(
        grid, config.v0 * (1.0 + 0.3 * np.sin(k * grid.x) + 0.1 * np.cos(3 * k * grid.x))
    )
    report = reduction_check(field, config.lambda_spec)
    control = reduction_check(field, config.lambda_spec, b_offset=1.0)
    payload = {
        "lambda_spec": config.lambda_spec,
        "max_discrepancy": report.max_discrepancy,
        "pass": report.passed,
        "control_discrepancy": control.max_discrepancy,
        "control_pass": control.passed,
    }
    out = _out_dir(config)
    write_json(out / "reduce_report.json", payload, meta=config.meta())
    return payload


_WORKFLOWS = {
    "scan-existence": run_scan_existence,
    "potential": run_potential,
    "profile": run_profile,
    "evolve": run_evolve,
    "verify-lax": run_verify_lax,
    "reduce-check": run_reduce_check,
}


def run(config: RunConfig) -> dict:
    """Execute the configured workflow and return its summary record."""
    if config.command not in _WORKFLOWS:
        raise ValueError(f"unknown command {config.command!r}")
    return _WORKFLOWS[config.command](config)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if argv and argv[0] in ("-h", "--help"):
        print(USAGE)
        return 0
    if not argv or argv[0] not in COMMANDS:
        sys.stderr.write(USAGE)
        return 64
    command = argv[0]
    args = build_parser(command).parse_args(argv[1:])
    try:
        config = resolve_config(command, args)
        summary = run(config)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3
    line = {"command": command, "status": "ok", "output_dir": config.output_dir}
    line.update(summary)
    print(json.dumps(line, sort_keys=True))
    return 0


def _emit_plot_script(path: Path, body: str) -> None:
    path.write_text(body)


_POTENTIAL_PLOT = """\
#!/usr/bin/env python3
\"\"\"Plot the pseudopotential well and the phase portrait from the CSVs.\"\"\"
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).parent
pot = np.genfromtxt(here / "potential.csv", delimiter=",", names=True)
phase = np.genfromtxt(here / "phase.csv", delimiter=",", names=True)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.plot(pot["v"], pot["S"])
ax1.axhline(0.0, color="k", lw=0.5)
ax1.set_xlabel("v")
ax1.set_ylabel("S(v)")
ax1.set_title("pseudopotential")
ax2.plot(phase["v"], phase["vp_plus"])
ax2.plot(phase["v"], phase["vp_minus"])
ax2.set_xlabel("v")
ax2.set_ylabel("dv/dxi")
ax2.set_title("phase portrait")
fig.tight_layout()
fig.savefig(here / "potential.png", dpi=160)
print(here / "potential.png")
"""

_PROFILE_PLOT = """\
#!/usr/bin/env python3
\"\"\"Plot the travelling-wave profile from both construction methods.\"\"\"
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).parent
quad = np.genfromtxt(here / "profile.csv", delimiter=",", names=True)
shoot = np.genfromtxt(here / "profile_shooting.csv", delimiter=",", names=True)

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(quad["xi"], quad["v"], label="quadrature")
ax.plot(shoot["xi"], shoot["v"], "--", label="shooting")
ax.set_xlabel("xi")
ax.set_ylabel("v")
ax.legend()
fig.tight_layout()
fig.savefig(here / "profile.png", dpi=160)
print(here / "profile.png")
"""

_TRAJECTORY_PLOT = """\
#!/usr/bin/env python3
\"\"\"Surface and contour views of v(x, t) from trajectory.csv.\"\"\"
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).parent
data = np.genfromtxt(here / "trajectory.csv", delimiter=",", names=True)
times = np.unique(data["t"])
x = np.unique(data["x"])
v = data["v"].reshape(times.size, x.size)

fig = plt.figure(figsize=(11, 4))
ax1 = fig.add_subplot(1, 2, 1, projection="3d")
tt, xx = np.meshgrid(times, x, indexing="ij")
ax1.plot_surface(xx, tt, v, cmap="viridis", rstride=1, cstride=8)
ax1.set_xlabel("x")
ax1.set_ylabel("t")
ax1.set_zlabel("v")
ax2 = fig.add_subplot(1, 2, 2)
cs = ax2.contourf(x, times, v, levels=30, cmap="viridis")
fig.colorbar(cs, ax=ax2)
ax2.set_xlabel("x")
ax2.set_ylabel("t")
fig.tight_layout()
fig.savefig(here / "trajectory.png", dpi=160)
print(here / "trajectory.png")
"""


if __name__ == "__main__":
    sys.exit(main())
