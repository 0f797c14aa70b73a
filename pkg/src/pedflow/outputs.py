"""Artifact writers: diagnostics CSV, JSON snapshots, run summary."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .scenario import PreparedScenario
from .simulation import SimState, Trajectory

DIAGNOSTIC_COLUMNS = (
    "step", "t", "total_mass", "interior_mass", "exit_mass",
    "max_density", "l1_increment", "eikonal_iters",
)


def _fmt(x) -> str:
    # repr round-trips doubles exactly and never uses locale-dependent commas
    return repr(float(x))


def write_diagnostics_csv(traj: Trajectory, path: Path) -> None:
    lines = [",".join(DIAGNOSTIC_COLUMNS)]
    for i in range(traj.steps.size):
        lines.append(",".join((
            str(int(traj.steps[i])),
            _fmt(traj.times[i]),
            _fmt(traj.total_mass[i]),
            _fmt(traj.interior_mass[i]),
            _fmt(traj.exit_mass[i]),
            _fmt(traj.max_density[i]),
            _fmt(traj.l1_increment[i]),
            str(int(traj.eikonal_iterations[i])),
        )))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_exit_flux_csv(traj: Trajectory, path: Path) -> None:
    """Per-step mass arriving at each boundary vertex (removed there under Dirichlet)."""
    header = ["step", "t"] + [f"exit_{int(b)}" for b in traj.boundary]
    lines = [",".join(header)]
    for i in range(traj.steps.size):
        row = [str(int(traj.steps[i])), _fmt(traj.times[i])]
        row.extend(_fmt(v) for v in traj.exit_outflow[i])
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def snapshot_payload(state: SimState, coords: np.ndarray, boundary: np.ndarray,
                     segments: np.ndarray | None = None) -> dict:
    payload = {
        "step": int(state.n),
        "t": float(state.t),
        "rho": [float(v) for v in state.rho],
        "u": [float(v) for v in state.u],
        "x": [float(v) for v in coords[:, 0]],
        "y": [float(v) for v in coords[:, 1]],
        "boundary": [int(b) for b in boundary],
        "eikonal_iters": int(state.eikonal_iterations),
    }
    if segments is not None:
        payload["segments"] = [[int(a), int(b)] for a, b in segments]
    return payload


def write_snapshots(traj: Trajectory, prepared: PreparedScenario, directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for snap in traj.snapshots:
        payload = snapshot_payload(snap, prepared.coords, traj.boundary,
                                   prepared.graph.edge_list)
        path = directory / f"step_{snap.n}.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        written.append(path)
    return written


def load_snapshot(path) -> dict:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot load snapshot {path}: {exc}") from exc
    for key in ("step", "t", "rho", "u", "x", "y", "boundary"):
        if key not in data:
            raise ParseError(f"snapshot {path} is missing key {key!r}")
    return data


def write_summary(traj: Trajectory, prepared: PreparedScenario, path: Path) -> None:
    summary = {
        "name": prepared.name,
        "stop_rule": traj.stop_rule,
        "steps": int(traj.step_count),
        "t_final": float(traj.times[-1]),
        "evacuation_step": traj.evacuation_step,
        "evacuation_time": traj.evacuation_time,
        "steady_state_step": traj.steady_state_step,
        "initial_mass": traj.initial_mass,
        "final_total_mass": float(traj.total_mass[-1]),
        "final_interior_mass": float(traj.interior_mass[-1]),
        "max_density_over_run": float(traj.max_density.max()),
        "max_eikonal_residual": traj.max_residual,
        "evacuation_threshold": traj.evacuation_threshold,
        "steady_state_threshold": traj.steady_state_threshold,
        "l1_increment_violations": [int(s) for s in traj.tv_violation_steps],
        "vertex_count": int(prepared.graph.vertex_count),
        "max_degree": int(prepared.graph.max_degree),
        "config": prepared.config_echo,
    }
    path.write_text(json.dumps(summary, indent=2), encoding="utf-8")


def write_run_artifacts(traj: Trajectory, prepared: PreparedScenario, outdir,
                        frames: bool = False) -> dict:
    """Write every run artifact under outdir; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_diagnostics_csv(traj, outdir / "diagnostics.csv")
    write_exit_flux_csv(traj, outdir / "exit_flux.csv")
    snap_paths = write_snapshots(traj, prepared, outdir / "snapshots")
    write_summary(traj, prepared, outdir / "summary.json")
    paths = {
        "diagnostics": outdir / "diagnostics.csv",
        "exit_flux": outdir / "exit_flux.csv",
        "summary": outdir / "summary.json",
        "snapshots": snap_paths,
    }
    if frames:
        from .render import render_frame

        frame_dir = outdir / "frames"
        frame_dir.mkdir(parents=True, exist_ok=True)
        frame_paths = []
        for snap in traj.snapshots:
            payload = snapshot_payload(snap, prepared.coords, traj.boundary,
                                       prepared.graph.edge_list)
            frame = frame_dir / f"step_{snap.n}.svg"
            frame.write_text(render_frame(payload), encoding="utf-8")
            frame_paths.append(frame)
        paths["frames"] = frame_paths
    return paths
