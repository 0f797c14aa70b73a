"""Command-line front end.  Thin: every behavior here is a library call.

    pedflow run <scenario.yaml> [--out DIR] [--frames] [--stride N] [--quiet]
    pedflow validate <scenario.yaml>
    pedflow render <snapshot.json> --out file.svg
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ParseError, PedflowError, ScenarioInvalid
from .outputs import load_snapshot, write_run_artifacts
from .render import render_frame
from .scenario import load_scenario
from .simulation import run


def _error_record(exc: Exception, context: dict) -> str:
    return json.dumps({
        "error": type(exc).__name__,
        "message": str(exc),
        "context": context,
    })


def _fail(exc: Exception, context: dict, code: int, outdir: Path | None = None) -> int:
    record = _error_record(exc, context)
    print(record, file=sys.stderr)
    if outdir is not None:
        try:
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / "error.json").write_text(record + "\n", encoding="utf-8")
        except OSError:
            pass
    return code


def _cmd_run(args) -> int:
    try:
        config = load_scenario(args.scenario)
    except (ParseError, ScenarioInvalid) as exc:
        return _fail(exc, {"file": str(args.scenario)}, 2)
    if args.stride is not None:
        config.snapshot_stride = args.stride
    outdir = Path(args.out) if args.out else None
    try:
        prepared = config.prepare()
        if outdir is not None:
            prepared.output_dir = str(outdir)
        traj = run(prepared)
    except PedflowError as exc:
        return _fail(exc, {"file": str(args.scenario), "scenario": config.name}, 3, outdir)
    paths = write_run_artifacts(traj, prepared, prepared.output_dir, frames=args.frames)
    if not args.quiet:
        print(
            f"{config.name}: {traj.step_count} steps, stop rule {traj.stop_rule}, "
            f"final interior mass {traj.interior_mass[-1]:.6g}"
        )
        print(f"artifacts in {Path(prepared.output_dir).resolve()}")
        if traj.tv_violation_steps.size:
            print(
                f"note: l1 time-increment bound exceeded at "
                f"{traj.tv_violation_steps.size} step(s); see {paths['summary']}"
            )
    return 0


def _cmd_validate(args) -> int:
    try:
        config = load_scenario(args.scenario)
        prepared = config.prepare()
    except (ParseError, ScenarioInvalid) as exc:
        return _fail(exc, {"file": str(args.scenario)}, 2)
    except PedflowError as exc:
        return _fail(exc, {"file": str(args.scenario)}, 2)
    g = prepared.graph
    print(f"{config.name}: OK")
    print(f"  vertices {g.vertex_count}, boundary {g.boundary.size}, max degree {g.max_degree}")
    print(f"  lam = {prepared.step_params.lam!r}, lam_d = {prepared.step_params.lam_d!r}")
    print(f"  initial mass {prepared.rho0.sum()!r}, max initial density {prepared.rho0.max()!r}")
    return 0


def _cmd_render(args) -> int:
    try:
        snapshot = load_snapshot(args.snapshot)
    except ParseError as exc:
        return _fail(exc, {"file": str(args.snapshot)}, 2)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(render_frame(snapshot), encoding="utf-8")
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pedflow", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write its artifacts")
    p_run.add_argument("scenario", help="scenario YAML file")
    p_run.add_argument("--out", help="output directory (default: scenario's output_dir)")
    p_run.add_argument("--frames", action="store_true", help="also render SVG frames")
    p_run.add_argument("--stride", type=int, help="override the snapshot stride")
    p_run.add_argument("--quiet", action="store_true", help="suppress progress output")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="parse a scenario and check stability only")
    p_val.add_argument("scenario", help="scenario YAML file")
    p_val.set_defaults(func=_cmd_validate)

    p_ren = sub.add_parser("render", help="render one snapshot JSON to SVG")
    p_ren.add_argument("snapshot", help="snapshot JSON file")
    p_ren.add_argument("--out", required=True, help="output SVG path")
    p_ren.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    quiet = getattr(args, "quiet", False)
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
