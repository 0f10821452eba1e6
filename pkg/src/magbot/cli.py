"""Command-line entry point: benchmark runs, the scalability sweep, scene
validation, and offline SVG rendering.

Exit codes: 0 success, 1 internal error, 2 invalid input. All subcommands are
deterministic given seeds; metric files carry no wall-clock fields except the
planner process time.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import metrics as bm
from .envs import default_task, make_env
from .errors import MagbotError, ParseError, SchemaError, ValidationError
from .recording import batch_hash, load_record, save_record, trajectory_hash
from .runner import run_batch
from .scene import load_scene, resolve_scene, serialize_scene, validate_scene
from .render_svg import render_record

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2

TASKS = ("push_box", "push_t", "push_obstacles", "traj")

# step-time budgets (seconds) checked by the scale subcommand at 1024 movers
STEP_BUDGETS = {"box": 0.050, "circle": 0.024}


def _workers(episodes: int) -> int:
    raw = os.environ.get("MAGBOT_THREADS", "1")
    try:
        cap = max(1, int(raw))
    except ValueError:
        cap = 1
    return min(cap, episodes)


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def cmd_bench(args) -> int:
    scene = resolve_scene(args.scene, args.task)
    report = validate_scene(scene)
    if not report.ok:
        print("scene validation failed:", ", ".join(f"{v.code}({v.subject})" for v in report.violations))
        return EXIT_INVALID
    overrides = {}
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.goals_per_mover > 1:
        overrides["cycle_goals"] = True
        overrides["horizon"] = args.horizon or 30_000 * args.goals_per_mover
    task = default_task(args.task, **overrides)
    seeds = [args.seed + k for k in range(args.episodes)]
    records = run_batch(task, scene, seeds, workers=_workers(args.episodes))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n_movers = len(scene.movers)
    if args.task == "traj":
        n1 = args.n1 or sum(r.goal_count for r in records)
        cfg = bm.MetricsConfig(
            n1=n1,
            n2=args.n2 or args.goals_per_mover,
            n3=args.n3 or n_movers * args.goals_per_mover,
            n4=args.n4 or 1,
            t_ms=min(args.t_ms, min(r.duration_s for r in records) * 1000.0),
            hysteresis=0.1 * task.success_threshold,
        )
        doc = bm.traj_metrics_document(bm.compute_traj_metrics(records, cfg))
    else:
        cfg = bm.MetricsConfig(
            n1=args.n1 or len(records),
            n2=args.n2 or max(1, len(records) // 2),
            hysteresis=0.1 * task.success_threshold,
        )
        doc = bm.push_metrics_document(bm.compute_push_metrics(records, cfg))
    doc["task"] = args.task
    doc["episodes"] = args.episodes
    doc["seed"] = args.seed
    doc["trajectory_sha256"] = batch_hash(records)

    if args.format in ("json", "both"):
        _write_json(out / "metrics.json", doc)
    if args.format in ("csv", "both"):
        (out / "metrics.csv").write_text(bm.metrics_csv(doc), encoding="utf-8")
    env = make_env(task, scene, args.seed, api_mode="multi" if args.task == "traj" else "single")
    _write_json(out / "observation_layout.json", env.observation_layout())
    if args.save_records:
        rec_dir = out / "records"
        rec_dir.mkdir(exist_ok=True)
        for k, rec in enumerate(records):
            save_record(rec, rec_dir / f"episode_{k:04d}.npz")
    print(f"{args.task}: {len(records)} episodes, success_rate={doc['success_rate']:.4f}")
    print(f"metrics written to {out}")
    return EXIT_OK


def _parse_grids(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        grid_n, movers = part.split(":")
        out.append((int(grid_n), int(movers)))
    return out


def cmd_scale(args) -> int:
    grids = _parse_grids(args.grids) if args.grids else None
    if args.grids is not None and not grids:
        print("empty grid list")
        return EXIT_INVALID
    shapes = tuple(args.shapes.split(","))
    for s in shapes:
        if s not in ("box", "circle"):
            print(f"unknown shape {s!r}")
            return EXIT_INVALID
    table = bm.scalability_sweep(grids, shapes, steps_per_point=args.steps, mode=args.broadphase)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "scale.csv"
    csv_path.write_text(table.to_csv(), encoding="utf-8")
    for row in table.rows:
        line = (
            f"{row.grid_nx}x{row.grid_ny} {row.shape:6s} n={row.n_movers:5d}: "
            f"mean {row.mean_s * 1e3:8.3f} ms  std {row.std_s * 1e3:7.3f} ms  "
            f"pairs {row.pair_mean_s * 1e3:8.3f} ms"
        )
        budget = STEP_BUDGETS.get(row.shape)
        if budget is not None and row.n_movers >= 1024:
            verdict = "PASS" if row.mean_s <= budget else "FAIL"
            line += f"  budget {budget * 1e3:.0f} ms: {verdict}"
        print(line)
    print(f"timing table written to {csv_path}")
    return EXIT_OK


def cmd_render(args) -> int:
    record = load_record(args.record)
    if record.steps == 0:
        print("record is empty")
        return EXIT_INVALID
    paths = render_record(record, args.out, stride=args.stride)
    print(f"{len(paths)} frames written to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scene = load_scene(args.scene)
    report = validate_scene(scene)
    if report.ok:
        print(f"{args.scene}: valid scene "
              f"({len(scene.movers)} movers, {len(scene.objects)} objects, {scene.grid.tile_count} tiles)")
        return EXIT_OK
    for v in report.violations:
        print(f"{v.code}: {v.subject} {v.detail}".rstrip())
    return EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magbot", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run benchmark episodes with the scripted baselines")
    b.add_argument("--task", choices=TASKS, required=True)
    b.add_argument("--scene", default=None, help="scene file path or builtin scene name")
    b.add_argument("--episodes", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default="magbot_out")
    b.add_argument("--format", choices=("json", "csv", "both"), default="both")
    b.add_argument("--horizon", type=int, default=None)
    b.add_argument("--goals-per-mover", type=int, default=1)
    b.add_argument("--save-records", action="store_true")
    b.add_argument("--n1", type=int, default=None)
    b.add_argument("--n2", type=int, default=None)
    b.add_argument("--n3", type=int, default=None)
    b.add_argument("--n4", type=int, default=None)
    b.add_argument("--t-ms", type=float, default=1000.0)
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("scale", help="time simulation steps across swarm sizes")
    s.add_argument("--grids", default=None, help="comma list of grid:movers, e.g. 8:64,57:1024")
    s.add_argument("--shapes", default="box,circle")
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--broadphase", choices=("naive", "grid"), default="naive")
    s.add_argument("--out", default="magbot_out")
    s.set_defaults(func=cmd_scale)

    r = sub.add_parser("render", help="render an episode record to SVG frames")
    r.add_argument("--record", required=True)
    r.add_argument("--out", default="magbot_frames")
    r.add_argument("--stride", type=int, default=100)
    r.set_defaults(func=cmd_render)

    v = sub.add_parser("validate", help="validate a scene file")
    v.add_argument("--scene", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SchemaError, ValidationError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except MagbotError as e:
        print(f"invalid input: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
