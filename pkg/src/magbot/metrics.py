"""Benchmark metric suites over episode records, plus the scalability sweep.

Object-pushing metrics: success rate, throughput (goals/s), overshoot and
distance corrections, collision means per goal. Trajectory-planning metrics:
success rate, makespan (ms), throughput (ms), collision counts, smoothness,
process time. Sums use ``math.fsum`` so any faithful re-computation of the
same definition agrees exactly.

Throughput, makespan and corrections run on the simulation clock; wall time
appears only in planner compute samples (process time) and the sweep.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field

import numpy as np

from .collision import mover_pair_events
from .errors import CountMismatch, InsufficientSuccesses, InvalidParams, MissingTimings, WindowTooLong
from .recording import EpisodeRecord
from .scene import generate_grid_scene
from .dynamics import step_world, world_from_scene


@dataclass(frozen=True)
class MetricsConfig:
    """Goal counts and windows for the two suites.

    ``n1``: total goals; ``n2``: successful-goal quota for throughput,
    corrections and makespan; ``n3``: joint completion quota; ``n4``: quota
    for process time; ``t_ms``: smoothness window; ``weights``: (w_v, w_a,
    w_j); ``hysteresis``: correction threshold in the progress measure's
    units (default: 10% of the success threshold).
    """

    n1: int
    n2: int
    n3: int = 1
    n4: int = 1
    t_ms: float = 1000.0
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    hysteresis: float = 0.005

    def __post_init__(self):
        if min(self.n1, self.n2, self.n3, self.n4) < 1:
            raise InvalidParams("goal counts must be >= 1")
        if self.t_ms <= 0.0 or self.hysteresis <= 0.0:
            raise InvalidParams("window and hysteresis must be positive")
        if min(self.weights) < 0.0:
            raise InvalidParams("smoothness weights must be non-negative")


@dataclass
class PushMetrics:
    success_rate: float
    throughput_goals_per_s: float | None
    overshoot_corrections: float | None
    distance_corrections: float | None
    collisions: float
    mover_mover_collisions: float | None
    mover_obstacle_collisions: float
    n1: int
    n2: int


@dataclass
class TrajMetrics:
    success_rate: float
    makespan_ms: float | None
    throughput_ms: float | None
    collisions: float
    mover_mover_collisions: float
    mover_obstacle_collisions: float
    smoothness: float
    smoothness_weights: tuple[float, float, float]
    process_time_s: float | None
    n1: int
    n2: int
    n3: int
    n4: int
    t_ms: float


# ---------------------------------------------------------------------------
# Table "object pushing"
# ---------------------------------------------------------------------------


def success_rate(records: list[EpisodeRecord], n1: int) -> float:
    """Successfully reached goals divided by the total goal count n1."""
    if n1 < 1:
        raise InvalidParams("n1 must be >= 1")
    goals = sum(r.goal_count for r in records)
    if goals > n1:
        raise CountMismatch(f"records carry {goals} goals but n1={n1}")
    return sum(r.success_count for r in records) / n1


def push_throughput(records: list[EpisodeRecord], n2: int) -> float:
    """n2 divided by the summed sim time to success over the first n2
    successful episodes (goals per second)."""
    times = []
    for r in records:
        if r.success_count > 0 and r.completions:
            times.append(r.completions[0][0])
            if len(times) == n2:
                break
    if len(times) < n2:
        raise InsufficientSuccesses(f"need {n2} successes, found {len(times)}")
    total = math.fsum(times)
    return n2 / total


def count_corrections(
    progress,
    approach_track,
    h: float,
    success_threshold: float,
) -> tuple[int, int]:
    """Corrective-movement events from a progress series and an along-track series.

    A distance correction is an excursion where progress, after approaching by
    at least ``h`` from its earlier peak, rises more than ``h`` above the
    running minimum and later drops back below minimum + ``h``. An overshoot
    correction is an excursion of the along-track coordinate past the goal by
    more than ``h`` that subsequently returns to the goal. Samples after the
    first success crossing are ignored; distance events overlapping an
    overshoot event are counted once, as overshoot.
    """
    if h <= 0.0:
        raise InvalidParams("hysteresis must be positive")
    prog = [float(v) for v in progress]
    track = [float(v) for v in approach_track] if approach_track is not None else []
    if not prog:
        raise InvalidParams("empty progress series")
    end = len(prog)
    for k, v in enumerate(prog):
        if v <= success_threshold:
            end = k + 1
            break

    distance_events: list[tuple[int, int]] = []
    run_min = prog[0]
    max_so_far = prog[0]
    peak_before_min = prog[0]
    in_excursion = False
    exc_start = 0
    for k in range(1, end):
        v = prog[k]
        if in_excursion and v < run_min + h:
            distance_events.append((exc_start, k))
            in_excursion = False
        if v < run_min:
            run_min = v
            peak_before_min = max_so_far
        if (not in_excursion) and (peak_before_min - run_min >= h) and v > run_min + h:
            in_excursion = True
            exc_start = k
        if v > max_so_far:
            max_so_far = v

    overshoot_events: list[tuple[int, int]] = []
    over = False
    over_start = 0
    for k in range(min(len(track), end)):
        s = track[k]
        if not over and s > h:
            over = True
            over_start = k
        elif over and s <= 0.0:
            overshoot_events.append((over_start, k))
            over = False

    kept_distance = [
        (a, b)
        for a, b in distance_events
        if not any(a <= ob and oa <= b for oa, ob in overshoot_events)
    ]
    return (len(overshoot_events), len(kept_distance))


def _push_progress_series(record: EpisodeRecord) -> tuple[np.ndarray, np.ndarray]:
    """Distance-to-goal and signed along-track series for a push record."""
    obj = record.object_poses[:, 0, 0:2].astype(np.float64)
    goal = record.goals[:, 0:2].astype(np.float64)
    delta = obj - goal
    dist = np.hypot(delta[:, 0], delta[:, 1])
    start = obj[0]
    axis = goal[0] - start
    norm = math.hypot(axis[0], axis[1])
    if norm == 0.0:
        along = np.zeros(len(obj))
    else:
        u = axis / norm
        along = (obj - goal[0:1]) @ u
    return dist, along


def compute_push_metrics(records: list[EpisodeRecord], cfg: MetricsConfig) -> PushMetrics:
    """Assemble the object-pushing suite; correction means run over the first
    n2 successful goals, collision means over all n1 goals. Mover-mover
    collisions are reported as absent for single-mover scenes."""
    rate = success_rate(records, cfg.n1)
    try:
        thr = push_throughput(records, cfg.n2)
    except InsufficientSuccesses:
        thr = None

    succ = [r for r in records if r.success_count > 0]
    if len(succ) >= cfg.n2:
        overs = []
        dists = []
        for r in succ[: cfg.n2]:
            dist_series, along = _push_progress_series(r)
            prog = r.progress if np.all(np.isfinite(r.progress)) else dist_series
            o, d = count_corrections(prog, along, cfg.hysteresis, r.success_threshold)
            overs.append(o)
            dists.append(d)
        overshoot = math.fsum(overs) / len(overs)
        distance = math.fsum(dists) / len(dists)
    else:
        overshoot = None
        distance = None

    total_collisions = math.fsum(r.collision_count for r in records)
    mm = math.fsum(len(r.events.get("mover_mover", [])) for r in records)
    mo = math.fsum(len(r.events.get("mover_obstacle", [])) for r in records)
    multi_mover = any(len(r.mover_ids) > 1 for r in records)
    return PushMetrics(
        success_rate=rate,
        throughput_goals_per_s=thr,
        overshoot_corrections=overshoot,
        distance_corrections=distance,
        collisions=total_collisions / cfg.n1,
        mover_mover_collisions=(mm / cfg.n1) if multi_mover else None,
        mover_obstacle_collisions=mo / cfg.n1,
        n1=cfg.n1,
        n2=cfg.n2,
    )


# ---------------------------------------------------------------------------
# Table "trajectory planning"
# ---------------------------------------------------------------------------


def _concat_completions(records: list[EpisodeRecord]) -> list[tuple[float, str]]:
    """Completion events on the concatenated timeline of the record batch."""
    out = []
    offset = 0.0
    for r in records:
        for t, mid in r.completions:
            out.append((offset + t, mid))
        offset += r.duration_s
    return out


def makespan(records: list[EpisodeRecord], n2: int) -> float:
    """Milliseconds until the slowest mover completes its n2-th goal."""
    if not records:
        raise InsufficientSuccesses("no records")
    per_mover: dict[str, list[float]] = {}
    for t, mid in _concat_completions(records):
        per_mover.setdefault(mid, []).append(t)
    mover_ids = records[0].mover_ids
    worst = 0.0
    for mid in mover_ids:
        times = per_mover.get(mid, [])
        if len(times) < n2:
            raise InsufficientSuccesses(f"mover {mid} completed {len(times)} goals < n2={n2}")
        worst = max(worst, times[n2 - 1])
    return worst * 1000.0


def traj_throughput(records: list[EpisodeRecord], n3: int) -> float:
    """Milliseconds until the n3-th goal completion across all movers."""
    events = sorted(t for t, _ in _concat_completions(records))
    if len(events) < n3:
        raise InsufficientSuccesses(f"{len(events)} completions < n3={n3}")
    return events[n3 - 1] * 1000.0


def smoothness(records: list[EpisodeRecord], t_ms: float, weights: tuple[float, float, float]) -> float:
    """Mean of w_v*|v| + w_a*|a| + w_j*|j| over all movers and all samples in
    the first ``t_ms`` of each record; acceleration taken from applied
    commands, jerk from finite-differencing them at dt."""
    w_v, w_a, w_j = weights
    values: list[float] = []
    for r in records:
        window = int(round(t_ms / 1000.0 / r.dt))
        if window > r.steps:
            raise WindowTooLong(f"window {t_ms} ms exceeds record duration {r.duration_s * 1000.0} ms")
        vel = r.mover_vels[:window].astype(np.float64)
        cmd = r.applied_commands[:window].astype(np.float64)
        n = len(r.mover_ids)
        for k in range(window):
            for i in range(n):
                v = math.hypot(vel[k, i, 0], vel[k, i, 1])
                a = math.hypot(cmd[k, i, 0], cmd[k, i, 1])
                if k >= 1:
                    jx = (cmd[k, i, 0] - cmd[k - 1, i, 0]) / r.dt
                    jy = (cmd[k, i, 1] - cmd[k - 1, i, 1]) / r.dt
                    j = math.hypot(jx, jy)
                else:
                    j = 0.0
                values.append(w_v * v + w_a * a + w_j * j)
    if not values:
        raise InvalidParams("no samples in window")
    return math.fsum(values) / len(values)


def process_time(records: list[EpisodeRecord], n4: int) -> float:
    """Accumulated planner/controller compute seconds until the n4-th completion."""
    if any(r.steps > 0 and not r.planner_times for r in records):
        raise MissingTimings("records carry no planner compute samples")
    total = []
    completions_seen = 0
    for r in records:
        comp_steps = sorted(int(round(t / r.dt)) for t, _ in r.completions)
        if completions_seen + len(comp_steps) < n4:
            completions_seen += len(comp_steps)
            total.extend(r.planner_times)
            continue
        need = n4 - completions_seen
        cutoff_step = comp_steps[need - 1]
        total.extend(r.planner_times[:cutoff_step])
        return math.fsum(total)
    raise InsufficientSuccesses(f"{completions_seen} completions < n4={n4}")


def compute_traj_metrics(records: list[EpisodeRecord], cfg: MetricsConfig) -> TrajMetrics:
    """Assemble the trajectory-planning suite; collision entries are counts
    over the batch (not means)."""
    rate = success_rate(records, cfg.n1)
    try:
        mk = makespan(records, cfg.n2)
    except InsufficientSuccesses:
        mk = None
    try:
        thr = traj_throughput(records, cfg.n3)
    except InsufficientSuccesses:
        thr = None
    try:
        pt = process_time(records, cfg.n4)
    except (InsufficientSuccesses, MissingTimings):
        pt = None
    smooth = smoothness(records, cfg.t_ms, cfg.weights)
    mm = sum(len(r.events.get("mover_mover", [])) for r in records)
    mo = sum(len(r.events.get("mover_obstacle", [])) for r in records)
    return TrajMetrics(
        success_rate=rate,
        makespan_ms=mk,
        throughput_ms=thr,
        collisions=float(sum(r.collision_count for r in records)),
        mover_mover_collisions=float(mm),
        mover_obstacle_collisions=float(mo),
        smoothness=smooth,
        smoothness_weights=cfg.weights,
        process_time_s=pt,
        n1=cfg.n1,
        n2=cfg.n2,
        n3=cfg.n3,
        n4=cfg.n4,
        t_ms=cfg.t_ms,
    )


# ---------------------------------------------------------------------------
# Scalability sweep
# ---------------------------------------------------------------------------


@dataclass
class TimingRow:
    grid_nx: int
    grid_ny: int
    n_movers: int
    shape: str
    mean_s: float
    std_s: float
    pair_mean_s: float  # isolated mover-pair check time
    control_mean_s: float
    integrate_mean_s: float
    collide_mean_s: float


@dataclass
class TimingTable:
    rows: list[TimingRow] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["grid,n_movers,shape,mean_s,std_s"]
        for r in self.rows:
            lines.append(f"{r.grid_nx}x{r.grid_ny},{r.n_movers},{r.shape},{r.mean_s:.9g},{r.std_s:.9g}")
        return "\n".join(lines) + "\n"


DEFAULT_SWEEP = [(1, 1), (2, 4), (4, 16), (8, 64), (16, 256), (57, 1024)]


def scalability_sweep(
    grid_sizes: list[tuple[int, int]] | None = None,
    shapes: tuple[str, ...] = ("box", "circle"),
    steps_per_point: int = 100,
    mode: str = "naive",
) -> TimingTable:
    """Time zero-command steps on square grids; rows sorted by mover count.

    ``grid_sizes`` is a list of (grid_n, n_movers). Besides the full-step wall
    time, each row carries the isolated mover-pair check time measured on the
    same states, which is the quantity that scales with the pair count.
    """
    if grid_sizes is None:
        grid_sizes = DEFAULT_SWEEP
    if not grid_sizes:
        raise InvalidParams("empty grid list")
    table = TimingTable()
    for shape in shapes:
        for grid_n, n_movers in grid_sizes:
            scene = generate_grid_scene(grid_n, grid_n, n_movers, shape_kind=shape)
            world = world_from_scene(scene)
            samples = np.empty(steps_per_point)
            control = np.empty(steps_per_point)
            integrate = np.empty(steps_per_point)
            collide = np.empty(steps_per_point)
            for k in range(steps_per_point):
                t0 = _time.perf_counter()
                _, info = step_world(world, {}, scene, collision_mode=mode)
                samples[k] = _time.perf_counter() - t0
                control[k] = info.timings["control"]
                integrate[k] = info.timings["integrate"]
                collide[k] = info.timings["collide"]
            # isolated pair-check timing on the final state
            ids = world.mover_ids
            x = world.pose6[:, 0]
            y = world.pose6[:, 1]
            yaw = world.pose6[:, 5]
            ctx = world.pair_context()
            reps = max(3, min(20, steps_per_point // 5))
            pair = np.empty(reps)
            for k in range(reps):
                t0 = _time.perf_counter()
                mover_pair_events(ids, world.shapes, x, y, yaw, world.time, mode, ctx)
                pair[k] = _time.perf_counter() - t0
            table.rows.append(
                TimingRow(
                    grid_nx=grid_n,
                    grid_ny=grid_n,
                    n_movers=n_movers,
                    shape=shape,
                    mean_s=float(samples.mean()),
                    std_s=float(samples.std(ddof=1)) if steps_per_point > 1 else 0.0,
                    pair_mean_s=float(pair.mean()),
                    control_mean_s=float(control.mean()),
                    integrate_mean_s=float(integrate.mean()),
                    collide_mean_s=float(collide.mean()),
                )
            )
    table.rows.sort(key=lambda r: (r.n_movers, r.shape))
    return table


def loglog_slope(xs: list[float], ys: list[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = np.log(np.asarray(xs, dtype=np.float64))
    ly = np.log(np.asarray(ys, dtype=np.float64))
    lx = lx - lx.mean()
    return float((lx * (ly - ly.mean())).sum() / (lx * lx).sum())


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def push_metrics_document(metrics: PushMetrics, extra: dict | None = None) -> dict:
    doc = {
        "success_rate": metrics.success_rate,
        "throughput_goals_per_s": metrics.throughput_goals_per_s,
        "overshoot_corrections": metrics.overshoot_corrections,
        "distance_corrections": metrics.distance_corrections,
        "collisions": metrics.collisions,
        "mover_mover_collisions": metrics.mover_mover_collisions,
        "mover_obstacle_collisions": metrics.mover_obstacle_collisions,
        "n1": metrics.n1,
        "n2": metrics.n2,
    }
    if extra:
        doc.update(extra)
    return doc


def traj_metrics_document(metrics: TrajMetrics, extra: dict | None = None) -> dict:
    doc = {
        "success_rate": metrics.success_rate,
        "makespan_ms": metrics.makespan_ms,
        "throughput_ms": metrics.throughput_ms,
        "collisions": metrics.collisions,
        "mover_mover_collisions": metrics.mover_mover_collisions,
        "mover_obstacle_collisions": metrics.mover_obstacle_collisions,
        "smoothness": metrics.smoothness,
        "smoothness_weights": list(metrics.smoothness_weights),
        "process_time_s": metrics.process_time_s,
        "n1": metrics.n1,
        "n2": metrics.n2,
        "n3": metrics.n3,
        "n4": metrics.n4,
        "t_ms": metrics.t_ms,
    }
    if extra:
        doc.update(extra)
    return doc


def metrics_csv(doc: dict) -> str:
    keys = list(doc.keys())
    header = ",".join(keys)
    row = ",".join("" if doc[k] is None else str(doc[k]) for k in keys)
    return header + "\n" + row + "\n"
