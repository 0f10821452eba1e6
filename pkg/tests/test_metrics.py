import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from magbot.errors import (
    CountMismatch,
    InsufficientSuccesses,
    MissingTimings,
    WindowTooLong,
)
from magbot.metrics import (
    MetricsConfig,
    compute_push_metrics,
    compute_traj_metrics,
    count_corrections,
    loglog_slope,
    makespan,
    metrics_csv,
    process_time,
    push_metrics_document,
    push_throughput,
    smoothness,
    success_rate,
    traj_metrics_document,
    traj_throughput,
)
from magbot.recording import EpisodeRecord

from _oracles import (
    ref_corrections,
    ref_makespan,
    ref_process_time,
    ref_push_throughput,
    ref_smoothness,
    ref_success_rate,
    ref_traj_throughput,
    synthetic_record,
)


def make_record(
    steps=100,
    dt=0.001,
    n_movers=1,
    completions=(),
    goal_count=1,
    success_count=0,
    events=None,
    planner=None,
    vels=None,
    cmds=None,
):
    n = n_movers
    ev = {"mover_mover": [], "mover_obstacle": [], "object_obstacle": [], "mover_off_tiles": []}
    if events:
        ev.update(events)
    return EpisodeRecord(
        dt=dt,
        task_family="push_box",
        seed=0,
        mover_ids=[f"m{k}" for k in range(n)],
        object_ids=["obj"],
        scene_text="{}",
        mover_poses=np.zeros((steps, n, 3), np.float32),
        mover_vels=np.zeros((steps, n, 3), np.float32) if vels is None else vels,
        applied_commands=np.zeros((steps, n, 2), np.float32) if cmds is None else cmds,
        object_poses=np.zeros((steps, 1, 3), np.float32),
        object_vels=np.zeros((steps, 1, 3), np.float32),
        goals=np.zeros((steps, 2), np.float32),
        success_flags=np.zeros(steps, dtype=bool),
        progress=np.full(steps, np.nan),
        events=ev,
        completions=list(completions),
        planner_times=list(planner) if planner is not None else [0.0] * steps,
        goal_count=goal_count,
        success_count=success_count,
        success_threshold=0.05,
    )


class TestSuccessRate:
    def test_fraction(self):
        records = [make_record(success_count=1, goal_count=1) for _ in range(199)]
        records.append(make_record(success_count=0, goal_count=1))
        assert success_rate(records, 200) == pytest.approx(0.995)

    def test_zero(self):
        records = [make_record(success_count=0, goal_count=1) for _ in range(10)]
        assert success_rate(records, 10) == 0.0

    def test_perfect(self):
        records = [make_record(success_count=1, goal_count=1) for _ in range(200)]
        assert success_rate(records, 200) == 1.0

    def test_count_mismatch(self):
        records = [make_record(goal_count=3)]
        with pytest.raises(CountMismatch):
            success_rate(records, 2)


class TestPushThroughput:
    def test_batch_magnitude(self):
        # 100 successes totalling 84.54 s -> 1.1829 goals/s
        records = [
            make_record(completions=[(0.8454, "m0")], success_count=1) for _ in range(100)
        ]
        thr = push_throughput(records, 100)
        assert thr == pytest.approx(100.0 / 84.54, rel=1e-12)
        assert round(thr, 4) == 1.1829

    def test_single(self):
        records = [make_record(completions=[(2.0, "m0")], success_count=1)]
        assert push_throughput(records, 1) == pytest.approx(0.5)

    def test_uniform(self):
        records = [make_record(completions=[(1.0, "m0")], success_count=1) for _ in range(10)]
        assert push_throughput(records, 10) == pytest.approx(1.0)

    def test_insufficient(self):
        with pytest.raises(InsufficientSuccesses):
            push_throughput([make_record()], 1)


class TestCountCorrections:
    def test_monotone_progress_no_events(self):
        prog = [0.5, 0.4, 0.3, 0.2, 0.1, 0.04]
        assert count_corrections(prog, [0.0] * 6, 0.005, 0.0) == (0, 0)

    def test_single_distance_correction(self):
        prog = [0.5, 0.3, 0.1, 0.2, 0.1, 0.04]
        assert count_corrections(prog, [-1.0] * 6, 0.05, 0.0) == (0, 1)

    def test_single_overshoot(self):
        track = [-0.30, -0.10, 0.06, -0.02]
        prog = [abs(v) for v in track]
        assert count_corrections(prog, track, 0.05, 0.0) == (1, 0)

    def test_overshoot_takes_precedence_over_distance(self):
        # the overshoot excursion also raises the distance measure
        track = [-0.30, -0.10, 0.08, -0.02, -0.01]
        prog = [abs(v) for v in track]
        over, dist = count_corrections(prog, track, 0.05, 0.0)
        assert over == 1
        assert dist == 0

    def test_stops_after_success_crossing(self):
        prog = [0.5, 0.3, 0.04, 0.3, 0.04, 0.3]
        assert count_corrections(prog, [-1.0] * 6, 0.05, 0.05) == (0, 0)

    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=60))
    def test_monotone_series_property(self, values):
        prog = sorted(values, reverse=True)
        assert count_corrections(prog, [0.0] * len(prog), 0.01, -1.0) == (0, 0)

    @given(
        st.lists(st.floats(0.0, 1.0), min_size=2, max_size=50),
        st.floats(0.01, 0.2),
    )
    def test_matches_reference_automaton(self, values, h):
        track = [v - 0.5 for v in values]
        assert count_corrections(values, track, h, -1.0) == ref_corrections(values, track, h, -1.0)


class TestMakespanThroughput:
    def test_makespan_is_slowest(self):
        rec = make_record(
            steps=1300,
            n_movers=3,
            completions=[(0.9, "m0"), (1.0, "m1"), (1.2, "m2")],
            success_count=3,
            goal_count=3,
        )
        assert makespan([rec], 1) == pytest.approx(1200.0)

    def test_makespan_simultaneous(self):
        rec = make_record(
            steps=100, n_movers=2, completions=[(0.07, "m0"), (0.07, "m1")],
            success_count=2, goal_count=2,
        )
        assert makespan([rec], 1) == pytest.approx(70.0)

    def test_makespan_millisecond_scale(self):
        rec = make_record(
            steps=520_000, n_movers=1, completions=[(511.46358, "m0")], success_count=1
        )
        assert makespan([rec], 1) == pytest.approx(511463.58, rel=1e-9)

    def test_makespan_insufficient(self):
        rec = make_record(n_movers=2, completions=[(0.05, "m0")], success_count=1, goal_count=2)
        with pytest.raises(InsufficientSuccesses):
            makespan([rec], 1)

    def test_throughput_order_statistic(self):
        rec = make_record(
            steps=400,
            n_movers=3,
            completions=[(0.1, "m0"), (0.2, "m1"), (0.3, "m2")],
            success_count=3,
            goal_count=3,
        )
        assert traj_throughput([rec], 3) == pytest.approx(300.0)
        assert traj_throughput([rec], 1) == pytest.approx(100.0)

    def test_throughput_matches_sorted_merge_oracle(self):
        rng = np.random.default_rng(12)
        records = []
        for _ in range(5):
            comps = sorted(
                (float(rng.uniform(0.01, 0.3)), f"m{int(rng.integers(3))}") for _ in range(6)
            )
            records.append(
                make_record(steps=400, n_movers=3, completions=comps, success_count=6, goal_count=6)
            )
        for n3 in (1, 5, 17, 30):
            assert traj_throughput(records, n3) == pytest.approx(ref_traj_throughput(records, n3))

    def test_makespan_vs_throughput_inequality(self):
        rec = make_record(
            steps=1300,
            n_movers=3,
            completions=[(0.9, "m0"), (1.0, "m1"), (1.2, "m2")],
            success_count=3,
            goal_count=3,
        )
        assert makespan([rec], 1) >= traj_throughput([rec], 3)


class TestSmoothness:
    def test_at_rest_zero(self):
        rec = make_record(steps=1000)
        assert smoothness([rec], 1000.0, (1.0, 1.0, 1.0)) == 0.0

    def test_constant_velocity(self):
        vels = np.zeros((1000, 1, 3), np.float32)
        vels[:, 0, 0] = 1.0
        rec = make_record(steps=1000, vels=vels)
        assert smoothness([rec], 1000.0, (1.0, 1.0, 1.0)) == pytest.approx(1.0)

    def test_sinusoid_jerk(self):
        # x(t) = sin(2 pi t): mean |jerk| = 16 pi^2
        steps = 1000
        dt = 0.001
        t = np.arange(steps) * dt
        cmds = np.zeros((steps, 1, 2), np.float32)
        cmds[:, 0, 0] = -((2 * math.pi) ** 2) * np.sin(2 * math.pi * t)
        rec = make_record(steps=steps, cmds=cmds)
        got = smoothness([rec], 1000.0, (0.0, 0.0, 1.0))
        assert got == pytest.approx(16 * math.pi**2, rel=0.01)

    def test_window_too_long(self):
        rec = make_record(steps=100)
        with pytest.raises(WindowTooLong):
            smoothness([rec], 500.0, (1.0, 1.0, 1.0))

    def test_homogeneous_in_weights_dyadic(self):
        rng = np.random.default_rng(4)
        vels = rng.normal(0, 1, (200, 2, 3)).astype(np.float32)
        cmds = rng.normal(0, 5, (200, 2, 2)).astype(np.float32)
        rec = make_record(steps=200, n_movers=2, vels=vels, cmds=cmds)
        base = smoothness([rec], 200.0, (1.0, 0.5, 0.25))
        for c in (0.5, 2.0, 4.0):
            scaled = smoothness([rec], 200.0, (c * 1.0, c * 0.5, c * 0.25))
            assert scaled == c * base


class TestProcessTime:
    def test_zero_samples(self):
        rec = make_record(completions=[(0.05, "m0")], success_count=1)
        assert process_time([rec], 1) == 0.0

    def test_constant_sample_sum(self):
        # 0.4 ms per control invocation at 1 kHz until the only completion
        steps = 1000
        rec = make_record(
            steps=steps,
            completions=[(1.0, "m0")],
            success_count=1,
            planner=[0.0004] * steps,
        )
        assert process_time([rec], 1) == pytest.approx(0.4)

    def test_missing_timings(self):
        rec = make_record(completions=[(0.05, "m0")], success_count=1, planner=[])
        with pytest.raises(MissingTimings):
            process_time([rec], 1)

    def test_insufficient_completions(self):
        rec = make_record()
        with pytest.raises(InsufficientSuccesses):
            process_time([rec], 1)


class TestSuiteAssembly:
    def test_minimal_push_batch(self):
        prog = np.linspace(0.5, 0.0, 100)
        rec = make_record(completions=[(0.05, "m0")], success_count=1)
        rec.progress = prog
        rec.success_flags[-1] = True
        cfg = MetricsConfig(n1=1, n2=1)
        m = compute_push_metrics([rec], cfg)
        assert m.success_rate == 1.0
        assert m.collisions == 0.0
        assert m.overshoot_corrections == 0.0
        assert m.distance_corrections == 0.0
        assert m.mover_mover_collisions is None  # single mover

    def test_obstacle_collision_mean(self):
        events = {"mover_obstacle": [("m0", "ob", 0.01), ("m0", "ob", 0.02)]}
        recs = [make_record(events=events, success_count=1, completions=[(0.05, "m0")])]
        recs += [make_record(success_count=1, completions=[(0.05, "m0")]) for _ in range(3)]
        for r in recs:
            r.progress = np.linspace(0.5, 0.0, 100)
        cfg = MetricsConfig(n1=4, n2=4)
        m = compute_push_metrics(recs, cfg)
        assert m.mover_obstacle_collisions == pytest.approx(0.5)
        assert m.collisions == pytest.approx(0.5)

    def test_multi_mover_reports_mover_mover(self):
        rec = make_record(n_movers=2, success_count=1, completions=[(0.05, "m0")], goal_count=1)
        rec.progress = np.linspace(0.5, 0.0, 100)
        m = compute_push_metrics([rec], MetricsConfig(n1=1, n2=1))
        assert m.mover_mover_collisions == 0.0

    def test_traj_suite_fields(self):
        rec = make_record(
            steps=1300,
            n_movers=3,
            completions=[(0.9, "m0"), (1.0, "m1"), (1.2, "m2")],
            success_count=3,
            goal_count=3,
        )
        cfg = MetricsConfig(n1=3, n2=1, n3=3, n4=1, t_ms=1000.0)
        m = compute_traj_metrics([rec], cfg)
        assert m.makespan_ms == pytest.approx(1200.0)
        assert m.throughput_ms == pytest.approx(1200.0)
        assert m.smoothness == 0.0
        assert m.collisions == 0.0

    def test_reference_recomputation_agreement(self):
        rng = np.random.default_rng(99)
        records = [synthetic_record(rng, n_movers=3, steps=150) for _ in range(40)]
        n1 = sum(r.goal_count for r in records)
        assert success_rate(records, n1) == ref_success_rate(records, n1)
        total = sum(len(r.completions) for r in records)
        if total:
            assert traj_throughput(records, total) == ref_traj_throughput(records, total)
            assert process_time(records, total) == ref_process_time(records, total)
        assert smoothness(records, 100.0, (1.0, 1.0, 1.0)) == ref_smoothness(
            records, 100.0, (1.0, 1.0, 1.0)
        )


class TestExports:
    def test_push_document_field_names(self):
        rec = make_record(success_count=1, completions=[(0.05, "m0")])
        rec.progress = np.linspace(0.5, 0.0, 100)
        doc = push_metrics_document(compute_push_metrics([rec], MetricsConfig(n1=1, n2=1)))
        assert list(doc) == [
            "success_rate",
            "throughput_goals_per_s",
            "overshoot_corrections",
            "distance_corrections",
            "collisions",
            "mover_mover_collisions",
            "mover_obstacle_collisions",
            "n1",
            "n2",
        ]
        json.dumps(doc)

    def test_traj_document_field_names(self):
        rec = make_record(
            steps=1300,
            n_movers=3,
            completions=[(0.9, "m0"), (1.0, "m1"), (1.2, "m2")],
            success_count=3,
            goal_count=3,
        )
        doc = traj_metrics_document(
            compute_traj_metrics([rec], MetricsConfig(n1=3, n2=1, n3=3, n4=1, t_ms=1000.0))
        )
        assert list(doc) == [
            "success_rate",
            "makespan_ms",
            "throughput_ms",
            "collisions",
            "mover_mover_collisions",
            "mover_obstacle_collisions",
            "smoothness",
            "smoothness_weights",
            "process_time_s",
            "n1",
            "n2",
            "n3",
            "n4",
            "t_ms",
        ]

    def test_csv_one_row(self):
        doc = {"a": 1, "b": None, "c": 0.5}
        text = metrics_csv(doc)
        assert text == "a,b,c\n1,,0.5\n"


class TestSlope:
    def test_pure_quadratic(self):
        xs = [64, 256, 1024]
        ys = [x * x * 1e-9 for x in xs]
        assert loglog_slope(xs, ys) == pytest.approx(2.0)

    def test_pure_linear(self):
        xs = [64, 256, 1024]
        ys = [x * 1e-9 for x in xs]
        assert loglog_slope(xs, ys) == pytest.approx(1.0)
