"""Episode records: per-step time series, events, completions, planner timings.

Bulk series are stored as float32 (plenty for metrics at millimeter scales);
events, completion times and planner samples stay exact. Records serialize to
.npz with a JSON metadata block.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class EpisodeRecord:
    dt: float
    task_family: str
    seed: int
    mover_ids: list[str]
    object_ids: list[str]
    scene_text: str
    mover_poses: np.ndarray  # (T, n, 3) x, y, yaw
    mover_vels: np.ndarray  # (T, n, 3) vx, vy, wyaw
    applied_commands: np.ndarray  # (T, n, 2)
    object_poses: np.ndarray  # (T, m, 3)
    object_vels: np.ndarray  # (T, m, 3)
    goals: np.ndarray  # (T, g) flattened goal vector per step
    success_flags: np.ndarray  # (T,) bool
    progress: np.ndarray  # (T,) distance-to-goal or 1-coverage
    events: dict[str, list]
    completions: list[tuple[float, str]]
    planner_times: list[float]
    goal_count: int
    success_count: int
    success_threshold: float = float("nan")
    terminated: bool = False
    truncated: bool = False

    @property
    def steps(self) -> int:
        return int(self.mover_poses.shape[0])

    @property
    def duration_s(self) -> float:
        return self.steps * self.dt

    @property
    def collision_count(self) -> int:
        return (
            len(self.events.get("mover_mover", []))
            + len(self.events.get("mover_obstacle", []))
            + len(self.events.get("object_obstacle", []))
        )


class RecordBuilder:
    """Accumulates one episode step by step; single writer."""

    def __init__(self, dt: float, task_family: str, seed: int, mover_ids, object_ids, scene_text: str):
        self.dt = dt
        self.task_family = task_family
        self.seed = seed
        self.mover_ids = list(mover_ids)
        self.object_ids = list(object_ids)
        self.scene_text = scene_text
        self._poses: list[np.ndarray] = []
        self._vels: list[np.ndarray] = []
        self._cmds: list[np.ndarray] = []
        self._opose: list[np.ndarray] = []
        self._ovel: list[np.ndarray] = []
        self._goals: list[np.ndarray] = []
        self._flags: list[bool] = []
        self._progress: list[float] = []
        self.events: dict[str, list] = {
            "mover_mover": [],
            "mover_obstacle": [],
            "object_obstacle": [],
            "mover_off_tiles": [],
        }
        self.completions: list[tuple[float, str]] = []
        self.planner_times: list[float] = []

    def append(
        self,
        world,
        applied: np.ndarray,
        goal_vec,
        success: bool,
        events=None,
        planner_dt: float | None = None,
        progress: float = float("nan"),
    ):
        n = len(self.mover_ids)
        pose = np.empty((n, 3), dtype=np.float32)
        vel = np.empty((n, 3), dtype=np.float32)
        pose[:, 0] = world.pose6[:, 0]
        pose[:, 1] = world.pose6[:, 1]
        pose[:, 2] = world.pose6[:, 5]
        vel[:, 0] = world.vel6[:, 0]
        vel[:, 1] = world.vel6[:, 1]
        vel[:, 2] = world.vel6[:, 5]
        self._poses.append(pose)
        self._vels.append(vel)
        self._cmds.append(np.asarray(applied, dtype=np.float32).copy())
        self._opose.append(np.asarray(world.obj_pose, dtype=np.float32).copy())
        self._ovel.append(np.asarray(world.obj_vel, dtype=np.float32).copy())
        self._goals.append(np.asarray(goal_vec, dtype=np.float32).copy())
        self._flags.append(bool(success))
        self._progress.append(float(progress))
        if events is not None:
            self.events["mover_mover"].extend(events.mover_mover)
            self.events["mover_obstacle"].extend(events.mover_obstacle)
            self.events["object_obstacle"].extend(events.object_obstacle)
            self.events["mover_off_tiles"].extend(events.mover_off_tiles)
        if planner_dt is not None:
            self.planner_times.append(float(planner_dt))

    def finish(
        self,
        goal_count: int,
        success_count: int,
        terminated: bool,
        truncated: bool,
        success_threshold: float = float("nan"),
    ) -> EpisodeRecord:
        n = len(self.mover_ids)
        m = len(self.object_ids)
        t = len(self._poses)
        return EpisodeRecord(
            dt=self.dt,
            task_family=self.task_family,
            seed=self.seed,
            mover_ids=self.mover_ids,
            object_ids=self.object_ids,
            scene_text=self.scene_text,
            mover_poses=np.stack(self._poses) if t else np.zeros((0, n, 3), np.float32),
            mover_vels=np.stack(self._vels) if t else np.zeros((0, n, 3), np.float32),
            applied_commands=np.stack(self._cmds) if t else np.zeros((0, n, 2), np.float32),
            object_poses=np.stack(self._opose) if t else np.zeros((0, m, 3), np.float32),
            object_vels=np.stack(self._ovel) if t else np.zeros((0, m, 3), np.float32),
            goals=np.stack(self._goals) if t else np.zeros((0, 0), np.float32),
            success_flags=np.array(self._flags, dtype=bool),
            progress=np.array(self._progress, dtype=np.float64),
            events=self.events,
            completions=self.completions,
            planner_times=self.planner_times,
            goal_count=goal_count,
            success_count=success_count,
            success_threshold=success_threshold,
            terminated=terminated,
            truncated=truncated,
        )


def trajectory_hash(record: EpisodeRecord) -> str:
    """SHA-256 over the raw trajectory bytes; bitwise-stable per platform."""
    h = hashlib.sha256()
    for arr in (
        record.mover_poses,
        record.mover_vels,
        record.applied_commands,
        record.object_poses,
        record.object_vels,
        record.goals,
    ):
        h.update(np.ascontiguousarray(arr).tobytes())
    h.update(record.success_flags.tobytes())
    return h.hexdigest()


def batch_hash(records: list[EpisodeRecord]) -> str:
    h = hashlib.sha256()
    for rec in records:
        h.update(trajectory_hash(rec).encode())
    return h.hexdigest()


def save_record(record: EpisodeRecord, path) -> None:
    meta = {
        "dt": record.dt,
        "task_family": record.task_family,
        "seed": record.seed,
        "mover_ids": record.mover_ids,
        "object_ids": record.object_ids,
        "scene_text": record.scene_text,
        "events": record.events,
        "completions": record.completions,
        "planner_times": record.planner_times,
        "goal_count": record.goal_count,
        "success_count": record.success_count,
        "success_threshold": record.success_threshold,
        "terminated": record.terminated,
        "truncated": record.truncated,
    }
    np.savez_compressed(
        path,
        meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
        mover_poses=record.mover_poses,
        mover_vels=record.mover_vels,
        applied_commands=record.applied_commands,
        object_poses=record.object_poses,
        object_vels=record.object_vels,
        goals=record.goals,
        success_flags=record.success_flags,
        progress=record.progress,
    )


def load_record(path) -> EpisodeRecord:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"].tobytes()).decode())
        return EpisodeRecord(
            dt=meta["dt"],
            task_family=meta["task_family"],
            seed=meta["seed"],
            mover_ids=meta["mover_ids"],
            object_ids=meta["object_ids"],
            scene_text=meta["scene_text"],
            mover_poses=data["mover_poses"],
            mover_vels=data["mover_vels"],
            applied_commands=data["applied_commands"],
            object_poses=data["object_poses"],
            object_vels=data["object_vels"],
            goals=data["goals"],
            success_flags=data["success_flags"],
            progress=data["progress"],
            events={k: [tuple(e) for e in v] for k, v in meta["events"].items()},
            completions=[(t, mid) for t, mid in meta["completions"]],
            planner_times=list(meta["planner_times"]),
            goal_count=meta["goal_count"],
            success_count=meta["success_count"],
            success_threshold=meta.get("success_threshold", float("nan")),
            terminated=meta["terminated"],
            truncated=meta["truncated"],
        )
