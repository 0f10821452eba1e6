"""Benchmark episode runner: drives baseline policies through environments,
records episodes, and fans batches out to a worker pool (one env per worker,
seed-keyed deterministic merge)."""

from __future__ import annotations

import time as _time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .baselines import PushPolicy, TrajPolicy
from .envs import TaskSpec, make_env
from .recording import EpisodeRecord, RecordBuilder
from .scene import SceneConfig, serialize_scene


def _goal_vector(task: TaskSpec, goal, agents: list[str]) -> np.ndarray:
    if task.family == "traj":
        out = []
        for mid in agents:
            out.extend(goal[mid])
        return np.asarray(out, dtype=np.float64)
    return np.asarray(goal, dtype=np.float64)


def run_episode(task: TaskSpec, scene: SceneConfig, seed: int, scene_text: str | None = None) -> EpisodeRecord:
    """One seeded episode under the task's scripted baseline policy."""
    api_mode = "multi" if task.family == "traj" else "single"
    env = make_env(task, scene, seed, api_mode=api_mode)
    obs, info = env.reset()
    if scene_text is None:
        scene_text = serialize_scene(scene)
    builder = RecordBuilder(
        dt=scene.physics.dt,
        task_family=task.family,
        seed=seed,
        mover_ids=scene.mover_ids,
        object_ids=[o.id for o in scene.objects],
        scene_text=scene_text,
    )
    if task.family == "traj":
        policy = TrajPolicy(scene, goals={})
    else:
        policy = PushPolicy(scene, goal=env.goal.goal, success_threshold=task.success_threshold)

    succeeded = False
    terminated = False
    truncated = False
    while True:
        t0 = _time.perf_counter()
        if task.family == "traj":
            policy.goals = env.goal.goal
            action = policy(env.world)
        else:
            action = policy(env.world)
        planner_dt = _time.perf_counter() - t0
        tr = env.step(action)
        if task.family == "traj":
            any_tr = next(iter(tr.values()))
            step_info = any_tr.info
            success = step_info.get("all_success", False)
            terminated = any_tr.terminated
            truncated = any_tr.truncated
            progress = max(step_info["distances"].values())
        else:
            step_info = tr.info
            success = step_info["is_success"]
            terminated = tr.terminated
            truncated = tr.truncated
            progress = (
                1.0 - step_info["coverage"] if task.family == "push_t" else step_info["distance"]
            )
        succeeded = succeeded or success
        builder.append(
            env.world,
            env.world.last_cmd,
            _goal_vector(task, env.goal.goal, env.agents),
            success,
            planner_dt=planner_dt,
            progress=progress,
        )
        for key in ("mover_mover", "mover_obstacle", "object_obstacle", "mover_off_tiles"):
            builder.events[key].extend(step_info["collisions"][key])
        if terminated or truncated:
            break
    builder.completions = env.completions
    if task.family == "traj":
        goal_count = env.goals_assigned
        success_count = len(env.completions)
    else:
        goal_count = 1
        success_count = 1 if succeeded else 0
    threshold = (1.0 - task.success_threshold) if task.family == "push_t" else task.success_threshold
    return builder.finish(goal_count, success_count, terminated, truncated, success_threshold=threshold)


def _episode_worker(args) -> EpisodeRecord:
    task, scene, seed, scene_text = args
    return run_episode(task, scene, seed, scene_text)


def run_batch(
    task: TaskSpec,
    scene: SceneConfig,
    seeds: list[int],
    workers: int = 1,
) -> list[EpisodeRecord]:
    """Run seeded episodes, in order; a pool only changes wall time, never results."""
    scene_text = serialize_scene(scene)
    if workers <= 1 or len(seeds) <= 1:
        return [run_episode(task, scene, s, scene_text) for s in seeds]
    args = [(task, scene, s, scene_text) for s in seeds]
    with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
        return list(pool.map(_episode_worker, args))
