"""Task environments over the simulator: reset/step lifecycle, observations,
rewards, success predicates, and termination for the four task families.

Families (canonical names): ``push_box``, ``push_t``, ``push_obstacles``,
``traj``. Push families drive one mover against one object; ``traj`` drives
any number of movers to per-mover goals. Environments are deterministic given
(task, scene, seed) and the action stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .collision import CollisionEvents, CollisionShape, check_pair, tile_coverage
from .dynamics import WorldState, step_world, world_from_scene
from .errors import (
    ActionShapeError,
    InvalidParams,
    SamplingExhausted,
    SceneTaskMismatch,
    SteppedTerminatedEpisode,
)
from .geometry import Pose2, circle_overlap_area, convex_overlap_area, rect_corners
from .scene import ObjectSpec, SceneConfig

FAMILIES = ("push_box", "push_t", "push_obstacles", "traj")

_DEFAULT_THRESHOLDS = {"push_box": 0.05, "push_t": 0.70, "push_obstacles": 0.05, "traj": 0.10}
_DEFAULT_HORIZONS = {"push_box": 50_000, "push_t": 50_000, "push_obstacles": 50_000, "traj": 30_000}
_FATAL_DEFAULT = {"push_box": False, "push_t": False, "push_obstacles": True, "traj": True}

SAMPLING_ATTEMPTS = 1000


@dataclass(frozen=True)
class TaskSpec:
    """Task family plus success threshold (meters, or coverage ratio for
    push_t), horizon in control cycles, and reward shaping mode."""

    family: str
    success_threshold: float
    horizon: int
    reward_mode: str = "sparse"
    goal_region: tuple[float, float, float, float] | None = None
    terminate_on_collision: bool | None = None
    cycle_goals: bool = False
    min_start_goal_distance: float = 0.15

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParams(f"unknown task family {self.family!r}")
        if self.success_threshold <= 0.0:
            raise InvalidParams("success threshold must be positive")
        if self.horizon < 1:
            raise InvalidParams("horizon must be at least 1")
        if self.reward_mode not in ("sparse", "dense"):
            raise InvalidParams("reward_mode must be 'sparse' or 'dense'")

    @property
    def fatal_collisions(self) -> bool:
        if self.terminate_on_collision is None:
            return _FATAL_DEFAULT[self.family]
        return self.terminate_on_collision


def default_task(family: str, **overrides) -> TaskSpec:
    base = dict(
        family=family,
        success_threshold=_DEFAULT_THRESHOLDS.get(family, 0.05),
        horizon=_DEFAULT_HORIZONS.get(family, 50_000),
    )
    base.update(overrides)
    return TaskSpec(**base)


@dataclass(frozen=True)
class GoalSample:
    """One sampled episode configuration: goal(s) plus start poses."""

    goal: Any  # (x, y) | (x, y, yaw) | dict mover_id -> (x, y)
    mover_starts: dict[str, tuple[float, float, float]]
    object_start: tuple[float, float, float] | None = None


@dataclass
class Transition:
    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    info: dict


# ---------------------------------------------------------------------------
# Success measures
# ---------------------------------------------------------------------------


def _object_polygons(spec: ObjectSpec, pose: tuple[float, float, float]) -> list[list[tuple[float, float]]]:
    x, y, yaw = pose
    c = math.cos(yaw)
    s = math.sin(yaw)
    polys = []
    for cx, cy, hx, hy in spec.pieces:
        wx = x + c * cx - s * cy
        wy = y + s * cx + c * cy
        polys.append(rect_corners(wx, wy, hx, hy, yaw))
    return polys


def coverage(object_pose, goal_pose, spec: ObjectSpec) -> float:
    """Area fraction of the object footprint overlapping the same footprint
    placed at the goal pose. Exact: pairwise convex clipping over the disjoint
    rectangle decomposition (closed form for cylinders)."""
    op = tuple(object_pose)
    gp = tuple(goal_pose)
    if spec.kind == "cylinder":
        r = spec.dimensions[0]
        d = math.hypot(gp[0] - op[0], gp[1] - op[1])
        return circle_overlap_area(d, r, r) / (math.pi * r * r)
    obj_polys = _object_polygons(spec, op)
    goal_polys = _object_polygons(spec, gp)
    inter = 0.0
    for pa in obj_polys:
        for pb in goal_polys:
            inter += convex_overlap_area(pa, pb)
    return min(inter / spec.area, 1.0)


def success_from_measures(
    task: TaskSpec,
    distance: float | None = None,
    cover: float | None = None,
    distances: list[float] | None = None,
) -> bool:
    """Threshold predicate; both bounds are inclusive."""
    if task.family == "push_t":
        if cover is None:
            raise InvalidParams("push_t success needs a coverage value")
        return cover >= task.success_threshold
    if task.family == "traj":
        if distances is None:
            raise InvalidParams("traj success needs per-mover distances")
        return all(d <= task.success_threshold for d in distances)
    if distance is None:
        raise InvalidParams("push success needs an object-goal distance")
    return distance <= task.success_threshold


def is_success(task: TaskSpec, world: WorldState, goal: GoalSample) -> bool:
    """Evaluate the task's success predicate on the current world state."""
    scene = world.scene
    if task.family == "traj":
        dists = []
        for mid in world.mover_ids:
            k = world._index[mid]
            gx, gy = goal.goal[mid]
            dists.append(math.hypot(world.pose6[k, 0] - gx, world.pose6[k, 1] - gy))
        return success_from_measures(task, distances=dists)
    spec = scene.objects[0]
    obj_pose = tuple(world.obj_pose[0])
    if task.family == "push_t":
        return success_from_measures(task, cover=coverage(obj_pose, goal.goal, spec))
    gx, gy = goal.goal[0], goal.goal[1]
    d = math.hypot(obj_pose[0] - gx, obj_pose[1] - gy)
    return success_from_measures(task, distance=d)


# ---------------------------------------------------------------------------
# Environment
# ---------------------------------------------------------------------------


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SceneTaskMismatch(msg)


class Env:
    """One episodic task environment owning one world.

    ``api_mode`` is ``single`` (action = (ax, ay)) or ``multi`` (action =
    mapping mover id -> (ax, ay)); push families are single-agent, ``traj``
    defaults to multi-agent but accepts single mode for one-mover scenes.
    """

    def __init__(self, task: TaskSpec, scene: SceneConfig, seed: int, api_mode: str | None = None):
        if task.family in ("push_box", "push_t", "push_obstacles"):
            _require(len(scene.movers) >= 1, f"{task.family} needs at least one mover")
            _require(len(scene.objects) >= 1, f"{task.family} needs an object")
            if task.family == "push_obstacles":
                _require(len(scene.obstacles) >= 1, "push_obstacles needs obstacles")
            if task.family == "push_t":
                _require(scene.objects[0].kind != "cylinder", "push_t needs an oriented object")
            default_mode = "single"
        else:
            _require(len(scene.movers) >= 1, "traj needs at least one mover")
            default_mode = "multi"
        self.api_mode = api_mode or default_mode
        if self.api_mode == "single" and task.family == "traj" and len(scene.movers) != 1:
            raise SceneTaskMismatch("single-agent trajectory task needs exactly one mover")
        if self.api_mode not in ("single", "multi"):
            raise InvalidParams("api_mode must be 'single' or 'multi'")
        self.task = task
        self.scene = scene
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.agents = list(scene.mover_ids)
        self.world: WorldState | None = None
        self.goal: GoalSample | None = None
        self._done = True
        self._steps = 0
        self._completions: list[tuple[float, str]] = []
        self._goals_assigned = 0

    # -- sampling -----------------------------------------------------------

    def _board_region(self, erosion: float) -> tuple[float, float, float, float]:
        x0, y0, x1, y1 = self.scene.grid.bounds
        if self.task.goal_region is not None:
            gx0, gy0, gx1, gy1 = self.task.goal_region
            x0, y0, x1, y1 = max(x0, gx0), max(y0, gy0), min(x1, gx1), min(y1, gy1)
        region = (x0 + erosion, y0 + erosion, x1 - erosion, y1 - erosion)
        if region[0] >= region[2] or region[1] >= region[3]:
            raise SamplingExhausted("board too small for the requested footprint")
        return region

    def _sample_xy(self, erosion: float) -> tuple[float, float]:
        x0, y0, x1, y1 = self._board_region(erosion)
        return (
            float(self.rng.uniform(x0, x1)),
            float(self.rng.uniform(y0, y1)),
        )

    def _clear_of_obstacles(self, shape: CollisionShape, pose: Pose2) -> bool:
        for ob in self.scene.obstacles:
            if check_pair(shape, pose, ob.shape, Pose2(*ob.pose)).colliding:
                return False
        return True

    def _object_clear(self, spec: ObjectSpec, pose: tuple[float, float, float], clearance: float) -> bool:
        """Object footprint (as a circumradius disk) on tiles and clear of obstacles."""
        disk = CollisionShape.circle(spec.circumradius + 1e-9, clearance)
        p = Pose2(pose[0], pose[1], 0.0)
        if not tile_coverage(disk, p, self.scene.grid).within:
            return False
        return self._clear_of_obstacles(disk, p)

    def _sample_goal_config(self) -> GoalSample:
        scene = self.scene
        task = self.task
        for _ in range(SAMPLING_ATTEMPTS):
            if task.family == "traj":
                starts: dict[str, tuple[float, float, float]] = {}
                goals: dict[str, tuple[float, float]] = {}
                ok = True
                placed: list[tuple[CollisionShape, Pose2]] = []
                for mv in scene.movers:
                    e = mv.shape.circumradius
                    x, y = self._sample_xy(e)
                    pose = Pose2(x, y, 0.0)
                    if not tile_coverage(mv.shape, pose, scene.grid).within:
                        ok = False
                        break
                    if not self._clear_of_obstacles(mv.shape, pose):
                        ok = False
                        break
                    if any(check_pair(mv.shape, pose, s, p).colliding for s, p in placed):
                        ok = False
                        break
                    placed.append((mv.shape, pose))
                    starts[mv.id] = (x, y, 0.0)
                if not ok:
                    continue
                goal_sep = 2.0 * max(mv.shape.circumradius for mv in scene.movers) + 0.06
                for mv in scene.movers:
                    e = mv.shape.circumradius
                    gx, gy = self._sample_xy(e)
                    gpose = Pose2(gx, gy, 0.0)
                    if not tile_coverage(mv.shape, gpose, scene.grid).within:
                        ok = False
                        break
                    if not self._clear_of_obstacles(mv.shape, gpose):
                        ok = False
                        break
                    if any(math.hypot(gx - g[0], gy - g[1]) < goal_sep for g in goals.values()):
                        ok = False
                        break
                    sx, sy, _ = starts[mv.id]
                    if math.hypot(gx - sx, gy - sy) < task.min_start_goal_distance:
                        ok = False
                        break
                    goals[mv.id] = (gx, gy)
                if not ok:
                    continue
                return GoalSample(goal=goals, mover_starts=starts)

            spec = scene.objects[0]
            mover = scene.movers[0]
            obj_e = spec.circumradius
            if task.family == "push_obstacles":
                # leaving the tiles is fatal here: keep room for the mover
                # to slot in behind the object near any board edge
                obj_e += 2.0 * mover.shape.circumradius
            ox, oy = self._sample_xy(obj_e)
            obj_start = (ox, oy, 0.0)
            if not self._object_clear(spec, obj_start, 0.01):
                continue
            me = mover.shape.circumradius
            mx, my = self._sample_xy(me)
            mp = Pose2(mx, my, 0.0)
            if not tile_coverage(mover.shape, mp, scene.grid).within:
                continue
            if not self._clear_of_obstacles(mover.shape, mp):
                continue
            if math.hypot(mx - ox, my - oy) < me + obj_e + 0.02:
                continue
            gx, gy = self._sample_xy(obj_e)
            if math.hypot(gx - ox, gy - oy) < task.min_start_goal_distance:
                continue
            if not self._object_clear(spec, (gx, gy, 0.0), 0.02):
                continue
            if task.family == "push_t":
                gyaw = float(self.rng.uniform(-math.pi, math.pi))
                goal = (gx, gy, gyaw)
            else:
                goal = (gx, gy)
            return GoalSample(goal=goal, mover_starts={mover.id: (mx, my, 0.0)}, object_start=obj_start)
        raise SamplingExhausted(f"no valid configuration in {SAMPLING_ATTEMPTS} attempts")

    def _sample_single_goal(self, mover_id: str) -> tuple[float, float]:
        """Resample one mover's goal during goal cycling."""
        scene = self.scene
        mv = scene.movers[scene.mover_index(mover_id)]
        e = mv.shape.circumradius
        goal_sep = 2.0 * max(m.shape.circumradius for m in scene.movers) + 0.06
        for _ in range(SAMPLING_ATTEMPTS):
            gx, gy = self._sample_xy(e)
            gpose = Pose2(gx, gy, 0.0)
            if not tile_coverage(mv.shape, gpose, scene.grid).within:
                continue
            if not self._clear_of_obstacles(mv.shape, gpose):
                continue
            others = [g for mid, g in self.goal.goal.items() if mid != mover_id]
            if any(math.hypot(gx - g[0], gy - g[1]) < goal_sep for g in others):
                continue
            k = self.world._index[mover_id]
            if math.hypot(gx - self.world.pose6[k, 0], gy - self.world.pose6[k, 1]) < self.task.min_start_goal_distance:
                continue
            return (gx, gy)
        raise SamplingExhausted("goal cycling could not place a new goal")

    # -- measures -----------------------------------------------------------

    def _measures(self) -> dict:
        w = self.world
        if self.task.family == "traj":
            dists = {}
            for mid in w.mover_ids:
                k = w._index[mid]
                gx, gy = self.goal.goal[mid]
                dists[mid] = math.hypot(w.pose6[k, 0] - gx, w.pose6[k, 1] - gy)
            return {"distances": dists}
        spec = self.scene.objects[0]
        obj_pose = (float(w.obj_pose[0, 0]), float(w.obj_pose[0, 1]), float(w.obj_pose[0, 2]))
        if self.task.family == "push_t":
            return {"coverage": coverage(obj_pose, self.goal.goal, spec)}
        gx, gy = self.goal.goal[0], self.goal.goal[1]
        return {"distance": math.hypot(obj_pose[0] - gx, obj_pose[1] - gy)}

    def _success(self, measures: dict) -> bool:
        if self.task.family == "traj":
            return success_from_measures(self.task, distances=list(measures["distances"].values()))
        if self.task.family == "push_t":
            return success_from_measures(self.task, cover=measures["coverage"])
        return success_from_measures(self.task, distance=measures["distance"])

    def _fatal(self, events: CollisionEvents) -> bool:
        if not self.task.fatal_collisions:
            return False
        if self.task.family == "traj":
            return bool(events.mover_mover or events.mover_off_tiles or events.mover_obstacle)
        if self.task.family == "push_obstacles":
            return bool(events.mover_obstacle or events.object_obstacle or events.mover_off_tiles)
        return bool(events.collision_count or events.mover_off_tiles)

    # -- observations -------------------------------------------------------

    def _obs_push(self) -> np.ndarray:
        w = self.world
        g = self.goal.goal
        k = 0
        ox, oy = float(w.obj_pose[0, 0]), float(w.obj_pose[0, 1])
        parts = [
            w.pose6[k, 0], w.pose6[k, 1], w.pose6[k, 5],
            w.vel6[k, 0], w.vel6[k, 1], w.vel6[k, 5],
            w.obj_pose[0, 0], w.obj_pose[0, 1], w.obj_pose[0, 2],
            w.obj_vel[0, 0], w.obj_vel[0, 1], w.obj_vel[0, 2],
        ]
        parts.extend(g)
        parts.extend([ox - g[0], oy - g[1]])
        parts.extend([w.pose6[k, 0] - ox, w.pose6[k, 1] - oy])
        return np.array(parts, dtype=np.float64)

    def _mover_block(self, mid: str) -> list[float]:
        w = self.world
        k = w._index[mid]
        gx, gy = self.goal.goal[mid]
        return [
            float(w.pose6[k, 0]), float(w.pose6[k, 1]), float(w.pose6[k, 5]),
            float(w.vel6[k, 0]), float(w.vel6[k, 1]), float(w.vel6[k, 5]),
            gx, gy,
            float(w.pose6[k, 0]) - gx, float(w.pose6[k, 1]) - gy,
        ]

    def _obs_traj_joint(self) -> np.ndarray:
        parts: list[float] = []
        for mid in self.agents:
            parts.extend(self._mover_block(mid))
        return np.array(parts, dtype=np.float64)

    def _obs_traj_agent(self, mid: str) -> np.ndarray:
        w = self.world
        parts = self._mover_block(mid)
        for other in self.agents:
            if other == mid:
                continue
            k = w._index[other]
            parts.extend([
                float(w.pose6[k, 0]), float(w.pose6[k, 1]), float(w.pose6[k, 5]),
                float(w.vel6[k, 0]), float(w.vel6[k, 1]), float(w.vel6[k, 5]),
            ])
        return np.array(parts, dtype=np.float64)

    def _observations(self):
        if self.task.family != "traj":
            return self._obs_push()
        if self.api_mode == "single":
            return self._obs_traj_joint()
        return {mid: self._obs_traj_agent(mid) for mid in self.agents}

    def observation_layout(self) -> dict:
        """JSON-able descriptor of the flattened observation layout."""
        fields = []

        def add(name: str, size: int, unit: str):
            offset = sum(f["size"] for f in fields)
            fields.append({"name": name, "offset": offset, "size": size, "unit": unit})

        if self.task.family != "traj":
            add("mover.pose", 3, "m,m,rad")
            add("mover.velocity", 3, "m/s,m/s,rad/s")
            add("object.pose", 3, "m,m,rad")
            add("object.velocity", 3, "m/s,m/s,rad/s")
            add("goal", 3 if self.task.family == "push_t" else 2, "m")
            add("object_minus_goal", 2, "m")
            add("mover_minus_object", 2, "m")
        elif self.api_mode == "single":
            for mid in self.agents:
                add(f"{mid}.pose", 3, "m,m,rad")
                add(f"{mid}.velocity", 3, "m/s,m/s,rad/s")
                add(f"{mid}.goal", 2, "m")
                add(f"{mid}.pos_minus_goal", 2, "m")
        else:
            add("self.pose", 3, "m,m,rad")
            add("self.velocity", 3, "m/s,m/s,rad/s")
            add("self.goal", 2, "m")
            add("self.pos_minus_goal", 2, "m")
            for _ in self.agents[1:]:
                add("other.pose", 3, "m,m,rad")
                add("other.velocity", 3, "m/s,m/s,rad/s")
        return {
            "format_version": 1,
            "family": self.task.family,
            "api_mode": self.api_mode,
            "dtype": "float64",
            "length": sum(f["size"] for f in fields),
            "fields": fields,
        }

    @property
    def action_size(self) -> int:
        return 2

    # -- lifecycle ----------------------------------------------------------

    def reset(self, seed: int | None = None):
        """Sample a fresh episode; returns (observation(s), info(s))."""
        if seed is not None:
            self.seed = seed
            self.rng = np.random.default_rng(seed)
        sample = self._sample_goal_config()
        self.goal = sample
        self.world = world_from_scene(self.scene)
        for mid, pose in sample.mover_starts.items():
            self.world.set_mover_pose(mid, pose[0], pose[1], pose[2])
            k = self.world._index[mid]
            self.world.yaw_target[k] = pose[2]
        if sample.object_start is not None:
            self.world.set_object_pose(0, *sample.object_start)
        self._done = False
        self._steps = 0
        self._completions = []
        self._at_goal = {mid: False for mid in self.agents}
        self._goals_assigned = len(self.agents) if self.task.family == "traj" else 1
        measures = self._measures()
        info = self._base_info(measures, CollisionEvents(), self._success(measures))
        obs = self._observations()
        if self.task.family == "traj" and self.api_mode == "multi":
            return obs, {mid: dict(info) for mid in self.agents}
        return obs, info

    def _base_info(self, measures: dict, events: CollisionEvents, success: bool) -> dict:
        info: dict = {
            "is_success": success,
            "goal": self.goal.goal,
            "collisions": {
                "mover_mover": list(events.mover_mover),
                "mover_obstacle": list(events.mover_obstacle),
                "object_obstacle": list(events.object_obstacle),
                "mover_off_tiles": list(events.mover_off_tiles),
            },
        }
        info.update(measures)
        return info

    def _reward(self, measures: dict, success: bool) -> float:
        if self.task.reward_mode == "sparse":
            return 0.0 if success else -1.0
        if self.task.family == "push_t":
            return -(1.0 - measures["coverage"])
        if self.task.family == "traj":
            return -sum(measures["distances"].values())
        return -measures["distance"]

    def _commands_from_action(self, action) -> dict[str, tuple[float, float]]:
        if self.api_mode == "single":
            arr = np.asarray(action, dtype=np.float64).reshape(-1)
            if arr.shape != (2,) or not np.all(np.isfinite(arr)):
                raise ActionShapeError(f"single-agent action must be 2 finite numbers, got {action!r}")
            return {self.agents[0]: (float(arr[0]), float(arr[1]))}
        if not isinstance(action, dict):
            raise ActionShapeError("multi-agent action must map mover id -> (ax, ay)")
        missing = set(self.agents) - set(action)
        extra = set(action) - set(self.agents)
        if missing or extra:
            raise ActionShapeError(f"action keys mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        out = {}
        for mid in self.agents:
            arr = np.asarray(action[mid], dtype=np.float64).reshape(-1)
            if arr.shape != (2,) or not np.all(np.isfinite(arr)):
                raise ActionShapeError(f"action for {mid} must be 2 finite numbers")
            out[mid] = (float(arr[0]), float(arr[1]))
        return out

    def step(self, action):
        """Advance one control cycle; returns Transition(s) per the api mode."""
        if self._done or self.world is None:
            raise SteppedTerminatedEpisode("call reset() before stepping")
        commands = self._commands_from_action(action)
        _, step_info = step_world(self.world, commands, self.scene)
        self._steps += 1
        events = step_info.events

        cycle_events: list[tuple[float, str]] = []
        if self.task.family == "traj" and self.task.cycle_goals:
            for mid in self.agents:
                k = self.world._index[mid]
                gx, gy = self.goal.goal[mid]
                d = math.hypot(self.world.pose6[k, 0] - gx, self.world.pose6[k, 1] - gy)
                if d <= self.task.success_threshold:
                    cycle_events.append((self.world.time, mid))
                    self._completions.append((self.world.time, mid))
                    new_goal = dict(self.goal.goal)
                    new_goal[mid] = self._sample_single_goal(mid)
                    self.goal = replace(self.goal, goal=new_goal)
                    self._goals_assigned += 1

        measures = self._measures()
        success = self._success(measures)
        fatal = self._fatal(events)
        if self.task.family == "traj" and not self.task.cycle_goals:
            # first-arrival completion times feed the trajectory metrics
            for mid in self.agents:
                d = measures["distances"][mid]
                if d <= self.task.success_threshold and not self._at_goal[mid]:
                    self._at_goal[mid] = True
                    self._completions.append((self.world.time, mid))
        elif self.task.family != "traj" and success and not self._completions:
            self._completions.append((self.world.time, self.agents[0]))

        if self.task.cycle_goals:
            terminated = fatal
        else:
            terminated = success or fatal
        truncated = (not terminated) and self._steps >= self.task.horizon
        self._done = terminated or truncated
        reward = self._reward(measures, success)
        info = self._base_info(measures, events, success)
        info["fatal_collision"] = fatal
        info["completions"] = list(cycle_events) if self.task.cycle_goals else list(self._completions)

        obs = self._observations()
        if self.task.family == "traj" and self.api_mode == "multi":
            out = {}
            for mid in self.agents:
                d = measures["distances"][mid]
                agent_ok = d <= self.task.success_threshold
                agent_info = dict(info)
                agent_info["is_success"] = agent_ok
                agent_info["all_success"] = success
                agent_info["distance"] = d
                if self.task.reward_mode == "sparse":
                    r = 0.0 if agent_ok else -1.0
                else:
                    r = -d
                out[mid] = Transition(obs[mid], r, terminated, truncated, agent_info)
            return out
        return Transition(obs, reward, terminated, truncated, info)

    @property
    def completions(self) -> list[tuple[float, str]]:
        return list(self._completions)

    @property
    def goals_assigned(self) -> int:
        return self._goals_assigned


def make_env(task: TaskSpec, scene: SceneConfig, seed: int, api_mode: str | None = None) -> Env:
    """Build a deterministic seeded environment; raises SceneTaskMismatch when
    the scene lacks the bodies the family requires."""
    return Env(task, scene, seed, api_mode)
