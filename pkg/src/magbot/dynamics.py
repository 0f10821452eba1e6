"""World stepping: acceleration commands, impedance holds, planar contacts.

Movers and objects are planar rigid bodies (x, y, yaw); mover z, roll and
pitch are impedance-held scalar channels with no coupling into the plane.
Levitation implicitly cancels gravity on the z channel; gravity only loads
object-on-ground friction. One step runs a fixed phase order: apply clamped
commands and impedance wrenches, resolve contacts (sequential impulses plus a
positional split correction), semi-implicit Euler integration, then the
margin-aware collision report.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field

import numpy as np

from .collision import (
    CollisionEvents,
    CollisionShape,
    Manifold,
    MoverPairContext,
    check_pair,
    manifold_circle_circle,
    manifold_rect_circle,
    manifold_rect_rect,
    mover_pair_events,
    off_tile_movers,
)
from .errors import InvalidParams, UnknownMoverId
from .geometry import Pose2
from .scene import SceneConfig


@dataclass(frozen=True)
class MoverState:
    """Snapshot of one mover: 6-DoF pose/velocity and the last applied planar command."""

    pose: tuple[float, float, float, float, float, float]  # x y z roll pitch yaw
    velocity: tuple[float, float, float, float, float, float]
    last_command: tuple[float, float]


@dataclass(frozen=True)
class ObjectState:
    pose: tuple[float, float, float]
    velocity: tuple[float, float, float]


class WorldState:
    """Dynamic state of all bodies plus the simulation clock.

    State is held in numpy arrays; ``movers``/``objects`` materialize snapshot
    views. ``time`` is derived from the integer step counter, so it is exactly
    ``step_index * dt`` at all times. One world is owned by one stepping
    context; use ``snapshot()`` to share read-only copies across threads.
    """

    def __init__(self, scene: SceneConfig):
        self.scene = scene
        n = len(scene.movers)
        m = len(scene.objects)
        self.dt = scene.physics.dt
        self.mover_ids = [mv.id for mv in scene.movers]
        self._index = {mid: k for k, mid in enumerate(self.mover_ids)}
        self.pose6 = np.zeros((n, 6))
        self.vel6 = np.zeros((n, 6))
        self.last_cmd = np.zeros((n, 2))
        self.hold_xy = np.zeros((n, 2))
        self.hold_active = np.zeros(n, dtype=bool)
        for k, mv in enumerate(scene.movers):
            self.pose6[k, 0] = mv.start_pose[0]
            self.pose6[k, 1] = mv.start_pose[1]
            self.pose6[k, 2] = mv.hover_height
            self.pose6[k, 5] = mv.start_pose[2]
        self.obj_pose = np.zeros((m, 3))
        self.obj_vel = np.zeros((m, 3))
        for k, ob in enumerate(scene.objects):
            self.obj_pose[k] = ob.start_pose
        self.step_index = 0

        # immutable per-scene derived data
        self.mass = np.array([mv.mass for mv in scene.movers]) if n else np.zeros(0)
        self.inv_mass = 1.0 / self.mass if n else np.zeros(0)
        self.yaw_inertia = np.array([mv.yaw_inertia for mv in scene.movers]) if n else np.zeros(0)
        self.hover = np.array([mv.hover_height for mv in scene.movers]) if n else np.zeros(0)
        self.yaw_target = np.array([mv.start_pose[2] for mv in scene.movers]) if n else np.zeros(0)
        self.hold_damping = (
            2.0 * np.sqrt(scene.physics.contact.hold_stiffness * self.mass) if n else np.zeros(0)
        )
        self.shapes = [mv.shape for mv in scene.movers]
        self.obj_mass = np.array([ob.mass for ob in scene.objects]) if m else np.zeros(0)
        self.obj_inertia = np.array([ob.yaw_inertia for ob in scene.objects]) if m else np.zeros(0)
        self.obj_mu_ground = np.array([ob.friction_ground for ob in scene.objects]) if m else np.zeros(0)
        self.obj_spin_radius = np.array([ob.spin_radius for ob in scene.objects]) if m else np.zeros(0)
        self._pair_ctx: MoverPairContext | None = None
        self._scratch_a = np.zeros((n, 2))

    @property
    def time(self) -> float:
        return self.step_index * self.dt

    @property
    def movers(self) -> list[MoverState]:
        return [
            MoverState(tuple(self.pose6[k]), tuple(self.vel6[k]), tuple(self.last_cmd[k]))
            for k in range(self.pose6.shape[0])
        ]

    @property
    def objects(self) -> list[ObjectState]:
        return [
            ObjectState(tuple(self.obj_pose[k]), tuple(self.obj_vel[k]))
            for k in range(self.obj_pose.shape[0])
        ]

    def mover_state(self, mover_id: str) -> MoverState:
        k = self._index[mover_id]
        return MoverState(tuple(self.pose6[k]), tuple(self.vel6[k]), tuple(self.last_cmd[k]))

    def set_mover_pose(self, mover_id: str, x: float, y: float, yaw: float | None = None) -> None:
        k = self._index[mover_id]
        self.pose6[k, 0] = x
        self.pose6[k, 1] = y
        if yaw is not None:
            self.pose6[k, 5] = yaw

    def set_mover_velocity(self, mover_id: str, vx: float, vy: float, wyaw: float = 0.0) -> None:
        k = self._index[mover_id]
        self.vel6[k, 0] = vx
        self.vel6[k, 1] = vy
        self.vel6[k, 5] = wyaw

    def set_object_pose(self, index: int, x: float, y: float, yaw: float = 0.0) -> None:
        self.obj_pose[index] = (x, y, yaw)

    def snapshot(self) -> "WorldState":
        other = WorldState.__new__(WorldState)
        other.__dict__.update(self.__dict__)
        for name in ("pose6", "vel6", "last_cmd", "hold_xy", "hold_active", "obj_pose", "obj_vel"):
            setattr(other, name, getattr(self, name).copy())
        other._pair_ctx = None
        return other

    def pair_context(self) -> MoverPairContext:
        if self._pair_ctx is None:
            self._pair_ctx = MoverPairContext(self.shapes)
        return self._pair_ctx


def world_from_scene(scene: SceneConfig) -> WorldState:
    return WorldState(scene)


@dataclass
class StepInfo:
    """Per-step outcome: events, clamped commands, contact count, phase timings."""

    events: CollisionEvents
    applied_array: np.ndarray
    mover_ids: list[str]
    contact_count: int
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def applied(self) -> dict[str, tuple[float, float]]:
        return {
            mid: (float(self.applied_array[k, 0]), float(self.applied_array[k, 1]))
            for k, mid in enumerate(self.mover_ids)
        }


# ---------------------------------------------------------------------------
# Command clamping and impedance control
# ---------------------------------------------------------------------------


def clamp_command(
    cmd: tuple[float, float], state: MoverState, params
) -> tuple[float, float]:
    """Norm-clamp to a_max, then scale so the post-step speed cannot exceed v_max.

    When applying the clamped acceleration for one dt would cross v_max, the
    acceleration is scaled so the post-step speed equals v_max exactly.
    """
    ax, ay = cmd
    norm = math.hypot(ax, ay)
    # the tolerance band makes clamping idempotent to the last ulp
    if norm > params.a_max * (1.0 + 1e-12):
        s = params.a_max / norm
        ax *= s
        ay *= s
    vx, vy = state.velocity[0], state.velocity[1]
    dt = params.dt
    nvx = vx + ax * dt
    nvy = vy + ay * dt
    if nvx * nvx + nvy * nvy <= params.v_max * params.v_max * (1.0 + 1e-12):
        return (ax, ay)
    a2 = (ax * ax + ay * ay) * dt * dt
    if a2 == 0.0:
        return (ax, ay)
    b = 2.0 * dt * (vx * ax + vy * ay)
    c = vx * vx + vy * vy - params.v_max * params.v_max
    disc = b * b - 4.0 * a2 * c
    if disc <= 0.0:
        return (0.0, 0.0)
    t = (-b + math.sqrt(disc)) / (2.0 * a2)
    t = min(max(t, 0.0), 1.0)
    return (ax * t, ay * t)


def impedance_wrench(
    state: MoverState,
    targets: tuple[float, float, float, float],
    stiffness,
    damping,
) -> tuple[float, float, float, float]:
    """Per-DoF spring-damper wrench on (z, roll, pitch, yaw): K*(target-x) - D*v."""
    z, roll, pitch, yaw = state.pose[2], state.pose[3], state.pose[4], state.pose[5]
    vz, wr, wp, wy = state.velocity[2], state.velocity[3], state.velocity[4], state.velocity[5]
    yaw_err = math.remainder(targets[3] - yaw, 2.0 * math.pi)
    return (
        stiffness.z * (targets[0] - z) - damping.z * vz,
        stiffness.roll * (targets[1] - roll) - damping.roll * wr,
        stiffness.pitch * (targets[2] - pitch) - damping.pitch * wp,
        stiffness.yaw * yaw_err - damping.yaw * wy,
    )


def _clamp_commands_vec(a: np.ndarray, vel: np.ndarray, params) -> np.ndarray:
    """Vectorized clamp matching ``clamp_command`` arithmetic."""
    norm = np.hypot(a[:, 0], a[:, 1])
    over = norm > params.a_max * (1.0 + 1e-12)
    if np.any(over):
        s = np.ones_like(norm)
        s[over] = params.a_max / norm[over]
        a = a * s[:, None]
    dt = params.dt
    nv = vel + a * dt
    speed2 = nv[:, 0] ** 2 + nv[:, 1] ** 2
    cap = speed2 > params.v_max * params.v_max * (1.0 + 1e-12)
    if np.any(cap):
        idx = np.nonzero(cap)[0]
        for k in idx:
            ax, ay = a[k]
            vx, vy = vel[k]
            a2 = (ax * ax + ay * ay) * dt * dt
            if a2 == 0.0:
                continue
            b = 2.0 * dt * (vx * ax + vy * ay)
            c = vx * vx + vy * vy - params.v_max * params.v_max
            disc = b * b - 4.0 * a2 * c
            if disc <= 0.0:
                a[k] = 0.0
                continue
            t = (-b + math.sqrt(disc)) / (2.0 * a2)
            t = min(max(t, 0.0), 1.0)
            a[k, 0] = ax * t
            a[k, 1] = ay * t
    return a


# ---------------------------------------------------------------------------
# Contacts
# ---------------------------------------------------------------------------


@dataclass
class _Body:
    inv_m: float
    inv_i: float
    px: float
    py: float
    vx: float
    vy: float
    w: float


@dataclass
class ContactManifold:
    """Solver-facing contact: body references, unit normal A->B, points with depths."""

    body_a: tuple[str, int]
    body_b: tuple[str, int]
    normal: tuple[float, float]
    points: list[tuple[float, float, float]]
    friction: float


def _object_piece_world(ob, pose_row) -> list[tuple[Pose2, tuple[float, float]]]:
    """World poses and half-extents of an object's rectangle pieces."""
    x, y, yaw = float(pose_row[0]), float(pose_row[1]), float(pose_row[2])
    c = math.cos(yaw)
    s = math.sin(yaw)
    out = []
    for cx, cy, hx, hy in ob.pieces:
        out.append((Pose2(x + c * cx - s * cy, y + s * cx + c * cy, yaw), (hx, hy)))
    return out


def _collect_manifolds(world: WorldState) -> list[ContactManifold]:
    """Mover-object and object-object contacts on the raw (margin-free) geometry."""
    scene = world.scene
    out: list[ContactManifold] = []
    n = len(scene.movers)
    m = len(scene.objects)
    if m == 0:
        return out
    obj_pieces = []
    obj_circle = []
    for j, ob in enumerate(scene.objects):
        if ob.kind == "cylinder":
            obj_pieces.append(None)
            obj_circle.append(float(ob.dimensions[0]))
        else:
            obj_pieces.append(_object_piece_world(ob, world.obj_pose[j]))
            obj_circle.append(0.0)

    for i in range(n):
        mv = scene.movers[i]
        mp = Pose2(float(world.pose6[i, 0]), float(world.pose6[i, 1]), float(world.pose6[i, 5]))
        m_reach = mv.shape.circumradius
        for j, ob in enumerate(scene.objects):
            dx = world.obj_pose[j, 0] - mp.x
            dy = world.obj_pose[j, 1] - mp.y
            reach = m_reach + ob.circumradius + 1e-6
            if dx * dx + dy * dy > reach * reach:
                continue
            mu = ob.friction_mover
            if ob.kind == "cylinder":
                cp = Pose2(float(world.obj_pose[j, 0]), float(world.obj_pose[j, 1]), 0.0)
                if mv.shape.kind == "box":
                    man = manifold_rect_circle(mp, mv.shape.params[0], mv.shape.params[1], cp, obj_circle[j])
                else:
                    man = manifold_circle_circle(mp, mv.shape.params[0], cp, obj_circle[j])
                if man is not None:
                    out.append(ContactManifold(("m", i), ("o", j), man.normal, man.points, mu))
            else:
                for piece_pose, ext in obj_pieces[j]:
                    if mv.shape.kind == "box":
                        man = manifold_rect_rect(mp, (mv.shape.params[0], mv.shape.params[1]), piece_pose, ext)
                    else:
                        flipped = manifold_rect_circle(piece_pose, ext[0], ext[1], mp, mv.shape.params[0])
                        man = (
                            Manifold((-flipped.normal[0], -flipped.normal[1]), flipped.points)
                            if flipped is not None
                            else None
                        )
                    if man is not None:
                        out.append(ContactManifold(("m", i), ("o", j), man.normal, man.points, mu))

    for ja in range(m):
        for jb in range(ja + 1, m):
            oa, ob = scene.objects[ja], scene.objects[jb]
            dx = world.obj_pose[jb, 0] - world.obj_pose[ja, 0]
            dy = world.obj_pose[jb, 1] - world.obj_pose[ja, 1]
            reach = oa.circumradius + ob.circumradius + 1e-6
            if dx * dx + dy * dy > reach * reach:
                continue
            mu = math.sqrt(oa.friction_mover * ob.friction_mover)
            if oa.kind == "cylinder" and ob.kind == "cylinder":
                pa = Pose2(float(world.obj_pose[ja, 0]), float(world.obj_pose[ja, 1]), 0.0)
                pb = Pose2(float(world.obj_pose[jb, 0]), float(world.obj_pose[jb, 1]), 0.0)
                man = manifold_circle_circle(pa, oa.dimensions[0], pb, ob.dimensions[0])
                if man is not None:
                    out.append(ContactManifold(("o", ja), ("o", jb), man.normal, man.points, mu))
                continue
            pieces_a = obj_pieces[ja]
            pieces_b = obj_pieces[jb]
            if oa.kind == "cylinder":
                pa = Pose2(float(world.obj_pose[ja, 0]), float(world.obj_pose[ja, 1]), 0.0)
                for piece_pose, ext in pieces_b:
                    man = manifold_rect_circle(piece_pose, ext[0], ext[1], pa, oa.dimensions[0])
                    if man is not None:
                        out.append(
                            ContactManifold(
                                ("o", ja), ("o", jb), (-man.normal[0], -man.normal[1]), man.points, mu
                            )
                        )
                continue
            if ob.kind == "cylinder":
                pb = Pose2(float(world.obj_pose[jb, 0]), float(world.obj_pose[jb, 1]), 0.0)
                for piece_pose, ext in pieces_a:
                    man = manifold_rect_circle(piece_pose, ext[0], ext[1], pb, ob.dimensions[0])
                    if man is not None:
                        out.append(ContactManifold(("o", ja), ("o", jb), man.normal, man.points, mu))
                continue
            for pa_pose, ea in pieces_a:
                for pb_pose, eb in pieces_b:
                    man = manifold_rect_rect(pa_pose, ea, pb_pose, eb)
                    if man is not None:
                        out.append(ContactManifold(("o", ja), ("o", jb), man.normal, man.points, mu))
    return out


def _body_of(world: WorldState, ref: tuple[str, int]) -> _Body:
    kind, k = ref
    if kind == "m":
        return _Body(
            float(world.inv_mass[k]),
            1.0 / float(world.yaw_inertia[k]),
            float(world.pose6[k, 0]),
            float(world.pose6[k, 1]),
            float(world.vel6[k, 0]),
            float(world.vel6[k, 1]),
            float(world.vel6[k, 5]),
        )
    return _Body(
        1.0 / float(world.obj_mass[k]),
        1.0 / float(world.obj_inertia[k]),
        float(world.obj_pose[k, 0]),
        float(world.obj_pose[k, 1]),
        float(world.obj_vel[k, 0]),
        float(world.obj_vel[k, 1]),
        float(world.obj_vel[k, 2]),
    )


def solve_contacts(manifolds: list[ContactManifold], bodies: dict[tuple[str, int], _Body], dt: float, contact) -> None:
    """Sequential impulses with accumulated clamping and box friction cones.

    Velocity impulses enforce non-penetration (restitution 0) and Coulomb
    friction. Positions are corrected by a split nudge along the normal
    (at most ``baumgarte * depth`` per step) that leaves velocities, and
    therefore kinetic energy, untouched.
    """
    if not manifolds:
        return
    rows = []
    for man in manifolds:
        a = bodies[man.body_a]
        b = bodies[man.body_b]
        nx, ny = man.normal
        tx, ty = -ny, nx
        for px, py, depth in man.points:
            rax = px - a.px
            ray = py - a.py
            rbx = px - b.px
            rby = py - b.py
            rna = rax * ny - ray * nx
            rnb = rbx * ny - rby * nx
            kn = a.inv_m + b.inv_m + a.inv_i * rna * rna + b.inv_i * rnb * rnb
            rta = rax * ty - ray * tx
            rtb = rbx * ty - rby * tx
            kt = a.inv_m + b.inv_m + a.inv_i * rta * rta + b.inv_i * rtb * rtb
            rows.append([a, b, nx, ny, tx, ty, rax, ray, rbx, rby, 1.0 / kn, 1.0 / kt, man.friction, 0.0, 0.0, depth])

    for _ in range(contact.solver_iters):
        for row in rows:
            a, b, nx, ny, tx, ty, rax, ray, rbx, rby, mn, mt, mu, pn, pt, _ = row
            dvx = b.vx - b.w * rby - a.vx + a.w * ray
            dvy = b.vy + b.w * rbx - a.vy - a.w * rax
            vn = dvx * nx + dvy * ny
            lam = -vn * mn
            new_pn = pn + lam
            if new_pn < 0.0:
                new_pn = 0.0
            dlam = new_pn - pn
            row[13] = new_pn
            ix = dlam * nx
            iy = dlam * ny
            a.vx -= ix * a.inv_m
            a.vy -= iy * a.inv_m
            a.w -= a.inv_i * (rax * iy - ray * ix)
            b.vx += ix * b.inv_m
            b.vy += iy * b.inv_m
            b.w += b.inv_i * (rbx * iy - rby * ix)

            dvx = b.vx - b.w * rby - a.vx + a.w * ray
            dvy = b.vy + b.w * rbx - a.vy - a.w * rax
            vt = dvx * tx + dvy * ty
            lam_t = -vt * mt
            cap = mu * row[13]
            new_pt = pt + lam_t
            if new_pt > cap:
                new_pt = cap
            elif new_pt < -cap:
                new_pt = -cap
            dlam_t = new_pt - row[14]
            row[14] = new_pt
            ix = dlam_t * tx
            iy = dlam_t * ty
            a.vx -= ix * a.inv_m
            a.vy -= iy * a.inv_m
            a.w -= a.inv_i * (rax * iy - ray * ix)
            b.vx += ix * b.inv_m
            b.vy += iy * b.inv_m
            b.w += b.inv_i * (rbx * iy - rby * ix)

    # positional split correction: deepest point per manifold, linear only
    for man in manifolds:
        a = bodies[man.body_a]
        b = bodies[man.body_b]
        depth = max(p[2] for p in man.points)
        corr = contact.baumgarte * (depth - contact.slop)
        if corr <= 0.0:
            continue
        total = a.inv_m + b.inv_m
        if total == 0.0:
            continue
        nx, ny = man.normal
        sa = corr * a.inv_m / total
        sb = corr * b.inv_m / total
        a.px -= nx * sa
        a.py -= ny * sa
        b.px += nx * sb
        b.py += ny * sb


def _ground_friction(world: WorldState) -> None:
    """Discrete Coulomb drag on objects: per step it can remove at most
    mu*g*dt of linear speed and the matching spin increment."""
    m = world.obj_vel.shape[0]
    g = world.scene.physics.gravity
    dt = world.dt
    for j in range(m):
        vx = world.obj_vel[j, 0]
        vy = world.obj_vel[j, 1]
        cap = world.obj_mu_ground[j] * g * dt
        speed = math.hypot(vx, vy)
        if speed <= cap:
            world.obj_vel[j, 0] = 0.0
            world.obj_vel[j, 1] = 0.0
        elif speed > 0.0:
            s = 1.0 - cap / speed
            world.obj_vel[j, 0] = vx * s
            world.obj_vel[j, 1] = vy * s
        w = world.obj_vel[j, 2]
        wcap = (
            world.obj_mu_ground[j]
            * world.obj_mass[j]
            * g
            * world.obj_spin_radius[j]
            * dt
            / world.obj_inertia[j]
        )
        if abs(w) <= wcap:
            world.obj_vel[j, 2] = 0.0
        else:
            world.obj_vel[j, 2] = w - math.copysign(wcap, w)


# ---------------------------------------------------------------------------
# Collision report
# ---------------------------------------------------------------------------


def collision_report(world: WorldState, scene: SceneConfig, mode: str = "naive") -> CollisionEvents:
    """Categorized margin-aware collision events at the world's current time."""
    t = world.time
    events = CollisionEvents()
    n = len(scene.movers)
    x = world.pose6[:, 0]
    y = world.pose6[:, 1]
    yaw = world.pose6[:, 5]
    if n >= 2:
        ctx = world.pair_context() if mode == "naive" else None
        events.mover_mover = mover_pair_events(world.mover_ids, world.shapes, x, y, yaw, t, mode, ctx)
    if scene.obstacles and n:
        pairs = []
        for i in range(n):
            mp = Pose2(float(x[i]), float(y[i]), float(yaw[i]))
            reach_m = world.shapes[i].circumradius
            for ob in scene.obstacles:
                op = Pose2(*ob.pose)
                dx = op.x - mp.x
                dy = op.y - mp.y
                reach = reach_m + ob.shape.circumradius + 1e-9
                if dx * dx + dy * dy > reach * reach:
                    continue
                if check_pair(world.shapes[i], mp, ob.shape, op).colliding:
                    pairs.append((world.mover_ids[i], ob.id, t))
        pairs.sort()
        events.mover_obstacle = pairs
    if scene.obstacles and scene.objects:
        hits = []
        for j, obj in enumerate(scene.objects):
            row = world.obj_pose[j]
            if obj.kind == "cylinder":
                shape_pose_pairs = [
                    (CollisionShape.circle(obj.dimensions[0]), Pose2(float(row[0]), float(row[1]), 0.0))
                ]
            else:
                shape_pose_pairs = [
                    (CollisionShape.box(ext[0], ext[1]), pose)
                    for pose, ext in _object_piece_world(obj, row)
                ]
            for ob in scene.obstacles:
                op = Pose2(*ob.pose)
                hit = any(check_pair(s, p, ob.shape, op).colliding for s, p in shape_pose_pairs)
                if hit:
                    hits.append((obj.id, ob.id, t))
        hits.sort()
        events.object_obstacle = hits
    if n:
        events.mover_off_tiles = off_tile_movers(world.mover_ids, world.shapes, x, y, yaw, scene.grid, t)
    return events


# ---------------------------------------------------------------------------
# Stepping
# ---------------------------------------------------------------------------


def step_world(
    world: WorldState,
    commands: dict[str, tuple[float, float]],
    scene: SceneConfig | None = None,
    collision_mode: str = "naive",
) -> tuple[WorldState, StepInfo]:
    """Advance one control cycle in place; returns the world and step info.

    Movers without a command hold their position with a planar spring-damper
    latched at the pose where the command stream stopped. Identical inputs
    produce bitwise-identical results on one platform.
    """
    if scene is None:
        scene = world.scene
    elif scene is not world.scene:
        raise InvalidParams("world was built from a different scene")
    params = scene.physics
    dt = world.dt
    n = world.pose6.shape[0]

    t0 = _time.perf_counter()
    a = world._scratch_a
    a[:] = 0.0
    commanded = np.zeros(n, dtype=bool)
    for mid, cmd in commands.items():
        k = world._index.get(mid)
        if k is None:
            raise UnknownMoverId(mid)
        a[k, 0] = cmd[0]
        a[k, 1] = cmd[1]
        commanded[k] = True
    idle = ~commanded
    if np.any(idle):
        newly = idle & ~world.hold_active
        if np.any(newly):
            world.hold_xy[newly] = world.pose6[newly, 0:2]
            world.hold_active |= newly
        kp = params.contact.hold_stiffness
        a[idle] = (
            kp * (world.hold_xy[idle] - world.pose6[idle, 0:2])
            - world.hold_damping[idle, None] * world.vel6[idle, 0:2]
        ) / world.mass[idle, None]
    if np.any(commanded):
        world.hold_active &= ~commanded
    a = _clamp_commands_vec(a, world.vel6[:, 0:2], params)
    world.last_cmd[:] = a

    # impedance accelerations on held channels
    kz, kr, kp_, ky = params.stiffness.z, params.stiffness.roll, params.stiffness.pitch, params.stiffness.yaw
    dz, dr, dp, dy = params.damping.z, params.damping.roll, params.damping.pitch, params.damping.yaw
    az = (kz * (world.hover - world.pose6[:, 2]) - dz * world.vel6[:, 2]) / world.mass
    ar = (kr * (0.0 - world.pose6[:, 3]) - dr * world.vel6[:, 3]) / world.yaw_inertia
    ap = (kp_ * (0.0 - world.pose6[:, 4]) - dp * world.vel6[:, 4]) / world.yaw_inertia
    yaw_err = world.yaw_target - world.pose6[:, 5]
    big = np.abs(yaw_err) > math.pi
    if np.any(big):
        yaw_err = np.where(big, np.mod(yaw_err + math.pi, 2.0 * math.pi) - math.pi, yaw_err)
    ayaw = (ky * yaw_err - dy * world.vel6[:, 5]) / world.yaw_inertia
    t1 = _time.perf_counter()

    # contacts
    contact_count = 0
    if world.obj_pose.shape[0]:
        _ground_friction(world)
        manifolds = _collect_manifolds(world)
        if manifolds:
            refs = {man.body_a for man in manifolds} | {man.body_b for man in manifolds}
            bodies = {ref: _body_of(world, ref) for ref in refs}
            solve_contacts(manifolds, bodies, dt, params.contact)
            for ref, body in bodies.items():
                kind, k = ref
                if kind == "m":
                    world.vel6[k, 0] = body.vx
                    world.vel6[k, 1] = body.vy
                    world.vel6[k, 5] = body.w
                    world.pose6[k, 0] = body.px
                    world.pose6[k, 1] = body.py
                else:
                    world.obj_vel[k, 0] = body.vx
                    world.obj_vel[k, 1] = body.vy
                    world.obj_vel[k, 2] = body.w
                    world.obj_pose[k, 0] = body.px
                    world.obj_pose[k, 1] = body.py
            contact_count = sum(len(man.points) for man in manifolds)
    t2 = _time.perf_counter()

    # semi-implicit Euler: v += a*dt, then x += v*dt
    world.vel6[:, 0:2] += a * dt
    world.vel6[:, 2] += az * dt
    world.vel6[:, 3] += ar * dt
    world.vel6[:, 4] += ap * dt
    world.vel6[:, 5] += ayaw * dt
    world.pose6 += world.vel6 * dt
    yaws = world.pose6[:, 5]
    wrap = np.abs(yaws) > math.pi
    if np.any(wrap):
        wrapped = np.mod(yaws[wrap] + math.pi, 2.0 * math.pi) - math.pi
        wrapped = np.where(wrapped <= -math.pi, wrapped + 2.0 * math.pi, wrapped)
        yaws[wrap] = wrapped
    if world.obj_pose.shape[0]:
        world.obj_pose += world.obj_vel * dt
        oy = world.obj_pose[:, 2]
        wrap = np.abs(oy) > math.pi
        if np.any(wrap):
            wrapped = np.mod(oy[wrap] + math.pi, 2.0 * math.pi) - math.pi
            wrapped = np.where(wrapped <= -math.pi, wrapped + 2.0 * math.pi, wrapped)
            oy[wrap] = wrapped
    world.step_index += 1
    t3 = _time.perf_counter()

    events = collision_report(world, scene, collision_mode)
    t4 = _time.perf_counter()

    info = StepInfo(
        events=events,
        applied_array=world.last_cmd.copy(),
        mover_ids=world.mover_ids,
        contact_count=contact_count,
        timings={
            "control": t1 - t0,
            "integrate": t3 - t2,
            "collide": t4 - t3,
            "contact": t2 - t1,
        },
    )
    return world, info
