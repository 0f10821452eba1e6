"""Scripted, learning-free controllers that exercise the tasks end to end:
a PD goal-seeker, a prioritized multi-mover planner with reciprocal avoidance
and yielding, and a behind-the-object push controller with approach/align/
push phases. All outputs pass through the command clamp, so clamping a
baseline command a second time changes nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .collision import CollisionShape
from .dynamics import MoverState, ObjectState, clamp_command
from .geometry import normalize_angle
from .scene import ObjectSpec, PhysicsParams, SceneConfig, TileGrid


@dataclass(frozen=True)
class BaselineGains:
    """Frozen controller tuning; PD part critically damped under the clamp."""

    kp: float = 25.0
    kd: float = 10.0
    influence_diameters: float = 3.0  # pairwise influence radius in mover diameters
    repulsion_gain: float = 12.0
    swirl_gain: float = 3.0
    # narrow, strong wall zone: never overlaps sampled goal positions
    boundary_margin: float = 0.03  # wall influence distance (footprint edge to wall)
    boundary_gain: float = 200.0
    approach_tolerance: float = 0.02
    push_misalignment: float = 0.3  # radians; re-approach beyond this
    push_standoff_pad: float = 0.01
    push_speed: float = 0.25  # m/s target pushing speed
    ring_clearance: float = 0.045  # detour ring beyond the contact distance
    subtarget_hop: float = 0.8  # radians advanced around the ring per hop
    yield_clearance: float = 0.30  # holder-to-path distance that triggers a sidestep
    yield_release: float = 0.38  # hysteresis: conflict clears beyond this
    sidestep_distance: float = 0.34
    sidestep_separation: float = 0.28  # sidestep spots keep this far from other movers


DEFAULT_GAINS = BaselineGains()


@dataclass
class ControllerState:
    """Deterministic per-episode push-controller memory."""

    phase: str = "approach"
    subtarget: tuple[float, float] | None = None
    waypoint: tuple[float, float] | None = None
    steps_since_eval: int = 0
    steps_in_phase: int = 0


def _clamped(ax: float, ay: float, state: MoverState, params: PhysicsParams) -> tuple[float, float]:
    return clamp_command((ax, ay), state, params)


def pd_goto(
    state: MoverState,
    goal: tuple[float, float],
    params: PhysicsParams,
    gains: BaselineGains = DEFAULT_GAINS,
) -> tuple[float, float]:
    """Critically damped PD toward a planar goal; zero exactly at rest on goal."""
    ax = gains.kp * (goal[0] - state.pose[0]) - gains.kd * state.velocity[0]
    ay = gains.kp * (goal[1] - state.pose[1]) - gains.kd * state.velocity[1]
    return _clamped(ax, ay, state, params)


def _mover_half_extent(shape: CollisionShape) -> float:
    if shape.kind == "box":
        return max(shape.params[0], shape.params[1])
    return shape.params[0]


def reciprocal_avoid(
    states: dict[str, MoverState],
    goals: dict[str, tuple[float, float]],
    shapes: dict[str, CollisionShape],
    params: PhysicsParams,
    gains: BaselineGains = DEFAULT_GAINS,
    grid: TileGrid | None = None,
    obstacles=None,
) -> dict[str, tuple[float, float]]:
    """PD goal seeking plus pairwise repulsion gated by closing speed (so
    settled movers do not push each other off their goals), with a
    common-handed tangential bias that breaks head-on deadlocks while keeping
    the pair's mirror symmetry, plus inward wall repulsion when a grid is
    given."""
    ids = sorted(states)
    commands: dict[str, tuple[float, float]] = {}
    diameter = 2.0 * max(2.0 * _mover_half_extent(shapes[i]) for i in ids) if ids else 0.0
    influence = gains.influence_diameters * diameter
    for mid in ids:
        st = states[mid]
        px, py = st.pose[0], st.pose[1]
        gx, gy = goals[mid]
        ax = gains.kp * (gx - px) - gains.kd * st.velocity[0]
        ay = gains.kp * (gy - py) - gains.kd * st.velocity[1]
        for other in ids:
            if other == mid:
                continue
            ot = states[other]
            ox, oy = ot.pose[0], ot.pose[1]
            dx = px - ox
            dy = py - oy
            d = math.hypot(dx, dy)
            d_safe = shapes[mid].circumradius + shapes[other].circumradius
            if d >= influence or d <= 1e-9:
                continue
            s = min((influence - d) / max(influence - d_safe, 1e-9), 1.5)
            ux, uy = dx / d, dy / d
            closing = max(
                0.0,
                -((st.velocity[0] - ot.velocity[0]) * ux + (st.velocity[1] - ot.velocity[1]) * uy),
            )
            mag = gains.repulsion_gain * s * s * (closing + 0.05)
            # thin static floor just above footprint contact
            if d < d_safe + 0.02:
                mag += 30.0 * (d_safe + 0.02 - d) / 0.02
            ax += mag * ux
            ay += mag * uy
            # shared-handed tangent (rotate the away-vector by +90 degrees)
            swirl = gains.swirl_gain * s * s * (closing + 0.05)
            ax += swirl * (-uy)
            ay += swirl * ux
        if obstacles:
            for ob in obstacles:
                dx = px - ob.pose[0]
                dy = py - ob.pose[1]
                d = math.hypot(dx, dy)
                reach = shapes[mid].circumradius + ob.shape.circumradius
                if 1e-9 < d < reach + 0.12:
                    s = (reach + 0.12 - d) / 0.12
                    ax += gains.boundary_gain * s * s * dx / d
                    ay += gains.boundary_gain * s * s * dy / d
        if grid is not None:
            half = _mover_half_extent(shapes[mid]) + shapes[mid].margin
            x0, y0, x1, y1 = grid.bounds
            bm = gains.boundary_margin
            d_left = (px - half) - x0
            d_right = x1 - (px + half)
            d_bot = (py - half) - y0
            d_top = y1 - (py + half)
            if d_left < bm:
                s = (bm - d_left) / bm
                ax += gains.boundary_gain * s * s
            if d_right < bm:
                s = (bm - d_right) / bm
                ax -= gains.boundary_gain * s * s
            if d_bot < bm:
                s = (bm - d_bot) / bm
                ay += gains.boundary_gain * s * s
            if d_top < bm:
                s = (bm - d_top) / bm
                ay -= gains.boundary_gain * s * s
        commands[mid] = _clamped(ax, ay, states[mid], params)
    return commands


def _object_half_extent(spec: ObjectSpec) -> float:
    if spec.kind == "cylinder":
        return spec.dimensions[0]
    return max(max(hx, hy) for _, _, hx, hy in spec.pieces)


def push_controller(
    mover: MoverState,
    obj: ObjectState,
    goal: tuple[float, float],
    spec: ObjectSpec,
    params: PhysicsParams,
    ctrl: ControllerState,
    mover_shape: CollisionShape,
    gains: BaselineGains = DEFAULT_GAINS,
    success_threshold: float = 0.05,
    board: tuple[float, float, float, float] | None = None,
) -> tuple[float, float]:
    """Behind-object pushing: approach the standoff point on the object-goal
    line, hopping around a clearance ring when the direct path would cross the
    object; push along the line; re-enter approach when misaligned by more
    than ``push_misalignment``. Sub-targets are latched between re-evaluations
    so the controller cannot flap between conflicting targets."""
    px, py = mover.pose[0], mover.pose[1]
    ox, oy = obj.pose[0], obj.pose[1]
    gx, gy = goal[0], goal[1]
    to_goal_x = gx - ox
    to_goal_y = gy - oy
    dist_og = math.hypot(to_goal_x, to_goal_y)
    ctrl.steps_in_phase += 1
    if dist_og <= 0.8 * success_threshold or dist_og == 0.0:
        ctrl.phase = "hold"
        ctrl.subtarget = None
        return _clamped(-gains.kd * mover.velocity[0], -gains.kd * mover.velocity[1], mover, params)
    if ctrl.phase == "hold":
        ctrl.phase = "approach"
        ctrl.subtarget = None
        ctrl.steps_in_phase = 0

    ux, uy = to_goal_x / dist_og, to_goal_y / dist_og
    half_obj = _object_half_extent(spec)
    half_mover = _mover_half_extent(mover_shape)
    contact = half_obj + half_mover
    standoff = contact + gains.push_standoff_pad
    # safety radii use the object's circumradius: a bumped object may rotate,
    # and its corners reach beyond the face half-extent
    reach_obj = spec.circumradius if spec.kind != "cylinder" else spec.dimensions[0]
    contact_safe = reach_obj + half_mover
    ring = contact_safe + gains.ring_clearance
    wx = ox - ux * standoff
    wy = oy - uy * standoff
    ctrl.waypoint = (wx, wy)

    bx = px - ox
    by = py - oy
    d_mo = math.hypot(bx, by)
    behind_angle = abs(normalize_angle(math.atan2(by, bx) - math.atan2(-uy, -ux)))

    if ctrl.phase == "push" and behind_angle > gains.push_misalignment:
        ctrl.phase = "approach"
        ctrl.subtarget = None
        ctrl.steps_in_phase = 0

    if ctrl.phase == "approach":
        d_wp = math.hypot(wx - px, wy - py)
        # a rotated object can hold the mover a corner-stall gap short of the
        # waypoint; widen the gate accordingly
        gate = gains.approach_tolerance + max(0.0, reach_obj - half_obj) + 0.004
        if d_wp < gate and behind_angle < 0.5 * gains.push_misalignment:
            ctrl.phase = "push"
            ctrl.subtarget = None
            ctrl.steps_in_phase = 0
        else:
            ctrl.steps_since_eval += 1
            reached = (
                ctrl.subtarget is not None
                and math.hypot(ctrl.subtarget[0] - px, ctrl.subtarget[1] - py) < 0.035
            )
            if ctrl.subtarget is None or reached or ctrl.steps_since_eval >= 300:
                ctrl.steps_since_eval = 0
                ctrl.subtarget = _approach_subtarget(
                    px, py, ox, oy, wx, wy, d_mo, contact_safe, ring, gains, board
                )
            return pd_goto(mover, ctrl.subtarget, params, gains)

    # push phase: track a contact point slightly inside the object face,
    # with feed-forward speed along the push direction
    track = contact - 0.002
    tx = ox - ux * track
    ty = oy - uy * track
    ax = gains.kp * (tx - px) - gains.kd * (mover.velocity[0] - gains.push_speed * ux)
    ay = gains.kp * (ty - py) - gains.kd * (mover.velocity[1] - gains.push_speed * uy)
    return _clamped(ax, ay, mover, params)


def _approach_subtarget(px, py, ox, oy, wx, wy, d_mo, contact, ring, gains, board):
    """Next latched waypoint on the way to the behind-object point."""
    # in contact: move radially outward first
    if d_mo < contact + 0.012:
        if d_mo > 1e-9:
            tgt = (ox + (px - ox) / d_mo * ring, oy + (py - oy) / d_mo * ring)
        else:
            tgt = (ox + ring, oy)
        return _clamp_to_board(tgt, board)
    # direct segment to the waypoint: blocked if it passes the clearance ring
    seg_x = wx - px
    seg_y = wy - py
    seg_len2 = seg_x * seg_x + seg_y * seg_y
    blocked = False
    if seg_len2 > 1e-12:
        t = max(0.0, min(1.0, ((ox - px) * seg_x + (oy - py) * seg_y) / seg_len2))
        cx = px + t * seg_x
        cy = py + t * seg_y
        if math.hypot(ox - cx, oy - cy) < contact + 0.02 and 0.0 < t < 1.0:
            blocked = True
    if not blocked:
        return (wx, wy)
    # hop around the ring from the mover's bearing toward the waypoint bearing
    theta_m = math.atan2(py - oy, px - ox)
    theta_w = math.atan2(wy - oy, wx - ox)
    delta = normalize_angle(theta_w - theta_m)
    step = max(-gains.subtarget_hop, min(gains.subtarget_hop, delta))
    ang = theta_m + step
    tgt = (ox + ring * math.cos(ang), oy + ring * math.sin(ang))
    return _clamp_to_board(tgt, board)


def _clamp_to_board(tgt, board):
    if board is None:
        return tgt
    x0, y0, x1, y1 = board
    return (min(max(tgt[0], x0), x1), min(max(tgt[1], y0), y1))


# ---------------------------------------------------------------------------
# Episode-level policies used by the benchmark runner
# ---------------------------------------------------------------------------


@dataclass
class PushPolicy:
    """Stateful per-episode policy driving one mover against one object."""

    scene: SceneConfig
    goal: tuple
    success_threshold: float
    gains: BaselineGains = DEFAULT_GAINS
    ctrl: ControllerState = field(default_factory=ControllerState)

    def __post_init__(self):
        x0, y0, x1, y1 = self.scene.grid.bounds
        shape = self.scene.movers[0].shape
        if self.scene.obstacles:
            # off-tile excursions terminate obstacle episodes: stay on tiles
            e = _mover_half_extent(shape) + shape.margin
            self._board = (x0 + e, y0 + e, x1 - e, y1 - e)
        else:
            # no hard walls: brief off-tile detours are recorded, not fatal
            pad = 2.0 * shape.circumradius
            self._board = (x0 - pad, y0 - pad, x1 + pad, y1 + pad)

    def __call__(self, world) -> tuple[float, float]:
        mover = world.mover_state(self.scene.movers[0].id)
        obj = ObjectState(tuple(world.obj_pose[0]), tuple(world.obj_vel[0]))
        cmd = push_controller(
            mover,
            obj,
            (self.goal[0], self.goal[1]),
            self.scene.objects[0],
            self.scene.physics,
            self.ctrl,
            self.scene.movers[0].shape,
            self.gains,
            self.success_threshold,
            board=self._board,
        )
        if self.scene.obstacles:
            ax, ay = cmd
            px, py = mover.pose[0], mover.pose[1]
            for ob in self.scene.obstacles:
                dx = px - ob.pose[0]
                dy = py - ob.pose[1]
                d = math.hypot(dx, dy)
                reach = self.scene.movers[0].shape.circumradius + ob.shape.circumradius
                if 1e-9 < d < reach + 0.10:
                    s = (reach + 0.10 - d) / 0.10
                    ax += self.gains.boundary_gain * s * s * dx / d
                    ay += self.gains.boundary_gain * s * s * dy / d
            cmd = clamp_command((ax, ay), mover, self.scene.physics)
        return cmd


def _point_segment_distance(px, py, ax, ay, bx, by) -> float:
    sx = bx - ax
    sy = by - ay
    len2 = sx * sx + sy * sy
    t = 0.0
    if len2 > 1e-12:
        t = max(0.0, min(1.0, ((px - ax) * sx + (py - ay) * sy) / len2))
    return math.hypot(px - (ax + t * sx), py - (ay + t * sy))


@dataclass
class TrajPolicy:
    """Prioritized time-sliced planner: exactly one body moves at a time.

    The first unparked mover is active; everyone else position-holds. When a
    holder blocks the active's straight corridor (or its goal), that holder
    alone is evicted to a vetted bay while the active waits, then the active
    transits on a clear line. Reciprocal repulsion stays on underneath as a
    safety layer only."""

    scene: SceneConfig
    goals: dict[str, tuple[float, float]]
    gains: BaselineGains = DEFAULT_GAINS
    parked: set = field(default_factory=set)
    hold_points: dict = field(default_factory=dict)
    evictee: str | None = None
    evictee_bay: tuple[float, float] | None = None
    park_radius: float = 0.05

    def __post_init__(self):
        self.order = sorted(m.id for m in self.scene.movers)
        x0, y0, x1, y1 = self.scene.grid.bounds
        e = max(m.shape.circumradius for m in self.scene.movers) + 0.01
        self._board = (x0 + e, y0 + e, x1 - e, y1 - e)
        bx0, by0, bx1, by1 = self._board
        mx = 0.5 * (bx0 + bx1)
        my = 0.5 * (by0 + by1)
        self._bays = [
            (bx0, by0), (bx1, by0), (bx0, by1), (bx1, by1),
            (mx, by0), (mx, by1), (bx0, my), (bx1, my),
        ]
        self._d_safe = 2.0 * max(m.shape.circumradius for m in self.scene.movers)

    def _positions(self, world) -> dict[str, tuple[float, float]]:
        return {
            mid: (float(world.pose6[world._index[mid], 0]), float(world.pose6[world._index[mid], 1]))
            for mid in self.order
        }

    def __call__(self, world) -> dict[str, tuple[float, float]]:
        goals = self.goals
        pos = self._positions(world)
        for mid in self.order:
            self.hold_points.setdefault(mid, pos[mid])

        # parking bookkeeping (goal cycling re-opens a mover whose goal moved)
        for mid in self.order:
            d = math.hypot(pos[mid][0] - goals[mid][0], pos[mid][1] - goals[mid][1])
            if mid in self.parked and d > 2.5 * self.park_radius:
                self.parked.discard(mid)
                self.hold_points[mid] = pos[mid]
            elif mid not in self.parked and mid != self.evictee and d <= self.park_radius:
                self.parked.add(mid)
                self.hold_points[mid] = pos[mid]

        active = next((m for m in self.order if m not in self.parked and m != self.evictee), None)

        targets: dict[str, tuple[float, float]] = {mid: self.hold_points[mid] for mid in self.order}
        clearance = self.gains.yield_clearance

        if self.evictee is not None and active is not None:
            ex, ey = pos[self.evictee]
            ax, ay = pos[active]
            gx, gy = goals[active]
            clear_of_corridor = _point_segment_distance(ex, ey, ax, ay, gx, gy) >= clearance + 0.05
            at_bay = (
                self.evictee_bay is not None
                and math.hypot(ex - self.evictee_bay[0], ey - self.evictee_bay[1]) < 0.05
            )
            if clear_of_corridor and at_bay:
                self.hold_points[self.evictee] = pos[self.evictee]
                self.evictee = None
                self.evictee_bay = None
        elif self.evictee is not None:
            # everyone else parked; finish the eviction leg at its bay
            ex, ey = pos[self.evictee]
            if self.evictee_bay is None or math.hypot(ex - self.evictee_bay[0], ey - self.evictee_bay[1]) < 0.05:
                self.hold_points[self.evictee] = pos[self.evictee]
                self.evictee = None
                self.evictee_bay = None

        if active is not None and self.evictee is None:
            ax, ay = pos[active]
            gx, gy = goals[active]
            blockers = [
                mid
                for mid in self.order
                if mid != active
                and _point_segment_distance(pos[mid][0], pos[mid][1], ax, ay, gx, gy) < clearance
            ]
            if blockers:
                evictee = blockers[0]
                self.evictee = evictee
                self.parked.discard(evictee)
                others = [pos[m] for m in self.order if m != evictee]
                sep = self.gains.sidestep_separation

                def bay_ok(b) -> bool:
                    if _point_segment_distance(b[0], b[1], ax, ay, gx, gy) < clearance + 0.06:
                        return False
                    if math.hypot(b[0] - gx, b[1] - gy) < sep:
                        return False
                    return all(math.hypot(b[0] - ox, b[1] - oy) >= sep for ox, oy in others)

                ranked = sorted(
                    (math.hypot(b[0] - pos[evictee][0], b[1] - pos[evictee][1]), b)
                    for b in self._bays
                )
                chosen = next((b for _, b in ranked if bay_ok(b)), None)
                if chosen is None:
                    chosen = max(
                        self._bays,
                        key=lambda b: min(
                            _point_segment_distance(b[0], b[1], ax, ay, gx, gy),
                            min(math.hypot(b[0] - ox, b[1] - oy) for ox, oy in others)
                            if others
                            else math.inf,
                        ),
                    )
                self.evictee_bay = chosen

        if self.evictee is not None and self.evictee_bay is not None:
            targets[self.evictee] = self.evictee_bay
        elif active is not None:
            targets[active] = goals[active]
        for mid in self.parked:
            targets[mid] = goals[mid]

        states = {mid: world.mover_state(mid) for mid in self.order}
        shapes = {m.id: m.shape for m in self.scene.movers}
        return reciprocal_avoid(
            states,
            targets,
            shapes,
            self.scene.physics,
            self.gains,
            grid=self.scene.grid,
            obstacles=self.scene.obstacles,
        )
