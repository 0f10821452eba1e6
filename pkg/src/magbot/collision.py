"""Margin-aware collision queries, tile-coverage checks, broadphase, and contact manifolds.

Safety margins inflate footprints for *queries* (mover-mover, mover-obstacle,
boundary checks); contact manifolds for the dynamics use the raw geometry.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams
from .geometry import Pose2, closest_point_on_rect, rect_aabb

_YAW_AXIS_ALIGNED = 1e-6  # below this, box footprints are treated as axis-aligned (exact coverage)


@dataclass(frozen=True)
class CollisionShape:
    """Box or circle footprint plus a safety margin.

    ``params`` is ``(half_x, half_y)`` for boxes and ``(radius,)`` for circles.
    The effective footprint used by queries is the geometric shape inflated
    outward by ``margin`` (boxes by extent growth, circles by radius growth).
    """

    kind: str
    params: tuple[float, ...]
    margin: float = 0.0

    def __post_init__(self):
        if self.kind not in ("box", "circle"):
            raise InvalidParams(f"unknown shape kind {self.kind!r}")
        if self.kind == "box" and len(self.params) != 2:
            raise InvalidParams("box shape takes (half_x, half_y)")
        if self.kind == "circle" and len(self.params) != 1:
            raise InvalidParams("circle shape takes (radius,)")
        if any(p <= 0.0 for p in self.params):
            raise InvalidParams("shape extents must be positive")
        if self.margin < 0.0:
            raise InvalidParams("margin must be non-negative")

    @staticmethod
    def box(half_x: float, half_y: float, margin: float = 0.0) -> "CollisionShape":
        return CollisionShape("box", (half_x, half_y), margin)

    @staticmethod
    def circle(radius: float, margin: float = 0.0) -> "CollisionShape":
        return CollisionShape("circle", (radius,), margin)

    @property
    def inflated(self) -> tuple[float, ...]:
        """Margin-inflated extents: (hx, hy) or (radius,)."""
        if self.kind == "box":
            return (self.params[0] + self.margin, self.params[1] + self.margin)
        return (self.params[0] + self.margin,)

    @property
    def circumradius(self) -> float:
        """Radius of the smallest disk containing the inflated footprint."""
        if self.kind == "box":
            hx, hy = self.inflated
            return math.hypot(hx, hy)
        return self.inflated[0]

    def inflated_aabb(self, pose: Pose2) -> tuple[float, float, float, float]:
        if self.kind == "circle":
            r = self.inflated[0]
            return (pose.x - r, pose.y - r, pose.x + r, pose.y + r)
        hx, hy = self.inflated
        if abs(pose.yaw) < _YAW_AXIS_ALIGNED:
            return (pose.x - hx, pose.y - hy, pose.x + hx, pose.y + hy)
        return rect_aabb(pose.x, pose.y, hx, hy, pose.yaw)


@dataclass(frozen=True)
class PairCheck:
    """Outcome of a narrowphase query; ``normal`` points from A toward B."""

    colliding: bool
    depth: float = 0.0
    normal: tuple[float, float] = (0.0, 0.0)


_SEPARATED = PairCheck(False)


def _box_axes(yaw: float) -> tuple[tuple[float, float], tuple[float, float]]:
    c = math.cos(yaw)
    s = math.sin(yaw)
    return (c, s), (-s, c)


def _sat_boxes(
    pa: Pose2, ea: tuple[float, float], pb: Pose2, eb: tuple[float, float]
) -> tuple[float, tuple[float, float]] | None:
    """Separating-axis test for two rectangles with half-extents ea/eb.

    Returns (depth, normal A->B) when the rectangles intersect, else None.
    """
    ua0, ua1 = _box_axes(pa.yaw)
    ub0, ub1 = _box_axes(pb.yaw)
    dx = pb.x - pa.x
    dy = pb.y - pa.y
    best_overlap = math.inf
    best_axis = (1.0, 0.0)
    for ux, uy in (ua0, ua1, ub0, ub1):
        ra = ea[0] * abs(ux * ua0[0] + uy * ua0[1]) + ea[1] * abs(ux * ua1[0] + uy * ua1[1])
        rb = eb[0] * abs(ux * ub0[0] + uy * ub0[1]) + eb[1] * abs(ux * ub1[0] + uy * ub1[1])
        overlap = (ra + rb) - abs(dx * ux + dy * uy)
        if overlap < 0.0:
            return None
        if overlap < best_overlap:
            best_overlap = overlap
            best_axis = (ux, uy)
    ux, uy = best_axis
    if dx * ux + dy * uy < 0.0:
        ux, uy = -ux, -uy
    return best_overlap, (ux, uy)


def _sat_gap(pa: Pose2, ea: tuple[float, float], pb: Pose2, eb: tuple[float, float]) -> float:
    """Largest gap over the four face axes (a lower bound of the true distance)."""
    ua0, ua1 = _box_axes(pa.yaw)
    ub0, ub1 = _box_axes(pb.yaw)
    dx = pb.x - pa.x
    dy = pb.y - pa.y
    gap = -math.inf
    for ux, uy in (ua0, ua1, ub0, ub1):
        ra = ea[0] * abs(ux * ua0[0] + uy * ua0[1]) + ea[1] * abs(ux * ua1[0] + uy * ua1[1])
        rb = eb[0] * abs(ux * ub0[0] + uy * ub0[1]) + eb[1] * abs(ux * ub1[0] + uy * ub1[1])
        gap = max(gap, abs(dx * ux + dy * uy) - (ra + rb))
    return gap


def _check_box_circle(pose_box: Pose2, ext: tuple[float, float], pc: Pose2, r: float) -> PairCheck:
    """Box (half-extents ``ext``) vs circle of radius ``r``; normal points box -> circle."""
    cx, cy, inside = closest_point_on_rect(pc.x, pc.y, pose_box, ext[0], ext[1])
    if inside:
        # center inside: push out through the nearest face
        bx = (pc.x - pose_box.x) * math.cos(pose_box.yaw) + (pc.y - pose_box.y) * math.sin(pose_box.yaw)
        by = -(pc.x - pose_box.x) * math.sin(pose_box.yaw) + (pc.y - pose_box.y) * math.cos(pose_box.yaw)
        fx = ext[0] - abs(bx)
        fy = ext[1] - abs(by)
        ux, uy = _box_axes(pose_box.yaw)[0] if fx <= fy else _box_axes(pose_box.yaw)[1]
        sgn = 1.0 if (bx if fx <= fy else by) >= 0.0 else -1.0
        depth = r + min(fx, fy)
        return PairCheck(True, depth, (sgn * ux, sgn * uy))
    dx = pc.x - cx
    dy = pc.y - cy
    d2 = dx * dx + dy * dy
    if d2 > r * r:
        return _SEPARATED
    d = math.sqrt(d2)
    if d > 0.0:
        return PairCheck(True, r - d, (dx / d, dy / d))
    return PairCheck(True, r, (1.0, 0.0))


def check_pair(shape_a: CollisionShape, pose_a: Pose2, shape_b: CollisionShape, pose_b: Pose2) -> PairCheck:
    """Margin-aware narrowphase: colliding iff the inflated footprints intersect.

    ``depth`` is the minimum translation distance along ``normal`` (A toward B)
    that separates the inflated shapes. Touching footprints count as colliding
    with depth 0.
    """
    if shape_a.kind == "circle" and shape_b.kind == "circle":
        ra = shape_a.inflated[0]
        rb = shape_b.inflated[0]
        dx = pose_b.x - pose_a.x
        dy = pose_b.y - pose_a.y
        d2 = dx * dx + dy * dy
        rs = ra + rb
        if d2 > rs * rs:
            return _SEPARATED
        d = math.sqrt(d2)
        if d > 0.0:
            return PairCheck(True, rs - d, (dx / d, dy / d))
        return PairCheck(True, rs, (1.0, 0.0))
    if shape_a.kind == "box" and shape_b.kind == "box":
        hit = _sat_boxes(pose_a, shape_a.inflated, pose_b, shape_b.inflated)
        if hit is None:
            return _SEPARATED
        return PairCheck(True, hit[0], hit[1])
    if shape_a.kind == "box":
        return _check_box_circle(pose_a, shape_a.inflated, pose_b, shape_b.inflated[0])
    res = _check_box_circle(pose_b, shape_b.inflated, pose_a, shape_a.inflated[0])
    if not res.colliding:
        return _SEPARATED
    return PairCheck(True, res.depth, (-res.normal[0], -res.normal[1]))


def pair_separation_estimate(
    shape_a: CollisionShape, pose_a: Pose2, shape_b: CollisionShape, pose_b: Pose2
) -> float:
    """Signed separation of the inflated footprints.

    Negative penetration depth when colliding. When separated this is exact
    for circle-circle and box-circle, and a lower bound (largest axis gap)
    for box-box.
    """
    res = check_pair(shape_a, pose_a, shape_b, pose_b)
    if res.colliding:
        return -res.depth
    if shape_a.kind == "circle" and shape_b.kind == "circle":
        d = math.hypot(pose_b.x - pose_a.x, pose_b.y - pose_a.y)
        return d - (shape_a.inflated[0] + shape_b.inflated[0])
    if shape_a.kind == "box" and shape_b.kind == "box":
        return _sat_gap(pose_a, shape_a.inflated, pose_b, shape_b.inflated)
    if shape_a.kind == "box":
        box, bpose, circ, cpose = shape_a, pose_a, shape_b, pose_b
    else:
        box, bpose, circ, cpose = shape_b, pose_b, shape_a, pose_a
    hx, hy = box.inflated
    cx, cy, inside = closest_point_on_rect(cpose.x, cpose.y, bpose, hx, hy)
    if inside:
        return 0.0
    return math.hypot(cpose.x - cx, cpose.y - cy) - circ.inflated[0]


# ---------------------------------------------------------------------------
# Tile coverage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageResult:
    within: bool
    violation_area_hint: float = 0.0


_COVERED = CoverageResult(True)


def _rect_cell_overlap(x0, y0, x1, y1, cx0, cy0, cx1, cy1) -> float:
    w = min(x1, cx1) - max(x0, cx0)
    h = min(y1, cy1) - max(y0, cy0)
    if w <= 0.0 or h <= 0.0:
        return 0.0
    return w * h


def tile_coverage(shape: CollisionShape, pose: Pose2, grid) -> CoverageResult:
    """Check that the margin-inflated footprint lies entirely over present tiles.

    Exact for circles and axis-aligned boxes; for rotated boxes the check is
    run on the footprint's axis-aligned bounding box (conservative: never a
    false ``within``). The violation area is a hint computed from bounding
    rectangles, not an exact clipped area.
    """
    ts = grid.tile_size
    gx0 = grid.origin[0]
    gy0 = grid.origin[1]
    gx1 = gx0 + grid.nx * ts
    gy1 = gy0 + grid.ny * ts

    if shape.kind == "circle":
        r = shape.inflated[0]
        x0, y0, x1, y1 = pose.x - r, pose.y - r, pose.x + r, pose.y + r
    else:
        x0, y0, x1, y1 = shape.inflated_aabb(pose)

    hint = 0.0
    violated = False
    area = (x1 - x0) * (y1 - y0)
    if x0 < gx0 or y0 < gy0 or x1 > gx1 or y1 > gy1:
        violated = True
        hint += area - _rect_cell_overlap(x0, y0, x1, y1, gx0, gy0, gx1, gy1)
    if grid.missing:
        ix_lo = math.floor((x0 - gx0) / ts) - 1
        ix_hi = math.floor((x1 - gx0) / ts) + 1
        iy_lo = math.floor((y0 - gy0) / ts) - 1
        iy_hi = math.floor((y1 - gy0) / ts) + 1
        circle_exact = shape.kind == "circle"
        r = shape.inflated[0] if circle_exact else 0.0
        for ix in range(max(ix_lo, 0), min(ix_hi, grid.nx - 1) + 1):
            for iy in range(max(iy_lo, 0), min(iy_hi, grid.ny - 1) + 1):
                if (ix, iy) not in grid.missing:
                    continue
                cx0 = gx0 + ix * ts
                cy0 = gy0 + iy * ts
                cx1 = cx0 + ts
                cy1 = cy0 + ts
                if circle_exact:
                    qx = min(max(pose.x, cx0), cx1)
                    qy = min(max(pose.y, cy0), cy1)
                    dx = pose.x - qx
                    dy = pose.y - qy
                    if dx * dx + dy * dy < r * r:
                        violated = True
                        hint += _rect_cell_overlap(x0, y0, x1, y1, cx0, cy0, cx1, cy1)
                else:
                    over = _rect_cell_overlap(x0, y0, x1, y1, cx0, cy0, cx1, cy1)
                    if over > 0.0:
                        violated = True
                        hint += over
    if violated:
        return CoverageResult(False, hint)
    return _COVERED


# ---------------------------------------------------------------------------
# Broadphase
# ---------------------------------------------------------------------------


def broadphase_pairs(
    items: list[tuple[str, CollisionShape, Pose2]], mode: str = "naive"
) -> list[tuple[str, str]]:
    """Candidate unordered id pairs, lexicographically ordered.

    ``naive`` returns every pair; ``grid`` hashes inflated AABBs into a uniform
    grid with cell size at least the largest inflated diameter, so candidates
    are always a superset of the truly colliding pairs.
    """
    if mode not in ("naive", "grid"):
        raise InvalidParams(f"unknown broadphase mode {mode!r}")
    n = len(items)
    if n < 2:
        return []
    ids = [it[0] for it in items]
    if len(set(ids)) != n:
        raise InvalidParams("broadphase requires unique ids")
    if mode == "naive":
        ids_sorted = sorted(ids)
        return [(ids_sorted[i], ids_sorted[j]) for i in range(n) for j in range(i + 1, n)]

    cell = max(2.0 * it[1].circumradius for it in items)
    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    for k, (_, shape, pose) in enumerate(items):
        x0, y0, x1, y1 = shape.inflated_aabb(pose)
        for cx in range(math.floor(x0 / cell), math.floor(x1 / cell) + 1):
            for cy in range(math.floor(y0 / cell), math.floor(y1 / cell) + 1):
                buckets[(cx, cy)].append(k)
    seen: set[tuple[str, str]] = set()
    for members in buckets.values():
        m = len(members)
        for a in range(m):
            for b in range(a + 1, m):
                ia, ib = members[a], members[b]
                pa, pb = ids[ia], ids[ib]
                seen.add((pa, pb) if pa < pb else (pb, pa))
    return sorted(seen)


# ---------------------------------------------------------------------------
# Collision events over a world
# ---------------------------------------------------------------------------


@dataclass
class CollisionEvents:
    """Categorized per-step collision events; each unordered pair at most once."""

    mover_mover: list[tuple[str, str, float]] = field(default_factory=list)
    mover_obstacle: list[tuple[str, str, float]] = field(default_factory=list)
    object_obstacle: list[tuple[str, str, float]] = field(default_factory=list)
    mover_off_tiles: list[tuple[str, float]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return (
            len(self.mover_mover)
            + len(self.mover_obstacle)
            + len(self.object_obstacle)
            + len(self.mover_off_tiles)
        )

    @property
    def collision_count(self) -> int:
        """Collisions in the benchmark sense (off-tile excursions not included)."""
        return len(self.mover_mover) + len(self.mover_obstacle) + len(self.object_obstacle)


_PAIR_INDEX_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _PAIR_INDEX_CACHE.get(n)
    if cached is None:
        i, j = np.triu_indices(n, 1)
        cached = (i.astype(np.int32), j.astype(np.int32))
        _PAIR_INDEX_CACHE[n] = cached
    return cached


class MoverPairContext:
    """Per-scene scratch for the vectorized mover-mover check.

    Owned by one stepping context; not shareable across threads.
    """

    def __init__(self, shapes: list[CollisionShape]):
        n = len(shapes)
        self.n = n
        self.all_circles = all(s.kind == "circle" for s in shapes)
        self.homogeneous_axis_boxes = all(s.kind == "box" for s in shapes)
        reach = np.array([s.circumradius for s in shapes])
        self.i, self.j = _pair_indices(n) if n >= 2 else (np.empty(0, np.int32), np.empty(0, np.int32))
        p = self.i.shape[0]
        if self.all_circles:
            ri = np.array([s.inflated[0] for s in shapes])
            rs = ri[self.i] + ri[self.j]
            self.thresh2 = rs * rs
        else:
            rs = reach[self.i] + reach[self.j] + 1e-9
            self.thresh2 = rs * rs
        self._a = np.empty(p)
        self._b = np.empty(p)
        self._c = np.empty(p)
        self._mask = np.empty(p, dtype=bool)

    def pair_hits(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Pair-array indices whose squared distance is within the threshold."""
        a, b, c = self._a, self._b, self._c
        np.take(x, self.i, out=a)
        np.take(x, self.j, out=b)
        np.subtract(a, b, out=a)
        np.multiply(a, a, out=a)
        np.take(y, self.i, out=b)
        np.take(y, self.j, out=c)
        np.subtract(b, c, out=b)
        np.multiply(b, b, out=b)
        np.add(a, b, out=a)
        np.less_equal(a, self.thresh2, out=self._mask)
        return np.nonzero(self._mask)[0]


def mover_pair_events(
    ids: list[str],
    shapes: list[CollisionShape],
    x: np.ndarray,
    y: np.ndarray,
    yaw: np.ndarray,
    time: float,
    mode: str = "naive",
    ctx: MoverPairContext | None = None,
) -> list[tuple[str, str, float]]:
    """Mover-mover collision events using margins; deterministic ordering.

    The vectorized circle path evaluates the same arithmetic as ``check_pair``
    (squared distance against squared inflated-radius sum), so verdicts agree
    bitwise with the scalar narrowphase. Box and mixed pairs are pruned by
    circumradius and confirmed with ``check_pair``.
    """
    n = len(ids)
    if n < 2:
        return []
    events: list[tuple[str, str, float]] = []
    if mode == "grid":
        items = [(ids[k], shapes[k], Pose2(float(x[k]), float(y[k]), float(yaw[k]))) for k in range(n)]
        index = {mid: k for k, mid in enumerate(ids)}
        for ida, idb in broadphase_pairs(items, "grid"):
            ka, kb = index[ida], index[idb]
            res = check_pair(shapes[ka], items[ka][2], shapes[kb], items[kb][2])
            if res.colliding:
                events.append((ida, idb, time) if ida < idb else ((idb, ida, time)))
        events.sort()
        return events

    if ctx is None:
        ctx = MoverPairContext(shapes)
    hits = ctx.pair_hits(x, y)
    if hits.size == 0:
        return []
    if ctx.all_circles:
        for k in hits:
            ia = int(ctx.i[k])
            ib = int(ctx.j[k])
            ida, idb = ids[ia], ids[ib]
            events.append((ida, idb, time) if ida < idb else (idb, ida, time))
    else:
        for k in hits:
            ia = int(ctx.i[k])
            ib = int(ctx.j[k])
            pa = Pose2(float(x[ia]), float(y[ia]), float(yaw[ia]))
            pb = Pose2(float(x[ib]), float(y[ib]), float(yaw[ib]))
            if check_pair(shapes[ia], pa, shapes[ib], pb).colliding:
                ida, idb = ids[ia], ids[ib]
                events.append((ida, idb, time) if ida < idb else (idb, ida, time))
    events.sort()
    return events


def off_tile_movers(
    ids: list[str],
    shapes: list[CollisionShape],
    x: np.ndarray,
    y: np.ndarray,
    yaw: np.ndarray,
    grid,
    time: float,
) -> list[tuple[str, float]]:
    """Movers whose inflated footprint leaves the present-tile union.

    Fast vectorized path for hole-free grids with axis-aligned movers; the
    general path defers to ``tile_coverage`` per mover.
    """
    n = len(ids)
    ts = grid.tile_size
    gx0 = grid.origin[0]
    gy0 = grid.origin[1]
    gx1 = gx0 + grid.nx * ts
    gy1 = gy0 + grid.ny * ts
    if not grid.missing and n > 8 and bool(np.all(np.abs(yaw) < _YAW_AXIS_ALIGNED)):
        rx = np.array([s.inflated[0] for s in shapes])
        ry = np.array([s.inflated[1] if s.kind == "box" else s.inflated[0] for s in shapes])
        bad = (x - rx < gx0) | (y - ry < gy0) | (x + rx > gx1) | (y + ry > gy1)
        return [(ids[k], time) for k in np.nonzero(bad)[0]]
    out = []
    for k in range(n):
        pose = Pose2(float(x[k]), float(y[k]), float(yaw[k]))
        if not tile_coverage(shapes[k], pose, grid).within:
            out.append((ids[k], time))
    return out


# ---------------------------------------------------------------------------
# Contact manifolds (raw geometry, used by the contact solver)
# ---------------------------------------------------------------------------


@dataclass
class Manifold:
    """Contact between two convex footprints: unit normal (A toward B) and
    up to two points, each with its own penetration depth."""

    normal: tuple[float, float]
    points: list[tuple[float, float, float]]  # (px, py, depth)


def manifold_circle_circle(pa: Pose2, ra: float, pb: Pose2, rb: float) -> Manifold | None:
    dx = pb.x - pa.x
    dy = pb.y - pa.y
    d2 = dx * dx + dy * dy
    rs = ra + rb
    if d2 > rs * rs:
        return None
    d = math.sqrt(d2)
    if d > 0.0:
        nx, ny = dx / d, dy / d
    else:
        nx, ny = 1.0, 0.0
    depth = rs - d
    px = pa.x + nx * (ra - 0.5 * depth)
    py = pa.y + ny * (ra - 0.5 * depth)
    return Manifold((nx, ny), [(px, py, depth)])


def manifold_rect_circle(pose: Pose2, hx: float, hy: float, pc: Pose2, r: float) -> Manifold | None:
    res = _check_box_circle(pose, (hx, hy), pc, r)
    if not res.colliding:
        return None
    nx, ny = res.normal
    px = pc.x - nx * (r - 0.5 * res.depth)
    py = pc.y - ny * (r - 0.5 * res.depth)
    return Manifold((nx, ny), [(px, py, res.depth)])


def _clip_segment(points: list[tuple[float, float]], nx: float, ny: float, offset: float) -> list[tuple[float, float]]:
    """Keep the part of a segment with n.p <= offset, inserting the crossing point."""
    out: list[tuple[float, float]] = []
    d0 = nx * points[0][0] + ny * points[0][1] - offset
    d1 = nx * points[1][0] + ny * points[1][1] - offset
    if d0 <= 0.0:
        out.append(points[0])
    if d1 <= 0.0:
        out.append(points[1])
    if d0 * d1 < 0.0:
        t = d0 / (d0 - d1)
        out.append(
            (
                points[0][0] + t * (points[1][0] - points[0][0]),
                points[0][1] + t * (points[1][1] - points[0][1]),
            )
        )
    return out


def manifold_rect_rect(pa: Pose2, ea: tuple[float, float], pb: Pose2, eb: tuple[float, float]) -> Manifold | None:
    """Reference-face clipping manifold between two rectangles."""
    ua = _box_axes(pa.yaw)
    ub = _box_axes(pb.yaw)
    dx = pb.x - pa.x
    dy = pb.y - pa.y
    best = math.inf
    best_axis = 0  # 0,1 from A; 2,3 from B
    axes = (ua[0], ua[1], ub[0], ub[1])
    for k, (ux, uy) in enumerate(axes):
        ra = ea[0] * abs(ux * ua[0][0] + uy * ua[0][1]) + ea[1] * abs(ux * ua[1][0] + uy * ua[1][1])
        rb = eb[0] * abs(ux * ub[0][0] + uy * ub[0][1]) + eb[1] * abs(ux * ub[1][0] + uy * ub[1][1])
        overlap = (ra + rb) - abs(dx * ux + dy * uy)
        if overlap < 0.0:
            return None
        if overlap < best:
            best = overlap
            best_axis = k
    ref_is_a = best_axis < 2
    if ref_is_a:
        ref_pose, ref_ext, ref_axes = pa, ea, ua
        inc_pose, inc_ext, inc_axes = pb, eb, ub
        axis_k = best_axis
        ddx, ddy = dx, dy
    else:
        ref_pose, ref_ext, ref_axes = pb, eb, ub
        inc_pose, inc_ext, inc_axes = pa, ea, ua
        axis_k = best_axis - 2
        ddx, ddy = -dx, -dy
    # outward reference normal, pointing from the reference box toward the other
    nx, ny = ref_axes[axis_k]
    if ddx * nx + ddy * ny < 0.0:
        nx, ny = -nx, -ny
    h_n = ref_ext[axis_k]
    tangent_k = 1 - axis_k
    tx, ty = ref_axes[tangent_k]
    h_t = ref_ext[tangent_k]

    # incident face: the face of the other box most anti-parallel to the normal
    best_dot = math.inf
    inc_k = 0
    inc_sign = 1.0
    for k in range(2):
        d = inc_axes[k][0] * nx + inc_axes[k][1] * ny
        if d < best_dot:
            best_dot = d
            inc_k = k
            inc_sign = 1.0
        if -d < best_dot:
            best_dot = -d
            inc_k = k
            inc_sign = -1.0
    fx = inc_sign * inc_axes[inc_k][0]
    fy = inc_sign * inc_axes[inc_k][1]
    h_f = inc_ext[inc_k]
    gk = 1 - inc_k
    gx, gy = inc_axes[gk]
    h_g = inc_ext[gk]
    face_cx = inc_pose.x + fx * h_f
    face_cy = inc_pose.y + fy * h_f
    seg = [
        (face_cx - gx * h_g, face_cy - gy * h_g),
        (face_cx + gx * h_g, face_cy + gy * h_g),
    ]
    ref_t = tx * ref_pose.x + ty * ref_pose.y
    seg = _clip_segment(seg, tx, ty, ref_t + h_t)
    if len(seg) < 2:
        if not seg:
            return None
        seg = [seg[0], seg[0]]
    seg = _clip_segment(seg, -tx, -ty, -(ref_t - h_t))
    if not seg:
        return None
    face_off = nx * ref_pose.x + ny * ref_pose.y + h_n
    points: list[tuple[float, float, float]] = []
    for px, py in seg[:2]:
        sep = nx * px + ny * py - face_off
        if sep <= 0.0:
            points.append((px, py, -sep))
    if not points:
        return None
    if not ref_is_a:
        nx, ny = -nx, -ny
    return Manifold((nx, ny), points)
