"""Planar geometry primitives: poses, rectangles, convex clipping, overlap areas."""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = math.remainder(a, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class Pose2:
    """Planar pose; yaw is stored normalized to (-pi, pi]."""

    x: float
    y: float
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "yaw", normalize_angle(self.yaw))

    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


def rot(yaw: float) -> tuple[float, float]:
    """(cos, sin) of a yaw angle."""
    return (math.cos(yaw), math.sin(yaw))


def to_world(pose: Pose2, px: float, py: float) -> tuple[float, float]:
    """Body-frame point to world frame."""
    c, s = rot(pose.yaw)
    return (pose.x + c * px - s * py, pose.y + s * px + c * py)


def to_body(pose: Pose2, wx: float, wy: float) -> tuple[float, float]:
    """World point into the pose's body frame."""
    c, s = rot(pose.yaw)
    dx = wx - pose.x
    dy = wy - pose.y
    return (c * dx + s * dy, -s * dx + c * dy)


def rect_corners(cx: float, cy: float, hx: float, hy: float, yaw: float) -> list[tuple[float, float]]:
    """CCW corners of a rotated rectangle with half-extents (hx, hy)."""
    c, s = rot(yaw)
    ex, ey = c * hx, s * hx
    fx, fy = -s * hy, c * hy
    return [
        (cx - ex - fx, cy - ey - fy),
        (cx + ex - fx, cy + ey - fy),
        (cx + ex + fx, cy + ey + fy),
        (cx - ex + fx, cy - ey + fy),
    ]


def rect_aabb(cx: float, cy: float, hx: float, hy: float, yaw: float) -> tuple[float, float, float, float]:
    """Axis-aligned bounds (x0, y0, x1, y1) of a rotated rectangle."""
    c, s = rot(yaw)
    rx = abs(c) * hx + abs(s) * hy
    ry = abs(s) * hx + abs(c) * hy
    return (cx - rx, cy - ry, cx + rx, cy + ry)


def point_in_rect(px: float, py: float, pose: Pose2, hx: float, hy: float) -> bool:
    """Closed containment of a world point in a rotated rectangle."""
    bx, by = to_body(pose, px, py)
    return abs(bx) <= hx and abs(by) <= hy


def closest_point_on_rect(px: float, py: float, pose: Pose2, hx: float, hy: float) -> tuple[float, float, bool]:
    """Closest point of a rotated rectangle to a world point.

    Returns (cx, cy, inside); when the point lies inside, (cx, cy) is the
    point itself.
    """
    bx, by = to_body(pose, px, py)
    qx = min(max(bx, -hx), hx)
    qy = min(max(by, -hy), hy)
    inside = qx == bx and qy == by
    wx, wy = to_world(pose, qx, qy)
    return (wx, wy, inside)


def polygon_area(poly: list[tuple[float, float]]) -> float:
    """Signed-free area via the shoelace formula."""
    n = len(poly)
    if n < 3:
        return 0.0
    acc = 0.0
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) * 0.5


def clip_polygon(subject: list[tuple[float, float]], clip: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip of a convex subject against a convex CCW clip polygon."""
    output = list(subject)
    if not output:
        return []
    cp1 = clip[-1]
    for cp2 in clip:
        if not output:
            return []
        input_list = output
        output = []
        ex = cp2[0] - cp1[0]
        ey = cp2[1] - cp1[1]
        s = input_list[-1]
        s_in = ex * (s[1] - cp1[1]) - ey * (s[0] - cp1[0]) >= 0.0
        for e in input_list:
            e_in = ex * (e[1] - cp1[1]) - ey * (e[0] - cp1[0]) >= 0.0
            if e_in != s_in:
                dx = e[0] - s[0]
                dy = e[1] - s[1]
                denom = ex * dy - ey * dx
                if denom != 0.0:
                    t = (ex * (cp1[1] - s[1]) - ey * (cp1[0] - s[0])) / denom
                    output.append((s[0] + t * dx, s[1] + t * dy))
            if e_in:
                output.append(e)
            s = e
            s_in = e_in
        cp1 = cp2
    return output


def convex_overlap_area(a: list[tuple[float, float]], b: list[tuple[float, float]]) -> float:
    """Area of the intersection of two convex CCW polygons."""
    return polygon_area(clip_polygon(a, b))


def circle_overlap_area(d: float, r0: float, r1: float) -> float:
    """Area of the lens formed by two circles whose centers are d apart."""
    if d >= r0 + r1:
        return 0.0
    if d <= abs(r0 - r1):
        r = min(r0, r1)
        return math.pi * r * r
    a0 = (d * d + r0 * r0 - r1 * r1) / (2.0 * d)
    a1 = d - a0
    seg0 = r0 * r0 * math.acos(min(max(a0 / r0, -1.0), 1.0)) - a0 * math.sqrt(max(r0 * r0 - a0 * a0, 0.0))
    seg1 = r1 * r1 * math.acos(min(max(a1 / r1, -1.0), 1.0)) - a1 * math.sqrt(max(r1 * r1 - a1 * a1, 0.0))
    return seg0 + seg1


def mean_radius_of_rect(hx: float, hy: float, n: int = 24) -> float:
    """Mean distance from the center over a rectangle's area (Gauss-Legendre grid).

    Used as the effective lever arm of spin friction on a flat contact patch.
    """
    import numpy as np

    xs, wx = np.polynomial.legendre.leggauss(n)
    px = xs * hx
    py = xs * hy
    gx, gy = np.meshgrid(px, py, indexing="ij")
    w = np.outer(wx, wx)
    r = np.hypot(gx, gy)
    # weights integrate to 4 on [-1,1]^2; mean over area cancels the extents
    return float((w * r).sum() / w.sum())
