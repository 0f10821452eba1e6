"""Offline episode rendering: one SVG frame per stride of record steps.

Frames show tiles (holes left blank), movers with dashed margin outlines,
objects, obstacles, and goals. Output is deterministic text.
"""

from __future__ import annotations

import math
from pathlib import Path

from .geometry import rect_corners
from .recording import EpisodeRecord
from .scene import parse_scene

SCALE = 600.0  # px per meter
PAD = 0.06  # meters around the grid

TILE_FILL = "#d9dde3"
TILE_EDGE = "#b3bac4"
MOVER_FILL = "#4878a8"
MARGIN_EDGE = "#4878a8"
OBJECT_FILL = "#e08a3c"
OBSTACLE_FILL = "#5a5f66"
GOAL_COLOR = "#3b9e4f"


def _poly(points, fill: str, extra: str = "") -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return f'<polygon points="{pts}" fill="{fill}" {extra}/>'


class _Frame:
    def __init__(self, bounds):
        x0, y0, x1, y1 = bounds
        self.x0 = x0 - PAD
        self.y1 = y1 + PAD
        self.w = (x1 - x0 + 2 * PAD) * SCALE
        self.h = (y1 - y0 + 2 * PAD) * SCALE
        self.parts: list[str] = []

    def pt(self, x: float, y: float) -> tuple[float, float]:
        return ((x - self.x0) * SCALE, (self.y1 - y) * SCALE)

    def rect(self, cx, cy, hx, hy, yaw, fill, extra=""):
        corners = [self.pt(x, y) for x, y in rect_corners(cx, cy, hx, hy, yaw)]
        self.parts.append(_poly(corners, fill, extra))

    def circle(self, cx, cy, r, fill, extra=""):
        x, y = self.pt(cx, cy)
        self.parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r * SCALE:.2f}" fill="{fill}" {extra}/>')

    def cross(self, cx, cy, size, color):
        x, y = self.pt(cx, cy)
        s = size * SCALE
        self.parts.append(
            f'<path d="M {x - s:.2f} {y:.2f} H {x + s:.2f} M {x:.2f} {y - s:.2f} V {y + s:.2f}" '
            f'stroke="{color}" stroke-width="2" fill="none"/>'
        )

    def text(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w:.0f}" height="{self.h:.0f}" '
            f'viewBox="0 0 {self.w:.2f} {self.h:.2f}">\n'
            f'<rect width="100%" height="100%" fill="#f6f7f8"/>\n{body}\n</svg>\n'
        )


def render_record(record: EpisodeRecord, out_dir, stride: int = 100) -> list[Path]:
    """Write one frame per ``stride`` steps; returns the frame paths."""
    if record.steps == 0:
        raise ValueError("empty record")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    scene = parse_scene(record.scene_text)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = scene.grid
    paths = []
    for frame_no, step in enumerate(range(0, record.steps, stride)):
        fr = _Frame(g.bounds)
        for ix in range(g.nx):
            for iy in range(g.ny):
                if (ix, iy) in g.missing:
                    continue
                cx, cy = g.tile_center(ix, iy)
                h = g.tile_size / 2.0
                fr.rect(cx, cy, h - 0.001, h - 0.001, 0.0, TILE_FILL, f'stroke="{TILE_EDGE}"')
        for ob in scene.obstacles:
            x, y, yaw = ob.pose
            if ob.shape.kind == "box":
                fr.rect(x, y, ob.shape.params[0], ob.shape.params[1], yaw, OBSTACLE_FILL)
            else:
                fr.circle(x, y, ob.shape.params[0], OBSTACLE_FILL)
        goal = record.goals[step]
        if record.task_family == "traj":
            for k in range(len(record.mover_ids)):
                fr.cross(float(goal[2 * k]), float(goal[2 * k + 1]), 0.03, GOAL_COLOR)
        else:
            fr.cross(float(goal[0]), float(goal[1]), 0.03, GOAL_COLOR)
            spec = scene.objects[0]
            gyaw = float(goal[2]) if goal.shape[0] > 2 else 0.0
            c, s = math.cos(gyaw), math.sin(gyaw)
            if spec.kind == "cylinder":
                fr.circle(float(goal[0]), float(goal[1]), spec.dimensions[0], "none", f'stroke="{GOAL_COLOR}" stroke-dasharray="4,3"')
            else:
                for cx, cy, hx, hy in spec.pieces:
                    wx = float(goal[0]) + c * cx - s * cy
                    wy = float(goal[1]) + s * cx + c * cy
                    fr.rect(wx, wy, hx, hy, gyaw, "none", f'stroke="{GOAL_COLOR}" stroke-dasharray="4,3"')
        for j, obj in enumerate(scene.objects):
            x, y, yaw = (float(v) for v in record.object_poses[step, j])
            c, s = math.cos(yaw), math.sin(yaw)
            if obj.kind == "cylinder":
                fr.circle(x, y, obj.dimensions[0], OBJECT_FILL)
            else:
                for cx, cy, hx, hy in obj.pieces:
                    fr.rect(x + c * cx - s * cy, y + s * cx + c * cy, hx, hy, yaw, OBJECT_FILL)
        for k, mv in enumerate(scene.movers):
            x, y, yaw = (float(v) for v in record.mover_poses[step, k])
            shape = mv.shape
            if shape.kind == "box":
                fr.rect(x, y, shape.params[0], shape.params[1], yaw, MOVER_FILL, 'fill-opacity="0.85"')
                hx, hy = shape.inflated
                fr.rect(x, y, hx, hy, yaw, "none", f'stroke="{MARGIN_EDGE}" stroke-dasharray="3,3"')
            else:
                fr.circle(x, y, shape.params[0], MOVER_FILL, 'fill-opacity="0.85"')
                fr.circle(x, y, shape.inflated[0], "none", f'stroke="{MARGIN_EDGE}" stroke-dasharray="3,3"')
        path = out / f"frame_{frame_no:05d}.svg"
        path.write_text(fr.text(), encoding="utf-8")
        paths.append(path)
    return paths
