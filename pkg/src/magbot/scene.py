"""Declarative scene description: tile grid, movers, objects, obstacles, physics.

Scenes are plain data. Generation is pure and fast (no file I/O), the text
format is a canonical JSON document (stable key order, 9-significant-digit
floats), and validation reports machine-readable violation codes instead of
raising.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .collision import CollisionShape, check_pair, mover_pair_events, tile_coverage
from .errors import InvalidParams, ParseError, SchemaError, TooManyMovers, ValidationError
from .geometry import Pose2

DEFAULT_TILE_SIZE = 0.24
DEFAULT_MOVER_HALF = 0.0775  # 0.155 m square footprint
DEFAULT_MOVER_MASS = 0.8
DEFAULT_MOVER_YAW_INERTIA = 0.0032
DEFAULT_HOVER_HEIGHT = 0.002
DEFAULT_SAFETY_MARGIN = 0.005

OBJECT_KINDS = ("box", "cylinder", "t_shape", "l_shape", "x_shape")


@dataclass(frozen=True)
class TileGrid:
    nx: int
    ny: int
    tile_size: float = DEFAULT_TILE_SIZE
    missing: frozenset[tuple[int, int]] = frozenset()
    origin: tuple[float, float] = (0.0, 0.0)

    @property
    def tile_count(self) -> int:
        return self.nx * self.ny - len(self.missing)

    @property
    def tile_area(self) -> float:
        return self.tile_count * self.tile_size * self.tile_size

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (
            self.origin[0],
            self.origin[1],
            self.origin[0] + self.nx * self.tile_size,
            self.origin[1] + self.ny * self.tile_size,
        )

    def tile_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (
            self.origin[0] + (ix + 0.5) * self.tile_size,
            self.origin[1] + (iy + 0.5) * self.tile_size,
        )


@dataclass(frozen=True)
class ImpedanceGains:
    z: float
    roll: float
    pitch: float
    yaw: float


@dataclass(frozen=True)
class ContactParams:
    solver_iters: int = 8
    baumgarte: float = 0.2
    slop: float = 1e-4
    restitution: float = 0.0
    hold_stiffness: float = 400.0  # planar position-hold spring, N/m


@dataclass(frozen=True)
class PhysicsParams:
    dt: float = 0.001
    v_max: float = 2.0
    a_max: float = 10.0
    gravity: float = 9.81
    stiffness: ImpedanceGains = ImpedanceGains(2000.0, 8.0, 8.0, 8.0)
    damping: ImpedanceGains = ImpedanceGains(80.0, 0.32, 0.32, 0.32)
    contact: ContactParams = ContactParams()


@dataclass(frozen=True)
class MoverSpec:
    id: str
    shape: CollisionShape
    mass: float = DEFAULT_MOVER_MASS
    yaw_inertia: float = DEFAULT_MOVER_YAW_INERTIA
    hover_height: float = DEFAULT_HOVER_HEIGHT
    start_pose: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ObstacleSpec:
    id: str
    shape: CollisionShape
    pose: tuple[float, float, float]
    static: bool = True


@dataclass(eq=True)
class ObjectSpec:
    """Pushable object; t/l/x kinds decompose into disjoint axis-aligned
    rectangles in the body frame, centered on the area centroid."""

    id: str
    kind: str
    dimensions: tuple[float, ...]
    mass: float
    friction_ground: float
    friction_mover: float
    start_pose: tuple[float, float, float]

    @cached_property
    def pieces(self) -> tuple[tuple[float, float, float, float], ...]:
        """Body-frame rectangles as (cx, cy, half_x, half_y); empty for cylinders."""
        d = self.dimensions
        if self.kind == "box":
            return ((0.0, 0.0, d[0] / 2.0, d[1] / 2.0),)
        if self.kind == "cylinder":
            return ()
        stem_l, stem_w, bar_l, bar_w = d
        if self.kind == "t_shape":
            raw = [
                (0.0, stem_l / 2.0, stem_w / 2.0, stem_l / 2.0),
                (0.0, stem_l + bar_w / 2.0, bar_l / 2.0, bar_w / 2.0),
            ]
        elif self.kind == "l_shape":
            raw = [
                (stem_w / 2.0, stem_l / 2.0, stem_w / 2.0, stem_l / 2.0),
                (stem_w + bar_l / 2.0, bar_w / 2.0, bar_l / 2.0, bar_w / 2.0),
            ]
        elif self.kind == "x_shape":
            half_gap = bar_w / 2.0
            top = (stem_l / 2.0 + half_gap) / 2.0
            hy = (stem_l / 2.0 - half_gap) / 2.0
            raw = [
                (0.0, 0.0, bar_l / 2.0, bar_w / 2.0),
                (0.0, top, stem_w / 2.0, hy),
                (0.0, -top, stem_w / 2.0, hy),
            ]
        else:
            raise InvalidParams(f"unknown object kind {self.kind!r}")
        area = sum(4.0 * hx * hy for _, _, hx, hy in raw)
        gx = sum(4.0 * hx * hy * cx for cx, cy, hx, hy in raw) / area
        gy = sum(4.0 * hx * hy * cy for cx, cy, hx, hy in raw) / area
        return tuple((cx - gx, cy - gy, hx, hy) for cx, cy, hx, hy in raw)

    @cached_property
    def area(self) -> float:
        if self.kind == "cylinder":
            return math.pi * self.dimensions[0] ** 2
        return sum(4.0 * hx * hy for _, _, hx, hy in self.pieces)

    @cached_property
    def yaw_inertia(self) -> float:
        if self.kind == "cylinder":
            return 0.5 * self.mass * self.dimensions[0] ** 2
        total = 0.0
        for cx, cy, hx, hy in self.pieces:
            a = 4.0 * hx * hy
            total += a * ((hx * hx + hy * hy) / 3.0 + cx * cx + cy * cy)
        return self.mass * total / self.area

    @cached_property
    def spin_radius(self) -> float:
        """Area-mean distance from the centroid; lever arm of spin friction."""
        if self.kind == "cylinder":
            return 2.0 * self.dimensions[0] / 3.0
        xs, wx = np.polynomial.legendre.leggauss(16)
        acc = 0.0
        for cx, cy, hx, hy in self.pieces:
            px = cx + xs * hx
            py = cy + xs * hy
            gx, gy = np.meshgrid(px, py, indexing="ij")
            w = np.outer(wx, wx) * (hx * hy)  # jacobian, integrates to piece area
            acc += float((w * np.hypot(gx, gy)).sum())
        return acc / self.area

    @cached_property
    def circumradius(self) -> float:
        if self.kind == "cylinder":
            return self.dimensions[0]
        return max(math.hypot(abs(cx) + hx, abs(cy) + hy) for cx, cy, hx, hy in self.pieces)


@dataclass(eq=True)
class SceneConfig:
    grid: TileGrid
    movers: list[MoverSpec]
    objects: list[ObjectSpec] = field(default_factory=list)
    obstacles: list[ObstacleSpec] = field(default_factory=list)
    physics: PhysicsParams = PhysicsParams()
    seed: int = 0
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def mover_ids(self) -> list[str]:
        return [m.id for m in self.movers]

    def mover_index(self, mover_id: str) -> int:
        try:
            return self.mover_ids.index(mover_id)
        except ValueError:
            raise KeyError(mover_id) from None


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def default_mover_shape(kind: str = "box", margin: float = DEFAULT_SAFETY_MARGIN) -> CollisionShape:
    if kind == "box":
        return CollisionShape.box(DEFAULT_MOVER_HALF, DEFAULT_MOVER_HALF, margin)
    if kind == "circle":
        return CollisionShape.circle(DEFAULT_MOVER_HALF, margin)
    raise InvalidParams(f"unknown mover shape kind {kind!r}")


def generate_grid_scene(
    nx: int,
    ny: int,
    n_movers: int,
    shape_kind: str = "box",
    physics: PhysicsParams | None = None,
    tile_size: float = DEFAULT_TILE_SIZE,
    margin: float = DEFAULT_SAFETY_MARGIN,
    seed: int = 0,
) -> SceneConfig:
    """Hole-free grid with movers on distinct tile centers in row-major order.

    Pure construction, O(nx*ny + n_movers); no validation pass is run (the
    layout satisfies the scene invariants by construction).
    """
    if nx < 1 or ny < 1 or tile_size <= 0.0 or n_movers < 0:
        raise InvalidParams("grid dimensions and tile size must be positive")
    if n_movers > nx * ny:
        raise TooManyMovers(f"{n_movers} movers cannot sit on {nx * ny} tile centers")
    grid = TileGrid(nx=nx, ny=ny, tile_size=tile_size)
    shape = default_mover_shape(shape_kind, margin)
    movers = []
    for k in range(n_movers):
        iy, ix = divmod(k, nx)
        cx = (ix + 0.5) * tile_size
        cy = (iy + 0.5) * tile_size
        movers.append(MoverSpec(id=f"mover_{k:04d}", shape=shape, start_pose=(cx, cy, 0.0)))
    return SceneConfig(grid=grid, movers=movers, physics=physics or PhysicsParams(), seed=seed)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, subject: str, detail: str = "") -> None:
        self.violations.append(Violation(code, subject, detail))


def validate_scene(scene: SceneConfig) -> ValidationReport:
    """Check every scene invariant; violations are data, not errors."""
    rep = ValidationReport()
    g = scene.grid
    if g.nx < 1 or g.ny < 1:
        rep.add("BadDimension", "grid", f"nx={g.nx} ny={g.ny}")
    if not (g.tile_size > 0.0 and math.isfinite(g.tile_size)):
        rep.add("BadDimension", "grid", f"tile_size={g.tile_size}")
    for ix, iy in g.missing:
        if not (0 <= ix < g.nx and 0 <= iy < g.ny):
            rep.add("BadDimension", "grid", f"missing index ({ix},{iy}) out of range")

    seen: set[str] = set()
    for body_id in [m.id for m in scene.movers] + [o.id for o in scene.objects] + [
        o.id for o in scene.obstacles
    ]:
        if body_id in seen:
            rep.add("DuplicateId", body_id)
        seen.add(body_id)

    p = scene.physics
    if p.dt <= 0.0 or p.v_max <= 0.0 or p.a_max <= 0.0:
        rep.add("BadDimension", "physics", f"dt={p.dt} v_max={p.v_max} a_max={p.a_max}")
    for name, gains in (("K", p.stiffness), ("D", p.damping)):
        if min(gains.z, gains.roll, gains.pitch, gains.yaw) < 0.0:
            rep.add("BadDimension", "physics", f"negative {name} gain")

    for m in scene.movers:
        if m.mass <= 0.0 or m.yaw_inertia <= 0.0 or m.hover_height <= 0.0:
            rep.add("BadDimension", m.id, "mass, yaw inertia and hover height must be positive")

    for o in scene.objects:
        if o.kind not in OBJECT_KINDS:
            rep.add("BadDimension", o.id, f"unknown kind {o.kind!r}")
            continue
        expected = 1 if o.kind == "cylinder" else (2 if o.kind == "box" else 4)
        if len(o.dimensions) != expected or any(d <= 0.0 for d in o.dimensions):
            rep.add("BadDimension", o.id, f"kind {o.kind} takes {expected} positive dimensions")
            continue
        if o.kind == "x_shape" and o.dimensions[0] <= o.dimensions[3]:
            rep.add("BadDimension", o.id, "x_shape needs stem_length > bar_width")
        if o.mass <= 0.0:
            rep.add("BadDimension", o.id, "mass must be positive")
        for mu in (o.friction_ground, o.friction_mover):
            if not (0.0 <= mu <= 2.0):
                rep.add("BadDimension", o.id, f"friction {mu} outside [0, 2]")

    # mover-mover overlap with margins (vectorized prune + exact narrowphase)
    n = len(scene.movers)
    if n >= 2:
        x = np.array([m.start_pose[0] for m in scene.movers])
        y = np.array([m.start_pose[1] for m in scene.movers])
        yaw = np.array([m.start_pose[2] for m in scene.movers])
        shapes = [m.shape for m in scene.movers]
        for ida, idb, _ in mover_pair_events(scene.mover_ids, shapes, x, y, yaw, 0.0):
            rep.add("MoverOverlap", f"{ida}+{idb}")

    for m in scene.movers:
        pose = Pose2(*m.start_pose)
        if not tile_coverage(m.shape, pose, g).within:
            rep.add("MoverOffTiles", m.id)

    bx0, by0, bx1, by1 = g.bounds
    for ob in scene.obstacles:
        x0, y0, x1, y1 = ob.shape.inflated_aabb(Pose2(*ob.pose))
        if x0 < bx0 or y0 < by0 or x1 > bx1 or y1 > by1:
            rep.add("ObstacleOffGrid", ob.id)
    return rep


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------


def _fmt_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        if not math.isfinite(v):
            raise InvalidParams(f"non-finite value {v} cannot be serialized")
        return f"{v:.9g}"
    if isinstance(v, str):
        return json.dumps(v)
    raise InvalidParams(f"unsupported scalar {type(v)}")


def _emit(v, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{\n")
        items = list(v.items())
        for k, (key, val) in enumerate(items):
            out.append(f"{pad}  {json.dumps(key)}: ")
            _emit(val, indent + 1, out)
            out.append(",\n" if k < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(v, (list, tuple)):
        seq = list(v)
        if not seq:
            out.append("[]")
            return
        if all(not isinstance(e, (dict, list, tuple)) for e in seq):
            out.append("[" + ", ".join(_fmt_scalar(e) for e in seq) + "]")
            return
        out.append("[\n")
        for k, e in enumerate(seq):
            out.append(pad + "  ")
            _emit(e, indent + 1, out)
            out.append(",\n" if k < len(seq) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_fmt_scalar(v))


def _shape_doc(shape: CollisionShape) -> dict:
    return {"kind": shape.kind, "params": list(shape.params), "margin": shape.margin}


def scene_document(scene: SceneConfig) -> dict:
    """Scene as a plain dict in canonical key order."""
    g = scene.grid
    p = scene.physics
    return {
        "grid": {
            "nx": g.nx,
            "ny": g.ny,
            "tile_size": g.tile_size,
            "missing": [list(t) for t in sorted(g.missing)],
            "origin": list(g.origin),
        },
        "physics": {
            "dt": p.dt,
            "v_max": p.v_max,
            "a_max": p.a_max,
            "gravity": p.gravity,
            "K": {"z": p.stiffness.z, "roll": p.stiffness.roll, "pitch": p.stiffness.pitch, "yaw": p.stiffness.yaw},
            "D": {"z": p.damping.z, "roll": p.damping.roll, "pitch": p.damping.pitch, "yaw": p.damping.yaw},
            "contact": {
                "solver_iters": p.contact.solver_iters,
                "baumgarte": p.contact.baumgarte,
                "slop": p.contact.slop,
                "restitution": p.contact.restitution,
                "hold_stiffness": p.contact.hold_stiffness,
            },
        },
        "movers": [
            {
                "id": m.id,
                "shape": _shape_doc(m.shape),
                "mass": m.mass,
                "yaw_inertia": m.yaw_inertia,
                "hover_height": m.hover_height,
                "start_pose": list(m.start_pose),
            }
            for m in scene.movers
        ],
        "objects": [
            {
                "id": o.id,
                "kind": o.kind,
                "dimensions": list(o.dimensions),
                "mass": o.mass,
                "friction_ground": o.friction_ground,
                "friction_mover": o.friction_mover,
                "start_pose": list(o.start_pose),
            }
            for o in scene.objects
        ],
        "obstacles": [
            {"id": ob.id, "shape": _shape_doc(ob.shape), "pose": list(ob.pose), "static": ob.static}
            for ob in scene.obstacles
        ],
        "seed": scene.seed,
    }


def serialize_scene(scene: SceneConfig) -> str:
    """Canonical, deterministic text form (stable key order, %.9g floats)."""
    out: list[str] = []
    _emit(scene_document(scene), 0, out)
    out.append("\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _check_keys(d: dict, known: set[str], required: set[str], path: str, strict: bool) -> None:
    unknown = set(d) - known
    if unknown:
        msg = f"unknown key(s) {sorted(unknown)} in {path}"
        if strict:
            raise SchemaError(msg, field=path)
        warnings.warn(msg, stacklevel=3)
    missing = required - set(d)
    if missing:
        raise SchemaError(f"missing required key(s) {sorted(missing)} in {path}", field=path)


def _num(d: dict, key: str, path: str) -> float:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{path}.{key} must be a number, got {type(v).__name__}", field=f"{path}.{key}")
    return float(v)


def _intval(d: dict, key: str, path: str) -> int:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{path}.{key} must be an integer, got {type(v).__name__}", field=f"{path}.{key}")
    return v


def _numlist(d: dict, key: str, path: str, length: int | None = None) -> list[float]:
    v = d[key]
    if not isinstance(v, list) or any(isinstance(e, bool) or not isinstance(e, (int, float)) for e in v):
        raise ParseError(f"{path}.{key} must be a list of numbers", field=f"{path}.{key}")
    if length is not None and len(v) != length:
        raise ParseError(f"{path}.{key} must have {length} entries", field=f"{path}.{key}")
    return [float(e) for e in v]


def _parse_shape(d, path: str, strict: bool) -> CollisionShape:
    if not isinstance(d, dict):
        raise ParseError(f"{path} must be an object", field=path)
    _check_keys(d, {"kind", "params", "margin"}, {"kind", "params"}, path, strict)
    kind = d["kind"]
    if kind not in ("box", "circle"):
        raise ParseError(f"{path}.kind must be 'box' or 'circle'", field=f"{path}.kind")
    params = _numlist(d, "params", path)
    margin = _num(d, "margin", path) if "margin" in d else 0.0
    try:
        return CollisionShape(kind, tuple(params), margin)
    except InvalidParams as e:
        rep = ValidationReport()
        rep.add("BadDimension", path, str(e))
        raise ValidationError(rep) from None


def _parse_gains(d, path: str, strict: bool) -> ImpedanceGains:
    if not isinstance(d, dict):
        raise ParseError(f"{path} must be an object", field=path)
    _check_keys(d, {"z", "roll", "pitch", "yaw"}, {"z", "roll", "pitch", "yaw"}, path, strict)
    return ImpedanceGains(_num(d, "z", path), _num(d, "roll", path), _num(d, "pitch", path), _num(d, "yaw", path))


def parse_scene(text: str, strict: bool = True) -> SceneConfig:
    """Parse and validate a scene document; inverse of ``serialize_scene``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    _check_keys(
        doc,
        {"grid", "physics", "movers", "objects", "obstacles", "seed"},
        {"grid", "physics", "movers", "seed"},
        "$",
        strict,
    )

    gd = doc["grid"]
    if not isinstance(gd, dict):
        raise ParseError("grid must be an object", field="grid")
    _check_keys(gd, {"nx", "ny", "tile_size", "missing", "origin"}, {"nx", "ny", "tile_size"}, "grid", strict)
    missing: set[tuple[int, int]] = set()
    if "missing" in gd:
        if not isinstance(gd["missing"], list):
            raise ParseError("grid.missing must be a list", field="grid.missing")
        for k, entry in enumerate(gd["missing"]):
            if not (isinstance(entry, list) and len(entry) == 2 and all(isinstance(e, int) for e in entry)):
                raise ParseError("grid.missing entries must be [ix, iy]", field=f"grid.missing[{k}]")
            missing.add((entry[0], entry[1]))
    origin = tuple(_numlist(gd, "origin", "grid", 2)) if "origin" in gd else (0.0, 0.0)
    grid = TileGrid(
        nx=_intval(gd, "nx", "grid"),
        ny=_intval(gd, "ny", "grid"),
        tile_size=_num(gd, "tile_size", "grid"),
        missing=frozenset(missing),
        origin=origin,  # type: ignore[arg-type]
    )

    pd = doc["physics"]
    if not isinstance(pd, dict):
        raise ParseError("physics must be an object", field="physics")
    _check_keys(
        pd,
        {"dt", "v_max", "a_max", "gravity", "K", "D", "contact"},
        {"dt", "v_max", "a_max", "gravity", "K", "D"},
        "physics",
        strict,
    )
    contact = ContactParams()
    if "contact" in pd:
        cd = pd["contact"]
        if not isinstance(cd, dict):
            raise ParseError("physics.contact must be an object", field="physics.contact")
        known = {"solver_iters", "baumgarte", "slop", "restitution", "hold_stiffness"}
        _check_keys(cd, known, set(), "physics.contact", strict)
        contact = ContactParams(
            solver_iters=_intval(cd, "solver_iters", "physics.contact") if "solver_iters" in cd else 8,
            baumgarte=_num(cd, "baumgarte", "physics.contact") if "baumgarte" in cd else 0.2,
            slop=_num(cd, "slop", "physics.contact") if "slop" in cd else 1e-4,
            restitution=_num(cd, "restitution", "physics.contact") if "restitution" in cd else 0.0,
            hold_stiffness=_num(cd, "hold_stiffness", "physics.contact") if "hold_stiffness" in cd else 400.0,
        )
    physics = PhysicsParams(
        dt=_num(pd, "dt", "physics"),
        v_max=_num(pd, "v_max", "physics"),
        a_max=_num(pd, "a_max", "physics"),
        gravity=_num(pd, "gravity", "physics"),
        stiffness=_parse_gains(pd["K"], "physics.K", strict),
        damping=_parse_gains(pd["D"], "physics.D", strict),
        contact=contact,
    )

    movers = []
    if not isinstance(doc["movers"], list):
        raise ParseError("movers must be a list", field="movers")
    for k, md in enumerate(doc["movers"]):
        path = f"movers[{k}]"
        if not isinstance(md, dict):
            raise ParseError(f"{path} must be an object", field=path)
        _check_keys(
            md,
            {"id", "shape", "mass", "yaw_inertia", "hover_height", "start_pose"},
            {"id", "shape", "mass", "yaw_inertia", "hover_height", "start_pose"},
            path,
            strict,
        )
        if not isinstance(md["id"], str):
            raise ParseError(f"{path}.id must be a string", field=f"{path}.id")
        movers.append(
            MoverSpec(
                id=md["id"],
                shape=_parse_shape(md["shape"], f"{path}.shape", strict),
                mass=_num(md, "mass", path),
                yaw_inertia=_num(md, "yaw_inertia", path),
                hover_height=_num(md, "hover_height", path),
                start_pose=tuple(_numlist(md, "start_pose", path, 3)),  # type: ignore[arg-type]
            )
        )

    objects = []
    for k, od in enumerate(doc.get("objects", [])):
        path = f"objects[{k}]"
        if not isinstance(od, dict):
            raise ParseError(f"{path} must be an object", field=path)
        keys = {"id", "kind", "dimensions", "mass", "friction_ground", "friction_mover", "start_pose"}
        _check_keys(od, keys, keys, path, strict)
        if not isinstance(od["id"], str) or not isinstance(od["kind"], str):
            raise ParseError(f"{path}.id and {path}.kind must be strings", field=path)
        objects.append(
            ObjectSpec(
                id=od["id"],
                kind=od["kind"],
                dimensions=tuple(_numlist(od, "dimensions", path)),
                mass=_num(od, "mass", path),
                friction_ground=_num(od, "friction_ground", path),
                friction_mover=_num(od, "friction_mover", path),
                start_pose=tuple(_numlist(od, "start_pose", path, 3)),  # type: ignore[arg-type]
            )
        )

    obstacles = []
    for k, od in enumerate(doc.get("obstacles", [])):
        path = f"obstacles[{k}]"
        if not isinstance(od, dict):
            raise ParseError(f"{path} must be an object", field=path)
        _check_keys(od, {"id", "shape", "pose", "static"}, {"id", "shape", "pose"}, path, strict)
        if not isinstance(od["id"], str):
            raise ParseError(f"{path}.id must be a string", field=f"{path}.id")
        obstacles.append(
            ObstacleSpec(
                id=od["id"],
                shape=_parse_shape(od["shape"], f"{path}.shape", strict),
                pose=tuple(_numlist(od, "pose", path, 3)),  # type: ignore[arg-type]
                static=bool(od.get("static", True)),
            )
        )

    if isinstance(doc["seed"], bool) or not isinstance(doc["seed"], int) or doc["seed"] < 0:
        raise ParseError("seed must be a non-negative integer", field="seed")

    scene = SceneConfig(
        grid=grid, movers=movers, objects=objects, obstacles=obstacles, physics=physics, seed=doc["seed"]
    )
    report = validate_scene(scene)
    if not report.ok:
        raise ValidationError(report)
    return scene


def load_scene(path) -> SceneConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_scene(f.read())


def save_scene(scene: SceneConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_scene(scene))


# ---------------------------------------------------------------------------
# Built-in scenes for the benchmark tasks
# ---------------------------------------------------------------------------


def _push_scene(objects: list[ObjectSpec], obstacles: list[ObstacleSpec] | None = None) -> SceneConfig:
    grid = TileGrid(nx=4, ny=4)
    mover = MoverSpec(id="mover_0000", shape=default_mover_shape("box"), start_pose=(0.36, 0.36, 0.0))
    return SceneConfig(grid=grid, movers=[mover], objects=objects, obstacles=obstacles or [])


def builtin_scene(name: str) -> SceneConfig:
    """Named scenes usable anywhere a scene path is accepted."""
    if name == "push_box_default":
        return _push_scene(
            [
                ObjectSpec(
                    id="object_box",
                    kind="box",
                    dimensions=(0.1, 0.1),
                    mass=0.3,
                    friction_ground=0.3,
                    friction_mover=0.4,
                    start_pose=(0.6, 0.6, 0.0),
                )
            ]
        )
    if name == "push_t_default":
        return _push_scene(
            [
                ObjectSpec(
                    id="object_t",
                    kind="t_shape",
                    dimensions=(0.12, 0.04, 0.12, 0.04),
                    mass=0.3,
                    friction_ground=0.3,
                    friction_mover=0.4,
                    start_pose=(0.6, 0.6, 0.0),
                )
            ]
        )
    if name == "push_obstacles_default":
        scene = builtin_scene("push_box_default")
        scene.obstacles = [
            ObstacleSpec(id="obstacle_0", shape=CollisionShape.box(0.05, 0.05), pose=(0.30, 0.66, 0.0)),
            ObstacleSpec(id="obstacle_1", shape=CollisionShape.box(0.05, 0.05), pose=(0.66, 0.30, 0.0)),
        ]
        return scene
    if name == "grid4x3_3movers":
        grid = TileGrid(nx=4, ny=3)
        shape = default_mover_shape("box")
        movers = [
            MoverSpec(id="mover_0000", shape=shape, start_pose=(0.12, 0.12, 0.0)),
            MoverSpec(id="mover_0001", shape=shape, start_pose=(0.84, 0.60, 0.0)),
            MoverSpec(id="mover_0002", shape=shape, start_pose=(0.12, 0.60, 0.0)),
        ]
        return SceneConfig(grid=grid, movers=movers)
    raise InvalidParams(f"unknown builtin scene {name!r}")


BUILTIN_SCENES = ("push_box_default", "push_t_default", "push_obstacles_default", "grid4x3_3movers")


def resolve_scene(ref: str | None, task: str | None = None) -> SceneConfig:
    """Resolve a CLI scene reference: builtin name, file path, or task default."""
    defaults = {
        "push_box": "push_box_default",
        "push_t": "push_t_default",
        "push_obstacles": "push_obstacles_default",
        "traj": "grid4x3_3movers",
    }
    if ref is None:
        if task is None or task not in defaults:
            raise InvalidParams("no scene given and no default for this task")
        return builtin_scene(defaults[task])
    if ref in BUILTIN_SCENES:
        return builtin_scene(ref)
    return load_scene(ref)


def canonicalize(scene: SceneConfig) -> SceneConfig:
    """Round floats to the document precision (9 significant digits)."""
    return parse_scene(serialize_scene(scene))


__all__ = [
    "TileGrid",
    "ImpedanceGains",
    "ContactParams",
    "PhysicsParams",
    "MoverSpec",
    "ObjectSpec",
    "ObstacleSpec",
    "SceneConfig",
    "Violation",
    "ValidationReport",
    "generate_grid_scene",
    "validate_scene",
    "serialize_scene",
    "parse_scene",
    "scene_document",
    "load_scene",
    "save_scene",
    "builtin_scene",
    "resolve_scene",
    "canonicalize",
    "default_mover_shape",
    "BUILTIN_SCENES",
    "DEFAULT_TILE_SIZE",
    "DEFAULT_SAFETY_MARGIN",
]
