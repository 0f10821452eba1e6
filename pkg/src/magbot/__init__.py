"""Physics-based simulator and benchmark harness for planar magnetic-levitation
mover swarms: tile-grid worlds, impedance-held movers driven by planar
acceleration commands, friction-based object pushing, margin-aware collision
detection, task environments, scripted baselines, and benchmark metric suites.
"""

from .collision import (
    CollisionEvents,
    CollisionShape,
    CoverageResult,
    PairCheck,
    broadphase_pairs,
    check_pair,
    pair_separation_estimate,
    tile_coverage,
)
from .dynamics import (
    ContactManifold,
    MoverState,
    ObjectState,
    StepInfo,
    WorldState,
    clamp_command,
    collision_report,
    impedance_wrench,
    solve_contacts,
    step_world,
    world_from_scene,
)
from .envs import (
    Env,
    GoalSample,
    TaskSpec,
    Transition,
    coverage,
    default_task,
    is_success,
    make_env,
    success_from_measures,
)
from .errors import (
    ActionShapeError,
    CountMismatch,
    InsufficientSuccesses,
    InvalidParams,
    MagbotError,
    MissingTimings,
    ParseError,
    SamplingExhausted,
    SceneTaskMismatch,
    SchemaError,
    SteppedTerminatedEpisode,
    TooManyMovers,
    UnknownMoverId,
    ValidationError,
    WindowTooLong,
)
from .metrics import (
    MetricsConfig,
    PushMetrics,
    TimingRow,
    TimingTable,
    TrajMetrics,
    compute_push_metrics,
    compute_traj_metrics,
    count_corrections,
    loglog_slope,
    makespan,
    process_time,
    push_throughput,
    scalability_sweep,
    smoothness,
    success_rate,
    traj_throughput,
)
from .recording import EpisodeRecord, RecordBuilder, batch_hash, load_record, save_record, trajectory_hash
from .runner import run_batch, run_episode
from .scene import (
    BUILTIN_SCENES,
    ContactParams,
    ImpedanceGains,
    MoverSpec,
    ObjectSpec,
    ObstacleSpec,
    PhysicsParams,
    SceneConfig,
    TileGrid,
    ValidationReport,
    builtin_scene,
    canonicalize,
    generate_grid_scene,
    load_scene,
    parse_scene,
    resolve_scene,
    save_scene,
    serialize_scene,
    validate_scene,
)

__version__ = "0.1.0"
