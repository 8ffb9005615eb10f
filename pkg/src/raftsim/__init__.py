"""Closed-loop simulation of modular tail-actuated surface rafts.

The package covers the full loop: grid configurations and their aggregate
rigid-body properties (:mod:`.lattice`), the tail oscillation / thrust map
with rank-dependent wake losses (:mod:`.waveform`), drag tables and
parameter fits (:mod:`.hydro`), exact minimum-norm force allocation
(:mod:`.allocation`), the per-cycle speed/heading controller
(:mod:`.control`), tail-sweep collision geometry and the no-undock
certificate (:mod:`.collision`), the planar dynamics integrator
(:mod:`.sim`), scenario files (:mod:`.scenario`), and figure rendering
(:mod:`.report`).  ``raftsim`` on the command line fronts all of it.
"""

from .allocation import AllocationError, Wrench, allocate_forces, required_wrench, to_waveform_commands
from .collision import (
    COLLISION_TOL,
    DEFAULT_TAIL,
    FIELD_MARGIN,
    GAMMA_SAFE_LIMIT,
    Certificate,
    ClearanceField,
    CollisionError,
    CollisionSpace,
    GammaSearch,
    TailShape,
    Violation,
    certify_no_undock,
    collision_space,
    connected_components,
    front_back_offset,
    get_clearance_field,
    max_safe_gamma,
    outline_radius,
    pair_clearance,
    pair_collides,
    side_offset,
    tail_radius,
)
from .control import (
    MODES,
    SPEED_CMD_MAX,
    ControllerState,
    CycleDecision,
    Gains,
    cycle_update,
    velocity_command,
    wrap_angle,
    yaw_acceleration,
)
from .hydro import (
    BodyParams,
    DragFitError,
    DragTable,
    DragTableError,
    alpha_from_slopes,
    drag_lookup,
    fit_drag_from_decay,
    fit_shared_intercept_slopes,
    gamma_from_alpha,
    load_drag_table,
)
from .lattice import (
    MODULE_INERTIA,
    MODULE_MASS,
    PITCH,
    Lattice,
    LatticeError,
    aggregate_inertia,
    build_lattice,
    lattice_from_dict,
    lattice_to_dict,
    load_lattice,
    projection_widths,
    rear_ranks,
    save_lattice,
    structural_matrix,
)
from .scenario import (
    Scenario,
    ScenarioError,
    TargetSchedule,
    canonical_json,
    load_scenario,
    parse_scenario,
    scenario_sha256,
)
from .sim import (
    SERIES_COLUMNS,
    BodyState,
    RunResult,
    SimulationError,
    dynamics_step,
    progress_metrics,
    run_scenario,
    speed_step_metrics,
    yaw_step_metrics,
)
from .waveform import (
    AMP_DEAD,
    AMP_MAX,
    OMEGA,
    PERIOD,
    RANK_AMP_RATIO,
    RANK_LOSS,
    THRUST_SLOPE,
    TailCommand,
    ThrustModel,
    ThrustModelError,
    cycle_avg_thrust,
    invert_thrust,
    tail_angle,
)

__version__ = "0.1.0"

__all__ = [
    "AMP_DEAD",
    "AMP_MAX",
    "AllocationError",
    "BodyParams",
    "BodyState",
    "COLLISION_TOL",
    "Certificate",
    "ClearanceField",
    "CollisionError",
    "CollisionSpace",
    "ControllerState",
    "CycleDecision",
    "DEFAULT_TAIL",
    "DragFitError",
    "DragTable",
    "DragTableError",
    "FIELD_MARGIN",
    "GAMMA_SAFE_LIMIT",
    "Gains",
    "GammaSearch",
    "Lattice",
    "LatticeError",
    "MODES",
    "MODULE_INERTIA",
    "MODULE_MASS",
    "OMEGA",
    "PERIOD",
    "PITCH",
    "RANK_AMP_RATIO",
    "RANK_LOSS",
    "RunResult",
    "SERIES_COLUMNS",
    "SPEED_CMD_MAX",
    "Scenario",
    "ScenarioError",
    "SimulationError",
    "THRUST_SLOPE",
    "TailCommand",
    "TailShape",
    "TargetSchedule",
    "ThrustModel",
    "ThrustModelError",
    "Violation",
    "Wrench",
    "aggregate_inertia",
    "allocate_forces",
    "alpha_from_slopes",
    "build_lattice",
    "canonical_json",
    "certify_no_undock",
    "collision_space",
    "connected_components",
    "cycle_avg_thrust",
    "cycle_update",
    "drag_lookup",
    "dynamics_step",
    "fit_drag_from_decay",
    "fit_shared_intercept_slopes",
    "front_back_offset",
    "gamma_from_alpha",
    "get_clearance_field",
    "invert_thrust",
    "lattice_from_dict",
    "lattice_to_dict",
    "load_drag_table",
    "load_lattice",
    "load_scenario",
    "max_safe_gamma",
    "outline_radius",
    "pair_clearance",
    "pair_collides",
    "parse_scenario",
    "progress_metrics",
    "projection_widths",
    "rear_ranks",
    "required_wrench",
    "run_scenario",
    "save_lattice",
    "scenario_sha256",
    "side_offset",
    "speed_step_metrics",
    "structural_matrix",
    "tail_angle",
    "tail_radius",
    "to_waveform_commands",
    "velocity_command",
    "wrap_angle",
    "yaw_acceleration",
]
