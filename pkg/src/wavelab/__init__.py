"""Entropy solutions of 1-D convex conservation laws under periodic perturbations."""
from .fluxes import (
    ConvexFlux,
    DegenerateJumpError,
    DomainError,
    GPotential,
    Interval,
    NormalizedFlux,
    burgers,
    exp_flux,
    g_of,
    g_potential,
    normalize,
    rh_speed,
    z_of,
)
from .profiles import (
    DivideLine,
    PeriodicProfile,
    ProfileError,
    RiemannPerturbedIC,
    TwoConstantProfile,
    argmin_primitive,
    divides,
    primitive,
    shift_to_zero_mean,
)
from .hopf import (
    HopfPotential,
    MergeScan,
    OracleError,
    ShockInterval,
    merge_time,
    oracle_evaluator,
    periodic_evaluator,
    periodic_extrema,
    periodic_solution,
    shock_interval,
    shock_position,
    u_exact,
    u_viscous,
)
from .fronttrack import (
    FluxPolygon,
    Front,
    FrontTrackError,
    PiecewiseConstantState,
    ShockPath,
    approximate_flux,
    data_speed_bound,
    dump_snapshot,
    evolve,
    godunov_reference,
    initial_state,
    periodic_state,
    polygon_for,
    riemann_fan,
    sample,
    shock_path,
    track_path,
    window_mean,
    window_tv,
)
from .characteristics import (
    CharacteristicError,
    CharLine,
    SolutionHandle,
    TriangleReport,
    backward_extremal,
    char_deviation,
    forward_characteristic,
    glue_check,
    handle_from_ic,
    handle_periodic,
    interp_path,
    shock_offset,
    triangle_residual,
)
from .experiments import (
    DecayReport,
    ExperimentConfig,
    ExperimentError,
    RateFit,
    ReferenceWave,
    fit_rate,
    geometric_times,
    l1_per_period,
    oracle_diff_table,
    reference_rarefaction,
    reference_shock,
    run_periodic_decay,
    run_rarefaction,
    run_shock_stability,
)
from .config import ConfigError, load_config
from .reports import emit, read_report

__all__ = [name for name in dir() if not name.startswith("_")]
