"""Periodic orbits of parametrized maps: continuation, cascades, censuses.

The package finds and classifies periodic orbits of smooth one-parameter
families, continues branches of nonflip orbits through folds and period
doublings along their index orientation, detects period-doubling cascades,
counts symbolic-model orbits exactly, and checks boundary censuses and
horseshoe certificates against those counts.
"""

from .errors import (
    AmbiguousEvent,
    BadParameter,
    BadSeed,
    BranchSwitchFailure,
    CascadeTracerError,
    CensusMismatch,
    ConservationViolation,
    IncompleteEnumeration,
    InternalError,
    InvalidBoundary,
    NoConvergence,
    NoPrediction,
    NotAnOrbit,
    NotNonflip,
    NumericalOverflow,
    SingularSystem,
    TooLarge,
    TrajectoryEscape,
    UnknownMap,
)
from .maps import (
    IntegratorConfig,
    MapDefinition,
    OdeSystem,
    PerturbationSpec,
    builtin_map,
    builtin_names,
    bump_quadratic,
    eval_jacobian,
    eval_map,
    stroboscopic_map,
    validate_map,
)
from .orbits import (
    PeriodicOrbit,
    classify,
    find_orbit,
    hausdorff_distance,
    multistart_orbits,
    orbit_monodromy,
    orbit_record,
    seed_orbits_symbolic,
)
from .combinatorics import (
    SymbolNecklace,
    cubic_nonflip_count,
    gamma_1,
    gamma_n,
    least_period_points,
    numeric_census_crosscheck,
    tent_necklace_census,
)
from .continuation import (
    BifurcationEvent,
    CascadeRecord,
    ComponentTrace,
    ContinuationConfig,
    continue_component,
    detect_and_refine_event,
    detect_cascades,
    switch_branch_pd,
    trace_to_json_lines,
    verify_index_conservation,
)
from .census import (
    BoundaryCensus,
    HorseshoeCertificate,
    boundary_census,
    horseshoe_partition,
    off_on_off_census,
    predict_cascades,
    stem_period_check,
    verify_horseshoe,
)
from .sweep import SweepConfig, attracting_set_sweep

__version__ = "0.1.0"
