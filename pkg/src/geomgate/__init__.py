"""Geometric quantum gate schedules: construction, propagation, analysis."""

from .bench import (
    NoiseSpec,
    ResultRow,
    ResultTable,
    SweepSpec,
    apply_noise,
    decoherence_channels,
    run_experiment,
    sweep,
    truncated_schedule,
)
from .bloch import (
    BlochPath,
    drive_from_path,
    dynamical_phase,
    geometric_phase,
    path_from_drive,
    solid_angle_phase,
    total_phase,
)
from .core import (
    Constant,
    FourierAugmented,
    GateTarget,
    IDENTITY_2,
    IntegralLaw,
    PAULI,
    PulseSchedule,
    Segment,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SinSquared,
    Tabulated,
    bloch_axis,
    global_phase_distance,
    named_gate,
    pauli_axis_unitary,
    schedule_area,
)
from .error_curve import (
    ErrorCurve,
    closure_defect,
    error_curve,
    first_order_robust,
    frenet_profile,
    infidelity_slope,
)
from .errors import (
    AmbiguityError,
    ConfigError,
    GeomGateError,
    NumericError,
    OutOfRangeError,
    SingularPathError,
    ValidationError,
)
from .propagate import (
    LindbladChannel,
    avg_gate_fidelity,
    choi_matrix,
    choi_min_eigenvalue,
    process_map,
    propagate_grid,
    propagate_lindblad,
    propagate_unitary,
    state_fidelity,
    unitary_avg_gate_fidelity,
)
from .schemes import (
    SCHEMES,
    SchemeBundle,
    closed_form_unitary,
    composite,
    composite_z,
    dd_logical_gate,
    dog_reference,
    dynamically_corrected,
    generalized_area,
    half_orange_slice,
    list_schemes,
    noncyclic,
    oct_gate,
    orange_slice,
    toc_gate,
    toc_z_composite,
    triangular,
)

__version__ = "0.1.0"
