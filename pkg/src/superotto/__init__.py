"""superotto: finite-time frictionless quantum Otto machinery.

Shortcut-driven harmonic strokes with exact Gaussian work statistics, an
independent truncated-Fock verification oracle, and four-stroke Otto cycle
bookkeeping with a quantum-speed-limit power bound.
"""

from .errors import (
    BracketError,
    CutoffViolationError,
    DomainError,
    IntegrationFailureError,
    InvertedTrapError,
    NumericalConsistencyError,
    ParameterError,
    PropagationError,
    TruncationError,
    UnphysicalStateError,
)
from .protocol import (
    ErmakovSolution,
    OscillatorParams,
    StrokeSpec,
    TrajectoryPoint,
    adiabatic_scaling,
    cutoff_time,
    ermakov_forward,
    eta,
    frequency_squared,
    omega_at,
    sample_stroke,
    scaling_factor,
    trajectory_point,
)
from .gaussian import (
    AdiabaticReference,
    GaussianState,
    GibbsReference,
    bures_angle,
    energy_variance,
    evolve_scaling,
    free_energy,
    gaussian_fidelity,
    mean_energy,
    partition_function,
    relative_entropy_to_gibbs,
    symplectic_eigenvalue,
    thermal_state,
    von_neumann_entropy,
)
from .workstats import (
    DeltaWDecomposition,
    DissipationSweep,
    WorkRecord,
    avg_delta_w,
    delta_w,
    delta_w_via_relative_entropies,
    evolved_thermal_state,
    irreversible_entropy,
    mean_work_adiabatic,
    mean_work_sta,
    rescaled_inverse_temperature,
    sweep_avg_delta_w,
    work_record,
    work_std,
)
from .fock_oracle import (
    FockConfig,
    TransitionMatrix,
    WorkDistribution,
    build_hamiltonian,
    density_matrix_entropies,
    fock_state_entropies,
    geometric_basis,
    moment,
    propagate,
    propagate_snapshots,
    transition_probs,
    uhlmann_fidelity_thermal,
    work_distribution,
)
from .cycle import (
    CycleReport,
    CycleSpec,
    QslPowerBound,
    isochore_heat,
    qsl_power_bound,
    run_superadiabatic_cycle,
    sum_adiabatic_work,
)

__version__ = "0.1.0"
