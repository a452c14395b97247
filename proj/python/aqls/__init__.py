"""Classical simulator for two adiabatic-inspired quantum linear-system
algorithms: build Pauli-expression instances, sweep the annealing schedule,
run seeded trajectory or exact channel evolutions, and compare against the
direct eigendecomposition oracle."""

from ._core import (
    AqlsError,
    CompiledEvolution,
    PauliExpr,
    PauliTerm,
    ProblemInstance,
    RunReport,
    Schedule,
    ScheduleStep,
    StepRecord,
    A_of_s,
    H_of_s,
    Hprime_of_s,
    build_grid,
    channel_damping,
    condition_number,
    eigh,
    expm_unitary,
    extract_solution,
    extract_solution_density,
    fidelity_mixed,
    gap_bound,
    initial_state,
    instance,
    instance_from_matrix,
    oracle_solve,
    partial_trace,
    phase_fix,
    run_channel,
    run_trajectory,
    s_of_v,
    schedule_bounds,
    spectral_norm,
    __version__,
)

__all__ = [
    "AqlsError",
    "CompiledEvolution",
    "PauliExpr",
    "PauliTerm",
    "ProblemInstance",
    "RunReport",
    "Schedule",
    "ScheduleStep",
    "StepRecord",
    "A_of_s",
    "H_of_s",
    "Hprime_of_s",
    "build_grid",
    "channel_damping",
    "condition_number",
    "eigh",
    "expm_unitary",
    "extract_solution",
    "extract_solution_density",
    "fidelity_mixed",
    "gap_bound",
    "initial_state",
    "instance",
    "instance_from_matrix",
    "oracle_solve",
    "partial_trace",
    "phase_fix",
    "run_channel",
    "run_trajectory",
    "s_of_v",
    "schedule_bounds",
    "spectral_norm",
    "__version__",
]
