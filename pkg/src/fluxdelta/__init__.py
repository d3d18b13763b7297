"""Flux-qubit selection rules and phase-controlled adiabatic transfer in a Delta-type three-level atom."""

__version__ = "0.1.0"

from .atom import (
    AdiabaticFrame,
    PulseSchedule,
    PulseSpec,
    adiabatic_eigenvectors,
    adiabatic_frame,
    analytic_eigenvalues,
    analytic_eigenvector,
    beta,
    build_rwa,
    coupling_profile,
    evaluate_pulses,
    preset_schedule,
    rabi_from_circuit,
)
from .circuit import (
    ChargeBasisOperator,
    CircuitParams,
    EigenSystem,
    build_hamiltonian,
    eigensolve,
    ratio_table,
    spectrum,
    sweep_spectrum,
)
from .dynamics import (
    Trajectory,
    adiabatic_component_map,
    phase_sweep,
    propagate,
    transfer_fidelity,
)
from .errors import *  # noqa: F401,F403
from .transitions import (
    Structure,
    TransitionTable,
    classify_structure,
    current_operator,
    sweep_transitions,
    transition_moduli,
    transitions_at,
)
