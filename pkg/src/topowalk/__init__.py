"""Split-step topological quantum walks: discrete circuits, continuum limits, bound states."""

from .continuum import (
    EvolutionParams,
    Hamiltonian,
    PauliTerm,
    bound_eigenstate,
    evolve_exact,
    hamiltonian_single_phase,
    hamiltonian_two_phase_I_II,
    kernel,
    pauli_decompose,
    trotter_circuit,
)
from .qasm import emit, parse
from .scenarios import Scenario, ScenarioReport, export_report, run_noisy, run_scenario
from .simcore import Circuit, Gate, State, apply_circuit, apply_gate, basis_state, position_distribution, to_unitary
from .walkgen import (
    WalkConfig,
    coin_circuit,
    qft_circuit,
    run_discrete_walk,
    shift_circuit,
    shift_oracle,
    step_circuit,
    walk_step_circuit,
)

__version__ = "0.1.0"
