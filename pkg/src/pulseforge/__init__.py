"""Single-qubit pulse synthesis on two qubits with an always-on ZZ coupling."""
from .algebra import gate_fidelity, propagate2, propagate4
from .decouple import compute_block_basis, decouple_hamiltonian, stage_plan, subproblem_targets
from .verify import SynthesisReport, locality_residual, make_report, simulate_program

__version__ = "0.1.0"

__all__ = [
    "gate_fidelity",
    "propagate2",
    "propagate4",
    "compute_block_basis",
    "decouple_hamiltonian",
    "stage_plan",
    "subproblem_targets",
    "SynthesisReport",
    "locality_residual",
    "make_report",
    "simulate_program",
]
