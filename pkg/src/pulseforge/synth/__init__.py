"""Control synthesis for the decoupled single-qubit subproblems and two-qubit stages."""
from .bangbang import BangBangResult, BangBangSchedule, bangbang_fixed_horizon, bangbang_synthesize, costate_extremal, direct_search
from .minenergy import EllipticParams, MinEnergyResult, costate_oracle, min_energy_synthesize
from .optimize import OptimizerConfig
from .program import PulseProgram, energy_cost, identity_program, qubit_energies, sample_times, subproblem_propagator, total_duration
from .sinusoid import (
    SinusoidParams,
    WeiNormanAngles,
    approx_params,
    approx_two_qubit,
    fidelity_optimize,
    normalize_angle,
    wei_norman_integrate,
    wei_norman_predict,
)
from .stages import STRATEGIES, StageConfig, synthesize_plan, synthesize_rotation, synthesize_stage
from .waveforms import EllipticCn, PiecewiseConstant, Sampled, Sinusoid, Waveform, Zero

__all__ = [
    "BangBangResult",
    "BangBangSchedule",
    "bangbang_fixed_horizon",
    "bangbang_synthesize",
    "costate_extremal",
    "direct_search",
    "EllipticParams",
    "MinEnergyResult",
    "costate_oracle",
    "min_energy_synthesize",
    "OptimizerConfig",
    "PulseProgram",
    "energy_cost",
    "identity_program",
    "qubit_energies",
    "sample_times",
    "subproblem_propagator",
    "total_duration",
    "SinusoidParams",
    "WeiNormanAngles",
    "approx_params",
    "approx_two_qubit",
    "fidelity_optimize",
    "normalize_angle",
    "wei_norman_integrate",
    "wei_norman_predict",
    "STRATEGIES",
    "StageConfig",
    "synthesize_plan",
    "synthesize_rotation",
    "synthesize_stage",
    "EllipticCn",
    "PiecewiseConstant",
    "Sampled",
    "Sinusoid",
    "Waveform",
    "Zero",
]
