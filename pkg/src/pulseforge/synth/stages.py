"""Two-qubit stages: x rotations on both qubits realized through the two blocks.

A stage with angle pair ``(g1, g2)`` needs ``Ua = Rx(g1 - g2)`` on the
difference channel (drift ``+J``) and ``Ub = Rx(g1 + g2)`` on the sum channel
(drift ``-J``), over one shared duration.  Only a common sign of the two
blocks is free: flipping one of them multiplies the 4x4 result by
``sx x sx``.  Every strategy therefore works with the block-averaged fidelity

    |tr(Ta^dagger Ua) + tr(Tb^dagger Ub)| / 4,

which equals the 4x4 gate fidelity of the reassembled propagator.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ..algebra import dagger, rx
from ..decouple import stage_plan, subproblem_targets
from ..errors import InvalidArgument, SynthesisError
from .bangbang import bangbang_fixed_horizon, bangbang_synthesize
from .minenergy import min_energy_synthesize
from .optimize import OptimizerConfig, nelder_mead
from .program import PulseProgram, subproblem_propagator
from .sinusoid import SinusoidParams, approx_params, approx_two_qubit, fidelity_optimize
from .waveforms import Sinusoid, Waveform, Zero, channel_mix

log = logging.getLogger(__name__)

STRATEGIES = ("approximate", "optimized", "min-energy", "bang-bang")
ZERO_ANGLE = 1e-12


@dataclass(frozen=True)
class StageConfig:
    """Settings shared by all stages of one synthesis run.

    ``bounds`` limit the block (channel) controls of the bang-bang strategy;
    ``None`` means ``(-5J, 5J)``.  ``optimizer.steps`` is the integrator
    resolution used inside search loops.
    """

    strategy: str = "optimized"
    n: int = 1
    bounds: tuple | None = None
    optimizer: OptimizerConfig = field(default_factory=lambda: OptimizerConfig(steps=2**12))

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InvalidArgument(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgument(f"n must be a positive integer, got {self.n!r}")
        if self.bounds is not None and not self.bounds[0] < self.bounds[1]:
            raise InvalidArgument(f"bounds must satisfy omega_min < omega_max, got {self.bounds!r}")

    def resolved_bounds(self, J: float) -> tuple[float, float]:
        return tuple(self.bounds) if self.bounds is not None else (-5.0 * J, 5.0 * J)


def block_traces(wa: Waveform, wb: Waveform, thetas, J: float, T: float, steps: int) -> tuple[complex, complex]:
    ua = subproblem_propagator(wa, J, T, steps, +1)
    ub = subproblem_propagator(wb, J, T, steps, -1)
    return np.trace(dagger(rx(thetas[0])) @ ua), np.trace(dagger(rx(thetas[1])) @ ub)


def combined_fidelity(wa: Waveform, wb: Waveform, thetas, J: float, T: float, steps: int) -> float:
    ta, tb = block_traces(wa, wb, thetas, J, T, steps)
    return float(abs(ta + tb)) / 4


def common_sign(wa, wb, thetas, J, T, steps) -> int:
    ta, tb = block_traces(wa, wb, thetas, J, T, steps)
    return 1 if np.real(ta + tb) >= 0 else -1


def _sinusoid(A: float, u: float, psi: float = 0.0) -> Waveform:
    return Zero() if A == 0 else Sinusoid(A, u, psi)


def _program(wa: Waveform, wb: Waveform, T: float, phase: float, label: str, meta: dict) -> PulseProgram:
    w1, w2 = channel_mix(wa, wb)
    return PulseProgram(w1, w2, T, phase, label, meta)


def _is_zero_stage(angles) -> bool:
    return all(abs(a) <= ZERO_ANGLE for a in angles)


@dataclass(frozen=True)
class BlockSinusoids:
    """``A cos(upsilon t + psi)`` on each block over a shared ``T``."""

    A: tuple
    upsilon: tuple
    psi: tuple
    T: float
    n: int
    seed_fidelity: float
    fidelity: float
    evaluations: int

    def waveforms(self) -> tuple[Waveform, Waveform]:
        return tuple(_sinusoid(a, u, p) for a, u, p in zip(self.A, self.upsilon, self.psi))

    def seeds(self) -> tuple[SinusoidParams, SinusoidParams]:
        return tuple(SinusoidParams(a, u, self.n, self.T) for a, u in zip(self.A, self.upsilon))


def optimized_blocks(thetas, J: float, n: int, config: OptimizerConfig) -> BlockSinusoids:
    """Joint Nelder-Mead over ``(Aa, ua, psi_a, Ab, ub, psi_b, T)`` from the closed-form seed.

    A single block is solved exactly by ``(A, upsilon, T)``, but the two
    blocks prefer different durations.  The carrier phases supply the
    missing freedom once ``T`` is shared.
    """
    pa, pb = approx_params(thetas[0], J, n), approx_params(thetas[1], J, n)
    if thetas[0] == thetas[1]:
        # x rotations are blind to the drift sign, so one solution serves both blocks
        o = fidelity_optimize(pa, thetas[0], J, config)
        q = o.params
        return BlockSinusoids((q.A, q.A), (q.upsilon, q.upsilon), (0.0, 0.0), q.T, n, o.seed_fidelity, o.fidelity, o.evaluations)
    x0 = np.array([pa.A, pa.upsilon, 0.0, pb.A, pb.upsilon, 0.0, pa.T])
    scale = np.array([abs(pa.A) or J / np.pi, J, 1.0, abs(pb.A) or J / np.pi, J, 1.0, pa.T])

    def infidelity(x):
        T = x[6]
        if not T > 0:
            return 1.0 + abs(T)
        return 1.0 - combined_fidelity(_sinusoid(*x[:3]), _sinusoid(*x[3:6]), thetas, J, T, config.steps)

    f0 = infidelity(x0)
    res = nelder_mead(infidelity, x0, scale, config)
    x, f = (res.x, res.fun) if res.fun < f0 else (x0, f0)
    x = [float(v) for v in x]
    return BlockSinusoids((x[0], x[3]), (x[1], x[4]), (x[2], x[5]), x[6], n, 1.0 - f0, 1.0 - f, res.evaluations)


def stage_approximate(angles, J, phase, config: StageConfig, label="") -> PulseProgram:
    prog = approx_two_qubit(angles[0], angles[1], J, config.n, phase)
    return replace(prog, label=label, meta={**prog.meta, "angles": [float(a) for a in angles]})


def stage_optimized(angles, J, phase, config: StageConfig, label="") -> PulseProgram:
    thetas = subproblem_targets(*angles)
    sol = optimized_blocks(thetas, J, config.n, config.optimizer)
    meta = {
        "strategy": "optimized",
        "angles": [float(a) for a in angles],
        "block_targets": [float(t) for t in thetas],
        "A": list(sol.A),
        "upsilon": list(sol.upsilon),
        "psi": list(sol.psi),
        "T": sol.T,
        "n": config.n,
        "seed_fidelity": sol.seed_fidelity,
        "fidelity": sol.fidelity,
        "evaluations": sol.evaluations,
    }
    return _program(*sol.waveforms(), sol.T, phase, label, meta)


def stage_min_energy(angles, J, phase, config: StageConfig, label="") -> PulseProgram:
    """Cn controls on both blocks at the optimized sinusoids' duration."""
    thetas = subproblem_targets(*angles)
    sol = optimized_blocks(thetas, J, config.n, config.optimizer)
    T = sol.T
    s = common_sign(*sol.waveforms(), thetas, J, T, config.optimizer.steps)
    # s Rx(theta) = Rx(theta + 2 pi) when s = -1
    signed = [th if s > 0 else th + 2 * np.pi for th in thetas]
    pa, pb = sol.seeds()
    ra = min_energy_synthesize(signed[0], J, T, pa, config.optimizer, drift_sign=+1, signed=True, phase_offset=sol.psi[0])
    if thetas[0] == thetas[1]:
        rb = ra
    else:
        rb = min_energy_synthesize(signed[1], J, T, pb, config.optimizer, drift_sign=-1, signed=True, phase_offset=sol.psi[1])
    meta = {
        "strategy": "min-energy",
        "angles": [float(a) for a in angles],
        "block_targets": [float(t) for t in thetas],
        "T": T,
        "sign": s,
        "elliptic": [_elliptic_record(r) for r in (ra, rb)],
        "block_fidelity": [ra.fidelity, rb.fidelity],
        "block_energy": [ra.energy, rb.energy],
    }
    return _program(ra.waveform, rb.waveform, T, phase, label, meta)


def _elliptic_record(r) -> dict | None:
    if r.params is None:
        return None
    return {"b": r.params.b, "f": r.params.f, "k": r.params.k}


def stage_bangbang(angles, J, phase, config: StageConfig, label="") -> PulseProgram:
    """Time-optimal blocks on a common horizon.

    Both common signs are tried; for each, the slower block sets ``T`` and
    the faster block is re-solved on that fixed horizon.
    """
    thetas = subproblem_targets(*angles)
    lo, hi = config.resolved_bounds(J)
    seed = config.optimizer.seed
    best = None
    for s in (1, -1):
        signed = [th if s > 0 else th + 2 * np.pi for th in thetas]
        times, results = [], []
        for th, d in zip(signed, (+1, -1)):
            if abs(np.cos(th / 2) - 1) <= 1e-15:  # already the identity with the right sign
                times.append(0.0)
                results.append(None)
                continue
            try:
                r = bangbang_synthesize(th, J, lo, hi, drift_sign=d, sign=1, seed=seed)
            except SynthesisError:
                break
            times.append(r.schedule.T)
            results.append(r)
        else:
            T = max(times)
            if best is None or T < best[0]:
                best = (T, s, signed, results)
    if best is None:
        raise SynthesisError("no common-sign bang-bang solution for this stage", {"angles": list(angles)})
    T, s, signed, results = best
    waves, schedules = [], []
    for i, (th, d, r) in enumerate(zip(signed, (+1, -1), results)):
        if r is not None and abs(r.schedule.T - T) <= 1e-12 * T:
            sched = r.schedule
        else:
            sched = bangbang_fixed_horizon(th, J, lo, hi, T, drift_sign=d, sign=1, seed=seed)
        schedules.append(sched)
        waves.append(sched.waveform())
    meta = {
        "strategy": "bang-bang",
        "angles": [float(a) for a in angles],
        "block_targets": [float(t) for t in thetas],
        "T": T,
        "sign": s,
        "bounds": [lo, hi],
        "switch_times": [list(sc.switch_times) for sc in schedules],
        "initial_level": [sc.initial_level for sc in schedules],
        "methods": [None if r is None else r.method for r in results],
    }
    return _program(waves[0], waves[1], T, phase, label, meta)


_STAGE_FUNCS = {
    "approximate": stage_approximate,
    "optimized": stage_optimized,
    "min-energy": stage_min_energy,
    "bang-bang": stage_bangbang,
}


def synthesize_stage(angles, J: float, phase: float, config: StageConfig, label: str = "") -> PulseProgram:
    """One stage realizing ``Rx(g1) x Rx(g2)`` at ``phase`` 0 (or ``Ry x Ry`` at pi/2)."""
    if not J > 0:
        raise InvalidArgument(f"J must be positive, got {J!r}")
    return _STAGE_FUNCS[config.strategy](tuple(float(a) for a in angles), J, phase, config, label)


def synthesize_rotation(gamma1: float, gamma2: float, J: float, config: StageConfig) -> list[PulseProgram]:
    """Single phase-0 stage for ``Rx(gamma1) x Rx(gamma2)``; empty for the identity."""
    if _is_zero_stage((gamma1, gamma2)):
        return []
    return [synthesize_stage((gamma1, gamma2), J, 0.0, config, "stage1")]


def synthesize_plan(k1, J: float, config: StageConfig) -> list[PulseProgram]:
    """Programs for an arbitrary local target ``k1[0] x k1[1]``.

    Stages whose angle pair vanishes are omitted, so the identity yields an
    empty list.
    """
    plan = stage_plan(k1)
    programs = []
    for i, stage in enumerate(plan.stages, start=1):
        if _is_zero_stage(stage.angles):
            continue
        log.info("stage %d: phase %.4f angles %s", i, stage.phase, stage.angles)
        programs.append(synthesize_stage(stage.angles, J, stage.phase, config, f"stage{i}"))
    return programs
