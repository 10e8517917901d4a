"""Pulse programs and the quadratures used on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..algebra import Hamiltonian2, Hamiltonian4Params, I2, propagate2
from ..errors import InvalidArgument
from .waveforms import Waveform, Zero

ENERGY_POINTS = 2**14


@dataclass(frozen=True)
class PulseProgram:
    """One synthesis stage: both qubits driven for ``duration`` at a shared phase."""

    omega1: Waveform
    omega2: Waveform
    duration: float
    phase: float = 0.0
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (np.isfinite(self.duration) and self.duration >= 0):
            raise InvalidArgument(f"duration must be finite and non-negative, got {self.duration!r}")

    @property
    def phi1(self) -> float:
        return self.phase

    @property
    def phi2(self) -> float:
        return self.phase

    def amplitudes(self, t):
        return self.omega1(t), self.omega2(t)

    def hamiltonian(self, J: float):
        """Sampler ``t -> Hamiltonian4Params`` for :func:`pulseforge.algebra.propagate4`."""
        return lambda t: Hamiltonian4Params(self.omega1(t), self.omega2(t), self.phase, self.phase, J)

    def breakpoints(self) -> tuple[float, ...]:
        pts = set(self.omega1.breakpoints(self.duration)) | set(self.omega2.breakpoints(self.duration))
        return tuple(sorted(pts))


def identity_program(label: str = "identity") -> PulseProgram:
    return PulseProgram(Zero(), Zero(), 0.0, 0.0, label)


def as_programs(program) -> list[PulseProgram]:
    if isinstance(program, PulseProgram):
        return [program]
    return list(program)


def segments(duration: float, breakpoints: Sequence[float]) -> list[tuple[float, float]]:
    edges = [0.0, *[b for b in breakpoints if 0.0 < b < duration], duration]
    return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _square_integral(w: Waveform, T: float, points: int) -> float:
    total = 0.0
    for a, b in segments(T, w.breakpoints(T)):
        n = max(int(np.ceil(points * (b - a) / T)), 2)
        t = np.linspace(a, b, n + 1)
        # one-sided limits at segment ends, so jumps never straddle a panel
        t[0], t[-1] = np.nextafter(a, b), np.nextafter(b, a)
        total += np.trapezoid(w(t) ** 2, np.linspace(a, b, n + 1))
    return float(total)


def waveform_energy(w: Waveform, T: float, points: int = ENERGY_POINTS) -> float:
    """``(1/2) int_0^T w(t)^2 dt`` by the trapezoidal rule."""
    if T == 0 or isinstance(w, Zero):
        return 0.0
    return 0.5 * _square_integral(w, T, points)


def qubit_energies(program, points: int = ENERGY_POINTS) -> tuple[float, float]:
    e1 = e2 = 0.0
    for p in as_programs(program):
        e1 += waveform_energy(p.omega1, p.duration, points)
        e2 += waveform_energy(p.omega2, p.duration, points)
    return e1, e2


def energy_cost(program, points: int = ENERGY_POINTS) -> float:
    """Total control energy ``sum_j (1/2) int w_j^2 dt`` over all stages (rad^2/s)."""
    return float(sum(qubit_energies(program, points)))


def total_duration(program) -> float:
    return float(sum(p.duration for p in as_programs(program)))


def sample_times(duration: float, rate: float) -> np.ndarray:
    """``k/rate`` for ``k = 0..ceil(duration*rate)``, last point clamped to ``duration``."""
    if not rate > 0:
        raise InvalidArgument("sample rate must be positive")
    n = int(np.ceil(duration * rate - 1e-9))
    t = np.arange(n + 1) / rate
    t[-1] = duration
    return t


def subproblem_propagator(w: Waveform, J: float, T: float, steps: int, drift_sign: int = 1) -> np.ndarray:
    """``U(T)`` for ``i dU/dt = (w(t) sx/2 + s J sy/2) U``, split at waveform jumps."""
    if T == 0:
        return I2.copy()
    u = I2.copy()
    for a, b in segments(T, w.breakpoints(T)):
        n = max(int(round(steps * (b - a) / T)), 1)
        u = propagate2(lambda t, a=a: Hamiltonian2(w(t + a), drift_sign * J), b - a, n) @ u
    return u


def stage_durations(programs: Iterable[PulseProgram]) -> list[float]:
    return [p.duration for p in programs]
