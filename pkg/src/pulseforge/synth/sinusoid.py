"""Sinusoidal controls ``w(t) = A cos(upsilon t)`` for the x-rotation subproblem.

In the frame ``U1 = exp(i upsilon t sy/2) U`` the subproblem Hamiltonian
``w sx/2 + J sy/2`` becomes

    (A/2)(1 + cos 2ut) sx/2 + (J - u) sy/2 + (A/2) sin 2ut sz/2,

and writing ``U1 = Rz(a1) Rx(a2) Rz(a3)`` turns the Schrodinger equation into
three ODEs for the angles.  Near ``u = J`` they are solved approximately by
``a1 = (A/2u) sin^2 ut``, ``a2 = At/2 + (A/4J) sin 2ut``, ``a3 = 0``, so that
``U(T) = exp(-i u T sy/2) Rz(a1(T)) Rx(a2(T))``.  Choosing ``u = J``,
``T = 2 n pi / J`` and ``A = gamma J / (n pi)`` yields ``(-1)^n Rx(gamma)``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from ..algebra import Hamiltonian2, gate_fidelity, propagate2, rx, ry
from ..decouple import zxz
from ..errors import InvalidArgument, OptimizationError, SingularityError
from .optimize import OptimizerConfig, nelder_mead
from .program import PulseProgram, subproblem_propagator
from .waveforms import Sinusoid, Zero


def normalize_angle(theta: float) -> float:
    """Map to ``[0, 2 pi)``."""
    return float(np.mod(theta, 2 * np.pi))


@dataclass(frozen=True)
class SinusoidParams:
    A: float
    upsilon: float
    n: int
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise InvalidArgument(f"T must be positive, got {self.T!r}")

    def waveform(self) -> Sinusoid:
        return Sinusoid(self.A, self.upsilon)


def approx_params(gamma: float, J: float, n: int = 1) -> SinusoidParams:
    """Closed-form ``(A, upsilon, T) = (gamma J/(n pi), J, 2 n pi/J)``.

    ``gamma`` is normally in ``[0, 2 pi]``; other real values are accepted
    (the two-qubit blocks use signed angles) and simply scale ``A``.
    """
    if not J > 0:
        raise InvalidArgument(f"J must be positive, got {J!r}")
    if int(n) != n or n < 1:
        raise InvalidArgument(f"n must be a positive integer, got {n!r}")
    return SinusoidParams(gamma * J / (n * np.pi), J, int(n), 2 * n * np.pi / J)


def approx_two_qubit(gamma1: float, gamma2: float, J: float, n: int = 1, phase: float = 0.0) -> PulseProgram:
    """``w_j = gamma_j J/(n pi) cos(J t)`` for ``T = 2 n pi/J``, both qubits at ``phase``."""
    p1 = approx_params(gamma1, J, n)
    p2 = approx_params(gamma2, J, n)
    w1 = p1.waveform() if gamma1 != 0 else Zero()
    w2 = p2.waveform() if gamma2 != 0 else Zero()
    return PulseProgram(
        w1,
        w2,
        p1.T,
        phase,
        "approximate",
        {"strategy": "approximate", "gamma": [float(gamma1), float(gamma2)], "n": int(n), "A": [p1.A, p2.A], "upsilon": J, "T": p1.T},
    )


@dataclass(frozen=True)
class WeiNormanAngles:
    """ZXZ exponents ``(alpha1, alpha2, alpha3)`` as functions of time."""

    alpha1: Callable
    alpha2: Callable
    alpha3: Callable

    def at(self, t):
        return self.alpha1(t), self.alpha2(t), self.alpha3(t)


@dataclass(frozen=True, eq=False)
class WeiNormanTrajectory:
    t: np.ndarray
    alpha: np.ndarray  # (len(t), 3)

    def frame_unitary(self, i: int = -1) -> np.ndarray:
        return zxz(*self.alpha[i])


def wei_norman_predict(params: SinusoidParams, J: float) -> tuple[WeiNormanAngles, np.ndarray]:
    """Closed-form angle curves and the predicted lab-frame ``U(T)``.

    Reliable while ``upsilon`` stays within about 20% of ``J``.
    """
    A, u = params.A, params.upsilon
    angles = WeiNormanAngles(
        lambda t: A / (2 * u) * np.sin(u * np.asarray(t)) ** 2,
        lambda t: A * np.asarray(t) / 2 + A / (4 * J) * np.sin(2 * u * np.asarray(t)),
        lambda t: np.zeros_like(np.asarray(t, dtype=float)),
    )
    a1, a2, a3 = angles.at(params.T)
    # lab frame is U = exp(-i u t sy/2) U1
    U = ry(u * params.T) @ zxz(float(a1), float(a2), float(a3))
    return angles, U


def frame_hamiltonian(omega_fn: Callable, upsilon: float, J: float) -> Callable:
    """Sampler of the Hamiltonian seen by ``U1 = exp(i upsilon t sy/2) U``."""

    def sampler(t):
        w = omega_fn(t)
        return Hamiltonian2(w * np.cos(upsilon * t), J - upsilon, w * np.sin(upsilon * t))

    return sampler


def _wn_rhs(t, a, omega_fn, upsilon, J):
    w = omega_fn(t)
    ux, uy, uz = w * np.cos(upsilon * t), J - upsilon, w * np.sin(upsilon * t)
    s1, c1 = np.sin(a[0]), np.cos(a[0])
    s2 = np.sin(a[1])
    rot = (s1 * ux - c1 * uy) / s2
    return np.array([uz - np.cos(a[1]) * rot, c1 * ux + s1 * uy, rot])


def wei_norman_integrate(omega_fn: Callable, upsilon: float, J: float, T: float, steps: int, delta: float | None = None) -> WeiNormanTrajectory:
    """RK4 integration of the ZXZ angle equations on ``[delta, T]``.

    The chart is singular at ``t = 0`` (``alpha2 = 0``), so the state at
    ``t = delta`` is taken from the closed-form solution with ``A = w(0)``.
    Raises :class:`SingularityError` if ``|sin alpha2|`` drops below 1e-6.
    """
    if delta is None:
        delta = T * 1e-3
    A = float(omega_fn(0.0))
    a = np.array(
        [
            A / (2 * upsilon) * np.sin(upsilon * delta) ** 2,
            A * delta / 2 + A / (4 * J) * np.sin(2 * upsilon * delta),
            0.0,
        ]
    )
    if abs(np.sin(a[1])) < 1e-6:
        raise SingularityError(f"alpha2({delta:.3g}) = {a[1]:.3g} starts on the chart singularity")
    h = (T - delta) / steps
    ts = delta + h * np.arange(steps + 1)
    out = np.empty((steps + 1, 3))
    out[0] = a
    f = lambda t, y: _wn_rhs(t, y, omega_fn, upsilon, J)  # noqa: E731
    for k in range(steps):
        t = ts[k]
        k1 = f(t, a)
        k2 = f(t + h / 2, a + h / 2 * k1)
        k3 = f(t + h / 2, a + h / 2 * k2)
        k4 = f(t + h, a + h * k3)
        a = a + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = a
        if abs(np.sin(a[1])) < 1e-6:
            raise SingularityError(f"|sin alpha2| < 1e-6 at t={ts[k + 1]!r}")
    return WeiNormanTrajectory(ts, out)


def sinusoid_infidelity(x, target: np.ndarray, J: float, steps: int, drift_sign: int = 1) -> float:
    A, u, T = x
    if not T > 0:
        return 1.0 + abs(T)
    U = subproblem_propagator(Sinusoid(A, u), J, T, steps, drift_sign)
    return 1.0 - gate_fidelity(U, target)


@dataclass(frozen=True)
class OptimizedSinusoid:
    params: SinusoidParams
    fidelity: float
    seed_fidelity: float
    evaluations: int
    restarts: int


def fidelity_optimize(seed: SinusoidParams, target_angle: float, J: float, config: OptimizerConfig | None = None, drift_sign: int = 1) -> OptimizedSinusoid:
    """Nelder-Mead over ``(A, upsilon, T)`` maximizing the simulated fidelity to ``Rx(target)``."""
    config = config or OptimizerConfig()
    target = rx(normalize_angle(target_angle))
    x0 = np.array([seed.A, seed.upsilon, seed.T])
    f = lambda x: sinusoid_infidelity(x, target, J, config.steps, drift_sign)  # noqa: E731
    f0 = f(x0)
    if f0 <= 1e-15:
        return OptimizedSinusoid(seed, 1.0 - f0, 1.0 - f0, 1, 0)
    scale = np.where(x0 != 0, np.abs(x0), [max(J, 1.0) / np.pi, 1.0, 1.0])
    res = nelder_mead(f, x0, scale, config)
    if res.fun > f0:
        raise OptimizationError("optimizer ended below the seed fidelity", {"seed_infidelity": f0, "best_infidelity": res.fun})
    A, u, T = (float(v) for v in res.x)
    return OptimizedSinusoid(replace(seed, A=A, upsilon=u, T=T), 1.0 - res.fun, 1.0 - f0, res.evaluations, res.restarts)


def direct_frame_propagator(omega_fn: Callable, upsilon: float, J: float, t0: float, t1: float, steps: int) -> np.ndarray:
    """Propagator of the rotating-frame Hamiltonian from ``t0`` to ``t1``."""
    h = frame_hamiltonian(omega_fn, upsilon, J)
    return propagate2(lambda t: h(t + t0), t1 - t0, steps)


__all__ = [
    "SinusoidParams",
    "approx_params",
    "approx_two_qubit",
    "WeiNormanAngles",
    "WeiNormanTrajectory",
    "wei_norman_predict",
    "wei_norman_integrate",
    "fidelity_optimize",
    "OptimizedSinusoid",
    "normalize_angle",
    "frame_hamiltonian",
    "direct_frame_propagator",
]
