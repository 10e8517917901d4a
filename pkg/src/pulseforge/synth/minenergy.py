"""Minimum-energy control ``w(t) = 2 b k cn(b t + f, k)`` found by shooting.

Pontryagin with running cost ``w^2/2`` gives ``w = p1``; differentiating the
costate equations twice,

    w'' = (C2/2 - J^2) w - w^3/2,     C2 = p1^2 + 2 J p2,

whose zero-crossing solutions are ``2 b k cn(b t + f, k)`` with
``C2/2 - J^2 = b^2 (2k^2 - 1)``.  The three constants are tuned by
derivative-free search so the simulated propagator hits the target; the
costate map below lets the result be re-checked against the unreduced
``(U, p)`` extremal system.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..algebra import gate_fidelity, rx
from ..elliptic import jacobi_sncndn, quarter_period
from ..errors import InvalidArgument, SynthesisError
from ..liepoisson import integrate_extremal
from .optimize import OptimizerConfig, nelder_mead
from .program import subproblem_propagator, waveform_energy
from .sinusoid import SinusoidParams, normalize_angle
from .waveforms import EllipticCn, PiecewiseConstant, Waveform

MIN_FIDELITY = 1 - 1e-4


@dataclass(frozen=True)
class EllipticParams:
    b: float
    f: float
    k: float
    T: float

    def __post_init__(self):
        if not 0 <= self.k < 1:
            raise InvalidArgument(f"modulus must lie in [0, 1), got {self.k!r}")
        if not self.T > 0:
            raise InvalidArgument("T must be positive")

    def waveform(self) -> EllipticCn:
        return EllipticCn(self.b, self.f, self.k)


@dataclass(frozen=True)
class MinEnergyResult:
    params: EllipticParams | None  # None for the J = 0 constant extremal
    waveform: Waveform
    T: float
    fidelity: float
    energy: float
    evaluations: int = 0


def elliptic_seed(seed: SinusoidParams) -> tuple[float, float, float]:
    """``(b, f, k)`` whose cn wave matches amplitude ``|A|`` and frequency ``upsilon``.

    Solves ``2 b k = |A|`` and ``b pi / (2 K(k)) = upsilon``; a negative
    amplitude is a half-period shift ``f = 2K``.
    """
    A, u = abs(seed.A), abs(seed.upsilon)
    if A == 0:
        return u, 0.0, 0.0

    def mismatch(k):
        return 2 * k * u * 2 * quarter_period(k) / np.pi - A

    if mismatch(0.999) < 0:
        k = 0.999
    else:
        k = brentq(mismatch, 0.0, 0.999, xtol=1e-15)
    b = u * 2 * quarter_period(k) / np.pi
    f = 0.0 if seed.A > 0 else 2 * quarter_period(k)
    return b, f, k


def costate_from_elliptic(params: EllipticParams, J: float) -> np.ndarray:
    """Initial costate of the extremal that reproduces the cn control."""
    if J == 0:
        raise InvalidArgument("costate map needs J != 0")
    b, f, k = params.b, params.f, params.k
    sn, cn, dn = (float(v) for v in jacobi_sncndn(f, k))
    p1 = 2 * b * k * cn
    p3 = -2 * b * b * k * sn * dn / J  # dp1/dt = J p3
    c2 = 2 * (J * J + b * b * (2 * k * k - 1))
    p2 = (c2 - p1 * p1) / (2 * J)
    return np.array([p1, p2, p3])


def costate_oracle(params: EllipticParams, J: float, target_angle: float, steps: int = 2**14):
    """Fidelity reached by integrating the ``(U, p)`` extremal with ``w = p1``.

    Returns ``(fidelity, t, p1_path)``.  Controls found for drift ``-J`` are
    checked against ``+J``: conjugation by ``sx`` flips the drift and fixes
    x rotations, so the fidelity is the same.
    """
    p0 = costate_from_elliptic(params, J)
    t, us, ps = integrate_extremal(p0, J, params.T, steps)
    return gate_fidelity(us[-1], rx(normalize_angle(target_angle))), t, ps[:, 0]


def _infidelity(x, target, J, T, steps, drift_sign, signed):
    b, f, k = x
    if not (0 <= k < 1) or not b > 0:
        return 1.0 + abs(min(k, 0)) + abs(max(k - 1, 0)) + abs(min(b, 0))
    U = subproblem_propagator(EllipticCn(b, f, k), J, T, steps, drift_sign)
    if signed:
        return 1.0 - float(np.real(np.trace(target.conj().T @ U))) / 2
    return 1.0 - gate_fidelity(U, target)


def min_energy_synthesize(
    target_angle: float,
    J: float,
    T: float,
    seed: SinusoidParams,
    config: OptimizerConfig | None = None,
    drift_sign: int = 1,
    signed: bool = False,
    phase_offset: float = 0.0,
) -> MinEnergyResult:
    """Shoot ``(b, f, k)`` so the cn control steers ``I`` to ``Rx(target)`` in time ``T``.

    With ``signed=True`` the target is matched as an SU(2) element (no
    global-sign freedom, no angle normalization), which two-qubit stages need
    to keep both blocks on the same sign.  ``phase_offset`` is the carrier
    phase ``psi`` of a seed ``A cos(upsilon t + psi)``.
    """
    config = config or OptimizerConfig()
    theta = float(target_angle) if signed else normalize_angle(target_angle)
    target = rx(theta)
    if J == 0:
        # constant extremal; shortest equivalent rotation when the sign is free
        eff = theta if signed else (theta if theta <= np.pi else theta - 2 * np.pi)
        w = PiecewiseConstant((eff / T,))
        U = subproblem_propagator(w, 0.0, T, 1)
        fid = gate_fidelity(U, target)
        return MinEnergyResult(None, w, T, fid, waveform_energy(w, T))

    b0, f0, k0 = elliptic_seed(seed)
    f0 += 2 * quarter_period(k0) * phase_offset / np.pi
    x0 = np.array([b0, f0, k0])
    f = lambda x: _infidelity(x, target, J, T, config.steps, drift_sign, signed)  # noqa: E731
    scale = np.array([max(b0, 1.0), 1.0, max(k0, 1e-2)])
    res = nelder_mead(f, x0, scale, config)
    b, ph, k = (float(v) for v in res.x)
    params = EllipticParams(b, ph, k, T)
    fid = 1.0 - res.fun
    if fid < MIN_FIDELITY:
        raise SynthesisError(
            f"minimum-energy shooting reached fidelity {fid:.6f} < {MIN_FIDELITY}",
            {"b": b, "f": ph, "k": k, "T": T, "evaluations": res.evaluations},
        )
    w = params.waveform()
    return MinEnergyResult(params, w, T, fid, waveform_energy(w, T), res.evaluations)
