"""Reduced Pontryagin costate dynamics for ``i dU/dt = (w sx/2 + J sy/2) U``.

The costate ``p = (p1, p2, p3)`` with ``p_k = <M, i U^dagger s_k U>/2``
obeys

    dp1/dt = J p3,   dp2/dt = -w p3,   dp3/dt = w p2 - J p1,

i.e. ``dp/dt = (w, J, 0) x p``.  ``C1 = |p|^2`` and ``C2 = p1^2 + 2 J p2`` are
conserved and are used below as accuracy monitors for the RK4 integrator.
``C1`` is conserved for any control; ``C2`` only along minimum-energy
extremals, where ``w = p1`` (``dC2/dt = 2 J p3 (p1 - w)``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import PAULIS, SX, SY, dagger
from .errors import IntegrationError, InvalidArgument


@dataclass(frozen=True)
class CostateTrajectory:
    t: np.ndarray
    p: np.ndarray  # shape (steps + 1, ..., 3)

    @property
    def p1(self) -> np.ndarray:
        return self.p[..., 0]

    def casimirs(self, J) -> tuple[np.ndarray, np.ndarray]:
        return casimirs(self.p, J)


def costate_rhs(p, omega, J) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2]
    return np.stack([J * p3, -omega * p3, omega * p2 - J * p1], axis=-1)


def casimirs(p, J) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    c1 = np.sum(p * p, axis=-1)
    c2 = p[..., 0] ** 2 + 2 * J * p[..., 1]
    return c1, c2


def integrate_costate(p0, omega_fn: Callable | None, J, T: float, steps: int, feedback: Callable | None = None) -> CostateTrajectory:
    """Classical RK4 for the costate equations.

    ``p0`` may carry leading batch axes (shape ``(..., 3)``); ``omega_fn(t)``
    then returns a scalar or an array broadcastable to the batch shape, and
    ``J`` may likewise be an array.  Pass ``omega_fn=None`` and
    ``feedback=lambda p: p[..., 0]`` to follow minimum-energy extremals.
    """
    if (omega_fn is None) == (feedback is None):
        raise InvalidArgument("give exactly one of omega_fn or feedback")
    if int(steps) != steps or steps < 1:
        raise InvalidArgument(f"steps must be a positive integer, got {steps!r}")
    p = np.array(p0, dtype=float)
    h = T / steps
    out = np.empty((steps + 1,) + p.shape)
    out[0] = p
    if feedback is not None:
        f = lambda t, y: costate_rhs(y, feedback(y), J)  # noqa: E731
    else:
        f = lambda t, y: costate_rhs(y, np.asarray(omega_fn(t), dtype=float), J)  # noqa: E731
    for k in range(steps):
        t = k * h
        k1 = f(t, p)
        k2 = f(t + h / 2, p + h / 2 * k1)
        k3 = f(t + h / 2, p + h / 2 * k2)
        k4 = f(t + h, p + h * k3)
        p = p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = p
        if not np.all(np.isfinite(p)):
            raise IntegrationError(f"non-finite costate at t={t + h!r}", t=t + h)
    return CostateTrajectory(np.linspace(0.0, T, steps + 1), out)


def relative_drift(values: np.ndarray, scale=None) -> np.ndarray:
    """``max_t |C(t) - C(0)| / scale`` along the first axis.

    ``scale`` defaults to ``|C(0)|``; pass the size of the individual terms
    when ``C`` can cancel to near zero (as ``C2`` can).
    """
    ref = values[0]
    if scale is None:
        scale = np.abs(ref)
    scale = np.maximum(scale, np.finfo(float).tiny)
    return np.max(np.abs(values - ref), axis=0) / scale


def bangbang_law(p1, omega_min: float, omega_max: float):
    """Pointwise minimizer of ``1 - w p1 - J p2`` over ``[omega_min, omega_max]``."""
    if not omega_min < omega_max:
        raise InvalidArgument("omega_min must be below omega_max")
    return np.where(np.asarray(p1) >= 0, omega_min, omega_max)[()]


def costate_from_state(M: np.ndarray, U: np.ndarray) -> np.ndarray:
    """``p_k = <M, i U^dagger s_k U>/2`` with ``<X, Y> = Tr(X Y^dagger)``."""
    U = np.asarray(U)
    out = []
    for s in PAULIS:
        y = 1j * dagger(U) @ s @ U
        out.append(0.5 * np.real(np.trace(M @ dagger(y), axis1=-2, axis2=-1)))
    return np.stack(out, axis=-1)


def integrate_extremal(p0, J: float, T: float, steps: int, law: Callable = None):
    """Co-integrate ``(U, p)`` with feedback ``w = law(p)`` (RK4 on both).

    The default law ``w = p1`` gives the minimum-energy extremals.  Returns
    ``(t, U_path, p_path)``.
    """
    if law is None:
        law = lambda p: p[0]  # noqa: E731
    h = T / steps
    p = np.array(p0, dtype=float)
    U = np.eye(2, dtype=complex)
    ts = np.linspace(0.0, T, steps + 1)
    us = np.empty((steps + 1, 2, 2), dtype=complex)
    ps = np.empty((steps + 1, 3))
    us[0], ps[0] = U, p

    def f(p, U):
        w = law(p)
        H = 0.5 * (w * SX + J * SY)
        return costate_rhs(p, w, J), -1j * H @ U

    for k in range(steps):
        a1, b1 = f(p, U)
        a2, b2 = f(p + h / 2 * a1, U + h / 2 * b1)
        a3, b3 = f(p + h / 2 * a2, U + h / 2 * b2)
        a4, b4 = f(p + h * a3, U + h * b3)
        p = p + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        U = U + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        us[k + 1], ps[k + 1] = U, p
    if not (np.all(np.isfinite(ps)) and np.all(np.isfinite(us))):
        raise IntegrationError("non-finite state in extremal integration")
    return ts, us, ps
