"""Small dense matrix algebra for one and two qubits.

Conventions
-----------
* Frequencies and couplings are angular (rad/s) everywhere.
* Single-qubit Hamiltonians are ``cx*sx/2 + cy*sy/2 + cz*sz/2``.
* Two-qubit operators use ``kron(A, B)`` with qubit 1 as the first factor.
* Propagators solve ``i dU/dt = H(t) U`` with ``U(0) = I``; step exponentials
  are evaluated at interval midpoints (second-order Magnus) and multiplied
  in time order, later steps on the left.

Time-dependent samplers are called once with the full array of midpoint
times, so they must broadcast over numpy arrays (constants are fine).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import IntegrationError, InvalidArgument

ArrayLike = Union[float, np.ndarray]

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I4 = np.eye(4, dtype=complex)
PAULIS = (SX, SY, SZ)

UNITARY2_TOL = 1e-10
UNITARY4_TOL = 1e-9


@dataclass(frozen=True)
class Hamiltonian2:
    """Coefficients of ``sx/2``, ``sy/2``, ``sz/2`` (rad/s); may be arrays."""

    cx: ArrayLike = 0.0
    cy: ArrayLike = 0.0
    cz: ArrayLike = 0.0

    def matrix(self) -> np.ndarray:
        cx, cy, cz = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (self.cx, self.cy, self.cz)))
        return 0.5 * (cx[..., None, None] * SX + cy[..., None, None] * SY + cz[..., None, None] * SZ)


@dataclass(frozen=True)
class Hamiltonian4Params:
    """Control amplitudes, phases and ZZ coupling of the two-qubit Hamiltonian.

    ``H = w1/2 (cos p1 sx + sin p1 sy) x I + I x w2/2 (cos p2 sx + sin p2 sy)
    + J/2 sz x sz``.  Fields may be numpy arrays sharing one shape.
    """

    omega1: ArrayLike = 0.0
    omega2: ArrayLike = 0.0
    phi1: ArrayLike = 0.0
    phi2: ArrayLike = 0.0
    J: ArrayLike = 0.0

    def matrix(self) -> np.ndarray:
        w1, w2, p1, p2, J = np.broadcast_arrays(
            *(np.asarray(v, dtype=float) for v in (self.omega1, self.omega2, self.phi1, self.phi2, self.J))
        )
        e = lambda a: a[..., None, None]  # noqa: E731
        h1 = 0.5 * e(w1) * (e(np.cos(p1)) * SX + e(np.sin(p1)) * SY)
        h2 = 0.5 * e(w2) * (e(np.cos(p2)) * SX + e(np.sin(p2)) * SY)
        return kron(h1, I2) + kron(I2, h2) + 0.5 * e(J) * np.kron(SZ, SZ)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product that broadcasts over leading batch axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    shape = out.shape[:-4] + (a.shape[-2] * b.shape[-2], a.shape[-1] * b.shape[-1])
    return out.reshape(shape)


def dagger(u: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.conj(u), -1, -2)


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of ``U^dagger U - I``."""
    u = np.asarray(u)
    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[-1])))


def is_unitary(u: np.ndarray, tol: float = UNITARY2_TOL) -> bool:
    return unitarity_defect(u) <= tol


def expm_su2(axis, angle: float) -> np.ndarray:
    """``exp(-i angle n.sigma / 2)`` in closed form."""
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise InvalidArgument(f"axis must be a 3-vector, got shape {axis.shape}")
    if angle == 0:
        return I2.copy()
    if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
        raise InvalidArgument(f"axis must be a unit vector, |axis| = {np.linalg.norm(axis)!r}")
    nsig = axis[0] * SX + axis[1] * SY + axis[2] * SZ
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * nsig


def rx(theta: float) -> np.ndarray:
    return expm_su2((1.0, 0.0, 0.0), theta)


def ry(theta: float) -> np.ndarray:
    return expm_su2((0.0, 1.0, 0.0), theta)


def rz(theta: float) -> np.ndarray:
    return expm_su2((0.0, 0.0, 1.0), theta)


def su2_step_exponentials(cx, cy, cz, dt) -> np.ndarray:
    """Batched ``exp(-i (c.sigma/2) dt)``; arrays broadcast to one batch shape."""
    cx, cy, cz, dt = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (cx, cy, cz, dt)))
    g = np.sqrt(cx * cx + cy * cy + cz * cz)
    half = 0.5 * g * dt
    c = np.cos(half)
    # sin(g dt / 2) / g without the 0/0 at g = 0
    s = 0.5 * dt * np.sinc(half / np.pi)
    out = np.empty(g.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c - 1j * s * cz
    out[..., 0, 1] = -1j * s * cx - s * cy
    out[..., 1, 0] = -1j * s * cx + s * cy
    out[..., 1, 1] = c + 1j * s * cz
    return out


def hermitian_step_exponentials(h: np.ndarray, dt) -> np.ndarray:
    """Batched ``exp(-i H dt)`` for Hermitian ``H`` via eigendecomposition.

    ``dt`` is a scalar or broadcasts against the batch axes of ``h``.
    """
    w, v = np.linalg.eigh(h)
    phase = np.exp(-1j * w * np.asarray(dt, dtype=float)[..., None])
    return (v * phase[..., None, :]) @ dagger(v)


def ordered_product(mats: np.ndarray) -> np.ndarray:
    """``M[N-1] @ ... @ M[1] @ M[0]`` by pairwise (tree) reduction."""
    mats = np.asarray(mats)
    if mats.shape[0] == 0:
        return np.eye(mats.shape[-1], dtype=complex)
    while mats.shape[0] > 1:
        tail = mats[-1:] if mats.shape[0] % 2 else None
        even = mats[: mats.shape[0] - (tail is not None)]
        mats = even[1::2] @ even[0::2]
        if tail is not None:
            mats = np.concatenate([mats, tail])
    return mats[0]


def midpoints(T: float, steps: int) -> tuple[np.ndarray, float]:
    if T < 0:
        raise InvalidArgument(f"T must be non-negative, got {T!r}")
    if int(steps) != steps or steps < 1:
        raise InvalidArgument(f"steps must be a positive integer, got {steps!r}")
    dt = T / steps
    return (np.arange(steps) + 0.5) * dt, dt


def _first_bad_time(t, *arrays):
    bad = np.zeros(np.shape(t), dtype=bool)
    for a in arrays:
        bad |= ~np.isfinite(np.broadcast_to(a, np.shape(t)))
    if bad.any():
        return float(t[np.argmax(bad)])
    return None


def sample_hamiltonian2(sampler: Callable[[np.ndarray], Hamiltonian2], t: np.ndarray):
    h = sampler(t)
    cx, cy, cz = (np.broadcast_to(np.asarray(c, dtype=float), t.shape) for c in (h.cx, h.cy, h.cz))
    bad = _first_bad_time(t, cx, cy, cz)
    if bad is not None:
        raise IntegrationError(f"non-finite Hamiltonian at t={bad!r}", t=bad)
    return cx, cy, cz


def propagate2(sampler: Callable[[np.ndarray], Hamiltonian2], T: float, steps: int) -> np.ndarray:
    """Time-ordered single-qubit propagator over ``[0, T]``.

    Parameters
    ----------
    sampler : callable
        Maps an array of times to a :class:`Hamiltonian2` with broadcastable
        coefficient arrays.
    T : float
        Duration in seconds.
    steps : int
        Number of equal midpoint steps.
    """
    t, dt = midpoints(T, steps)
    if T == 0:
        return I2.copy()
    cx, cy, cz = sample_hamiltonian2(sampler, t)
    return ordered_product(su2_step_exponentials(cx, cy, cz, dt))


def propagate4(sampler: Callable[[np.ndarray], Hamiltonian4Params], T: float, steps: int) -> np.ndarray:
    """Time-ordered two-qubit propagator of the coupled Hamiltonian over ``[0, T]``."""
    t, dt = midpoints(T, steps)
    if T == 0:
        return I4.copy()
    p = sampler(t)
    fields = [np.broadcast_to(np.asarray(v, dtype=float), t.shape) for v in (p.omega1, p.omega2, p.phi1, p.phi2, p.J)]
    bad = _first_bad_time(t, *fields)
    if bad is not None:
        raise IntegrationError(f"non-finite Hamiltonian at t={bad!r}", t=bad)
    h = Hamiltonian4Params(*fields).matrix()
    return ordered_product(hermitian_step_exponentials(h, dt))


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """Phase-insensitive gate fidelity ``|Tr(U^dagger V)| / d``."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidArgument(f"dimension mismatch: {u.shape} vs {v.shape}")
    f = abs(np.trace(dagger(u) @ v)) / u.shape[0]
    return float(min(f, 1.0))


def pauli_components(u: np.ndarray) -> np.ndarray:
    """Real ``(a0, ax, ay, az)`` with ``U = a0 I - i a.sigma`` for ``U`` in SU(2)."""
    u = np.asarray(u)
    a0 = 0.5 * np.real(np.trace(u, axis1=-2, axis2=-1))
    comps = [0.5 * np.real(1j * np.trace(u @ p, axis1=-2, axis2=-1)) for p in PAULIS]
    return np.stack([a0, *comps], axis=-1)


def to_su2(u: np.ndarray) -> np.ndarray:
    """Rescale a 2x2 unitary to unit determinant (one of the two roots)."""
    u = np.asarray(u, dtype=complex)
    return u / np.sqrt(np.linalg.det(u))
