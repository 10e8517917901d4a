"""Splitting the ZZ-coupled two-qubit problem into two single-qubit problems.

The six operators ``eps[j][a]`` (j = 1, 2; a = x, y, z) span the dynamical
algebra of ``w1 sx1/2 + w2 sx2/2 + J sz1 sz2/2`` and form two commuting
copies of su(2).  A fixed unitary ``Q`` maps the four-dimensional space onto
two 2-dimensional blocks: block ``a`` carries the first copy, block ``b`` the
second, each in the standard ``sigma/2`` representation.  Under ``Q``

    Q H1 Q^dagger = diag(Ha, Hb),
    Ha = (w1 - w2) sx/2 + J sy/2,
    Hb = (w1 + w2) sx/2 - J sy/2,

and the local target ``Rx(g1) x Rx(g2)`` becomes
``diag(Rx(g1 - g2), Rx(g1 + g2))``.  Relative block signs matter: an SU(2)
sign flip in one block alone turns the target into ``(sx x sx)`` times it, so
callers that solve the blocks separately must keep both signs consistent
(the closed-form sinusoid does so automatically because both blocks share
``upsilon*T``).

Arbitrary local targets are reached with three such stages: an XYX Euler
decomposition per qubit, with the middle (y) stage realized by running an
x-stage program at drive phase pi/2, since
``V^dagger (Rx(b1) x Rx(b2)) V = Ry(b1) x Ry(b2)`` for
``V = exp(i pi sz/4) x exp(i pi sz/4)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import I2, SX, SY, SZ, Hamiltonian2, dagger, gate_fidelity, kron, rx, ry, rz, to_su2
from .errors import ConstructionError, InvalidArgument

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class EpsilonBasis:
    """``eps[j][a]`` for ``j in (1, 2)`` and ``a in 'xyz'``, as 4x4 Hermitian matrices."""

    eps: dict = field(repr=False)

    def __getitem__(self, key):
        return self.eps[key]

    def generators(self) -> list[np.ndarray]:
        return [self.eps[j][a] for j in (1, 2) for a in AXES]


@dataclass(frozen=True)
class BlockBasis:
    Q: np.ndarray = field(repr=False)
    block_order: tuple = ("a", "b")

    def to_blocks(self, u4: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m = self.Q @ u4 @ dagger(self.Q)
        return m[:2, :2], m[2:, 2:]

    def from_blocks(self, ua: np.ndarray, ub: np.ndarray) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[:2, :2] = ua
        m[2:, 2:] = ub
        return dagger(self.Q) @ m @ self.Q

    def off_block_norm(self, op: np.ndarray) -> float:
        m = self.Q @ op @ dagger(self.Q)
        return float(np.linalg.norm(m[:2, 2:]) + np.linalg.norm(m[2:, :2]))


@dataclass(frozen=True)
class SubproblemSpec:
    """One effective single-qubit steering problem ``w(t) sx/2 + s J sy/2``."""

    control_channel: str  # "difference" (w1 - w2) or "sum" (w1 + w2)
    drift_sign: int
    target_angle: float
    horizon: float | None = None

    def __post_init__(self):
        if self.control_channel not in ("difference", "sum"):
            raise InvalidArgument(f"unknown control channel {self.control_channel!r}")
        if self.drift_sign not in (1, -1):
            raise InvalidArgument("drift_sign must be +1 or -1")
        if not np.isfinite(self.target_angle):
            raise InvalidArgument("target angle must be finite")
        if self.horizon is not None and not self.horizon > 0:
            raise InvalidArgument("fixed horizon must be positive")


@dataclass(frozen=True)
class Stage:
    phase: float
    angles: tuple[float, float]


@dataclass(frozen=True)
class StagePlan:
    stages: tuple[Stage, Stage, Stage]

    def __post_init__(self):
        if tuple(s.phase for s in self.stages) != (0.0, np.pi / 2, 0.0):
            raise InvalidArgument("stage phases must be (0, pi/2, 0)")


def _pp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


@lru_cache(maxsize=1)
def build_epsilon_basis() -> EpsilonBasis:
    sx1, sx2 = _pp(SX, I2), _pp(I2, SX)
    yy, zz = _pp(SY, SY), _pp(SZ, SZ)
    zy, yz = _pp(SZ, SY), _pp(SY, SZ)
    eps = {
        1: {"x": (sx1 - sx2) / 4, "y": (yy + zz) / 4, "z": (zy - yz) / 4},
        2: {"x": (sx1 + sx2) / 4, "y": (yy - zz) / 4, "z": (zy + yz) / 4},
    }
    for j in eps:
        for a in eps[j]:
            eps[j][a].setflags(write=False)
    return EpsilonBasis(eps)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) > np.abs(v).max() - 1e-12))
    return v * (abs(v[k]) / v[k])


def _block_vectors(basis: EpsilonBasis, j: int) -> tuple[np.ndarray, np.ndarray]:
    ex, ez = basis[j]["x"], basis[j]["z"]
    w, v = np.linalg.eigh(ez)
    # highest-weight vector of copy j is the +1/2 eigenvector of eps_z
    up = _fix_phase(v[:, int(np.argmax(w))])
    down = 2 * ex @ up
    return up, down


@lru_cache(maxsize=1)
def _cached_block_basis() -> BlockBasis:
    basis = build_epsilon_basis()
    rows = [*_block_vectors(basis, 1), *_block_vectors(basis, 2)]
    Q = np.array([np.conj(r) for r in rows])
    Q.setflags(write=False)
    bb = BlockBasis(Q)
    resid = _block_residual(basis, bb)
    if resid > 1e-10:
        raise ConstructionError(f"simultaneous block diagonalization failed, residual {resid:.3e}")
    return bb


def _block_residual(basis: EpsilonBasis, bb: BlockBasis) -> float:
    worst = float(np.linalg.norm(bb.Q @ dagger(bb.Q) - np.eye(4)))
    for j, sl in ((1, slice(0, 2)), (2, slice(2, 4))):
        for a, s in zip(AXES, (SX, SY, SZ)):
            expected = np.zeros((4, 4), dtype=complex)
            expected[sl, sl] = s / 2
            m = bb.Q @ basis[j][a] @ dagger(bb.Q)
            worst = max(worst, float(np.linalg.norm(m - expected)))
    return worst


def compute_block_basis(basis: EpsilonBasis | None = None) -> BlockBasis:
    """Unitary ``Q`` with ``Q eps[1][a] Q^dagger = diag(sigma_a/2, 0)`` and
    ``Q eps[2][a] Q^dagger = diag(0, sigma_a/2)``.

    Block vectors are built from the +1/2 eigenvector of ``eps[j]['z']``
    (phase fixed so its largest entry is real positive) and its image under
    ``2 eps[j]['x']``, which pins every generator to the Pauli form.
    """
    if basis is None or basis is build_epsilon_basis():
        return _cached_block_basis()
    rows = [*_block_vectors(basis, 1), *_block_vectors(basis, 2)]
    bb = BlockBasis(np.array([np.conj(r) for r in rows]))
    resid = _block_residual(basis, bb)
    if resid > 1e-10:
        raise ConstructionError(f"simultaneous block diagonalization failed, residual {resid:.3e}")
    return bb


def decouple_hamiltonian(omega1, omega2, J) -> tuple[Hamiltonian2, Hamiltonian2]:
    """Block Hamiltonians ``(Ha, Hb)``; inputs may be arrays."""
    return Hamiltonian2(omega1 - omega2, J), Hamiltonian2(omega1 + omega2, -J)


def subproblem_targets(gamma1: float, gamma2: float) -> tuple[float, float]:
    return gamma1 - gamma2, gamma1 + gamma2


def qubit_angles(theta_a: float, theta_b: float) -> tuple[float, float]:
    """Inverse of :func:`subproblem_targets`."""
    return (theta_a + theta_b) / 2, (theta_b - theta_a) / 2


def qubit_controls(omega_a, omega_b):
    """Per-qubit amplitudes from the difference/sum channel controls."""
    return (omega_a + omega_b) / 2, (omega_b - omega_a) / 2


def subproblems(gamma1: float, gamma2: float, horizon: float | None = None) -> tuple[SubproblemSpec, SubproblemSpec]:
    ta, tb = subproblem_targets(gamma1, gamma2)
    return (
        SubproblemSpec("difference", +1, ta, horizon),
        SubproblemSpec("sum", -1, tb, horizon),
    )


def _wrap(angle: float) -> float:
    """Map to (-pi, pi]."""
    w = float(np.mod(angle + np.pi, 2 * np.pi) - np.pi)
    return np.pi if w == -np.pi else w


def _euler_zyz(w: np.ndarray, tol: float = 1e-12) -> tuple[float, float, float]:
    w = to_su2(w)
    b = 2 * np.arctan2(abs(w[1, 0]), abs(w[0, 0]))
    if abs(w[1, 0]) < tol:
        a, b, g = 2 * np.angle(w[1, 1]), 0.0, 0.0
    elif abs(w[0, 0]) < tol:
        a, b, g = 2 * np.angle(w[1, 0]), np.pi, 0.0
    else:
        # arg w11 = (a + g)/2, arg w10 = (a - g)/2; an overall sign flip moves a by 2 pi only
        a = np.angle(w[1, 1]) + np.angle(w[1, 0])
        g = np.angle(w[1, 1]) - np.angle(w[1, 0])
    return _wrap(a), float(b), _wrap(g)


# basis changes carrying the z/y/z pattern onto x/y/x and z/x/z
_Z_TO_X = ry(np.pi / 2)  # ry(pi/2) sz ry(pi/2)^dagger = sx
_Y_TO_X = rz(-np.pi / 2)  # rz(-pi/2) sy rz(-pi/2)^dagger = sx


def euler_xyx(u: np.ndarray) -> tuple[float, float, float]:
    """Angles with ``u ~ Rx(alpha) Ry(beta) Rx(gamma)`` up to global phase.

    ``beta`` lies in ``[0, pi]``; ``alpha`` and ``gamma`` in ``(-pi, pi]``.
    At ``beta`` in {0, pi} the rotation is carried entirely by ``alpha``.
    """
    return _euler_zyz(dagger(_Z_TO_X) @ np.asarray(u, dtype=complex) @ _Z_TO_X)


def euler_zxz(u: np.ndarray) -> tuple[float, float, float]:
    """Angles with ``u ~ Rz(a1) Rx(a2) Rz(a3)`` up to global phase, ``a2`` in ``[0, pi]``."""
    return _euler_zyz(dagger(_Y_TO_X) @ np.asarray(u, dtype=complex) @ _Y_TO_X)


def xyx(alpha: float, beta: float, gamma: float) -> np.ndarray:
    return rx(alpha) @ ry(beta) @ rx(gamma)


def zxz(a1: float, a2: float, a3: float) -> np.ndarray:
    return rz(a1) @ rx(a2) @ rz(a3)


def stage_plan(k1: tuple[np.ndarray, np.ndarray]) -> StagePlan:
    """Three-stage schedule reproducing ``k1[0] x k1[1]`` up to global phase.

    Stage 1 applies ``Rx(g1) x Rx(g2)`` at phase 0, stage 2 the y rotations
    at phase pi/2 and stage 3 ``Rx(a1) x Rx(a2)`` at phase 0.
    """
    (a1, b1, g1), (a2, b2, g2) = euler_xyx(k1[0]), euler_xyx(k1[1])
    return StagePlan(
        (
            Stage(0.0, (g1, g2)),
            Stage(np.pi / 2, (b1, b2)),
            Stage(0.0, (a1, a2)),
        )
    )


def stage_unitary(stage: Stage) -> np.ndarray:
    a1, a2 = stage.angles
    if stage.phase == 0.0:
        return kron(rx(a1), rx(a2))
    return kron(ry(a1), ry(a2))


def plan_unitary(plan: StagePlan) -> np.ndarray:
    u = np.eye(4, dtype=complex)
    for stage in plan.stages:
        u = stage_unitary(stage) @ u
    return u


def phase_frame() -> np.ndarray:
    """``V = exp(i pi sz/4) x exp(i pi sz/4)`` so that ``H2 = V^dagger H1 V``."""
    v = rz(-np.pi / 2)
    return kron(v, v)


def local_target(k1: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    return kron(np.asarray(k1[0]), np.asarray(k1[1]))


def plan_fidelity(plan: StagePlan, k1) -> float:
    return gate_fidelity(plan_unitary(plan), local_target(k1))
