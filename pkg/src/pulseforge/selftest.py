"""Fast invariant checks behind ``pulseforge selftest`` (a few seconds)."""
from __future__ import annotations

import numpy as np

from .algebra import Hamiltonian2, Hamiltonian4Params, gate_fidelity, is_unitary, kron, propagate2, propagate4, rx
from .decouple import build_epsilon_basis, compute_block_basis, euler_xyx, xyx
from .elliptic import jacobi_sncndn, quarter_period
from .liepoisson import casimirs, integrate_costate, relative_drift
from .synth.sinusoid import approx_params, approx_two_qubit
from .verify import locality_residual, simulate_program


def _commutators():
    eps = build_epsilon_basis()
    e1, e2 = eps.generators()[:3], eps.generators()[3:]
    err = 0.0
    for e in (e1, e2):
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            err = max(err, np.abs(e[i] @ e[j] - e[j] @ e[i] - 1j * e[k]).max())
    cross = max(np.abs(a @ b - b @ a).max() for a in e1 for b in e2)
    return max(err, cross) <= 1e-13, f"max error {max(err, cross):.1e}"


def _blocks():
    rng = np.random.default_rng(0)
    bb = compute_block_basis()
    J = 200.0
    c = rng.normal(size=(2, 3))

    def w(t, k):
        return 80 * (c[k, 0] + c[k, 1] * np.cos(300 * t) + c[k, 2] * np.sin(170 * t))

    T = 0.02
    U = propagate4(lambda t: Hamiltonian4Params(w(t, 0), w(t, 1), 0.0, 0.0, J), T, 4096)
    Ua = propagate2(lambda t: Hamiltonian2(w(t, 0) - w(t, 1), J), T, 4096)
    Ub = propagate2(lambda t: Hamiltonian2(w(t, 0) + w(t, 1), -J), T, 4096)
    err = np.linalg.norm(U - bb.from_blocks(Ua, Ub))
    return err <= 1e-8, f"||U - Q^dag diag(Ua, Ub) Q|| = {err:.1e}"


def _euler():
    rng = np.random.default_rng(1)
    worst = 1.0
    for _ in range(50):
        a = rng.normal(size=3)
        u = xyx(*a)
        worst = min(worst, gate_fidelity(xyx(*euler_xyx(u)), u))
    return worst >= 1 - 1e-10, f"min round-trip fidelity {worst:.15f}"


def _elliptic():
    err = 0.0
    for k in np.arange(0, 1.0, 0.1):
        K = quarter_period(k)
        u = np.linspace(-4 * K, 4 * K, 201)
        sn, cn, dn = jacobi_sncndn(u, k)
        cn4 = jacobi_sncndn(u + 4 * K, k)[1]
        err = max(err, np.abs(sn**2 + cn**2 - 1).max(), np.abs(dn**2 - 1 + k * k * sn**2).max(), np.abs(cn4 - cn).max())
    return err <= 1e-10, f"max identity error {err:.1e}"


def _casimirs():
    rng = np.random.default_rng(2)
    p0 = rng.normal(size=(20, 3))
    traj = integrate_costate(p0, lambda t: 50 * np.cos(90 * t) + 20, 30.0, 1.0, 10000)
    c1, _ = casimirs(traj.p, 30.0)
    d = relative_drift(c1).max()
    return d <= 1e-9, f"C1 relative drift {d:.1e}"


def _worked_example():
    prog = approx_two_qubit(np.pi / 2, 0.0, 200.0)
    U = simulate_program(prog, 200.0)
    f = gate_fidelity(U, kron(rx(np.pi / 2), np.eye(2)))
    res, _ = locality_residual(U)
    p = approx_params(np.pi / 2, 200.0)
    # n = 1 leaves a residual near sqrt(1 - F^2), about 0.045
    ok = f >= 0.99 and abs(res - np.sqrt(1 - f * f)) <= 1e-3 and is_unitary(U, 1e-9) and p.A == 100.0
    return ok, f"fidelity {f:.10f}, residual {res:.1e}"


CHECKS = (
    ("epsilon commutators", _commutators),
    ("block decoupling", _blocks),
    ("XYX round trip", _euler),
    ("Jacobi identities", _elliptic),
    ("Casimir C1 conservation", _casimirs),
    ("worked example", _worked_example),
)


def run_selftest() -> int:
    failed = 0
    for name, check in CHECKS:
        ok, detail = check()
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if failed == 0 else 1
