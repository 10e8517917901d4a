import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from pulseforge.algebra import (
    I2,
    I4,
    SX,
    SY,
    SZ,
    Hamiltonian2,
    Hamiltonian4Params,
    expm_su2,
    gate_fidelity,
    hermitian_step_exponentials,
    is_unitary,
    kron,
    ordered_product,
    pauli_components,
    propagate2,
    propagate4,
    rx,
    su2_step_exponentials,
    unitarity_defect,
)
from pulseforge.errors import IntegrationError, InvalidArgument

from .conftest import random_su2

# fidelity of the worked-example sinusoid on one block, from DOP853 (rtol 1e-13)
# and from Richardson extrapolation of the midpoint rule; both give this value
SUBPROBLEM_GOLDEN = 0.9989877169444366

angles = st.floats(-20, 20, allow_nan=False)
unit = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(lambda v: np.linalg.norm(v) > 1e-3)


def test_expm_su2_identity_and_closed_forms():
    assert np.allclose(expm_su2([0.3, 0.1, 0.2], 0.0), I2)
    assert np.allclose(expm_su2([1, 0, 0], np.pi), -1j * SX, atol=1e-15)
    n = np.array([1, 1, 0]) / np.sqrt(2)
    want = np.cos(np.pi / 4) * I2 - 1j * np.sin(np.pi / 4) * (SX + SY) / np.sqrt(2)
    assert np.allclose(expm_su2(n, np.pi / 2), want, atol=1e-15)


def test_expm_su2_rejects_non_unit_axis():
    with pytest.raises(InvalidArgument):
        expm_su2([1, 1, 0], 0.5)


@given(unit, angles)
def test_expm_su2_matches_scipy(axis, theta):
    n = np.asarray(axis) / np.linalg.norm(axis)
    want = expm(-0.5j * theta * (n[0] * SX + n[1] * SY + n[2] * SZ))
    got = expm_su2(n, theta)
    assert np.allclose(got, want, atol=1e-12)
    assert unitarity_defect(got) <= 1e-10
    assert abs(abs(np.linalg.det(got)) - 1) <= 1e-12


@given(st.floats(-500, 500), st.floats(-500, 500), st.floats(-500, 500), st.floats(0, 0.1))
def test_su2_step_matches_scipy(cx, cy, cz, dt):
    want = expm(-1j * dt * Hamiltonian2(cx, cy, cz).matrix())
    assert np.allclose(su2_step_exponentials(cx, cy, cz, dt), want, atol=1e-12)


def test_hermitian_step_matches_scipy(rng):
    for _ in range(20):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (a + a.conj().T) * 50
        dt = rng.uniform(0, 0.05)
        assert np.allclose(hermitian_step_exponentials(h, dt), expm(-1j * h * dt), atol=1e-11)


def test_ordered_product_applies_later_factors_on_the_left(rng):
    mats = np.stack([random_su2(rng) for _ in range(7)])
    want = I2
    for m in mats:
        want = m @ want
    assert np.allclose(ordered_product(mats), want, atol=1e-14)


def test_propagate2_constant_hamiltonians():
    assert np.allclose(propagate2(lambda t: Hamiltonian2(3.0, 0.0), 0.7, 5), rx(2.1), atol=1e-14)
    assert np.allclose(propagate2(lambda t: Hamiltonian2(0.0, 200.0), 0.01, 3), expm(-0.5j * 2.0 * SY), atol=1e-14)


def test_propagate2_reports_offending_time():
    def bad(t):
        return Hamiltonian2(np.where(t > 0.5, np.nan, 1.0), 0.0)

    with pytest.raises(IntegrationError) as err:
        propagate2(bad, 1.0, 10)
    assert err.value.t == pytest.approx(0.55)


def test_propagate2_regression_against_oracle():
    f = gate_fidelity(propagate2(lambda t: Hamiltonian2(100 * np.cos(200 * t), 200.0), np.pi / 100, 2**14), rx(np.pi / 2))
    assert f == pytest.approx(SUBPROBLEM_GOLDEN, abs=1e-9)


def test_second_order_convergence():
    h = lambda t: Hamiltonian2(150 * np.cos(170 * t) + 30, 200.0, 40 * np.sin(90 * t))  # noqa: E731
    ref = propagate2(h, 0.03, 2**15)
    e1 = np.linalg.norm(propagate2(h, 0.03, 64) - ref)
    e2 = np.linalg.norm(propagate2(h, 0.03, 128) - ref)
    assert e1 / e2 >= 3.5


def test_unitarity_after_many_steps():
    U = propagate4(lambda t: Hamiltonian4Params(300 * np.cos(50 * t), 80 * np.sin(120 * t), 0.3, 1.1, 200.0), 0.05, 10**4)
    assert np.linalg.norm(U.conj().T @ U - I4) <= 1e-9


def test_piecewise_constant_matches_exact_product():
    levels, durs = [120.0, -40.0, 300.0], [0.01, 0.005, 0.0025]
    exact = I2
    for w, d in zip(levels, durs):
        exact = su2_step_exponentials(w, 200.0, 0.0, d) @ exact
    T = sum(durs)
    edges = np.cumsum(durs)

    def sampler(t):
        return Hamiltonian2(np.asarray(levels)[np.searchsorted(edges, t)], 200.0)

    U = propagate2(sampler, T, 70)  # 40 + 20 + 10 steps align with the segments
    assert np.linalg.norm(U - exact) <= 1e-12


def test_propagate4_pure_drift_full_turn_is_minus_identity():
    U = propagate4(lambda t: Hamiltonian4Params(0.0, 0.0, 0.0, 0.0, 200.0), 2 * np.pi / 200, 8)
    assert np.allclose(U, -I4, atol=1e-13)


def test_propagate4_matches_scipy_on_constant_controls():
    p = Hamiltonian4Params(70.0, -20.0, 0.4, 2.0, 200.0)
    U = propagate4(lambda t: p, 0.013, 4)
    assert np.allclose(U, expm(-1j * 0.013 * p.matrix()), atol=1e-12)


def test_hamiltonian4_matrix_terms():
    m = Hamiltonian4Params(2.0, 4.0, np.pi / 2, 0.0, 6.0).matrix()
    want = kron(SY, I2) + 2 * kron(I2, SX) + 3 * kron(SZ, SZ)
    assert np.allclose(m, want, atol=1e-15)


def test_gate_fidelity_examples(rng):
    U = random_su2(rng)
    assert gate_fidelity(U, U) == pytest.approx(1.0, abs=1e-15)
    assert gate_fidelity(U, np.exp(0.7j) * U) == pytest.approx(1.0, abs=1e-15)
    assert gate_fidelity(I2, SX) == 0.0
    with pytest.raises(InvalidArgument):
        gate_fidelity(I2, I4)


@given(st.floats(0, 2 * np.pi))
def test_gate_fidelity_phase_invariance_on_d4(phi):
    rng = np.random.default_rng(3)
    U = kron(random_su2(rng), random_su2(rng))
    V = kron(random_su2(rng), random_su2(rng))
    assert gate_fidelity(U, np.exp(1j * phi) * V) == pytest.approx(gate_fidelity(U, V), abs=1e-14)


def test_pauli_components_roundtrip(rng):
    U = random_su2(rng)
    a0, ax, ay, az = pauli_components(U)
    assert np.allclose(a0 * I2 - 1j * (ax * SX + ay * SY + az * SZ), U, atol=1e-15)
    assert is_unitary(U)
