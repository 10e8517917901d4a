import numpy as np
import pytest

from pulseforge.errors import InvalidArgument
from pulseforge.synth.program import (
    PulseProgram,
    energy_cost,
    identity_program,
    qubit_energies,
    sample_times,
    segments,
    subproblem_propagator,
    total_duration,
    waveform_energy,
)
from pulseforge.synth.waveforms import EllipticCn, PiecewiseConstant, Sinusoid, Zero, channel_mix


def test_energy_examples():
    T = 2.0
    assert waveform_energy(PiecewiseConstant((3.0,)), T) == pytest.approx(9.0, rel=1e-12)
    # A^2 T / 4 over whole periods
    assert waveform_energy(Sinusoid(4.0, np.pi), T) == pytest.approx(8.0, rel=1e-8)
    assert waveform_energy(Zero(), T) == 0.0
    # jumps are integrated exactly
    w = PiecewiseConstant((1.0, -2.0), (0.5,))
    assert waveform_energy(w, 1.0) == pytest.approx(0.5 * (0.5 + 2.0), rel=1e-12)


def test_program_energy_and_duration():
    p1 = PulseProgram(PiecewiseConstant((2.0,)), Zero(), 1.0)
    p2 = PulseProgram(Zero(), PiecewiseConstant((1.0,)), 3.0, np.pi / 2)
    assert qubit_energies([p1, p2]) == pytest.approx((2.0, 1.5))
    assert energy_cost([p1, p2]) == pytest.approx(3.5)
    assert total_duration([p1, p2]) == 4.0
    assert identity_program().duration == 0.0


def test_program_validation():
    with pytest.raises(InvalidArgument):
        PulseProgram(Zero(), Zero(), -1.0)
    with pytest.raises(InvalidArgument):
        PulseProgram(Zero(), Zero(), np.inf)


def test_sample_times():
    t = sample_times(0.0105, 1000.0)
    assert t[0] == 0.0 and t[-1] == 0.0105
    assert len(t) == 12
    assert np.allclose(np.diff(t[:-1]), 1e-3)
    assert sample_times(0.01, 1000.0).tolist() == pytest.approx(np.arange(11) / 1000)
    with pytest.raises(InvalidArgument):
        sample_times(1.0, 0.0)


def test_segments():
    assert segments(1.0, (0.25, 0.5)) == [(0.0, 0.25), (0.25, 0.5), (0.5, 1.0)]
    assert segments(1.0, (0.0, 1.0, 2.0)) == [(0.0, 1.0)]


def test_waveforms_evaluate():
    t = np.linspace(0, 1, 7)
    assert np.allclose(Sinusoid(2.0, 3.0, 0.5)(t), 2 * np.cos(3 * t + 0.5))
    assert np.allclose(EllipticCn(3.0, 0.0, 0.0)(t), 0.0)
    w = PiecewiseConstant((1.0, 2.0, 3.0), (0.2, 0.6))
    assert w([0.0, 0.2, 0.5, 0.6, 0.9]).tolist() == [1.0, 2.0, 2.0, 3.0, 3.0]
    assert w.breakpoints(0.5) == (0.2,)
    with pytest.raises(ValueError):
        PiecewiseConstant((1.0,), (0.5,))


def test_channel_mix():
    a, b = Sinusoid(2.0, 1.0), Sinusoid(4.0, 1.0)
    w1, w2 = channel_mix(a, b)
    t = np.linspace(0, 3, 11)
    assert np.allclose(w1(t), (a(t) + b(t)) / 2)
    assert np.allclose(w2(t), (b(t) - a(t)) / 2)
    w1, w2 = channel_mix(a, a)
    assert isinstance(w2, Zero)
    assert np.allclose(w1(t), a(t))
    w1, w2 = channel_mix(Zero(), Zero())
    assert np.allclose(w1(t), 0) and np.allclose(w2(t), 0)


def test_subproblem_propagator_constant_control():
    # w constant, J = 0: exactly Rx(w T)
    from pulseforge.algebra import rx

    U = subproblem_propagator(PiecewiseConstant((0.7,)), 0.0, 2.0, 1)
    assert np.allclose(U, rx(1.4), atol=1e-14)
    U = subproblem_propagator(PiecewiseConstant((1.0, -1.0), (1.0,)), 0.0, 2.0, 2)
    assert np.allclose(U, np.eye(2), atol=1e-14)
