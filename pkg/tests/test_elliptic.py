import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import ellipj, ellipk

from pulseforge.elliptic import cn_waveform, jacobi_cn, jacobi_dn, jacobi_sn, jacobi_sncndn, quarter_period
from pulseforge.errors import InvalidArgument

# K(0.5) by adaptive quadrature of int_0^{pi/2} (1 - k^2 sin^2)^{-1/2}
K_HALF_GOLDEN = 1.6857503548125963
KS = np.arange(0.0, 0.95, 0.1)


def _quad_K(k):
    return quad(lambda th: 1 / np.sqrt(1 - (k * np.sin(th)) ** 2), 0, np.pi / 2, epsabs=1e-15, epsrel=1e-13)[0]


def test_quarter_period_examples():
    assert quarter_period(0.0) == pytest.approx(np.pi / 2, abs=1e-15)
    assert quarter_period(0.5) == pytest.approx(K_HALF_GOLDEN, rel=1e-12)
    for k in (0.1, 0.5, 0.9, 0.99):
        assert quarter_period(k) == pytest.approx(_quad_K(k), rel=1e-12)
    with pytest.raises(InvalidArgument):
        quarter_period(1.0)


def test_quarter_period_increasing():
    vals = [quarter_period(k) for k in np.linspace(0, 0.999, 200)]
    assert np.all(np.diff(vals) > 0)


def test_cn_examples():
    for k in KS:
        assert jacobi_cn(0.0, k) == pytest.approx(1.0, abs=1e-15)
        assert abs(jacobi_cn(quarter_period(k), k)) <= 1e-12
    u = np.linspace(-10, 10, 101)
    assert np.allclose(jacobi_cn(u, 0.0), np.cos(u), atol=1e-15)


def test_identities_and_periodicity():
    for k in KS:
        K = quarter_period(k)
        u = np.linspace(-4 * K, 4 * K, 801)
        sn, cn, dn = jacobi_sncndn(u, k)
        assert np.abs(sn**2 + cn**2 - 1).max() <= 1e-10
        assert np.abs(dn**2 - (1 - k * k * sn**2)).max() <= 1e-10
        assert np.abs(jacobi_cn(u + 4 * K, k) - cn).max() <= 1e-9


def test_against_scipy_ellipj():
    for k in (0.0, 0.2, 0.6, 0.9, 0.999):
        K = quarter_period(k)
        u = np.linspace(-8 * K, 8 * K, 1001)
        sn, cn, dn, _ = ellipj(u, k * k)
        assert np.abs(jacobi_sn(u, k) - sn).max() <= 1e-10
        assert np.abs(jacobi_cn(u, k) - cn).max() <= 1e-10
        assert np.abs(jacobi_dn(u, k) - dn).max() <= 1e-10
        assert K == pytest.approx(ellipk(k * k), rel=1e-12)


@given(st.floats(0, 0.99), st.floats(-30, 30))
def test_cn_bounded_and_even(k, u):
    c = jacobi_cn(u, k)
    assert -1 - 1e-12 <= c <= 1 + 1e-12
    assert c == pytest.approx(jacobi_cn(-u, k), abs=1e-12)


def test_small_modulus_fast_path_is_continuous():
    u = np.linspace(0, 20, 50)
    assert np.abs(jacobi_cn(u, 0.9e-7) - jacobi_cn(u, 1.1e-7)).max() <= 1e-12


def test_waveform_solves_the_cubic_oscillator():
    """w = 2bk cn(bt+f, k) obeys w'' = b^2 (2k^2 - 1) w - w^3/2."""
    for b, f, k in ((200.0, 0.3, 0.25), (150.0, -1.0, 0.7), (50.0, 2.0, 0.05)):
        h = 1e-3 / b
        t = np.linspace(0, 0.05, 400)
        w = cn_waveform(t, b, f, k)
        wdd = (cn_waveform(t + h, b, f, k) - 2 * w + cn_waveform(t - h, b, f, k)) / h**2
        rhs = b * b * (2 * k * k - 1) * w - w**3 / 2
        assert np.abs(wdd - rhs).max() <= 1e-5 * np.abs(wdd).max()
