"""Jacobi elliptic functions of real argument via the arithmetic-geometric mean.

The modulus ``k`` is used throughout (not the parameter ``m = k**2``), so
``cn(u, k)`` solves ``y'' = (2k^2 - 1) y - 2k^2 y^3`` with ``y(0) = 1``.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidArgument

SMALL_K = 1e-7


def _check_modulus(k: float) -> float:
    k = float(k)
    if not 0.0 <= k < 1.0:
        raise InvalidArgument(f"modulus must lie in [0, 1), got {k!r}")
    return k


def _agm_table(k: float):
    a, b, c = [1.0], [math.sqrt((1.0 - k) * (1.0 + k))], [k]
    while abs(c[-1]) > 1e-17 * a[-1] and len(a) < 64:
        an, bn = a[-1], b[-1]
        a.append(0.5 * (an + bn))
        b.append(math.sqrt(an * bn))
        c.append(0.5 * (an - bn))
    return a, b, c


def quarter_period(k: float) -> float:
    """Complete elliptic integral of the first kind, ``K(k) = pi / (2 AGM(1, k'))``."""
    k = _check_modulus(k)
    a, _, _ = _agm_table(k)
    return math.pi / (2.0 * a[-1])


def _amplitude(u: np.ndarray, k: float) -> np.ndarray:
    a, _, c = _agm_table(k)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    return phi


def jacobi_sncndn(u, k: float):
    """``(sn, cn, dn)`` at real ``u`` (scalar or array) for modulus ``k``."""
    k = _check_modulus(k)
    u = np.asarray(u, dtype=float)
    if k < SMALL_K:
        return np.sin(u), np.cos(u), np.ones_like(u)
    phi = _amplitude(u, k)
    sn = np.sin(phi)
    return sn, np.cos(phi), np.sqrt(1.0 - (k * sn) ** 2)


def jacobi_cn(u, k: float):
    return jacobi_sncndn(u, k)[1]


def jacobi_sn(u, k: float):
    return jacobi_sncndn(u, k)[0]


def jacobi_dn(u, k: float):
    return jacobi_sncndn(u, k)[2]


def cn_waveform(t, b: float, f: float, k: float):
    """Minimum-energy control shape ``2 b k cn(b t + f, k)``."""
    return 2.0 * b * k * jacobi_cn(b * np.asarray(t, dtype=float) + f, k)
