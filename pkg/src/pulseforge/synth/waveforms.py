"""Parametric control amplitudes ``t -> w(t)`` (rad/s), local stage time."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..elliptic import cn_waveform


class Waveform:
    """Base class. Subclasses are vectorized callables with a ``describe`` record."""

    kind = "waveform"

    def __call__(self, t):
        raise NotImplementedError

    def breakpoints(self, T: float) -> tuple[float, ...]:
        """Interior points of ``(0, T)`` where the waveform may jump."""
        return ()

    def describe(self) -> dict:
        raise NotImplementedError

    def __add__(self, other: "Waveform") -> "Waveform":
        return Combination(((1.0, self), (1.0, other)))

    def __sub__(self, other: "Waveform") -> "Waveform":
        return Combination(((1.0, self), (-1.0, other)))

    def scaled(self, c: float) -> "Waveform":
        return Combination(((c, self),))


@dataclass(frozen=True)
class Zero(Waveform):
    kind = "zero"

    def __call__(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def describe(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Sinusoid(Waveform):
    """``A cos(upsilon t + psi)``."""

    A: float
    upsilon: float
    psi: float = 0.0
    kind = "sinusoid"

    def __call__(self, t):
        return self.A * np.cos(self.upsilon * np.asarray(t, dtype=float) + self.psi)

    def describe(self):
        return {"kind": self.kind, "A": float(self.A), "upsilon": float(self.upsilon), "psi": float(self.psi)}


@dataclass(frozen=True)
class EllipticCn(Waveform):
    """``2 b k cn(b t + f, k)``."""

    b: float
    f: float
    k: float
    kind = "elliptic_cn"

    def __call__(self, t):
        return cn_waveform(t, self.b, self.f, self.k)

    def describe(self):
        return {"kind": self.kind, "b": float(self.b), "f": float(self.f), "k": float(self.k)}


@dataclass(frozen=True)
class PiecewiseConstant(Waveform):
    """``levels[i]`` on ``[switch_times[i-1], switch_times[i])``."""

    levels: tuple
    switch_times: tuple = ()
    kind = "piecewise_constant"

    def __post_init__(self):
        if len(self.levels) != len(self.switch_times) + 1:
            raise ValueError("need one more level than switch times")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(np.asarray(self.switch_times, dtype=float), t, side="right")
        return np.asarray(self.levels, dtype=float)[idx]

    def breakpoints(self, T):
        return tuple(float(s) for s in self.switch_times if 0.0 < s < T)

    def describe(self):
        return {"kind": self.kind, "levels": [float(v) for v in self.levels], "switch_times": [float(s) for s in self.switch_times]}


@dataclass(frozen=True, eq=False)
class Sampled(Waveform):
    """Linear interpolation through ``(t, values)`` samples."""

    t: np.ndarray
    values: np.ndarray
    kind = "sampled"

    def __call__(self, t):
        return np.interp(np.asarray(t, dtype=float), self.t, self.values)

    def describe(self):
        return {"kind": self.kind, "n_samples": int(len(self.t))}


@dataclass(frozen=True)
class Combination(Waveform):
    terms: tuple = field(default_factory=tuple)
    kind = "combination"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for c, w in self.terms:
            out = out + c * w(t)
        return out

    def breakpoints(self, T):
        pts = sorted({p for _, w in self.terms for p in w.breakpoints(T)})
        return tuple(pts)

    def describe(self):
        return {"kind": self.kind, "terms": [{"coef": float(c), **w.describe()} for c, w in self.terms]}


def channel_mix(omega_a: Waveform, omega_b: Waveform) -> tuple[Waveform, Waveform]:
    """Qubit amplitudes ``((wa + wb)/2, (wb - wa)/2)`` from the block controls."""
    za, zb = isinstance(omega_a, Zero), isinstance(omega_b, Zero)
    if za and zb:
        return Zero(), Zero()
    if za:
        return omega_b.scaled(0.5), omega_b.scaled(0.5)
    if zb:
        return omega_a.scaled(0.5), omega_a.scaled(-0.5)
    if omega_a == omega_b:
        return omega_a, Zero()
    return (
        Combination(((0.5, omega_a), (0.5, omega_b))),
        Combination(((-0.5, omega_a), (0.5, omega_b))),
    )
