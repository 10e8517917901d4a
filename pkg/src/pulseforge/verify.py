"""Ground-truth checks on the full two-qubit Hamiltonian."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import I4, Hamiltonian4Params, gate_fidelity, hermitian_step_exponentials, ordered_product, propagate4
from .errors import IntegrationError, InvalidArgument
from .synth.program import PulseProgram, as_programs, qubit_energies, segments, total_duration

DEFAULT_STEPS = 2**14
SCHEMA = 1


def simulate_program(program, J: float, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """4x4 propagator of one program or of a list of stages applied in order.

    Each stage gets ``steps`` midpoint steps, distributed over the pieces
    between waveform jumps.
    """
    U = I4.copy()
    for i, prog in enumerate(as_programs(program)):
        if prog.duration == 0:
            continue
        sampler = prog.hamiltonian(J)
        try:
            for a, b in segments(prog.duration, prog.breakpoints()):
                n = max(int(round(steps * (b - a) / prog.duration)), 1)
                U = propagate4(lambda t, a=a: sampler(t + a), b - a, n) @ U
        except IntegrationError as exc:
            raise IntegrationError(f"stage {i}: {exc}", t=exc.t, stage=i) from exc
    return U


def simulate_samples(t, omega1, omega2, phi1, phi2, J: float, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """4x4 propagator of a sampled pulse table, linear between rows.

    Rows sharing a time stamp mark jumps (stage boundaries or switches) and
    contribute no evolution.  About ``steps`` midpoint steps are spread over
    the table in proportion to interval length.
    """
    t = np.asarray(t, dtype=float)
    cols = [np.asarray(c, dtype=float) for c in (omega1, omega2, phi1, phi2)]
    if t.ndim != 1 or any(c.shape != t.shape for c in cols):
        raise InvalidArgument("sample columns must be 1-D and of equal length")
    if np.any(np.diff(t) < 0):
        raise InvalidArgument("sample times must be non-decreasing")
    dt = np.diff(t)
    keep = np.flatnonzero(dt > 0)
    if keep.size == 0:
        return I4.copy()
    total = t[-1] - t[0]
    sub = np.maximum(np.ceil(steps * dt[keep] / total).astype(int), 1)
    idx = np.repeat(keep, sub)
    k = np.concatenate([np.arange(m) for m in sub])
    frac = (k + 0.5) / np.repeat(sub, sub)
    h = np.repeat(dt[keep] / sub, sub)
    lerp = [c[idx] + frac * (c[idx + 1] - c[idx]) for c in cols]
    bad = ~np.all([np.isfinite(c) for c in lerp], axis=0)
    if bad.any():
        tb = float(t[idx][np.argmax(bad)])
        raise IntegrationError(f"non-finite sample near t={tb!r}", t=tb)
    H = Hamiltonian4Params(*lerp, J).matrix()
    return ordered_product(hermitian_step_exponentials(H, h))


def _polar(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def realign(U: np.ndarray) -> np.ndarray:
    """``M[(i,k),(j,l)] = U[(i,j),(k,l)]``; rank one iff ``U`` is a tensor product."""
    return np.asarray(U).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def locality_residual(U: np.ndarray) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """``s2/s1`` of the realigned matrix and the nearest product ``A x B``."""
    u, s, vh = np.linalg.svd(realign(U))
    A = _polar((u[:, 0] * np.sqrt(s[0])).reshape(2, 2))
    B = _polar((vh[0] * np.sqrt(s[0])).reshape(2, 2))
    return float(s[1] / s[0]), (A, B)


@dataclass(frozen=True)
class SynthesisReport:
    """Everything a run reports; round-trips through JSON bit-exactly.

    ``target`` holds the two 2x2 factors as ``[[re, im], ...]`` rows.
    """

    target: dict
    strategy: str
    J: float
    fidelity: float
    duration: float
    energy: list
    locality_residual: float
    stages: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    status: str = "ok"
    schema: int = SCHEMA

    def __post_init__(self):
        if not 0.0 <= self.fidelity <= 1.0 + 1e-12:
            raise InvalidArgument(f"fidelity out of range: {self.fidelity!r}")
        if not self.locality_residual >= 0:
            raise InvalidArgument("locality residual must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        return {"schema": d.pop("schema"), **d}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "SynthesisReport":
        if d.get("schema") != SCHEMA:
            raise InvalidArgument(f"unsupported report schema {d.get('schema')!r}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "SynthesisReport":
        return cls.from_dict(json.loads(text))


def encode_matrix(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def decode_matrix(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def stage_record(prog: PulseProgram) -> dict:
    return _jsonable(
        {
            "label": prog.label,
            "phase": prog.phase,
            "duration": prog.duration,
            "omega1": prog.omega1.describe(),
            "omega2": prog.omega2.describe(),
            "meta": prog.meta,
        }
    )


def make_report(target, program, J: float, strategy: str = "", steps: int = DEFAULT_STEPS, parameters: dict | None = None) -> SynthesisReport:
    """Simulate, then collect fidelity, duration, energy and locality."""
    A, B = (np.asarray(m, dtype=complex) for m in target)
    U = simulate_program(program, J, steps)
    fid = min(gate_fidelity(U, np.kron(A, B)), 1.0)
    res, _ = locality_residual(U)
    progs = as_programs(program)
    return SynthesisReport(
        target={"qubit1": encode_matrix(A), "qubit2": encode_matrix(B)},
        strategy=strategy,
        J=float(J),
        fidelity=float(fid),
        duration=total_duration(progs),
        energy=[float(e) for e in qubit_energies(progs)],
        locality_residual=res,
        stages=[stage_record(p) for p in progs],
        parameters=_jsonable(parameters or {}),
    )

