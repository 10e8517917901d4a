"""Run configuration: a flat ``key = value`` text format.

Grammar
-------
* one ``key = value`` per line; blank lines and lines starting with ``#`` or
  ``;`` are ignored; keys are case-sensitive and may appear once;
* angles and amplitudes accept arithmetic on numbers and ``pi``
  (``pi/2``, ``-3*pi/4``, ``0.25``); matrix entries may also use ``j``,
  ``sqrt``, ``exp``, ``cos`` and ``sin``;
* a target is given by exactly one of

  - ``gamma1``, ``gamma2``: single-stage x rotations ``Rx(gamma1) x Rx(gamma2)``,
  - ``euler1``, ``euler2``: XYX triples ``alpha, beta, gamma`` per qubit,
  - ``unitary1``, ``unitary2``: 2x2 matrices written ``a, b; c, d``.

Keys and defaults::

    J            required, rad/s, > 0
    strategy     optimized   (approximate | optimized | min-energy | bang-bang)
    n            1
    omega_min    -5 J        bang-bang lower bound (rad/s)
    omega_max    +5 J
    sample_rate  100000      pulse CSV samples per second
    steps        16384       integrator steps per stage
    seed         0
    threshold    0.999       minimum d=4 fidelity for exit status 0
    pulses       pulses.csv
    report       report.json
    plot         plot.csv
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, replace

import numpy as np

from .algebra import is_unitary, rx
from .decouple import xyx
from .errors import ConfigError
from .synth.stages import STRATEGIES

TARGET_FORMS = {"angles": ("gamma1", "gamma2"), "euler": ("euler1", "euler2"), "unitary": ("unitary1", "unitary2")}
KNOWN_KEYS = {
    "J",
    "strategy",
    "n",
    "omega_min",
    "omega_max",
    "sample_rate",
    "steps",
    "seed",
    "threshold",
    "pulses",
    "report",
    "plot",
    *(k for pair in TARGET_FORMS.values() for k in pair),
}


@dataclass(frozen=True)
class RunConfig:
    J: float
    target_form: str
    target: tuple  # (g1, g2), two XYX triples, or two 2x2 matrices
    strategy: str = "optimized"
    n: int = 1
    omega_min: float | None = None
    omega_max: float | None = None
    sample_rate: float = 1e5
    steps: int = 2**14
    seed: int = 0
    threshold: float = 0.999
    pulses: str = "pulses.csv"
    report: str = "report.json"
    plot: str = "plot.csv"

    def bounds(self) -> tuple[float, float]:
        lo = -5.0 * self.J if self.omega_min is None else self.omega_min
        hi = 5.0 * self.J if self.omega_max is None else self.omega_max
        return lo, hi

    def target_unitaries(self) -> tuple[np.ndarray, np.ndarray]:
        if self.target_form == "angles":
            return rx(self.target[0]), rx(self.target[1])
        if self.target_form == "euler":
            return xyx(*self.target[0]), xyx(*self.target[1])
        return tuple(np.asarray(m, dtype=complex) for m in self.target)

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sqrt": np.lib.scimath.sqrt, "exp": np.exp, "cos": np.cos, "sin": np.sin}


def _eval(node, allow_complex: bool):
    if isinstance(node, ast.Expression):
        return _eval(node.body, allow_complex)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.Constant) and isinstance(node.value, complex) and allow_complex:
        return node.value
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left, allow_complex), _eval(node.right, allow_complex))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval(node.operand, allow_complex))
    if allow_complex and isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
        return complex(_FUNCS[node.func.id](_eval(node.args[0], allow_complex)))
    raise ValueError("unsupported expression")


def parse_number(text: str, allow_complex: bool = False):
    """Evaluate a restricted arithmetic expression (no names but ``pi``)."""
    try:
        value = _eval(ast.parse(text.strip(), mode="eval"), allow_complex)
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError, TypeError) as exc:
        raise ValueError(f"malformed number {text.strip()!r}") from exc
    if not np.isfinite(value):
        raise ValueError(f"non-finite number {text.strip()!r}")
    return value


def _real(key, text, line):
    try:
        return float(parse_number(text))
    except ValueError as exc:
        raise ConfigError(str(exc), key, line) from None


def _integer(key, text, line):
    try:
        v = int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, got {text.strip()!r}", key, line) from None
    return v


def _triple(key, text, line):
    parts = [p for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError("expected three comma-separated angles", key, line)
    return tuple(_real(key, p, line) for p in parts)


def _matrix(key, text, line):
    rows = [r for r in text.split(";")]
    if len(rows) != 2:
        raise ConfigError("expected two rows separated by ';'", key, line)
    out = []
    for r in rows:
        cells = r.split(",")
        if len(cells) != 2:
            raise ConfigError("expected two comma-separated entries per row", key, line)
        try:
            out.append([complex(parse_number(c, allow_complex=True)) for c in cells])
        except ValueError as exc:
            raise ConfigError(str(exc), key, line) from None
    m = np.array(out)
    if not is_unitary(m, 1e-8):
        raise ConfigError("matrix is not unitary to 1e-8", key, line)
    return m


def parse_config(text: str) -> RunConfig:
    """Strict parser for the run configuration format described above."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        if "=" not in s:
            raise ConfigError(f"expected 'key = value', got {s!r}", line=lineno)
        key, value = (p.strip() for p in s.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key, lineno)
        if key in entries:
            raise ConfigError(f"duplicate key (first set on line {entries[key][1]})", key, lineno)
        if not value:
            raise ConfigError("empty value", key, lineno)
        entries[key] = (value, lineno)

    present = [form for form, keys in TARGET_FORMS.items() if any(k in entries for k in keys)]
    if not present:
        raise ConfigError("missing target: give gamma1/gamma2, euler1/euler2 or unitary1/unitary2", "target")
    if len(present) > 1:
        keys = sorted(k for f in present for k in TARGET_FORMS[f] if k in entries)
        raise ConfigError(f"conflicting target forms: {', '.join(keys)}", keys[-1], entries[keys[-1]][1])
    form = present[0]
    for k in TARGET_FORMS[form]:
        if k not in entries:
            raise ConfigError(f"target form '{form}' needs both {' and '.join(TARGET_FORMS[form])}", k)
    k1, k2 = TARGET_FORMS[form]
    parse = {"angles": _real, "euler": _triple, "unitary": _matrix}[form]
    target = (parse(k1, *entries[k1]), parse(k2, *entries[k2]))

    if "J" not in entries:
        raise ConfigError("missing required key", "J")
    kw = {"J": _real("J", *entries["J"])}
    if not kw["J"] > 0:
        raise ConfigError("J must be positive", "J", entries["J"][1])
    for key in ("omega_min", "omega_max", "sample_rate", "threshold"):
        if key in entries:
            kw[key] = _real(key, *entries[key])
    for key in ("n", "steps", "seed"):
        if key in entries:
            kw[key] = _integer(key, *entries[key])
    for key in ("strategy", "pulses", "report", "plot"):
        if key in entries:
            kw[key] = entries[key][0]

    cfg = RunConfig(target_form=form, target=target, **kw)
    _validate(cfg, entries)
    return cfg


def _validate(cfg: RunConfig, entries: dict) -> None:
    def fail(msg, key):
        raise ConfigError(msg, key, entries.get(key, (None, None))[1])

    if cfg.strategy not in STRATEGIES:
        fail(f"unknown strategy {cfg.strategy!r}; expected one of {', '.join(STRATEGIES)}", "strategy")
    if cfg.n < 1:
        fail("n must be a positive integer", "n")
    if cfg.steps < 1:
        fail("steps must be a positive integer", "steps")
    if not cfg.sample_rate > 0:
        fail("sample_rate must be positive", "sample_rate")
    if not 0 <= cfg.threshold <= 1:
        fail("threshold must lie in [0, 1]", "threshold")
    lo, hi = cfg.bounds()
    if not lo < hi:
        fail("omega_min must be below omega_max", "omega_max" if "omega_max" in entries else "omega_min")
    if cfg.seed < 0:
        fail("seed must be non-negative", "seed")
