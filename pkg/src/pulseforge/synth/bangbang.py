"""Time-optimal bang-bang control for ``w sx/2 + s J sy/2`` with ``w`` in ``[w_min, w_max]``.

Minimizing ``1 - w p1 - s J p2`` pointwise puts ``w`` at ``w_min`` while
``p1 >= 0`` and at ``w_max`` while ``p1 < 0``.  With piecewise-constant ``w``
both ``U`` and ``p`` rotate rigidly (``dp/dt = (w, sJ, 0) x p``), so extremals
are simulated exactly, switch to switch.

Two independent searches are run:

* costate shooting over the initial costate direction and the horizon,
  solving ``U(T) = Rx(theta)`` (up to sign) and keeping the shortest ``T``;
* a direct search over the segment durations of schedules with at most
  ``max_switches`` switches (grid or random starts, least-squares polish,
  then SLSQP minimization of the total time).

The direct search also seeds the shooting: for a schedule with two switches
the costate that vanishes in ``p1`` at both switch times is unique up to
scale, see :func:`costate_for_schedule`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares, minimize

from ..algebra import I2, SX, SY, dagger, gate_fidelity, pauli_components, rx, su2_step_exponentials
from ..errors import InvalidArgument, SynthesisError
from .sinusoid import normalize_angle
from .waveforms import PiecewiseConstant

log = logging.getLogger(__name__)

FIDELITY_GOAL = 1 - 1e-6
MAX_EVENTS = 200


@dataclass(frozen=True)
class BangBangSchedule:
    levels: tuple  # (omega_min, omega_max)
    switch_times: tuple
    initial_level: int  # 0 -> omega_min on [0, t1), 1 -> omega_max
    T: float

    def __post_init__(self):
        st = np.asarray(self.switch_times, dtype=float)
        if np.any(np.diff(st) <= 0) or np.any(st <= 0) or np.any(st >= self.T):
            raise InvalidArgument(f"switch times must increase strictly inside (0, T): {self.switch_times}")
        if self.initial_level not in (0, 1):
            raise InvalidArgument("initial_level must be 0 or 1")

    def segment_levels(self) -> list[float]:
        return [self.levels[(self.initial_level + i) % 2] for i in range(len(self.switch_times) + 1)]

    def durations(self) -> np.ndarray:
        edges = np.concatenate([[0.0], self.switch_times, [self.T]])
        return np.diff(edges)

    def waveform(self) -> PiecewiseConstant:
        return PiecewiseConstant(tuple(self.segment_levels()), tuple(self.switch_times))

    def unitary(self, J: float, drift_sign: int = 1) -> np.ndarray:
        return _chain(np.asarray(self.segment_levels()), self.durations(), drift_sign * J)


@dataclass(frozen=True)
class BangBangResult:
    schedule: BangBangSchedule
    fidelity: float
    method: str  # "costate" or "direct"
    costate0: np.ndarray | None = field(default=None, compare=False)
    direct_T: float | None = None
    costate_T: float | None = None


def schedule_from_durations(levels, initial_level: int, durations, tiny: float = 1e-12) -> BangBangSchedule:
    """Drop empty segments, merge equal neighbours and build the schedule."""
    segs = []
    for i, d in enumerate(durations):
        lv = (initial_level + i) % 2
        if d <= tiny:
            continue
        if segs and segs[-1][0] == lv:
            segs[-1][1] += d
        else:
            segs.append([lv, float(d)])
    if not segs:
        raise InvalidArgument("schedule has zero length")
    times = np.cumsum([d for _, d in segs])
    return BangBangSchedule(tuple(float(v) for v in levels), tuple(float(t) for t in times[:-1]), segs[0][0], float(times[-1]))


def _chain(levels: np.ndarray, durations: np.ndarray, Jd: float) -> np.ndarray:
    """Product of segment exponentials; ``durations`` may carry a leading batch axis."""
    durations = np.asarray(durations, dtype=float)
    batch = durations.shape[:-1]
    U = np.broadcast_to(I2, batch + (2, 2)).copy()
    for i in range(durations.shape[-1]):
        U = su2_step_exponentials(levels[i], Jd, 0.0, durations[..., i]) @ U
    return U


def _residual(U: np.ndarray, target: np.ndarray, sign: int | None) -> np.ndarray:
    """Zero iff ``U = +-target`` (or ``U = sign*target`` when ``sign`` is given)."""
    a = pauli_components(dagger(target) @ U)
    if sign is None:
        return a[..., 1:]
    return np.concatenate([a[..., :1] - sign, a[..., 1:]], axis=-1)


def _fidelity(U, target, sign):
    if sign is None:
        return gate_fidelity(U, target)
    return float(np.real(np.trace(dagger(target) @ U))) / 2 * sign


# ---------------------------------------------------------------- direct search


def _starts(nseg: int, span: float, rng, budget: int = 60000) -> np.ndarray:
    g = int(np.floor(budget ** (1.0 / nseg)))
    if g >= 12:
        axis = (np.arange(g) + 0.5) / g * span
        return np.stack(np.meshgrid(*([axis] * nseg), indexing="ij"), axis=-1).reshape(-1, nseg)
    return rng.uniform(0.0, span, size=(budget, nseg))


def direct_search(
    target_angle: float,
    J: float,
    omega_min: float,
    omega_max: float,
    max_switches: int = 4,
    t_max: float | None = None,
    horizon: float | None = None,
    drift_sign: int = 1,
    sign: int | None = None,
    seed: int = 0,
    keep: int = 12,
    shorten: int = 3,
) -> list[BangBangSchedule]:
    """Schedules with at most ``max_switches`` switches reaching the target.

    Without ``horizon`` each structure is minimized in total time; with a
    fixed ``horizon`` the durations must sum to it.  Returns schedules that
    reach fidelity >= 1 - 1e-6, shortest first.
    """
    levels = (float(omega_min), float(omega_max))
    theta = float(target_angle) if sign is not None else normalize_angle(target_angle)
    target = rx(theta)
    Jd = drift_sign * J
    rng = np.random.default_rng(seed)
    gmin = min(np.hypot(levels[0], J), np.hypot(levels[1], J))
    period = (4 * np.pi if sign is not None else 2 * np.pi) / max(gmin, 1e-12)
    span = period if horizon is None else horizon
    if t_max is not None:
        span = min(span, t_max)
    found: list[BangBangSchedule] = []
    for nseg in range(1, max_switches + 2):
        for lv0 in (0, 1):
            seg_levels = np.array([levels[(lv0 + i) % 2] for i in range(nseg)])
            X = _starts(nseg, span, rng)
            if horizon is not None:
                X = X / X.sum(axis=1, keepdims=True) * horizon
            r = np.linalg.norm(_residual(_chain(seg_levels, X, Jd), target, sign), axis=-1)
            solved = []
            for x0 in X[np.argsort(r)[:keep]]:
                x = _solve(x0, seg_levels, target, Jd, sign, horizon)
                if x is not None and not any(np.allclose(x, y, rtol=1e-6, atol=1e-9 * span) for y in solved):
                    solved.append(x)
            solved.sort(key=np.sum)
            for i, x in enumerate(solved):
                if horizon is None and nseg > 3 and i < shorten:
                    x = _shorten(x, seg_levels, target, Jd, sign)
                sched = _accept(x, lv0, levels, target, Jd, sign, t_max)
                if sched is not None:
                    found.append(sched)
    found.sort(key=lambda s: s.T)
    out: list[BangBangSchedule] = []
    for s in found:
        if not any(abs(s.T - o.T) < 1e-9 and s.initial_level == o.initial_level and len(s.switch_times) == len(o.switch_times) for o in out):
            out.append(s)
    return out


def _chain_jacobian(levels: np.ndarray, durations: np.ndarray, Jd: float) -> tuple[np.ndarray, np.ndarray]:
    """``U`` and ``dU/dtau_i = S_i (-i H_i) E_i P_i`` for one duration vector."""
    mats = [su2_step_exponentials(lv, Jd, 0.0, d) for lv, d in zip(levels, durations)]
    n = len(mats)
    prefix = [I2]
    for m in mats[:-1]:
        prefix.append(m @ prefix[-1])
    suffix = [I2] * n
    for i in range(n - 2, -1, -1):
        suffix[i] = suffix[i + 1] @ mats[i + 1]
    U = mats[-1] @ prefix[-1]
    dU = np.stack([suffix[i] @ (-0.5j * (levels[i] * SX + Jd * SY)) @ mats[i] @ prefix[i] for i in range(n)])
    return U, dU


def _jacobian_rows(x, seg_levels, target, Jd, sign):
    _, dU = _chain_jacobian(seg_levels, x, Jd)
    comps = pauli_components(dagger(target) @ dU)  # (nseg, 4)
    return comps[:, 1:].T if sign is None else comps.T


def _solve(x0, seg_levels, target, Jd, sign, horizon):
    """Least-squares root of the target residual (plus the horizon) from ``x0``."""
    scale = max(float(np.sum(x0)), 1e-12)

    def res(y):
        x = y * scale
        r = _residual(_chain(seg_levels, x, Jd), target, sign)
        if horizon is not None:
            r = np.concatenate([r, [(x.sum() - horizon) / scale]])
        return r

    def jac(y):
        rows = _jacobian_rows(y * scale, seg_levels, target, Jd, sign) * scale
        if horizon is not None:
            rows = np.vstack([rows, np.ones((1, len(y)))])
        return rows

    sol = least_squares(res, x0 / scale, jac=jac, bounds=(0, np.inf), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=100)
    if np.linalg.norm(sol.fun) > 1e-6:
        return None
    return np.clip(sol.x * scale, 0, None)


def _shorten(x, seg_levels, target, Jd, sign):
    """Slide along an under-determined solution set towards shorter total time."""
    scale = max(float(np.sum(x)), 1e-12)
    cons = {
        "type": "eq",
        "fun": lambda y: _residual(_chain(seg_levels, y * scale, Jd), target, sign),
        "jac": lambda y: _jacobian_rows(y * scale, seg_levels, target, Jd, sign) * scale,
    }
    opt = minimize(
        lambda y: y.sum(),
        x / scale,
        jac=lambda y: np.ones_like(y),
        method="SLSQP",
        bounds=[(0, None)] * len(x),
        constraints=[cons],
        options=dict(maxiter=100, ftol=1e-14),
    )
    if opt.success and np.linalg.norm(cons["fun"](opt.x)) < 1e-9 and opt.x.sum() * scale < x.sum():
        return np.clip(opt.x * scale, 0, None)
    return x


def _accept(x, lv0, levels, target, Jd, sign, t_max):
    if t_max is not None and x.sum() > t_max * (1 + 1e-12):
        return None
    try:
        sched = schedule_from_durations(levels, lv0, x)
    except InvalidArgument:
        return None
    if _fidelity(sched.unitary(abs(Jd), int(np.sign(Jd)) or 1), target, sign) < FIDELITY_GOAL:
        return None
    return sched


# ------------------------------------------------------------- costate shooting


def _rotate(p: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return p * c + np.cross(axis, p) * s + axis * np.dot(axis, p) * (1 - c)


def _level_at(p: np.ndarray, Jd: float) -> int:
    if abs(p[0]) > 1e-13 * max(np.linalg.norm(p), 1e-300):
        return 0 if p[0] >= 0 else 1
    # on the switching surface: look at where p1 is heading (dp1/dt = J p3)
    return 0 if Jd * p[2] >= 0 else 1


def _next_zero(p: np.ndarray, axis: np.ndarray, g: float) -> float | None:
    """First time ``> 0`` at which ``p1`` crosses zero under rotation at rate ``g``."""
    if g == 0:
        return None
    par = np.dot(axis, p)
    c0 = par * axis[0]
    c1 = p[0] - c0
    c2 = np.cross(axis, p)[0]
    R = np.hypot(c1, c2)
    if R <= abs(c0) or R == 0:
        return None
    d = np.arctan2(c2, c1)
    a = np.arccos(-c0 / R)
    xs = np.mod(np.array([d + a, d - a]), 2 * np.pi)
    xs = np.where(xs < 1e-10, xs + 2 * np.pi, xs)
    return float(xs.min() / g)


def costate_extremal(p0, J: float, omega_min: float, omega_max: float, T: float, drift_sign: int = 1):
    """Exact bang-bang extremal from ``p0`` on ``[0, T]``.

    Returns ``(schedule, U(T), p(T))``.
    """
    levels = (float(omega_min), float(omega_max))
    Jd = drift_sign * J
    p = np.asarray(p0, dtype=float) / np.linalg.norm(p0)
    U = I2.copy()
    t = 0.0
    lv0 = lv = _level_at(p, Jd)
    switches = []
    while True:
        w = levels[lv]
        omega = np.array([w, Jd, 0.0])
        g = float(np.linalg.norm(omega))
        axis = omega / g if g > 0 else omega
        dt = _next_zero(p, axis, g)
        last = dt is None or t + dt >= T or len(switches) >= MAX_EVENTS
        step = T - t if last else dt
        U = su2_step_exponentials(w, Jd, 0.0, step) @ U
        if g > 0:
            p = _rotate(p, axis, g * step)
        if last:
            break
        t += dt
        switches.append(t)
        lv = 1 - lv
    return BangBangSchedule(levels, tuple(switches), lv0, float(T)), U, p


def _direction(angles) -> np.ndarray:
    th, ph = angles
    return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def _angles(p) -> np.ndarray:
    p = np.asarray(p, dtype=float) / np.linalg.norm(p)
    return np.array([np.arccos(np.clip(p[2], -1, 1)), np.arctan2(p[1], p[0])])


def costate_for_schedule(schedule: BangBangSchedule, J: float, drift_sign: int = 1) -> np.ndarray | None:
    """Unit costate with ``p1 = 0`` at every switch time and the right initial sign.

    ``None`` when no such costate exists (the schedule is not an extremal).
    """
    Jd = drift_sign * J
    rows = []
    phi = np.eye(3)
    t = 0.0
    for lvl, d in zip(schedule.segment_levels(), schedule.durations()):
        omega = np.array([lvl, Jd, 0.0])
        g = np.linalg.norm(omega)
        if g > 0:
            rot = np.stack([_rotate(e, omega / g, g * d) for e in np.eye(3)], axis=1)
            phi = rot @ phi
        t += d
        if len(rows) < len(schedule.switch_times):
            rows.append(phi[0])
    if not rows:
        return None
    _, s, vt = np.linalg.svd(np.array(rows), full_matrices=True)
    if len(rows) >= 3 and s[-1] > 1e-8 * s[0]:
        return None
    p0 = vt[-1]
    # initial segment: p1 >= 0 for omega_min, p1 < 0 for omega_max
    want = 1.0 if schedule.initial_level == 0 else -1.0
    lead = p0[0] if abs(p0[0]) > 1e-12 else Jd * p0[2]
    return p0 if lead * want > 0 else -p0


def shoot_costate(
    target_angle: float,
    J: float,
    omega_min: float,
    omega_max: float,
    seeds: list,
    t_max: float,
    drift_sign: int = 1,
    sign: int | None = None,
):
    """Refine ``(costate direction, T)`` seeds; returns ``[(T, p0, schedule)]`` sorted by ``T``."""
    theta = float(target_angle) if sign is not None else normalize_angle(target_angle)
    target = rx(theta)
    out = []
    for p0, T0 in seeds:
        T0 = float(T0)
        x0 = np.concatenate([_angles(p0), [1.0]])

        def res(x):
            T = x[2] * T0
            if T <= 0:
                return np.full(3 if sign is None else 4, 10.0 + abs(T))
            _, U, _ = costate_extremal(_direction(x[:2]), J, omega_min, omega_max, T, drift_sign)
            return _residual(U, target, sign)

        sol = least_squares(res, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=300)
        T = float(sol.x[2] * T0)
        if not 0 < T <= t_max * (1 + 1e-9):
            continue
        p = _direction(sol.x[:2])
        sched, U, _ = costate_extremal(p, J, omega_min, omega_max, T, drift_sign)
        if _fidelity(U, target, sign) >= FIDELITY_GOAL:
            out.append((T, p, sched))
    out.sort(key=lambda item: item[0])
    return out


def _sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    th = np.arccos(1 - 2 * i / n)
    ph = np.pi * (1 + 5**0.5) * i
    return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)


def _sphere_seeds(target, J, omega_min, omega_max, t_max, drift_sign, sign, n_dirs=200, n_times=200, keep=8):
    """Best ``(p0, T)`` pairs from scanning extremals on a direction x time grid."""
    times = np.linspace(t_max / n_times, t_max, n_times)
    scored = []
    for p0 in _sphere(n_dirs):
        best = (np.inf, None)
        for T in times:
            _, U, _ = costate_extremal(p0, J, omega_min, omega_max, T, drift_sign)
            r = float(np.linalg.norm(_residual(U, target, sign)))
            if r < best[0]:
                best = (r, T)
        scored.append((best[0], p0, best[1]))
    scored.sort(key=lambda s: s[0])
    return [(p, T) for _, p, T in scored[:keep]]


def default_time_budget(J: float, omega_min: float, omega_max: float) -> float:
    """The closed-form sinusoid duration ``2 pi / J`` (or a full turn at the strongest level if ``J = 0``)."""
    if J > 0:
        return 2 * np.pi / J
    return 4 * np.pi / max(abs(omega_min), abs(omega_max))


def bangbang_synthesize(
    target_angle: float,
    J: float,
    omega_min: float,
    omega_max: float,
    t_max: float | None = None,
    max_switches: int = 4,
    drift_sign: int = 1,
    sign: int | None = None,
    seed: int = 0,
    sphere_scan: bool = False,
) -> BangBangResult:
    """Shortest bang-bang schedule reaching ``Rx(target)`` with fidelity >= 1 - 1e-6.

    The costate-shooting solution is preferred because it carries a
    certificate (the switching function); the direct search is the fallback
    and the cross-check.
    """
    if not omega_min < omega_max:
        raise InvalidArgument("omega_min must be below omega_max")
    t_max = default_time_budget(J, omega_min, omega_max) if t_max is None else t_max
    theta = float(target_angle) if sign is not None else normalize_angle(target_angle)
    target = rx(theta)
    if (sign is None and gate_fidelity(I2, target) >= 1 - 1e-15) or (sign is not None and _fidelity(I2, target, sign) >= 1 - 1e-15):
        raise SynthesisError("target is the identity; nothing to synthesize")

    direct = direct_search(theta, J, omega_min, omega_max, max_switches, t_max, None, drift_sign, sign, seed)
    seeds = []
    for s in direct:
        p0 = costate_for_schedule(s, J, drift_sign)
        if p0 is not None:
            seeds.append((p0, s.T))
    if sphere_scan or not seeds:
        seeds += _sphere_seeds(target, J, omega_min, omega_max, t_max, drift_sign, sign)
    shot = shoot_costate(theta, J, omega_min, omega_max, seeds, t_max, drift_sign, sign)

    direct_T = direct[0].T if direct else None
    if shot:
        T, p0, sched = shot[0]
        U = sched.unitary(J, drift_sign)
        return BangBangResult(sched, _fidelity(U, target, sign), "costate", p0, direct_T, T)
    if direct:
        s = direct[0]
        return BangBangResult(s, _fidelity(s.unitary(J, drift_sign), target, sign), "direct", None, direct_T, None)
    raise SynthesisError(
        f"no bang-bang schedule reaches Rx({theta:.6g}) within {t_max:.6g} s",
        {"t_max": t_max, "bounds": (omega_min, omega_max), "J": J},
    )


def bangbang_fixed_horizon(
    target_angle: float,
    J: float,
    omega_min: float,
    omega_max: float,
    horizon: float,
    drift_sign: int = 1,
    sign: int | None = None,
    max_switches: int = 4,
    seed: int = 0,
) -> BangBangSchedule:
    """A bang-bang schedule of exactly ``horizon`` seconds reaching the target."""
    found = direct_search(target_angle, J, omega_min, omega_max, max_switches, None, horizon, drift_sign, sign, seed)
    if not found:
        raise SynthesisError(f"no bang-bang schedule of length {horizon:.6g} s reaches the target", {"horizon": horizon})
    best = min(found, key=lambda s: len(s.switch_times))
    # summed durations can miss the horizon by an ulp
    return replace(best, T=float(horizon))
