"""Van Keuk-Blackman quality, resource and utility model for one tracking task.

All angles are in radians and all times in seconds. Angles handed to the
functions in this module are array-face angles; the array tilt is applied
once when a scene is built (see :mod:`sapa_rrm.scenario`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

DB_FLOOR = 10.0
DB_CAP = 40.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class RadarConstants:
    """Radar-wide constants.

    ``k_rad`` folds transmit power, wavelength, efficiency, noise and losses
    into one number (m^2/s). ``alpha_bw`` is the half-beamwidth factor of a
    uniformly illuminated, half-wavelength spaced array.
    """

    k_rad: float = 2.4e16
    p_fa: float = 1e-4
    n_h_total: int = 48
    n_v_total: int = 48
    alpha_bw: float = 0.886
    tilt: float = math.radians(5.0)
    snr_floor_db: float = DB_FLOOR
    snr_cap_db: float = DB_CAP

    def __post_init__(self):
        if not self.k_rad > 0:
            raise ValueError(f"k_rad must be positive, got {self.k_rad}")
        if not 0.0 < self.p_fa < 1.0:
            raise ValueError(f"p_fa must lie in (0, 1), got {self.p_fa}")
        if self.n_h_total < 1 or self.n_v_total < 1:
            raise ValueError("array must have at least one element per axis")
        if not self.snr_floor_db < self.snr_cap_db:
            raise ValueError("snr_floor_db must be below snr_cap_db")


@dataclass(frozen=True)
class ControlPoint:
    t_d: float
    f_t: float
    n_h: int
    n_v: int

    def __post_init__(self):
        if min(self.t_d, self.f_t, self.n_h, self.n_v) <= 0:
            raise ValueError(f"control values must be strictly positive: {self}")


@dataclass(frozen=True)
class Environment:
    """Target state as seen from the array face."""

    range: float
    theta_h: float
    theta_v: float
    rcs: float
    maneuver_std: float
    corr_time: float

    def __post_init__(self):
        if not self.range > 0:
            raise ValueError(f"range must be positive, got {self.range}")
        if not self.rcs > 0:
            raise ValueError(f"rcs must be positive, got {self.rcs}")
        if not (self.maneuver_std > 0 and self.corr_time > 0):
            raise ValueError("Singer parameters must be positive")


@dataclass(frozen=True)
class ControlGrid:
    """Sorted discrete values per control dimension (t_d, f_t, n_h, n_v)."""

    t_d: Tuple[float, ...]
    f_t: Tuple[float, ...]
    n_h: Tuple[int, ...]
    n_v: Tuple[int, ...]

    def __post_init__(self):
        for name in ("t_d", "f_t", "n_h", "n_v"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"grid dimension {name!r} is empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"grid dimension {name!r} must be strictly ascending")
            object.__setattr__(self, name, values)

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return (len(self.t_d), len(self.f_t), len(self.n_h), len(self.n_v))

    def point(self, index: Sequence[int]) -> ControlPoint:
        i, j, k, l = index
        return ControlPoint(self.t_d[i], self.f_t[j], self.n_h[k], self.n_v[l])

    def full_aperture(self, consts: "RadarConstants") -> "ControlGrid":
        return ControlGrid(self.t_d, self.f_t, (consts.n_h_total,), (consts.n_v_total,))


@dataclass(frozen=True)
class TaskSpec:
    weight: float
    q_min: float = 3e-3
    q_max: float = 1e-3
    control_grid: Optional[ControlGrid] = None

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"weight must lie in [0, 1], got {self.weight}")
        if not self.q_max < self.q_min:
            raise ValueError("q_max must be below q_min (smaller error is better)")


@dataclass(frozen=True)
class TaskEvaluation:
    feasible: bool
    sn0_linear: float
    v0: float
    quality: float
    n_looks: float
    p_d: float
    gamma: float
    xi: float
    resource: float
    utility: float
    beamwidth: float = field(default=math.nan)


class NoRootError(ValueError):
    """The track-sharpness equation has no positive root in the search range."""


def crosstalk_loss(n_h: int, n_v: int, consts: RadarConstants) -> float:
    return 0.8 + 0.2 * (n_h / consts.n_h_total) * (n_v / consts.n_v_total)


def snr0(ctrl: ControlPoint, env: Environment, consts: RadarConstants) -> Tuple[float, float, bool]:
    """Return ``(sn0_raw, sn0_used, feasible)`` as linear ratios.

    ``sn0_used`` is capped at ``snr_cap_db``; ``feasible`` is false when the
    raw value falls below ``snr_floor_db`` (no CFAR detection).
    """
    ch = math.cos(env.theta_h)
    cv = math.cos(env.theta_v)
    if abs(env.theta_h) >= math.pi / 2 or abs(env.theta_v) >= math.pi / 2:
        return 0.0, 0.0, False
    raw = (
        consts.k_rad
        * float(ctrl.n_h) ** 3
        * float(ctrl.n_v) ** 3
        * ctrl.t_d
        * ch * ch
        * cv * cv
        * env.rcs
        / env.range ** 4
    )
    feasible = raw >= db_to_linear(consts.snr_floor_db)
    used = min(raw, db_to_linear(consts.snr_cap_db))
    return raw, used, feasible


def _sharpness_residual(v: float, alpha: float, beta: float) -> float:
    return 1.0 + (0.5 * beta + 2.0) * v * v - alpha * beta * v ** 2.4


def _scaled_residual(v: float, alpha: float, beta: float) -> float:
    # residual / v^2: same sign for v > 0, far less cancellation for large v
    return 1.0 / (v * v) + (0.5 * beta + 2.0) - alpha * beta * v ** 0.4


def track_sharpness(alpha: float, beta: float, v_max: float = 1e3) -> float:
    """Smallest positive root of ``1 + (beta/2 + 2) v^2 - alpha*beta v^2.4``.

    The residual is positive at zero and, for positive ``alpha*beta``, has a
    single interior maximum, so one sign change exists. The upper bracket is
    doubled from 1 until the sign flips, then the interval is bisected down
    to floating-point resolution on the residual divided by ``v^2``.
    """
    if not (alpha > 0 and beta > 0):
        raise NoRootError(f"no positive root for alpha={alpha}, beta={beta}")
    lo, hi = 0.0, 1.0
    while _sharpness_residual(hi, alpha, beta) >= 0.0:
        lo = hi
        hi *= 2.0
        if hi > v_max:
            raise NoRootError(f"no sign change below v={v_max} (alpha={alpha}, beta={beta})")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _scaled_residual(mid, alpha, beta) >= 0.0:
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        return hi
    # pick the float nearest the root, judged in extended precision
    cands = [lo, hi]
    for _ in range(4):
        cands = [float(np.nextafter(cands[0], 0.0))] + cands + [float(np.nextafter(cands[-1], np.inf))]
    a, b = np.longdouble(alpha), np.longdouble(beta)
    exp = np.longdouble(12) / np.longdouble(5)

    def f_ext(v):
        v = np.longdouble(v)
        return abs(1 + (b / 2 + 2) * v * v - a * b * v**exp)

    return min(cands, key=f_ext)


def beamwidth(ctrl: ControlPoint, env: Environment, consts: RadarConstants) -> float:
    """Largest scan-broadened half beamwidth over the two array axes."""
    bw_h = consts.alpha_bw / ctrl.n_h / math.cos(env.theta_h)
    bw_v = consts.alpha_bw / ctrl.n_v / math.cos(env.theta_v)
    return max(bw_h, bw_v)


def utility_linear(q: float, spec: TaskSpec) -> float:
    if q is None or not math.isfinite(q):
        return 0.0
    u = (q - spec.q_min) / (spec.q_max - spec.q_min)
    return max(min(u, 1.0), 0.0)


def _infeasible(sn0: float, xi: float) -> TaskEvaluation:
    nan = math.nan
    return TaskEvaluation(False, sn0, nan, nan, nan, nan, nan, xi, nan, 0.0)


def evaluate_task(
    ctrl: ControlPoint, env: Environment, spec: TaskSpec, consts: RadarConstants
) -> TaskEvaluation:
    xi = crosstalk_loss(ctrl.n_h, ctrl.n_v, consts)
    _, sn0, feasible = snr0(ctrl, env, consts)
    if not feasible:
        return _infeasible(sn0, xi)

    bw = beamwidth(ctrl, env, consts)
    alpha = 0.4 * ctrl.f_t * (env.range * bw * math.sqrt(env.corr_time) / env.maneuver_std) ** 0.4
    snr_eff = xi * sn0
    log_pfa = math.log(consts.p_fa)
    beta = snr_eff - log_pfa
    try:
        v0 = track_sharpness(alpha, beta)
    except NoRootError:
        return _infeasible(sn0, xi)

    q = bw * v0
    p_d = consts.p_fa ** (1.0 / (1.0 + snr_eff))
    gamma = 1.0 + 14.0 * math.sqrt(abs(log_pfa) / snr_eff)
    n_looks = math.sqrt(1.0 + (gamma * v0 * v0) ** 2) / p_d
    g = n_looks * ctrl.t_d * ctrl.f_t
    return TaskEvaluation(
        feasible=True,
        sn0_linear=sn0,
        v0=v0,
        quality=q,
        n_looks=n_looks,
        p_d=p_d,
        gamma=gamma,
        xi=xi,
        resource=g,
        utility=utility_linear(q, spec),
        beamwidth=bw,
    )


def resource_unconstrained(ev: TaskEvaluation, ctrl: ControlPoint, consts: RadarConstants) -> float:
    """Single-task resource scaled by the fraction of the array it occupies."""
    if not ev.feasible:
        return math.nan
    return ev.resource * ((ctrl.n_h * ctrl.n_v) / (consts.n_h_total * consts.n_v_total))
