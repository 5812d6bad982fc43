"""Fixed-step RK4 integration and limit-cycle detection for planar oscillators."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigError, NumericalFailure
from .models import VdpParams

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "LimitCycle",
    "rk4_step",
    "integrate",
    "find_periodic_orbit",
    "find_limit_cycle",
    "hermite_interpolate",
]

VectorField = Callable[[float, np.ndarray], np.ndarray]

# relative slack when snapping breakpoints onto the step grid
_SNAP = 1e-9
_BURN_IN_STEP = 1e-2


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_end: float = 60.0
    record_stride: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be > 0, got {self.dt!r}")
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ConfigError(f"t_end must be > 0, got {self.t_end!r}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ConfigError(f"record_stride must be a positive integer, got {self.record_stride!r}")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_end / self.dt - _SNAP))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    def __len__(self):
        return len(self.times)

    @property
    def n_nodes(self) -> int:
        return self.states.shape[1] // 2

    def node(self, i: int) -> np.ndarray:
        """``(len, 2)`` history of node ``i``."""
        return self.states[:, 2 * i: 2 * i + 2]


@dataclass(frozen=True)
class LimitCycle:
    """One period of a planar limit cycle, anchored on the section ``x1 = 0, x2 > 0``.

    ``samples[k]`` is the state at phase time ``k * period_T / m``; the
    anchor is ``samples[0]``.
    """

    period_T: float
    samples: np.ndarray
    anchor: np.ndarray
    closure_error: float
    crossing_periods: tuple
    dt: float
    field: VectorField

    @property
    def m(self) -> int:
        return len(self.samples)

    @property
    def phase_times(self) -> np.ndarray:
        return np.arange(self.m) * (self.period_T / self.m)


def rk4_step(f: VectorField, x: np.ndarray, t: float, dt: float) -> np.ndarray:
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt!r}")
    try:
        k1 = f(t, x)
        k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)
        k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)
        k4 = f(t + dt, x + dt * k3)
        out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    except FloatingPointError as exc:
        raise NumericalFailure(f"floating-point error ({exc}) at t={t + dt:.9g}") from None
    if not np.all(np.isfinite(out)):
        raise NumericalFailure(f"non-finite state at t={t + dt:.9g}")
    return out


def _clamped(f: VectorField, lo: float, hi: float) -> VectorField:
    return lambda t, x: f(min(max(t, lo), hi), x)


def _step_aligned(f, x, t0, t1, breaks):
    """Advance from ``t0`` to ``t1`` without letting any stage straddle a breakpoint.

    A breakpoint inside the step splits it. Stage times of each piece are
    clamped so a piece that starts on a breakpoint sees the right limit of
    the field and a piece that ends on one sees the left limit.
    """
    tol = _SNAP * (t1 - t0)
    inner = [b for b in breaks if t0 + tol < b < t1 - tol]
    points = [t0, *inner, t1]
    for a, b in zip(points, points[1:]):
        lo = next((s for s in breaks if abs(a - s) <= tol), -np.inf)
        end = next((s for s in breaks if abs(b - s) <= tol), None)
        hi = np.inf if end is None else np.nextafter(end, -np.inf)
        x = rk4_step(_clamped(f, lo, hi), x, a, b - a)
    return x


def integrate(f: VectorField, x0, cfg: IntegratorConfig,
              breakpoints: Iterable[float] = ()) -> Trajectory:
    """Fixed-step RK4 sweep over ``[0, n_steps * dt]``.

    Records the initial state and every ``record_stride``-th step, so the
    recorded times are ``k * dt * record_stride``. ``breakpoints`` are times
    where ``f`` may jump; no RK4 step straddles one.

    Raises
    ------
    NumericalFailure
        If the state becomes non-finite; the message carries the time.
    """
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ConfigError("initial state has non-finite entries")
    breaks = sorted(float(b) for b in breakpoints if 0.0 < b)
    n = cfg.n_steps
    stride = int(cfg.record_stride)
    times = [0.0]
    states = [x.copy()]
    for k in range(n):
        t0 = k * cfg.dt
        t1 = (k + 1) * cfg.dt
        near = [b for b in breaks[bisect.bisect_left(breaks, t0 - cfg.dt):]
                if b <= t1 + cfg.dt]
        if near:
            x = _step_aligned(f, x, t0, t1, near)
        else:
            x = rk4_step(f, x, t0, cfg.dt)
        if (k + 1) % stride == 0:
            times.append(t1)
            states.append(x.copy())
    return Trajectory(np.array(times), np.array(states))


def hermite_interpolate(ya, yb, fa, fb, h, s):
    """Cubic Hermite interpolant on a step of length ``h`` at fraction ``s``."""
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * ya + h10 * h * fa + h01 * yb + h11 * h * fb


def _refine_crossing(f, t, ya, yb, h, time_tol=1e-13, max_iter=60):
    """Bisection for the zero of ``x1`` on the Hermite interpolant of one step."""
    fa = f(t, ya)
    fb = f(t + h, yb)
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        if (hi - lo) * h < time_tol:
            break
        mid = 0.5 * (lo + hi)
        if hermite_interpolate(ya[0], yb[0], fa[0], fb[0], h, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    return t + s * h, hermite_interpolate(ya, yb, fa, fb, h, s)


def find_periodic_orbit(f: VectorField, x0: Sequence[float], *, burn_in: float = 100.0,
                        m: int = 64, tol: float = 1e-6, dt: float = 1e-3,
                        n_crossings: int = 3, max_time: float = 1000.0) -> LimitCycle:
    """Locate a planar periodic orbit through the section ``{x1 = 0, x2 > 0}``.

    After ``burn_in`` (integrated at step ``max(dt, 0.01)``) the flow is followed until ``n_crossings`` ascending
    crossings are seen; the last two set the period. The orbit is then
    re-integrated from the final crossing with ``N = m * ceil(T / (m dt))``
    steps of size ``T / N`` to produce ``m`` equispaced phase samples.
    """
    if m < 1:
        raise ConfigError("m must be >= 1")
    if n_crossings < 2:
        raise ConfigError("need at least two crossings to measure a period")
    x = np.array(x0, dtype=float)
    if x.shape != (2,):
        raise ConfigError("periodic-orbit search expects a planar state")

    # burn-in only has to reach the attractor, so it may use a coarser step
    burn_dt = max(dt, _BURN_IN_STEP)
    n_burn = int(math.ceil(burn_in / burn_dt))
    for k in range(n_burn):
        x = rk4_step(f, x, k * burn_dt, burn_dt)
    t = n_burn * burn_dt

    crossings: list[tuple[float, np.ndarray]] = []
    k = 0
    while len(crossings) < n_crossings:
        tk = t + k * dt
        if tk - t > max_time:
            raise NumericalFailure(f"no section crossing found within {max_time} time units")
        y = rk4_step(f, x, tk, dt)
        if x[0] < 0.0 <= y[0] and (x[1] > 0.0 or y[1] > 0.0):
            crossings.append(_refine_crossing(f, tk, x, y, dt))
        x = y
        k += 1

    cross_t = [c[0] for c in crossings]
    periods = tuple(b - a for a, b in zip(cross_t, cross_t[1:]))
    period = periods[-1]
    anchor = crossings[-1][1]

    n = m * int(math.ceil(period / (m * dt)))
    h = period / n
    every = n // m
    samples = [anchor.copy()]
    y = anchor.copy()
    for j in range(n):
        y = rk4_step(f, y, j * h, h)
        if (j + 1) % every == 0 and j + 1 < n:
            samples.append(y.copy())
    closure = float(np.max(np.abs(y - anchor)))
    if closure > tol:
        raise NumericalFailure(f"limit cycle closure error {closure:.3g} exceeds tolerance {tol:.3g}")
    return LimitCycle(period_T=period, samples=np.array(samples), anchor=anchor,
                      closure_error=closure, crossing_periods=periods, dt=dt, field=f)


def find_limit_cycle(p: VdpParams, burn_in: float = 100.0, m: int = 64, tol: float = 1e-6,
                     dt: float = 1e-3, x0: Sequence[float] = (2.0, 0.0)) -> LimitCycle:
    """Van der Pol limit cycle at damping ``p.mu``."""
    mu = p.mu

    def f(t, x):
        return np.array([x[1], mu * (1.0 - x[0] * x[0]) * x[1] - x[0]])

    return find_periodic_orbit(f, x0, burn_in=burn_in, m=m, tol=tol, dt=dt)
