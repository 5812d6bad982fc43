"""Floquet analysis of planar limit cycles and the master stability function.

Pipeline: the state-transition matrix is integrated along the orbit, its
eigenvalues give the multipliers and exponents, the matrix logarithm gives
the constant generator ``J`` and the periodic change of variables
``P(t) = Phi(t) exp(-J t)``. For identity inner coupling the network
variational block of mode ``i`` is ``A(t) + gamma I`` with
``gamma = -kappa * lambda_i``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import ConfigError, NumericalFailure, UnsupportedCase
from .graph import Graph, laplacian, spectrum
from .integrate import LimitCycle, rk4_step
from .models import VdpParams

__all__ = [
    "Monodromy",
    "FloquetSpectrum",
    "LyaFloTransform",
    "MsfValue",
    "MsfCurve",
    "ModeReport",
    "StabilityReport",
    "eig2",
    "eigvecs2",
    "expm2",
    "variational_flow",
    "state_transition",
    "liouville_determinant",
    "multipliers",
    "build_transform",
    "apply_transform",
    "msf_value",
    "msf_scan",
    "stability_verdict",
]

# eigenvector-matrix condition number beyond which a 2x2 matrix counts as defective
MAX_EIGVEC_COND = 1e8
MAX_P_COND = 1e10


@dataclass(frozen=True)
class Monodromy:
    """State-transition data over one period.

    ``times``, ``phi_samples`` and ``orbit_samples`` hold ``m + 1`` phases
    from 0 to T inclusive. ``trace_times``/``trace_values`` sample
    ``trace A(t)`` on every integration grid point for the Liouville check.
    """

    phi_T: np.ndarray
    period_T: float
    times: np.ndarray
    phi_samples: np.ndarray
    orbit_samples: np.ndarray
    trace_times: np.ndarray
    trace_values: np.ndarray
    shift: float = 0.0


@dataclass(frozen=True)
class FloquetSpectrum:
    multipliers: np.ndarray
    exponents: np.ndarray
    period_T: float

    @property
    def max_multiplier(self) -> float:
        return float(np.max(np.abs(self.multipliers)))

    @property
    def max_exponent(self) -> float:
        return float(np.max(self.exponents.real))


@dataclass(frozen=True)
class LyaFloTransform:
    j_matrix: np.ndarray
    times: np.ndarray
    p_samples: np.ndarray
    eigenvectors: np.ndarray
    exponents: np.ndarray

    @property
    def periodicity_error(self) -> float:
        return float(np.max(np.abs(self.p_samples[-1] - self.p_samples[0])))

    def exp_j(self, t: float) -> np.ndarray:
        """``exp(J t)`` through the stored eigendecomposition."""
        v = self.eigenvectors
        out = v @ np.diag(np.exp(self.exponents * t)) @ np.linalg.inv(v)
        return _maybe_real(out)


class MsfValue(NamedTuple):
    max_exponent: float
    max_multiplier: float


@dataclass(frozen=True)
class MsfCurve:
    kappa: np.ndarray
    alpha: np.ndarray
    max_multiplier: np.ndarray
    max_exponent: np.ndarray
    lambda_i: float

    def __len__(self):
        return len(self.kappa)

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.max_multiplier) < 0))


@dataclass(frozen=True)
class ModeReport:
    index: int
    eigenvalue: float
    alpha: float
    max_exponent: float
    max_multiplier: float


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    kappa: float
    modes: tuple
    connected: bool
    reason: str

    @property
    def worst_mode(self) -> ModeReport | None:
        if not self.modes:
            return None
        return max(self.modes, key=lambda r: r.max_exponent)

    @property
    def margin(self) -> float:
        """Distance of the worst exponent below zero (negative when unstable)."""
        w = self.worst_mode
        return float("nan") if w is None else -w.max_exponent


def _maybe_real(a: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    if np.iscomplexobj(a) and np.max(np.abs(a.imag), initial=0.0) <= rtol * max(1.0, np.max(np.abs(a))):
        return a.real.copy()
    return a


def eig2(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a 2x2 matrix from trace and determinant.

    Ordered by descending magnitude. The smaller root is recovered from
    ``det / big`` to avoid cancellation.
    """
    a = np.asarray(a)
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    half = tr / 2.0
    disc = half * half - det
    if not np.iscomplexobj(a) and disc >= 0:
        root = math.sqrt(disc)
        big = half + math.copysign(root, half) if half != 0 else root
        small = det / big if big != 0 else -big
        out = np.array([big, small])
    else:
        root = cmath.sqrt(complex(disc))
        big = half + root if abs(half + root) >= abs(half - root) else half - root
        small = det / big if big != 0 else half - root
        out = np.array([big, small], dtype=complex)
    order = np.argsort(-np.abs(out), kind="stable")
    return out[order]


def eigvecs2(a: np.ndarray, eigenvalues: Sequence) -> np.ndarray:
    """Unit eigenvectors (as columns) for the given eigenvalues of a 2x2 matrix."""
    a = np.asarray(a)
    scale = max(1.0, float(np.max(np.abs(a))))
    if (abs(a[0, 1]) <= 1e-14 * scale and abs(a[1, 0]) <= 1e-14 * scale
            and abs(a[0, 0] - a[1, 1]) <= 1e-14 * scale):
        return np.eye(2)
    cols = []
    for lam in eigenvalues:
        u = np.array([a[0, 1], lam - a[0, 0]])
        w = np.array([lam - a[1, 1], a[1, 0]])
        v = u if np.linalg.norm(u) >= np.linalg.norm(w) else w
        cols.append(v / np.linalg.norm(v))
    return _maybe_real(np.array(cols, dtype=complex).T)


def expm2(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a 2x2 matrix via its eigendecomposition.

    Raises :class:`UnsupportedCase` when the eigenvector matrix is too
    ill-conditioned for the decomposition to be trusted.
    """
    a = np.asarray(a)
    lam = eig2(a)
    v = eigvecs2(a, lam)
    if np.linalg.cond(v) > MAX_EIGVEC_COND:
        raise UnsupportedCase("matrix is defective or nearly so; eigendecomposition exponential refused")
    out = v @ np.diag(np.exp(lam)) @ np.linalg.inv(v)
    return out.real.copy() if not np.iscomplexobj(a) else _maybe_real(out)


def variational_flow(field: Callable, jacobian: Callable, x0, period: float, n_steps: int,
                     n_samples: int, shift: float = 0.0) -> Monodromy:
    """Integrate ``x' = field(t, x)`` jointly with ``Phi' = (jacobian(t, x) + shift I) Phi``.

    Generic numpy version for any dimension; ``n_steps`` must be a multiple
    of ``n_samples``.
    """
    if n_steps % n_samples:
        raise ConfigError("n_steps must be a multiple of n_samples")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    d = len(jacobian(0.0, x0))
    eye = np.eye(d)

    def aug(t, y):
        x = y[:d]
        phi = y[d:].reshape(d, d)
        a = jacobian(t, x) + shift * eye
        return np.concatenate([np.atleast_1d(field(t, x)), (a @ phi).ravel()])

    h = period / n_steps
    every = n_steps // n_samples
    y = np.concatenate([x0, eye.ravel()])
    traces = [np.trace(jacobian(0.0, x0)) + d * shift]
    phis = [eye.copy()]
    orbit = [x0.copy()]
    for k in range(n_steps):
        y = rk4_step(aug, y, k * h, h)
        t = (k + 1) * h
        traces.append(np.trace(jacobian(t, y[:d])) + d * shift)
        if (k + 1) % every == 0:
            phis.append(y[d:].reshape(d, d).copy())
            orbit.append(y[:d].copy())
    return Monodromy(phi_T=phis[-1], period_T=period,
                     times=np.arange(n_samples + 1) * (period / n_samples),
                     phi_samples=np.array(phis), orbit_samples=np.array(orbit),
                     trace_times=np.arange(n_steps + 1) * h, trace_values=np.array(traces),
                     shift=shift)


def _vdp_variational(mu, gamma, x0, h, n_steps, every):
    """Scalar RK4 for the Van der Pol orbit and its shifted 2x2 variational equation."""
    x1, x2 = float(x0[0]), float(x0[1])
    p11, p12, p21, p22 = 1.0, 0.0, 0.0, 1.0

    def rhs(x1, x2, p11, p12, p21, p22):
        a21 = -2.0 * mu * x1 * x2 - 1.0
        a22 = mu * (1.0 - x1 * x1) + gamma
        return (x2, mu * (1.0 - x1 * x1) * x2 - x1,
                gamma * p11 + p21, gamma * p12 + p22,
                a21 * p11 + a22 * p21, a21 * p12 + a22 * p22)

    hh = 0.5 * h
    h6 = h / 6.0
    traces = [mu * (1.0 - x1 * x1) + 2.0 * gamma]
    phis = [(p11, p12, p21, p22)]
    orbit = [(x1, x2)]
    for k in range(n_steps):
        s = (x1, x2, p11, p12, p21, p22)
        k1 = rhs(*s)
        k2 = rhs(*[v + hh * d for v, d in zip(s, k1)])
        k3 = rhs(*[v + hh * d for v, d in zip(s, k2)])
        k4 = rhs(*[v + h * d for v, d in zip(s, k3)])
        x1, x2, p11, p12, p21, p22 = [
            v + h6 * (a + 2.0 * b + 2.0 * c + e) for v, a, b, c, e in zip(s, k1, k2, k3, k4)
        ]
        traces.append(mu * (1.0 - x1 * x1) + 2.0 * gamma)
        if (k + 1) % every == 0:
            vals = (x1, x2, p11, p12, p21, p22)
            if not all(math.isfinite(v) for v in vals):
                raise NumericalFailure(f"non-finite state-transition entries at t={(k + 1) * h:.9g}")
            phis.append((p11, p12, p21, p22))
            orbit.append((x1, x2))
    return np.array(orbit), np.array(phis).reshape(-1, 2, 2), np.array(traces)


def state_transition(orbit: LimitCycle, p: VdpParams, shift: float = 0.0,
                     dt: float | None = None) -> Monodromy:
    """Monodromy of ``A(t) + shift I`` along a Van der Pol limit cycle.

    The orbit is re-integrated from its anchor together with ``Phi`` on a
    grid of ``N = m * ceil(T / (m dt))`` steps that ends exactly at T, so
    ``A(t)`` is always evaluated at the orbit's own RK4 stage states.
    """
    dt = orbit.dt if dt is None else dt
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt!r}")
    m = orbit.m
    period = orbit.period_T
    n = m * int(math.ceil(period / (m * dt)))
    if n % 2:
        n *= 2
    h = period / n
    states, phis, traces = _vdp_variational(p.mu, float(shift), orbit.anchor, h, n, n // m)
    return Monodromy(phi_T=phis[-1].copy(), period_T=period,
                     times=np.arange(m + 1) * (period / m), phi_samples=phis,
                     orbit_samples=states, trace_times=np.arange(n + 1) * h,
                     trace_values=traces, shift=float(shift))


def liouville_determinant(mono: Monodromy) -> float:
    """``exp(integral of trace A over one period)`` by composite Simpson."""
    return math.exp(simpson(mono.trace_values, x=mono.trace_times))


def multipliers(mono: Monodromy) -> FloquetSpectrum:
    phi = np.asarray(mono.phi_T)
    if phi.shape != (2, 2):
        raise ConfigError(f"closed-form multipliers need a 2x2 monodromy, got {phi.shape}")
    lam = eig2(phi)
    lam_c = lam.astype(complex)
    if np.any(lam_c == 0):
        raise UnsupportedCase("zero Floquet multiplier has no logarithm")
    exps = np.array([cmath.log(v) for v in lam_c]) / mono.period_T
    return FloquetSpectrum(multipliers=lam, exponents=exps, period_T=mono.period_T)


def build_transform(mono: Monodromy, spec: FloquetSpectrum | None = None) -> LyaFloTransform:
    """Constant generator ``J = log(Phi(T)) / T`` and samples of ``P(t) = Phi(t) exp(-J t)``.

    ``J`` is built as ``V diag(exponents) V^-1`` so that ``exp(J T)``
    reproduces ``Phi(T)`` and ``P`` is T-periodic.

    Raises
    ------
    UnsupportedCase
        For negative real multipliers (a real transform would need period
        2T) and for defective or near-defective ``Phi(T)``.
    """
    spec = multipliers(mono) if spec is None else spec
    lam = np.asarray(spec.multipliers)
    for v in lam.astype(complex):
        if abs(v.imag) <= 1e-14 * abs(v) and v.real < 0:
            raise UnsupportedCase(f"negative real Floquet multiplier {v.real:.6g}")
    vecs = eigvecs2(mono.phi_T, lam)
    cond = np.linalg.cond(vecs)
    if not cond < MAX_EIGVEC_COND:
        raise UnsupportedCase(f"monodromy eigenvector matrix condition {cond:.3g} too large")
    exps = np.asarray(spec.exponents)
    vinv = np.linalg.inv(vecs)
    j = _maybe_real(vecs @ np.diag(exps) @ vinv)
    p_samples = []
    for t, phi in zip(mono.times, mono.phi_samples):
        p_samples.append(phi @ (vecs @ np.diag(np.exp(-exps * t)) @ vinv))
    return LyaFloTransform(j_matrix=j, times=np.asarray(mono.times),
                           p_samples=_maybe_real(np.array(p_samples)),
                           eigenvectors=vecs, exponents=exps)


def apply_transform(tr: LyaFloTransform, perturbations) -> np.ndarray:
    """Map perturbations ``x(t_k)`` sampled on the transform's phase grid to ``z = P^-1 x``."""
    xs = np.asarray(perturbations)
    if xs.shape[0] != len(tr.p_samples):
        raise ConfigError(f"expected {len(tr.p_samples)} samples on the phase grid, got {xs.shape[0]}")
    out = []
    for p_k, x_k in zip(tr.p_samples, xs):
        if np.linalg.cond(p_k) > MAX_P_COND:
            raise NumericalFailure("singular Lyapunov-Floquet sample")
        out.append(np.linalg.solve(p_k, x_k))
    return _maybe_real(np.array(out))


def msf_value(orbit: LimitCycle, p: VdpParams, kappa: float, lambda_i: float,
              dt: float | None = None) -> MsfValue:
    """Master stability function at ``alpha = -kappa * lambda_i``."""
    if kappa < 0 or lambda_i < 0:
        raise ConfigError("kappa and lambda_i must be >= 0")
    spec = multipliers(state_transition(orbit, p, -kappa * lambda_i, dt))
    return MsfValue(spec.max_exponent, spec.max_multiplier)


def msf_scan(orbit: LimitCycle, p: VdpParams, lambda_i: float, kappa_grid: Sequence[float],
             dt: float | None = None) -> MsfCurve:
    grid = np.asarray(kappa_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ConfigError("kappa grid must be a nonempty list")
    if np.any(np.diff(grid) <= 0):
        raise ConfigError("kappa grid must be strictly increasing")
    values = [msf_value(orbit, p, k, lambda_i, dt) for k in grid]
    return MsfCurve(kappa=grid, alpha=-grid * lambda_i + 0.0,
                    max_multiplier=np.array([v.max_multiplier for v in values]),
                    max_exponent=np.array([v.max_exponent for v in values]),
                    lambda_i=float(lambda_i))


def stability_verdict(g: Graph, p: VdpParams, kappa: float, orbit: LimitCycle,
                      dt: float | None = None, marginal_tol: float = 1e-6) -> StabilityReport:
    """Mode-by-mode synchronization check over the nonzero Laplacian modes.

    A mode counts as stable only when its exponent is below ``-marginal_tol``;
    exponents within ``marginal_tol`` of zero are marginal.
    """
    connected = g.is_connected()
    eigs = spectrum(laplacian(g)).eigenvalues
    cache: dict[float, MsfValue] = {}
    modes = []
    for idx, lam in enumerate(eigs[1:], start=2):
        lam_c = max(lam, 0.0)
        key = round(lam_c, 12)
        if key not in cache:
            cache[key] = msf_value(orbit, p, kappa, lam_c, dt)
        v = cache[key]
        modes.append(ModeReport(idx, lam, -kappa * lam_c, v.max_exponent, v.max_multiplier))

    if not connected:
        return StabilityReport(False, kappa, tuple(modes), False,
                               "graph is disconnected: a second zero eigenvalue leaves a marginal mode")
    if not modes:
        return StabilityReport(True, kappa, (), True, "single node: nothing to synchronize")
    worst = max(modes, key=lambda r: r.max_exponent)
    if worst.max_exponent < -marginal_tol:
        return StabilityReport(True, kappa, tuple(modes), True,
                               f"all nonzero modes decay; worst is lambda_{worst.index}")
    return StabilityReport(False, kappa, tuple(modes), True,
                           f"mode lambda_{worst.index} has exponent {worst.max_exponent:.3g} >= 0 (within margin)")
