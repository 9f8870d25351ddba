"""Shortcut driving protocol for a finite-time harmonic-oscillator stroke.

A stroke takes the trap from ``omega_start`` to ``omega_end`` in time ``tau``.
The scaling factor ``b(t)`` interpolates between the two static widths with a
quintic polynomial whose first and second derivatives vanish at both ends,

    b(t) = 1 + (gamma - 1) * (10 s^3 - 15 s^4 + 6 s^5),   s = t / tau,

with ``gamma = sqrt(omega_start / omega_end)``.  The trap frequency that makes
this exact self-similar dynamics happen is inverse-engineered from the Ermakov
equation  b'' + omega^2(t) b = omega_start^2 / b^3:

    omega^2(t) = omega_start^2 / b^4 - b'' / b.

For fast strokes the engineered omega^2(t) dips below zero (transiently
inverted trap); ``cutoff_time`` returns the smallest duration for which the
trap stays confining throughout.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import minimize_scalar

from .errors import (
    BracketError,
    DomainError,
    IntegrationFailureError,
    InvertedTrapError,
    ParameterError,
)

__all__ = [
    "OscillatorParams",
    "StrokeSpec",
    "TrajectoryPoint",
    "ErmakovSolution",
    "scaling_factor",
    "frequency_squared",
    "omega_at",
    "eta",
    "trajectory_point",
    "sample_stroke",
    "ermakov_forward",
    "ermakov_residual_max",
    "cutoff_time",
    "adiabatic_scaling",
]


@dataclass(frozen=True)
class OscillatorParams:
    """Static oscillator data: mass, hbar, reference frequency, and the
    inverse temperature of the preparing bath."""

    m: float = 1.0
    hbar: float = 1.0
    omega0: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        for name in ("m", "hbar", "omega0", "beta"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class StrokeSpec:
    """One frequency stroke omega_start -> omega_end over duration tau."""

    omega_start: float
    omega_end: float
    tau: float

    def __post_init__(self) -> None:
        for name in ("omega_start", "omega_end", "tau"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")

    @property
    def gamma(self) -> float:
        """Expansion factor sqrt(omega_start / omega_end); > 1 expands the trap."""
        return math.sqrt(self.omega_start / self.omega_end)

    @classmethod
    def from_gamma(cls, params: OscillatorParams, gamma: float, tau: float) -> "StrokeSpec":
        """Stroke starting at params.omega0 with a given expansion factor."""
        if not (gamma > 0.0 and math.isfinite(gamma)):
            raise ParameterError(f"gamma must be positive and finite, got {gamma!r}")
        return cls(omega_start=params.omega0, omega_end=params.omega0 / gamma**2, tau=tau)


@dataclass(frozen=True)
class TrajectoryPoint:
    """Protocol data at one instant of the stroke."""

    t: float
    b: float
    bdot: float
    bddot: float
    omega_sq: float
    eta: float


def _check_domain(spec: StrokeSpec, t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > spec.tau):
        raise DomainError(f"t must lie in [0, {spec.tau}], got {t!r}")
    return arr


def scaling_factor(spec: StrokeSpec, t):
    """Return (b, bdot, bddot) at time t (scalar or array).

    The quintic satisfies b(0)=1, b(tau)=gamma and has vanishing first and
    second derivatives at both endpoints, so the stroke starts and ends in an
    instantaneous eigenstate configuration.
    """
    arr = _check_domain(spec, t)
    g1 = spec.gamma - 1.0
    s = arr / spec.tau
    b = 1.0 + g1 * s**3 * (10.0 - 15.0 * s + 6.0 * s**2)
    db = 30.0 * g1 * s**2 * (1.0 - s) ** 2 / spec.tau
    ddb = 60.0 * g1 * s * (1.0 - s) * (1.0 - 2.0 * s) / spec.tau**2
    if np.isscalar(t):
        return float(b), float(db), float(ddb)
    return b, db, ddb


def frequency_squared(spec: StrokeSpec, t):
    """Inverse-engineered squared trap frequency omega^2(t).

    May be negative for fast strokes (transiently inverted trap); see
    ``cutoff_time`` for the confinement threshold.
    """
    b, _, ddb = scaling_factor(spec, t)
    return spec.omega_start**2 / b**4 - ddb / b


def omega_at(spec: StrokeSpec, t: float) -> float:
    """Instantaneous trap frequency; raises if the trap is inverted."""
    w2 = frequency_squared(spec, t)
    if w2 <= 0.0:
        raise InvertedTrapError(f"omega^2(t={t}) = {w2} <= 0; no confining trap")
    return math.sqrt(w2)


def eta(spec: StrokeSpec, t: float) -> float:
    """Rescaled time eta(t) = integral_0^t dt' / b(t')^2.

    Evaluated with adaptive quadrature to absolute tolerance 1e-10.
    """
    _check_domain(spec, t)
    if t == 0.0:
        return 0.0
    val, _ = quad(lambda u: 1.0 / scaling_factor(spec, u)[0] ** 2, 0.0, t,
                  epsabs=1e-10, epsrel=1e-12, limit=200)
    return val


def trajectory_point(spec: StrokeSpec, t: float) -> TrajectoryPoint:
    """All protocol data (b, derivatives, omega^2, eta) at one time."""
    b, db, ddb = scaling_factor(spec, t)
    return TrajectoryPoint(t=float(t), b=b, bdot=db, bddot=ddb,
                           omega_sq=frequency_squared(spec, t), eta=eta(spec, t))


def sample_stroke(spec: StrokeSpec, n: int) -> list[TrajectoryPoint]:
    """Uniform n-point sampling of the stroke, t = 0 ... tau inclusive.

    eta is accumulated segment by segment so the whole sweep costs one pass.
    """
    if n < 2:
        raise ParameterError(f"need at least 2 sample points, got {n}")
    times = np.linspace(0.0, spec.tau, n)
    points = []
    eta_acc = 0.0
    prev = 0.0
    for t in times:
        if t > prev:
            seg, _ = quad(lambda u: 1.0 / scaling_factor(spec, u)[0] ** 2, prev, t,
                          epsabs=1e-10, epsrel=1e-12, limit=200)
            eta_acc += seg
            prev = t
        b, db, ddb = scaling_factor(spec, t)
        points.append(TrajectoryPoint(t=float(t), b=b, bdot=db, bddot=ddb,
                                      omega_sq=frequency_squared(spec, t), eta=eta_acc))
    return points


@dataclass(frozen=True)
class ErmakovSolution:
    """Forward Ermakov integration result: accepted steps plus dense output."""

    t: np.ndarray
    b: np.ndarray
    bdot: np.ndarray
    sol: object  # scipy dense-output interpolant

    def __call__(self, t):
        y = self.sol(t)
        return y[0], y[1]


_B_FLOOR = 1e-9


def ermakov_forward(
    spec: StrokeSpec,
    omega_sq_fn=None,
    b0: float = 1.0,
    bdot0: float = 0.0,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    t_eval=None,
) -> ErmakovSolution:
    """Integrate b'' = omega_start^2 / b^3 - omega^2(t) b forward in time.

    omega_sq_fn defaults to the engineered ``frequency_squared`` of the spec,
    in which case the exact solution is the quintic scaling factor itself
    (round-trip consistency check).  Uses an adaptive embedded Runge-Kutta
    scheme at relative tolerance 1e-10; a collapse of b below 1e-9 terminates
    the integration with an error.
    """
    if omega_sq_fn is None:
        omega_sq_fn = lambda t: frequency_squared(spec, t)
    w0_sq = spec.omega_start**2

    def rhs(t, y):
        b, db = y
        return [db, w0_sq / b**3 - omega_sq_fn(t) * b]

    def collapse(t, y):
        return y[0] - _B_FLOOR

    collapse.terminal = True
    collapse.direction = -1

    res = solve_ivp(rhs, (0.0, spec.tau), [b0, bdot0], method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True, events=collapse,
                    t_eval=t_eval)
    if res.t_events[0].size > 0:
        raise IntegrationFailureError(
            f"b collapsed below {_B_FLOOR} at t = {res.t_events[0][0]}")
    if not res.success:
        raise IntegrationFailureError(f"Ermakov integration failed: {res.message}")
    return ErmakovSolution(t=res.t, b=res.y[0], bdot=res.y[1], sol=res.sol)


def ermakov_residual_max(solution: ErmakovSolution, spec: StrokeSpec,
                         omega_sq_fn=None, n: int = 257) -> float:
    """Max |b'' + omega^2 b - omega_start^2/b^3| with b'' reconstructed by
    five-point finite differences of the integrated bdot.

    Non-circular check: the second derivative is measured from the returned
    trajectory rather than re-evaluated from the ODE right-hand side.
    """
    if omega_sq_fn is None:
        omega_sq_fn = lambda t: frequency_squared(spec, t)
    h = spec.tau / (8.0 * (n - 1))
    ts = np.linspace(4 * h, spec.tau - 4 * h, n)
    stencil = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    worst = 0.0
    for t in ts:
        window = t + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        bdots = solution.sol(window)[1]
        bddot = float(stencil @ bdots)
        b = float(solution.sol(t)[0])
        resid = abs(bddot + omega_sq_fn(t) * b - spec.omega_start**2 / b**3)
        worst = max(worst, resid)
    return worst


def _min_frequency_squared(spec: StrokeSpec, grid_points: int = 2001) -> float:
    """Global minimum of omega^2(t) over the stroke: dense grid plus a
    bounded local refinement around the best grid cell."""
    s = np.linspace(0.0, 1.0, grid_points)
    t = s * spec.tau
    w2 = frequency_squared(spec, t)
    j = int(np.argmin(w2))
    lo = t[max(j - 2, 0)]
    hi = t[min(j + 2, grid_points - 1)]
    if hi <= lo:
        return float(w2[j])
    res = minimize_scalar(lambda u: frequency_squared(spec, float(u)),
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * spec.tau})
    return float(min(w2[j], res.fun))


@functools.lru_cache(maxsize=256)
def _cutoff_time_cached(omega_start: float, omega_end: float, rel_tol: float) -> float:
    lo, hi = 1e-3 / omega_start, 1e3 / omega_start

    def confining(tau: float) -> bool:
        spec = StrokeSpec(omega_start, omega_end, tau)
        return _min_frequency_squared(spec) >= 0.0

    if confining(lo) or not confining(hi):
        raise BracketError(
            f"no confinement threshold bracketed in [{lo}, {hi}] for "
            f"omega {omega_start} -> {omega_end}")
    while (hi - lo) > rel_tol * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        if confining(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def cutoff_time(omega_start: float, omega_end: float, rel_tol: float = 1e-6) -> float:
    """Smallest stroke duration keeping omega^2(t) >= 0 throughout.

    Bisection on tau to relative precision ``rel_tol`` within the bracket
    [1e-3, 1e3] / omega_start; raises BracketError when the threshold falls
    outside that range.  By construction of the quintic the minimum of
    omega^2 over the stroke is monotone in tau, so bisection is sound.
    """
    if not (omega_start > 0.0 and omega_end > 0.0):
        raise ParameterError("frequencies must be positive")
    if omega_start == omega_end:
        raise ParameterError("cutoff time undefined for an identity stroke")
    return _cutoff_time_cached(float(omega_start), float(omega_end), float(rel_tol))


def adiabatic_scaling(spec: StrokeSpec, t: float) -> float:
    """Adiabatic-reference scaling b_ad(t) = (omega_start^2 / omega^2(t))^(1/4)."""
    w2 = frequency_squared(spec, t)
    if w2 <= 0.0:
        raise InvertedTrapError(
            f"adiabatic reference undefined: omega^2(t={t}) = {w2} <= 0")
    return (spec.omega_start**2 / w2) ** 0.25
