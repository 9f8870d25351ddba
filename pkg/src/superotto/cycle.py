"""Four-stroke harmonic Otto cycle built from engineered frictionless strokes.

Strokes 1 and 3 expand and compress the trap with the shortcut protocol, so
populations at the stroke ends are exactly adiabatic; strokes 2 and 4 are
instantaneous full thermalizations at fixed frequency.  Works and heats are
computed along the dynamic Gaussian route; `sum_adiabatic_work` is the
independent closed-form path the two are cross-checked against.

The power bound multiplies the extractable work by a speed-limit rate built
from time-averaged energy scales along stroke 1 and the Bures angle between
the hot thermal states at the two frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.integrate import quad

from .errors import (
    CutoffViolationError,
    DomainError,
    NumericalConsistencyError,
    ParameterError,
)
from .gaussian import (
    GaussianState,
    GibbsReference,
    bures_angle,
    energy_variance_from_omega_sq,
    gaussian_fidelity,
    mean_energy,
    mean_energy_from_omega_sq,
    thermal_state,
)
from .protocol import OscillatorParams, StrokeSpec, cutoff_time, frequency_squared
from .workstats import evolved_thermal_state, mean_work_sta

__all__ = [
    "CycleSpec",
    "CycleReport",
    "QslPowerBound",
    "run_superadiabatic_cycle",
    "sum_adiabatic_work",
    "isochore_heat",
    "qsl_power_bound",
]

_QUAD_OPTS = dict(epsabs=1e-11, epsrel=1e-11, limit=200)


@dataclass(frozen=True)
class CycleSpec:
    """Parameters of one Otto cycle.

    omega0 is the hot-side trap frequency, omega_f <= omega0 the cold side
    (equality gives the degenerate zero-work cycle).  tau1/tau3 are the
    expansion/compression durations and must clear the confinement cutoff;
    tau2/tau4 are bookkeeping times for the instantaneous isochores.
    """

    omega0: float
    omega_f: float
    beta_hot: float
    beta_cold: float
    tau1: float
    tau3: float
    tau2: float = 0.0
    tau4: float = 0.0

    def __post_init__(self) -> None:
        if not (self.omega0 >= self.omega_f > 0.0):
            raise ParameterError(
                f"need omega0 >= omega_f > 0, got ({self.omega0}, {self.omega_f})")
        if not (self.beta_cold > self.beta_hot > 0.0):
            raise ParameterError(
                f"need beta_cold > beta_hot > 0, got ({self.beta_cold}, {self.beta_hot})")
        if self.tau1 <= 0.0 or self.tau3 <= 0.0:
            raise ParameterError("stroke durations must be positive")
        if self.tau2 < 0.0 or self.tau4 < 0.0:
            raise ParameterError("isochore durations must be nonnegative")
        if self.omega_f < self.omega0:
            tc = cutoff_time(self.omega0, self.omega_f)
            if self.tau1 < tc or self.tau3 < tc:
                raise CutoffViolationError(
                    f"stroke durations ({self.tau1}, {self.tau3}) below the "
                    f"confinement cutoff {tc:.6g}")

    @property
    def degenerate(self) -> bool:
        return self.omega_f == self.omega0

    @property
    def total_time(self) -> float:
        return self.tau1 + self.tau2 + self.tau3 + self.tau4


@dataclass(frozen=True)
class CycleReport:
    """Per-stroke energetics of one cycle.  Sign convention: energies gained
    by the oscillator are positive, so an engine has w1 + w3 < 0."""

    w1: float
    w3: float
    q2: float
    q4: float
    net_work: float
    efficiency: float
    otto_efficiency_closed_form: float
    power: float
    qsl_bound: float
    is_engine: bool


@dataclass(frozen=True)
class QslPowerBound:
    """Speed-limit upper bound on engine power with its ingredients.

    e_tau_referenced measures mean energy above the instantaneous ground
    level; e_tau_raw keeps the zero-point term.  The bound uses the
    referenced value; both are kept for transparency.
    """

    bound: float
    power: float
    e_tau_raw: float
    e_tau_referenced: float
    delta_e_tau: float
    fidelity: float
    bures_length: float
    unbounded: bool


def _hot_params(cycle: CycleSpec, params: OscillatorParams) -> OscillatorParams:
    return replace(params, omega0=cycle.omega0, beta=cycle.beta_hot)


def _cold_params(cycle: CycleSpec, params: OscillatorParams) -> OscillatorParams:
    return replace(params, omega0=cycle.omega0, beta=cycle.beta_cold)


def _expansion_stroke(cycle: CycleSpec) -> StrokeSpec:
    return StrokeSpec(omega_start=cycle.omega0, omega_end=cycle.omega_f, tau=cycle.tau1)


def _compression_stroke(cycle: CycleSpec) -> StrokeSpec:
    return StrokeSpec(omega_start=cycle.omega_f, omega_end=cycle.omega0, tau=cycle.tau3)


def isochore_heat(state_in: GaussianState, bath: GibbsReference, omega: float,
                  params: OscillatorParams) -> float:
    """Heat absorbed while fully thermalizing to the bath at fixed frequency:
    E_thermal(bath) - E(state_in)."""
    if not math.isclose(bath.omega_ref, omega, rel_tol=1e-12):
        raise ParameterError(
            f"bath frequency {bath.omega_ref} differs from the isochore "
            f"frequency {omega}")
    target = thermal_state(replace(params, beta=bath.beta_ref), omega)
    return mean_energy(target, omega, params) - mean_energy(state_in, omega, params)


def sum_adiabatic_work(cycle: CycleSpec, params: OscillatorParams) -> float:
    """Closed form for w1 + w3 with adiabatic endpoint populations:
    (hbar/2)(omega0 - omega_f) [coth(beta_c hbar omega_f/2) - coth(beta hbar omega0/2)].

    Negative exactly when the cold coth factor exceeds the hot one, which is
    the engine condition."""
    hb = params.hbar
    ch = 1.0 / math.tanh(0.5 * cycle.beta_hot * hb * cycle.omega0)
    cc = 1.0 / math.tanh(0.5 * cycle.beta_cold * hb * cycle.omega_f)
    return 0.5 * hb * (cycle.omega0 - cycle.omega_f) * (cc - ch)


def run_superadiabatic_cycle(cycle: CycleSpec, params: OscillatorParams) -> CycleReport:
    """Dynamic route around one cycle: evolve the thermal covariance through
    each engineered stroke, thermalize at the isochores, book works and heats.

    Non-engine parameter choices are reported with is_engine=False rather
    than raised, so sweeps can map the operating region.  qsl_bound is inf
    for the degenerate cycle (zero Bures length) and nan where the bound is
    not defined (tau1 != tau3 or no net extraction).
    """
    hot = _hot_params(cycle, params)
    cold = _cold_params(cycle, params)
    otto = 1.0 - cycle.omega_f / cycle.omega0
    if cycle.degenerate:
        return CycleReport(w1=0.0, w3=0.0, q2=0.0, q4=0.0, net_work=0.0,
                           efficiency=0.0, otto_efficiency_closed_form=otto,
                           power=0.0, qsl_bound=math.inf, is_engine=False)
    spec1 = _expansion_stroke(cycle)
    spec3 = _compression_stroke(cycle)
    w1 = mean_work_sta(hot, spec1, cycle.tau1)
    state1 = evolved_thermal_state(hot, spec1, cycle.tau1)
    q2 = isochore_heat(state1, GibbsReference(cycle.beta_cold, cycle.omega_f),
                       cycle.omega_f, params)
    w3 = mean_work_sta(cold, spec3, cycle.tau3)
    state3 = evolved_thermal_state(cold, spec3, cycle.tau3)
    q4 = isochore_heat(state3, GibbsReference(cycle.beta_hot, cycle.omega0),
                       cycle.omega0, params)
    net = w1 + w3
    efficiency = -net / q4 if q4 != 0.0 else otto
    power = -net / cycle.total_time
    try:
        qsl = qsl_power_bound(cycle, params).bound
    except (DomainError, ParameterError):
        qsl = math.nan
    return CycleReport(w1=w1, w3=w3, q2=q2, q4=q4, net_work=net,
                       efficiency=efficiency, otto_efficiency_closed_form=otto,
                       power=power, qsl_bound=qsl, is_engine=net < 0.0)


def qsl_power_bound(cycle: CycleSpec, params: OscillatorParams,
                    stroke: StrokeSpec | None = None) -> QslPowerBound:
    """Upper bound on engine power from a speed limit on stroke 1:
    P <= -(W_ad,1 + W_ad,3) * max(E_tau, dE_tau) / (hbar * L).

    E_tau and dE_tau are time averages of the mean energy above the
    instantaneous ground level and of the energy spread along the engineered
    expansion; L is the Bures angle between the hot thermal states at the two
    trap frequencies.  Requires equal stroke times and, for a finite bound,
    distinct endpoint frequencies and net work extraction.
    """
    hot = _hot_params(cycle, params)
    rho0 = thermal_state(hot, cycle.omega0)
    rho_eq_end = thermal_state(hot, cycle.omega_f)
    fid = gaussian_fidelity(rho0, rho_eq_end, params)
    length = bures_angle(rho0, rho_eq_end, params)
    if length < 1e-12:
        return QslPowerBound(bound=math.inf, power=0.0, e_tau_raw=math.nan,
                             e_tau_referenced=math.nan, delta_e_tau=math.nan,
                             fidelity=fid, bures_length=length, unbounded=True)
    if cycle.tau1 != cycle.tau3:
        raise ParameterError("power bound needs equal stroke times tau1 = tau3")
    extracted = -sum_adiabatic_work(cycle, params)
    if extracted <= 0.0:
        raise DomainError("power bound applies to the engine regime "
                          "(net work extraction) only")
    spec1 = stroke if stroke is not None else _expansion_stroke(cycle)
    tau = spec1.tau

    def state_at(t: float) -> GaussianState:
        return evolved_thermal_state(hot, spec1, t)

    def mean_raw(t: float) -> float:
        return mean_energy_from_omega_sq(state_at(t), frequency_squared(spec1, t), params)

    def ground(t: float) -> float:
        w2 = frequency_squared(spec1, t)
        return 0.5 * params.hbar * math.sqrt(max(w2, 0.0))

    def spread(t: float) -> float:
        var = energy_variance_from_omega_sq(state_at(t), frequency_squared(spec1, t), params)
        return math.sqrt(max(var, 0.0))

    e_raw = quad(mean_raw, 0.0, tau, **_QUAD_OPTS)[0] / tau
    e_ground = quad(ground, 0.0, tau, **_QUAD_OPTS)[0] / tau
    de = quad(spread, 0.0, tau, **_QUAD_OPTS)[0] / tau
    e_ref = e_raw - e_ground
    bound = extracted * max(e_ref, de) / (params.hbar * length)
    power = extracted / (cycle.tau1 + cycle.tau3)
    if bound < power * (1.0 - 1e-9):
        raise NumericalConsistencyError(
            f"power bound {bound} fell below the actual power {power}")
    return QslPowerBound(bound=bound, power=power, e_tau_raw=e_raw,
                         e_tau_referenced=e_ref, delta_e_tau=de,
                         fidelity=fid, bures_length=length, unbounded=False)
