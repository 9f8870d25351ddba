"""Work statistics of a shortcut-driven stroke started from a thermal state.

Work is defined through the two-point measurement scheme: projective energy
measurements at t=0 and at t, with the unitary scaling dynamics in between.
For a thermal initial state all moments used here are closed-form in the
scaling factor b(t):

    <W>(t)    = hbar/2 [ (bdot^2 + omega^2 b^2 + omega_s^2/b^2) / (2 omega_s)
                         - omega_s ] coth(beta hbar omega_s / 2)
    <W_ad>(t) = hbar (omega(t) - omega_s)/2 * coth(beta hbar omega_s / 2)

and the excess (friction) work delta W = <W> - <W_ad> admits two equivalent
relative-entropy decompositions, one against the instantaneous equilibrium
state and one against the adiabatic reference with rescaled inverse
temperature beta_t = beta omega_s / omega(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .errors import CutoffViolationError, ParameterError
from .gaussian import (
    _OMEGA,
    GaussianState,
    GibbsReference,
    _quadratic_form,
    _scaling_propagator,
    coth,
    free_energy,
    relative_entropy_to_gibbs,
    thermal_state,
)
from .protocol import (
    OscillatorParams,
    StrokeSpec,
    cutoff_time,
    omega_at,
    scaling_factor,
    trajectory_point,
)

__all__ = [
    "WorkRecord",
    "DeltaWDecomposition",
    "DissipationSweep",
    "evolved_thermal_state",
    "mean_work_sta",
    "mean_work_adiabatic",
    "work_std",
    "delta_w",
    "delta_w_via_relative_entropies",
    "irreversible_entropy",
    "rescaled_inverse_temperature",
    "work_record",
    "avg_delta_w",
    "sweep_avg_delta_w",
]


@dataclass(frozen=True)
class WorkRecord:
    """All per-time stroke diagnostics in one row; the two relative-entropy
    columns are divided by beta so every field carries energy units."""

    t: float
    mean_w: float
    mean_w_ad: float
    std_w: float
    delta_w: float
    dS_irr: float
    rel_ent_t: float
    rel_ent_ad: float
    rel_ent_alt: float


@dataclass(frozen=True)
class DeltaWDecomposition:
    """Two relative-entropy routes to the excess work.

    via_equilibrium_reference: (1/beta) [S(rho_t || rho_eq) - S(rho_ad || rho_eq)]
    via_adiabatic_reference:   (1/beta_t) S(rho_t || rho_ad)
    """

    via_equilibrium_reference: float
    via_adiabatic_reference: float


@dataclass(frozen=True)
class DissipationSweep:
    """Stroke-integrated excess work over a ladder of durations, with the
    fitted log-log power law."""

    tau_values: np.ndarray
    avg_delta_w: np.ndarray
    fitted_exponent: float
    r_squared: float
    tau_c: float


def _coth_start(params: OscillatorParams, spec: StrokeSpec) -> float:
    return coth(0.5 * params.beta * params.hbar * spec.omega_start)


def _stroke_params(params: OscillatorParams, beta: float, omega0: float) -> OscillatorParams:
    return replace(params, beta=beta, omega0=omega0)


def evolved_thermal_state(params: OscillatorParams, spec: StrokeSpec, t: float) -> GaussianState:
    """Covariance of the evolved thermal state, eta-free closed form.

    For a thermal start the rotation angle omega_s * eta drops out of the
    propagated covariance, leaving
        Var x = b^2 Var x(0),  Cov(x,p) = m b bdot Var x(0),
        Var p = (bdot^2 + omega_s^2/b^2) m^2 Var x(0).
    Cross-checked in the tests against the general symplectic propagation.
    """
    b, db, _ = scaling_factor(spec, t)
    ax = params.hbar * _coth_start(params, spec) / (2.0 * params.m * spec.omega_start)
    cov = np.array([
        [ax * b * b, ax * params.m * b * db],
        [ax * params.m * b * db,
         ax * params.m**2 * (db * db + spec.omega_start**2 / (b * b))],
    ])
    return GaussianState(cov=cov)


def mean_work_sta(params: OscillatorParams, spec: StrokeSpec, t: float) -> float:
    """Mean two-point-measurement work up to time t along the shortcut."""
    b, db, ddb = scaling_factor(spec, t)
    w2 = spec.omega_start**2 / b**4 - ddb / b
    ws = spec.omega_start
    bracket = (db * db + w2 * b * b + ws * ws / (b * b)) / (2.0 * ws) - ws
    return 0.5 * params.hbar * bracket * _coth_start(params, spec)


def mean_work_adiabatic(params: OscillatorParams, spec: StrokeSpec, t: float) -> float:
    """Mean work of the ideal adiabat ending at the same omega(t)."""
    w = omega_at(spec, t)  # raises InvertedTrapError when not confining
    return 0.5 * params.hbar * (w - spec.omega_start) * _coth_start(params, spec)


def delta_w(params: OscillatorParams, spec: StrokeSpec, t: float) -> float:
    """Excess work over the adiabat, in the manifestly nonnegative form
    (hbar coth / 4 omega_s) [ bdot^2 + (omega b - omega_s / b)^2 ]."""
    b, db, _ = scaling_factor(spec, t)
    w = omega_at(spec, t)
    ws = spec.omega_start
    return (params.hbar * _coth_start(params, spec) / (4.0 * ws)) * (
        db * db + (w * b - ws / b) ** 2)


def work_std(params: OscillatorParams, spec: StrokeSpec, t: float) -> float:
    """Standard deviation of two-point-measurement work at time t.

    Uses the two-time quartic Wick contraction, valid because the initial
    thermal state commutes with H(0):
        Var(W) = 1/2 Tr[(Sigma D)^2] + hbar^2/8 Tr[(Omega D)^2],
    where D = S^T A_t S - A_0 compares the Heisenberg-evolved quadratic form
    with the initial one and Sigma is the initial covariance.
    """
    point = trajectory_point(spec, t)
    S = _scaling_propagator(point, params.m, spec.omega_start)
    A_t = _quadratic_form(point.omega_sq, params.m)
    A_0 = _quadratic_form(spec.omega_start**2, params.m)
    D = S.T @ A_t @ S - A_0
    sigma = thermal_state(
        _stroke_params(params, params.beta, spec.omega_start), spec.omega_start).cov
    SD = sigma @ D
    OD = _OMEGA @ D
    var = 0.5 * float(np.trace(SD @ SD)) + (params.hbar**2 / 8.0) * float(np.trace(OD @ OD))
    return math.sqrt(max(var, 0.0))


def rescaled_inverse_temperature(params: OscillatorParams, spec: StrokeSpec, t: float) -> float:
    """beta_t with beta_t * omega(t) = beta * omega_start: the effective
    inverse temperature of the reference carrying the initial populations."""
    return params.beta * spec.omega_start / omega_at(spec, t)


def _references(params: OscillatorParams, spec: StrokeSpec, t: float):
    w = omega_at(spec, t)
    eq = GibbsReference(beta_ref=params.beta, omega_ref=w)
    ad = GibbsReference(beta_ref=params.beta * spec.omega_start / w, omega_ref=w)
    return eq, ad


def _adiabatic_state(params: OscillatorParams, ad: GibbsReference) -> GaussianState:
    return thermal_state(_stroke_params(params, ad.beta_ref, params.omega0), ad.omega_ref)


def delta_w_via_relative_entropies(params: OscillatorParams, spec: StrokeSpec,
                                   t: float) -> DeltaWDecomposition:
    """Both relative-entropy decompositions of the excess work."""
    eq, ad = _references(params, spec, t)
    rho_t = evolved_thermal_state(params, spec, t)
    rho_ad = _adiabatic_state(params, ad)
    s_t_eq = relative_entropy_to_gibbs(rho_t, eq, params)
    s_ad_eq = relative_entropy_to_gibbs(rho_ad, eq, params)
    s_t_ad = relative_entropy_to_gibbs(rho_t, ad, params)
    return DeltaWDecomposition(
        via_equilibrium_reference=(s_t_eq - s_ad_eq) / params.beta,
        via_adiabatic_reference=s_t_ad / ad.beta_ref,
    )


def irreversible_entropy(params: OscillatorParams, spec: StrokeSpec, t: float) -> float:
    """Irreversible entropy production beta (<W> - Delta F(t)); equals
    S(rho_t || rho_eq(t)) identically along the unitary stroke."""
    w = omega_at(spec, t)
    dF = free_energy(params.beta, w, params) - free_energy(params.beta, spec.omega_start, params)
    return params.beta * (mean_work_sta(params, spec, t) - dF)


def work_record(params: OscillatorParams, spec: StrokeSpec, t: float) -> WorkRecord:
    """Bundle every per-time diagnostic into one row."""
    eq, ad = _references(params, spec, t)
    rho_t = evolved_thermal_state(params, spec, t)
    rho_ad = _adiabatic_state(params, ad)
    mean_w = mean_work_sta(params, spec, t)
    mean_ad = mean_work_adiabatic(params, spec, t)
    decomp = delta_w_via_relative_entropies(params, spec, t)
    return WorkRecord(
        t=float(t),
        mean_w=mean_w,
        mean_w_ad=mean_ad,
        std_w=work_std(params, spec, t),
        delta_w=mean_w - mean_ad,
        dS_irr=irreversible_entropy(params, spec, t),
        rel_ent_t=relative_entropy_to_gibbs(rho_t, eq, params) / params.beta,
        rel_ent_ad=relative_entropy_to_gibbs(rho_ad, eq, params) / params.beta,
        rel_ent_alt=decomp.via_adiabatic_reference,
    )


def _require_confined(spec: StrokeSpec) -> float:
    tau_c = cutoff_time(spec.omega_start, spec.omega_end)
    if spec.tau < tau_c * (1.0 - 1e-9):
        raise CutoffViolationError(
            f"tau = {spec.tau} below confinement cutoff tau_c = {tau_c}")
    return tau_c


def avg_delta_w(params: OscillatorParams, spec: StrokeSpec) -> float:
    """Stroke-integrated excess work, integral_0^tau delta W(t) dt.

    This is the quantity that falls off like 1/tau for slow strokes (the
    per-time average carries an extra 1/tau on top).  Requires tau >= tau_c
    so the adiabatic reference exists along the whole stroke.
    """
    _require_confined(spec)
    val, _ = quad(lambda t: delta_w(params, spec, t), 0.0, spec.tau,
                  epsabs=1e-10, epsrel=1e-10, limit=400)
    return val


def sweep_avg_delta_w(params: OscillatorParams, gamma: float, tau_list) -> DissipationSweep:
    """Sweep the stroke duration and fit log(integrated delta W) vs log(tau).

    tau_list must be strictly increasing with every entry above the cutoff
    time; the fit is an unweighted least-squares line on the log-log points.
    """
    taus = np.asarray(list(tau_list), dtype=float)
    if taus.size < 2:
        raise ParameterError("need at least two tau values to fit a power law")
    if np.any(np.diff(taus) <= 0.0):
        raise ParameterError("tau values must be strictly increasing")
    spec0 = StrokeSpec.from_gamma(params, gamma, taus[0])
    tau_c = cutoff_time(spec0.omega_start, spec0.omega_end)
    if np.any(taus < tau_c * (1.0 - 1e-9)):
        raise CutoffViolationError(f"all tau must be >= tau_c = {tau_c}")
    values = np.array([
        avg_delta_w(params, StrokeSpec.from_gamma(params, gamma, tau)) for tau in taus])
    logx = np.log(taus)
    logy = np.log(values)
    slope, intercept = np.polyfit(logx, logy, 1)
    fit = slope * logx + intercept
    ss_res = float(np.sum((logy - fit) ** 2))
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    r_sq = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return DissipationSweep(tau_values=taus, avg_delta_w=values,
                            fitted_exponent=float(slope), r_squared=r_sq, tau_c=tau_c)
