"""Zero-mean single-mode Gaussian states and their thermodynamic functionals.

States are represented by the symmetrized 2x2 covariance matrix of (x, p).
Everything needed downstream is closed-form at this level: thermal
preparation, symplectic propagation under the scaling dynamics, energy
moments, von Neumann and relative entropies, Uhlmann fidelity and the Bures
angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalConsistencyError, ParameterError, UnphysicalStateError
from .protocol import OscillatorParams, TrajectoryPoint

__all__ = [
    "GaussianState",
    "GibbsReference",
    "AdiabaticReference",
    "thermal_state",
    "evolve_scaling",
    "mean_energy",
    "energy_variance",
    "partition_function",
    "free_energy",
    "von_neumann_entropy",
    "symplectic_eigenvalue",
    "relative_entropy_to_gibbs",
    "gaussian_fidelity",
    "bures_angle",
    "coth",
    "log_two_sinh",
]

_OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])  # symplectic form


def coth(x: float) -> float:
    """coth for positive argument; saturates cleanly for large x."""
    if x <= 0.0:
        raise ParameterError(f"coth argument must be positive, got {x}")
    return 1.0 / math.tanh(x)


def log_two_sinh(x: float) -> float:
    """log(2 sinh x) for x > 0, stable against overflow for large x."""
    if x <= 0.0:
        raise ParameterError(f"log(2 sinh x) needs x > 0, got {x}")
    return x + math.log1p(-math.exp(-2.0 * x))


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian state; cov is the symmetrized covariance of (x, p)."""

    cov: np.ndarray

    def __post_init__(self) -> None:
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (2, 2):
            raise ParameterError(f"covariance must be 2x2, got shape {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise ParameterError("covariance must be finite")
        asym = abs(cov[0, 1] - cov[1, 0])
        scale = max(abs(cov).max(), 1.0)
        if asym > 1e-10 * scale:
            raise ParameterError(f"covariance must be symmetric, asymmetry {asym}")
        cov = 0.5 * (cov + cov.T)
        if cov[0, 0] <= 0.0 or cov[1, 1] <= 0.0 or np.linalg.det(cov) <= 0.0:
            raise UnphysicalStateError(f"covariance not positive definite: {cov}")
        object.__setattr__(self, "cov", cov)

    @property
    def mean(self) -> np.ndarray:
        return np.zeros(2)


@dataclass(frozen=True)
class GibbsReference:
    """Reference thermal equilibrium at (beta_ref, omega_ref)."""

    beta_ref: float
    omega_ref: float

    def __post_init__(self) -> None:
        if not (self.beta_ref > 0.0 and math.isfinite(self.beta_ref)):
            raise ParameterError(f"beta_ref must be positive, got {self.beta_ref}")
        if not (self.omega_ref > 0.0 and math.isfinite(self.omega_ref)):
            raise ParameterError(f"omega_ref must be positive, got {self.omega_ref}")


@dataclass(frozen=True)
class AdiabaticReference:
    """Rescaled inverse temperature beta_t with beta_t * omega_t = beta * omega_start,
    i.e. the Gibbs state at omega_t carrying the unchanged initial populations."""

    beta_t: float

    def to_gibbs(self, omega_t: float) -> GibbsReference:
        return GibbsReference(beta_ref=self.beta_t, omega_ref=omega_t)


def thermal_state(params: OscillatorParams, omega: float) -> GaussianState:
    """Thermal state of a static trap at frequency omega, temperature 1/beta."""
    if not (omega > 0.0 and math.isfinite(omega)):
        raise ParameterError(f"omega must be positive, got {omega}")
    c = coth(0.5 * params.beta * params.hbar * omega)
    var_x = params.hbar * c / (2.0 * params.m * omega)
    var_p = params.hbar * params.m * omega * c / 2.0
    return GaussianState(cov=np.diag([var_x, var_p]))


def _scaling_propagator(point: TrajectoryPoint, m: float, omega_start: float) -> np.ndarray:
    """Symplectic matrix mapping (x, p) at t=0 to time t of the stroke.

    Built from the two classical solutions u = b cos(omega_start eta) and
    v = b sin(omega_start eta) of x'' + omega^2(t) x = 0.
    """
    theta = omega_start * point.eta
    cth, sth = math.cos(theta), math.sin(theta)
    u = point.b * cth
    v = point.b * sth
    udot = point.bdot * cth - (omega_start / point.b) * sth
    vdot = point.bdot * sth + (omega_start / point.b) * cth
    return np.array([[u, v / (m * omega_start)],
                     [m * udot, vdot / omega_start]])


def evolve_scaling(state0: GaussianState, point: TrajectoryPoint,
                   params: OscillatorParams, omega_start: float | None = None) -> GaussianState:
    """Propagate a Gaussian state along the scaling dynamics to ``point``.

    omega_start defaults to params.omega0; pass the stroke's own start
    frequency when evolving a compression stroke.
    """
    w0 = params.omega0 if omega_start is None else omega_start
    S = _scaling_propagator(point, params.m, w0)
    det = S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]
    if abs(det - 1.0) > 1e-12:
        raise NumericalConsistencyError(f"propagator not symplectic: det S = {det}")
    return GaussianState(cov=S @ state0.cov @ S.T)


def _quadratic_form(omega_sq: float, m: float) -> np.ndarray:
    return np.diag([m * omega_sq, 1.0 / m])


def mean_energy_from_omega_sq(state: GaussianState, omega_sq: float,
                              params: OscillatorParams) -> float:
    """<H> for H = p^2/2m + m omega^2 x^2 / 2; omega^2 may be negative."""
    A = _quadratic_form(omega_sq, params.m)
    return 0.5 * float(np.trace(A @ state.cov))


def mean_energy(state: GaussianState, omega: float, params: OscillatorParams) -> float:
    """Mean energy in the trap at frequency omega (zero-mean state)."""
    return mean_energy_from_omega_sq(state, omega * omega, params)


def energy_variance_from_omega_sq(state: GaussianState, omega_sq: float,
                                  params: OscillatorParams) -> float:
    """Var(H) of a zero-mean Gaussian state under a quadratic Hamiltonian.

    Quartic Wick contraction gives
        Var(H) = 1/2 Tr[(Sigma A)^2] + hbar^2/8 Tr[(Omega A)^2]
    with A = diag(m omega^2, 1/m) and Omega the symplectic form; the second
    term is the operator-ordering correction that makes the ground-state
    variance vanish exactly.
    """
    A = _quadratic_form(omega_sq, params.m)
    SA = state.cov @ A
    OA = _OMEGA @ A
    return 0.5 * float(np.trace(SA @ SA)) + (params.hbar**2 / 8.0) * float(np.trace(OA @ OA))


def energy_variance(state: GaussianState, omega: float, params: OscillatorParams) -> float:
    return energy_variance_from_omega_sq(state, omega * omega, params)


def partition_function(beta: float, omega: float, params: OscillatorParams) -> float:
    """Z = 1 / (2 sinh(beta hbar omega / 2)); underflows to 0.0 for very
    large beta hbar omega, in which case use free_energy directly."""
    x = 0.5 * beta * params.hbar * omega
    if x <= 0.0:
        raise ParameterError("beta and omega must be positive")
    return math.exp(-log_two_sinh(x))

def free_energy(beta: float, omega: float, params: OscillatorParams) -> float:
    """F = (1/beta) log(2 sinh(beta hbar omega / 2)), log-domain throughout."""
    x = 0.5 * beta * params.hbar * omega
    if x <= 0.0:
        raise ParameterError("beta and omega must be positive")
    return log_two_sinh(x) / beta


def symplectic_eigenvalue(state: GaussianState, params: OscillatorParams) -> float:
    """nu = sqrt(det cov) / hbar; physical states have nu >= 1/2."""
    return math.sqrt(np.linalg.det(state.cov)) / params.hbar


def von_neumann_entropy(state: GaussianState, params: OscillatorParams) -> float:
    """Entropy of a single-mode Gaussian state from its symplectic eigenvalue.

    nu within 1e-9 below 1/2 is clamped to exactly 1/2 (pure state); anything
    lower is rejected as unphysical.
    """
    nu = symplectic_eigenvalue(state, params)
    if nu < 0.5 - 1e-9:
        raise UnphysicalStateError(f"symplectic eigenvalue {nu} < 1/2")
    nu = max(nu, 0.5)
    if nu == 0.5:
        return 0.0
    return (nu + 0.5) * math.log(nu + 0.5) - (nu - 0.5) * math.log(nu - 0.5)


def relative_entropy_to_gibbs(state: GaussianState, ref: GibbsReference,
                              params: OscillatorParams) -> float:
    """S(rho || rho_ref) for a Gibbs reference at (beta_ref, omega_ref):

        beta_ref <H_ref> - S(rho) - log(2 sinh(beta_ref hbar omega_ref / 2)).
    """
    e_ref = mean_energy(state, ref.omega_ref, params)
    s = von_neumann_entropy(state, params)
    return ref.beta_ref * e_ref - s - log_two_sinh(0.5 * ref.beta_ref * params.hbar * ref.omega_ref)


def gaussian_fidelity(state_a: GaussianState, state_b: GaussianState,
                      params: OscillatorParams) -> float:
    """Uhlmann fidelity of two zero-mean single-mode Gaussian states.

    With sigma = 2 cov / hbar (vacuum -> identity),
        Delta = det(sigma_a + sigma_b),
        delta = (det sigma_a - 1)(det sigma_b - 1),
        F = 2 / (sqrt(Delta + delta) - sqrt(delta)).
    """
    sa = 2.0 * state_a.cov / params.hbar
    sb = 2.0 * state_b.cov / params.hbar
    big = float(np.linalg.det(sa + sb))
    small = (float(np.linalg.det(sa)) - 1.0) * (float(np.linalg.det(sb)) - 1.0)
    small = max(small, 0.0)  # roundoff guard for nearly pure states
    fid = 2.0 / (math.sqrt(big + small) - math.sqrt(small))
    if not (-1e-12 <= fid <= 1.0 + 1e-12):
        raise NumericalConsistencyError(f"fidelity {fid} outside [0, 1]")
    return min(max(fid, 0.0), 1.0)


def bures_angle(state_a: GaussianState, state_b: GaussianState,
                params: OscillatorParams) -> float:
    """Bures angle L = arccos(sqrt(F)), in [0, pi/2]."""
    return math.acos(math.sqrt(gaussian_fidelity(state_a, state_b, params)))
