"""Brute-force verification layer in a truncated Fock basis.

Everything downstream of the Gaussian closed forms can be re-derived here the
hard way: assemble H(t) from ladder operators in a fixed number basis,
propagate the full unitary with a time-ordered product of matrix
exponentials, project on instantaneous eigenbases for two-point-measurement
statistics, and take matrix-logarithm relative entropies.  The module shares
no formulas with the Gaussian path beyond the protocol itself.

The quadratic Hamiltonian only couples number states two apart, so the
computational basis splits into even and odd parity blocks that are
tridiagonal after compaction; stepping is done per block with exact
eigendecomposition exponentials.  A dense no-assumptions reference stepper
(`_propagate_dense`) is kept for cross-checking the blocked fast path.

Accuracy control is step halving: the step count doubles until two successive
full propagations agree below ``conv_tol`` in elementwise max norm.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, expm

from .errors import (
    DomainError,
    InvertedTrapError,
    NumericalConsistencyError,
    ParameterError,
    PropagationError,
    TruncationError,
)
from .gaussian import log_two_sinh
from .protocol import OscillatorParams, StrokeSpec, frequency_squared

__all__ = [
    "FockConfig",
    "TransitionMatrix",
    "WorkDistribution",
    "StateEntropies",
    "geometric_basis",
    "build_hamiltonian",
    "propagate",
    "propagate_snapshots",
    "transition_probs",
    "work_distribution",
    "moment",
    "density_matrix_entropies",
    "fock_state_entropies",
    "uhlmann_fidelity_thermal",
    "discrepancy_table",
]

# CF4 exponential integrator: two Gauss nodes, two exponentials per step.
_GAUSS_C1 = 0.5 - math.sqrt(3.0) / 6.0
_GAUSS_C2 = 0.5 + math.sqrt(3.0) / 6.0
_ALPHA_P = 0.25 + math.sqrt(3.0) / 6.0
_ALPHA_M = 0.25 - math.sqrt(3.0) / 6.0

# Levels above dim / (margin * spread) are treated as unrepresentable.
_REP_MARGIN = 3.0


@dataclass(frozen=True)
class FockConfig:
    """Truncation and stepping controls for the Fock-basis oracle.

    basis_omega selects the frequency of the number basis the problem is
    written in (None = the reference omega0).  A basis near the geometric
    mean of the stroke endpoints keeps strongly expanded states representable
    at much smaller dim; `geometric_basis` computes it.
    """

    dim: int = 200
    tail_tol: float = 1e-6
    dt_init: float | None = None
    conv_tol: float = 1e-9
    max_halvings: int = 20
    basis_omega: float | None = None

    def __post_init__(self) -> None:
        if self.dim < 16:
            raise ParameterError(f"dim must be >= 16, got {self.dim}")
        if not (0.0 < self.tail_tol <= 1e-6):
            raise ParameterError(f"tail_tol must lie in (0, 1e-6], got {self.tail_tol}")
        if self.dt_init is not None and self.dt_init <= 0.0:
            raise ParameterError("dt_init must be positive")
        if self.basis_omega is not None and self.basis_omega <= 0.0:
            raise ParameterError("basis_omega must be positive")


@dataclass(frozen=True)
class TransitionMatrix:
    """p[n, k]: probability of measuring instantaneous level k at time t
    after preparing level n at t = 0."""

    p: np.ndarray
    t: float


@dataclass(frozen=True)
class WorkDistribution:
    """Two-point-measurement work distribution: sorted atoms w with weights
    prob, degenerate atoms merged."""

    w: np.ndarray
    prob: np.ndarray
    t: float

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.w.tolist(), self.prob.tolist()))


@dataclass(frozen=True)
class StateEntropies:
    """Matrix-log relative entropies of the evolved state and the adiabatic
    reference at time t."""

    t: float
    evolved_vs_equilibrium: float
    adiabatic_vs_equilibrium: float
    evolved_vs_adiabatic: float


def geometric_basis(spec: StrokeSpec) -> float:
    """Geometric mean of the stroke endpoint frequencies."""
    return math.sqrt(spec.omega_start * spec.omega_end)


def _basis_omega(config: FockConfig, params: OscillatorParams) -> float:
    return params.omega0 if config.basis_omega is None else config.basis_omega


def _hamiltonian_coeffs(omega_sq: float, basis_omega: float,
                        params: OscillatorParams) -> tuple[float, float]:
    """H = p^2/2m + m omega^2 x^2/2 written in the basis_omega number basis
    decomposes as  dcoef * (a+ a + a a+)  +  ocoef * (a^2 + a+^2)."""
    dcoef = 0.25 * params.hbar * (basis_omega + omega_sq / basis_omega)
    ocoef = 0.25 * params.hbar * (omega_sq / basis_omega - basis_omega)
    return dcoef, ocoef


def _ladder_vectors(dim: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(dim, dtype=float)
    number = 2.0 * n + 1.0
    number[-1] = dim - 1.0  # truncated a a+ loses its top rung
    off2 = np.sqrt((n[: dim - 2] + 1.0) * (n[: dim - 2] + 2.0))
    return number, off2


def build_hamiltonian(omega_sq: float, config: FockConfig,
                      params: OscillatorParams) -> np.ndarray:
    """Dense real-symmetric H(omega_sq) in the truncated number basis.

    Exactly diagonal (entries hbar omega (n + 1/2), up to the truncation
    edge) when omega_sq equals the basis frequency squared.
    """
    wb = _basis_omega(config, params)
    dcoef, ocoef = _hamiltonian_coeffs(omega_sq, wb, params)
    number, off2 = _ladder_vectors(config.dim)
    H = np.diag(dcoef * number)
    band = ocoef * off2
    idx = np.arange(config.dim - 2)
    H[idx, idx + 2] = band
    H[idx + 2, idx] = band
    return H


def _parity_split(dim: int):
    even = np.arange(0, dim, 2)
    odd = np.arange(1, dim, 2)
    return even, odd


class _BlockedGenerator:
    """Parity blocks of dcoef * number + ocoef * off2, stacked into one
    (2, M, M) problem (the smaller block of odd dims is padded with a
    decoupled level) so each Taylor iteration is a handful of large numpy
    ops instead of many small ones."""

    def __init__(self, dim: int):
        self.dim = dim
        number, off2 = _ladder_vectors(dim)
        even, odd = _parity_split(dim)
        self.even, self.odd = even, odd
        m = even.size
        self.m = m
        self.d = np.zeros((2, m))
        self.e = np.zeros((2, m - 1))
        self.d[0] = number[even]
        self.d[1, : odd.size] = number[odd]
        # off2[j] couples basis levels j and j+2
        self.e[0] = off2[0::2]
        self.e[1, : off2[1::2].size] = off2[1::2]
        self._y = np.empty((2, m, m), dtype=complex)
        self._term = np.empty((2, m, m), dtype=complex)
        self._tmp = np.empty((2, m - 1, m), dtype=complex)

    def identity(self) -> np.ndarray:
        u = np.zeros((2, self.m, self.m), dtype=complex)
        u[0] = np.eye(self.m)
        u[1] = np.eye(self.m)
        return u

    def unstack(self, u: np.ndarray):
        return u[0], u[1][: self.odd.size, : self.odd.size]

    def apply_step(self, u: np.ndarray, dcoef: float, ocoef: float,
                   dt_over_hbar: float) -> np.ndarray:
        """Left-apply exp(-i dt/hbar (dcoef*number + ocoef*off2)) to the
        stacked block unitaries.

        The diagonal is centered first (global phase restored at the end) to
        shrink the series radius.  Steps with Gershgorin radius above 1 are
        split into equal substeps; very coarse steps (split factor > 4) use
        the exact tridiagonal eigendecomposition instead.
        """
        shift = 0.5 * dcoef * (self.d.max() + self.d.min())
        rho = dt_over_hbar * (np.abs(dcoef * self.d - shift).max()
                              + 2.0 * abs(ocoef) * self.e.max())
        n_split = max(1, int(math.ceil(rho)))
        if n_split > 4:
            out = np.empty_like(u)
            for i in (0, 1):
                w, v = eigh_tridiagonal(dcoef * self.d[i], ocoef * self.e[i])
                phase = np.exp(-1j * dt_over_hbar * w)
                out[i] = v @ (phase[:, None] * (v.T @ u[i]))
            return out
        coef = dt_over_hbar / n_split
        dc = dcoef * self.d - shift
        out = u.copy()
        term, y, tmp = self._term, self._y, self._tmp
        for _ in range(n_split):
            np.copyto(term, out)
            bound = 1.0
            k = 1
            while bound > 1e-15:
                s = -1j * coef / k
                ds = s * dc
                es = (s * ocoef) * self.e
                np.multiply(ds[:, :, None], term, out=y)
                np.multiply(es[:, :, None], term[:, 1:, :], out=tmp)
                y[:, :-1, :] += tmp
                np.multiply(es[:, :, None], term[:, :-1, :], out=tmp)
                y[:, 1:, :] += tmp
                term, y = y, term
                out += term
                bound *= rho / (n_split * k)
                k += 1
        self._term, self._y = term, y
        out *= cmath.exp(-1j * dt_over_hbar * shift)
        return out


def _resolve_steps(spec: StrokeSpec, times: np.ndarray, config: FockConfig) -> int:
    dt0 = config.dt_init
    if dt0 is None:
        # larger truncations raise the generator norm, so start the halving
        # ladder finer to skip rungs that cannot possibly pass
        dt0 = min(0.02 / spec.omega_start, spec.tau / 64.0)
        dt0 /= max(1.0, config.dim / 200.0)
    return max(16, int(math.ceil(times[-1] / dt0)))


def _segment_plan(times: np.ndarray, n_steps: int) -> list[tuple[float, float, int]]:
    t_max = times[-1]
    plan = []
    prev = 0.0
    for t in times:
        if t <= prev:
            continue
        m = max(1, int(round(n_steps * (t - prev) / t_max)))
        plan.append((prev, t, m))
        prev = t
    return plan


def _run_blocked(params: OscillatorParams, spec: StrokeSpec, times: np.ndarray,
                 n_steps: int, config: FockConfig):
    """One full time-ordered propagation; returns parity-block unitaries at
    each requested snapshot time."""
    wb = _basis_omega(config, params)
    gen = _BlockedGenerator(config.dim)
    u = gen.identity()
    snapshots = []
    for t in times:
        if t == 0.0:
            snapshots.append(gen.unstack(u.copy()))
    for t0, t1, m in _segment_plan(times, n_steps):
        h = (t1 - t0) / m
        base = t0 + h * np.arange(m)
        w2_1 = frequency_squared(spec, base + _GAUSS_C1 * h)
        w2_2 = frequency_squared(spec, base + _GAUSS_C2 * h)
        for k in range(m):
            d1, o1 = _hamiltonian_coeffs(float(w2_1[k]), wb, params)
            d2, o2 = _hamiltonian_coeffs(float(w2_2[k]), wb, params)
            # first (early-node-weighted) exponential, then the late one
            for a, b in ((_ALPHA_P, _ALPHA_M), (_ALPHA_M, _ALPHA_P)):
                u = gen.apply_step(u, a * d1 + b * d2, a * o1 + b * o2,
                                   h / params.hbar)
        snapshots.append(gen.unstack(u.copy()))
    return snapshots


def _scatter_blocks(blocks, dim: int) -> np.ndarray:
    even, odd = _parity_split(dim)
    u = np.zeros((dim, dim), dtype=complex)
    u[np.ix_(even, even)] = blocks[0]
    u[np.ix_(odd, odd)] = blocks[1]
    return u


def _propagate_dense(params: OscillatorParams, spec: StrokeSpec, t: float,
                     n_steps: int, config: FockConfig) -> np.ndarray:
    """Reference stepper: same integrator, dense scipy expm, no parity
    assumption.  Slow; used to cross-check the blocked fast path."""
    wb = _basis_omega(config, params)
    u = np.eye(config.dim, dtype=complex)
    h = t / n_steps
    for k in range(n_steps):
        t0 = k * h
        w2_1 = float(frequency_squared(spec, t0 + _GAUSS_C1 * h))
        w2_2 = float(frequency_squared(spec, t0 + _GAUSS_C2 * h))
        h1 = build_hamiltonian(w2_1, config, params)
        h2 = build_hamiltonian(w2_2, config, params)
        u = expm(-1j * h / params.hbar * (_ALPHA_M * h1 + _ALPHA_P * h2)) @ (
            expm(-1j * h / params.hbar * (_ALPHA_P * h1 + _ALPHA_M * h2)) @ u)
    return u


def _snapshot_diff(a, b) -> float:
    worst = 0.0
    for (ae, ao), (be, bo) in zip(a, b):
        worst = max(worst, float(np.abs(ae - be).max()), float(np.abs(ao - bo).max()))
    return worst


def propagate_snapshots(params: OscillatorParams, spec: StrokeSpec, times,
                        config: FockConfig) -> list[np.ndarray]:
    """Full unitaries U(t_i, 0) at the requested times (ascending, within
    [0, tau]), converged by step halving to ``conv_tol`` in max norm."""
    tarr = np.asarray(sorted(set(float(t) for t in times)), dtype=float)
    if tarr.size == 0:
        raise ParameterError("need at least one snapshot time")
    if tarr[0] < 0.0 or tarr[-1] > spec.tau:
        raise DomainError(f"snapshot times must lie in [0, {spec.tau}]")
    if tarr[-1] == 0.0:
        return [np.eye(config.dim, dtype=complex)]
    n0 = _resolve_steps(spec, tarr, config)
    prev = _run_blocked(params, spec, tarr, n0, config)
    for _ in range(config.max_halvings):
        n0 *= 2
        cur = _run_blocked(params, spec, tarr, n0, config)
        if _snapshot_diff(prev, cur) < config.conv_tol:
            prev = cur
            break
        prev = cur
    else:
        raise PropagationError(
            f"propagation not converged to {config.conv_tol} after "
            f"{config.max_halvings} halvings")
    for ue, uo in prev:
        for block in (ue, uo):
            defect = np.abs(block @ block.conj().T - np.eye(block.shape[0])).max()
            if defect > 1e-8:
                raise PropagationError(f"unitarity defect {defect} > 1e-8")
    out = [_scatter_blocks(b, config.dim) for b in prev]
    order = {t: i for i, t in enumerate(tarr)}
    return [out[order[float(t)]] for t in sorted(set(float(t) for t in times))]


def propagate(params: OscillatorParams, spec: StrokeSpec, t: float,
              config: FockConfig) -> np.ndarray:
    """U(t, 0) as a dense matrix in the truncated number basis."""
    return propagate_snapshots(params, spec, [t], config)[-1]


def _spread_factor(omega: float, basis_omega: float) -> float:
    return 0.5 * (omega / basis_omega + basis_omega / omega)


def _spectrum_guard(eps: np.ndarray, omega: float, config: FockConfig,
                    params: OscillatorParams, label: str) -> None:
    """Truncated eigenvalues must reproduce hbar omega (n + 1/2) for every
    level the basis can faithfully hold."""
    wb = _basis_omega(config, params)
    f = _spread_factor(omega, wb)
    k_check = min(config.dim // 2, max(8, int(config.dim / (_REP_MARGIN * f))))
    n = np.arange(k_check, dtype=float)
    exact = params.hbar * omega * (n + 0.5)
    rel = np.abs(eps[:k_check] - exact) / exact
    worst = float(rel.max())
    if worst > 1e-6:
        raise TruncationError(
            f"{label}: eigenvalue mismatch {worst:.3e} over the lowest "
            f"{k_check} levels at dim={config.dim}; increase dim")


def _instantaneous_basis(omega_sq: float, config: FockConfig,
                         params: OscillatorParams, label: str):
    """Sorted eigenpairs of H(omega_sq), diagonalized per parity block so the
    eigenvectors are exactly parity-pure (a dense solver can rotate within
    spuriously degenerate pairs at the truncation edge)."""
    if omega_sq <= 0.0:
        raise InvertedTrapError(f"{label}: omega^2 = {omega_sq} <= 0")
    omega = math.sqrt(omega_sq)
    wb = _basis_omega(config, params)
    dcoef, ocoef = _hamiltonian_coeffs(omega_sq, wb, params)
    number, off2 = _ladder_vectors(config.dim)
    even, odd = _parity_split(config.dim)
    w_e, v_e = eigh_tridiagonal(dcoef * number[even], ocoef * off2[0::2])
    w_o, v_o = eigh_tridiagonal(dcoef * number[odd], ocoef * off2[1::2])
    eps_all = np.concatenate([w_e, w_o])
    vec_all = np.zeros((config.dim, config.dim))
    vec_all[np.ix_(even, np.arange(even.size))] = v_e
    vec_all[np.ix_(odd, even.size + np.arange(odd.size))] = v_o
    order = np.argsort(eps_all, kind="stable")
    eps = eps_all[order]
    vec = vec_all[:, order]
    _spectrum_guard(eps, omega, config, params, label)
    return eps, vec


def _initial_basis(spec: StrokeSpec, config: FockConfig, params: OscillatorParams):
    """Eigenbasis of H(0).  When the computational basis is the start
    frequency itself the basis is exact by construction (identity).
    Otherwise both measurement ends of the work atoms share one spectral
    routine, so the t=0 distribution collapses to a single exact zero atom
    instead of riding on per-level diagonalization error."""
    wb = _basis_omega(config, params)
    if wb == spec.omega_start:
        n = np.arange(config.dim, dtype=float)
        return params.hbar * spec.omega_start * (n + 0.5), None
    return _instantaneous_basis(spec.omega_start**2, config, params,
                                "initial spectrum")


def initial_occupations(params: OscillatorParams, spec: StrokeSpec,
                        config: FockConfig) -> np.ndarray:
    """Thermal populations of the start trap, truncated to dim levels and
    renormalized; the discarded mass must stay below tail_tol."""
    q = math.exp(-params.beta * params.hbar * spec.omega_start)
    lost = q**config.dim
    if lost > config.tail_tol:
        raise TruncationError(
            f"initial occupations: truncated mass {lost:.3e} > tail_tol")
    p = (1.0 - q) * q ** np.arange(config.dim)
    return p / p.sum()


def occupied_levels(params: OscillatorParams, spec: StrokeSpec,
                    config: FockConfig) -> int:
    """Number of initial levels holding all but tail_tol of the mass."""
    q = math.exp(-params.beta * params.hbar * spec.omega_start)
    return max(1, int(math.ceil(math.log(config.tail_tol) / math.log(q))))


def stroke_spread_factor(spec: StrokeSpec, basis_omega: float, n_grid: int = 129) -> float:
    """Worst-case growth of the basis occupation of an evolved eigenstate:
    max over the stroke of [ b^2 w_b/w_s + (bdot^2 + w_s^2/b^2)/(w_s w_b) ] / 2."""
    from .protocol import scaling_factor

    t = np.linspace(0.0, spec.tau, n_grid)
    b, db, _ = scaling_factor(spec, t)
    ws = spec.omega_start
    f = 0.5 * (b**2 * basis_omega / ws + (db**2 + ws**2 / b**2) / (ws * basis_omega))
    return float(f.max())


def representable_levels(params: OscillatorParams, spec: StrokeSpec,
                         config: FockConfig) -> int:
    """Highest initial level whose whole trajectory stays representable."""
    f = stroke_spread_factor(spec, _basis_omega(config, params))
    return max(1, int(config.dim / (_REP_MARGIN * f)))


def _transition_data(params: OscillatorParams, spec: StrokeSpec, t: float,
                     config: FockConfig, U: np.ndarray | None):
    w2 = float(frequency_squared(spec, t))
    eps_t, vec_t = _instantaneous_basis(w2, config, params, "instantaneous spectrum")
    eps_0, vec_0 = _initial_basis(spec, config, params)
    if U is None:
        U = propagate(params, spec, t, config)
    amp = vec_t.conj().T @ U if vec_0 is None else vec_t.conj().T @ U @ vec_0
    p = np.abs(amp.T) ** 2  # p[n, k]
    return p, eps_t, eps_0


def transition_probs(params: OscillatorParams, spec: StrokeSpec, t: float,
                     config: FockConfig, U: np.ndarray | None = None) -> TransitionMatrix:
    """Two-point-measurement transition probabilities p[n, k] at time t.

    Requires a confining trap at t (discrete instantaneous spectrum); pass a
    precomputed U to reuse one propagation across observables.
    """
    p, _, _ = _transition_data(params, spec, t, config, U)
    return TransitionMatrix(p=p, t=float(t))


def work_distribution(params: OscillatorParams, spec: StrokeSpec, t: float,
                      config: FockConfig, U: np.ndarray | None = None) -> WorkDistribution:
    """Two-point-measurement work distribution at time t.

    Atoms w = eps_k(t) - eps_n(0) weighted by p_n(0) p_{nk}(t); atoms closer
    than 1e-9 * hbar * omega0 are merged.  Fails loudly when the occupied
    initial levels are not representable throughout the stroke.
    """
    n_occ = occupied_levels(params, spec, config)
    n_rep = representable_levels(params, spec, config)
    if n_occ > n_rep:
        raise TruncationError(
            f"work distribution: {n_occ} occupied levels exceed the "
            f"{n_rep} representable ones at dim={config.dim}; increase dim")
    p, eps_t, eps_0 = _transition_data(params, spec, t, config, U)
    p0 = initial_occupations(params, spec, config)
    w_atoms = (eps_t[None, :] - eps_0[:, None]).ravel()
    weights = (p0[:, None] * p).ravel()
    # eigh orthonormality noise enters the weights squared (<= ~1e-26) but
    # rides on the full eps spread; cut it before it pollutes the moments
    keep = weights > 1e-24
    w_atoms = w_atoms[keep]
    weights = weights[keep]
    order = np.argsort(w_atoms, kind="stable")
    w_sorted = w_atoms[order]
    pr_sorted = weights[order]
    tol = 1e-9 * params.hbar * params.omega0
    merged_w: list[float] = []
    merged_p: list[float] = []
    for w, pr in zip(w_sorted, pr_sorted):
        if merged_w and w - merged_w[-1] <= tol:
            total = merged_p[-1] + pr
            if total > 0.0:
                merged_w[-1] = (merged_p[-1] * merged_w[-1] + pr * w) / total
            merged_p[-1] = total
        else:
            merged_w.append(w)
            merged_p.append(pr)
    return WorkDistribution(w=np.array(merged_w), prob=np.array(merged_p), t=float(t))


def moment(dist: WorkDistribution, order: int) -> float:
    """Raw moment sum_j prob_j * w_j^order of a work distribution."""
    if order != int(order) or order < 0:
        raise ParameterError(f"moment order must be a nonnegative integer, got {order}")
    return float(np.sum(dist.prob * dist.w ** int(order)))


def _top_tail_mass(diag: np.ndarray) -> float:
    cut = int(0.9 * diag.size)
    return float(np.real(diag[cut:]).sum())


def _rel_entropy_spectral(wa: np.ndarray, log_wa: np.ndarray,
                          cross_sq: np.ndarray | None,
                          log_wb: np.ndarray) -> float:
    """S(rho_a || rho_b) from exact spectral data.

    cross_sq[i, n] = |<b_i|a_n>|^2 carries the a-populations into the
    reference eigenbasis; None means the two states share an eigenbasis.
    Every reference log-eigenvalue is known in closed form, so there is no
    support cut and no eigh noise floor at ~1e-16.
    """
    if cross_sq is None:
        val = float(np.dot(wa, log_wa - log_wb))
    else:
        val = float(np.dot(wa, log_wa) - np.dot(cross_sq @ wa, log_wb))
    if val < -1e-8:
        raise NumericalConsistencyError(f"relative entropy {val:.3e} < 0")
    return max(val, 0.0)


def fock_state_entropies(params: OscillatorParams, spec: StrokeSpec, t: float,
                         config: FockConfig, U: np.ndarray | None = None) -> StateEntropies:
    """Relative entropies at time t against the instantaneous equilibrium
    state and the population-preserving adiabatic reference.

    All three density matrices share exactly known eigenvalues (the initial
    geometric populations or a Gibbs vector on eps_t), so each entropy
    reduces to weighted log sums; the only matrix ingredient is the overlap
    table |<chi_i(t)| U |chi_n(0)>|^2.

    The Gibbs log-weights use the exact oscillator log-partition (geometric
    series over the full ladder), not a sum over the truncated spectrum: at
    soft frequencies the equilibrium state occupies far more levels than the
    truncation holds, but the evolved/adiabatic states whose entropies we
    take only probe the low accurate part of the ladder.
    """
    w2 = float(frequency_squared(spec, t))
    eps_t, vec_t = _instantaneous_basis(w2, config, params, "instantaneous spectrum")
    _, vec_0 = _initial_basis(spec, config, params)
    if U is None:
        U = propagate(params, spec, t, config)
    p0 = initial_occupations(params, spec, config)
    log_p0 = np.log(p0)
    rot = U if vec_0 is None else U @ vec_0
    cross_sq = np.abs(vec_t.conj().T @ rot) ** 2
    log_z = -log_two_sinh(0.5 * params.beta * params.hbar * math.sqrt(w2))
    log_g = -params.beta * eps_t - log_z
    for name, diag in (("evolved state", cross_sq @ p0),
                       ("adiabatic reference", p0)):
        mass = _top_tail_mass(diag)
        if mass > config.tail_tol:
            raise TruncationError(
                f"{name}: {mass:.3e} occupation mass in the top 10% of levels "
                f"at dim={config.dim}; increase dim")
    return StateEntropies(
        t=float(t),
        evolved_vs_equilibrium=_rel_entropy_spectral(p0, log_p0, cross_sq, log_g),
        adiabatic_vs_equilibrium=_rel_entropy_spectral(p0, log_p0, None, log_g),
        evolved_vs_adiabatic=_rel_entropy_spectral(p0, log_p0, cross_sq, log_p0),
    )


# keep the descriptive alias used across the test-suite and CLI
density_matrix_entropies = fock_state_entropies


def uhlmann_fidelity_thermal(params: OscillatorParams, beta_a: float, omega_a: float,
                             beta_b: float, omega_b: float,
                             config: FockConfig) -> float:
    """Uhlmann fidelity of two thermal states, computed the hard way:
    F = (Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a)))^2 with dense matrices in a
    common truncated number basis.

    The default basis (config.basis_omega=None here means the geometric mean
    of omega_a and omega_b, not omega0) balances the truncation burden of
    both states.
    """
    wb = config.basis_omega if config.basis_omega is not None else math.sqrt(omega_a * omega_b)
    cfg = FockConfig(dim=config.dim, tail_tol=config.tail_tol, basis_omega=wb)

    def gibbs(beta, omega):
        eps, vec = _instantaneous_basis(omega * omega, cfg, params,
                                        f"thermal basis omega={omega}")
        logp = -beta * (eps - eps.min())
        p = np.exp(logp)
        p /= p.sum()
        rho = (vec * p[None, :]) @ vec.T
        mass = _top_tail_mass(np.diag(rho))
        if mass > cfg.tail_tol:
            raise TruncationError(
                f"thermal state (beta={beta}, omega={omega}): tail mass "
                f"{mass:.3e} at dim={cfg.dim}; increase dim")
        return p, vec

    pa, va = gibbs(beta_a, omega_a)
    pb, vb = gibbs(beta_b, omega_b)
    sqrt_a = (va * np.sqrt(pa)[None, :]) @ va.T
    rho_b = (vb * pb[None, :]) @ vb.T
    inner = sqrt_a @ rho_b @ sqrt_a
    lam = np.linalg.eigvalsh(0.5 * (inner + inner.T))
    lam = np.clip(lam, 0.0, None)
    return float(np.sqrt(lam).sum() ** 2)


_DISC_FLOOR = 1e-3


def _rel_disc(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), _DISC_FLOOR)


def discrepancy_table(params: OscillatorParams, spec: StrokeSpec, times,
                      config: FockConfig) -> dict:
    """Gaussian-vs-Fock comparison over a time grid.

    Returns a dict with per-time rows and the per-quantity maximum relative
    discrepancy (relative with an absolute floor of 1e-3 natural units, so
    near-zero entries at t=0 compare absolutely).
    """
    from . import workstats
    from .gaussian import relative_entropy_to_gibbs

    tarr = sorted(set(float(t) for t in times))
    positive = [t for t in tarr if t > 0.0]
    snaps = propagate_snapshots(params, spec, positive, config) if positive else []
    u_at = dict(zip(positive, snaps))
    rows = []
    worst: dict[str, float] = {}
    for t in tarr:
        if t == 0.0:
            u = np.eye(config.dim, dtype=complex)
        else:
            u = u_at[t]
        dist = work_distribution(params, spec, t, config, U=u)
        m1 = moment(dist, 1)
        m2 = moment(dist, 2)
        fock_std = math.sqrt(max(m2 - m1 * m1, 0.0))
        ent = fock_state_entropies(params, spec, t, config, U=u)
        g_mean = workstats.mean_work_sta(params, spec, t)
        g_std = workstats.work_std(params, spec, t)
        eq, ad = workstats._references(params, spec, t)
        rho_t = workstats.evolved_thermal_state(params, spec, t)
        rho_ad = workstats._adiabatic_state(params, ad)
        g_ent_t_eq = relative_entropy_to_gibbs(rho_t, eq, params)
        g_ent_ad_eq = relative_entropy_to_gibbs(rho_ad, eq, params)
        g_ent_t_ad = relative_entropy_to_gibbs(rho_t, ad, params)
        row = {
            "t": t,
            "mean_w": {"gaussian": g_mean, "fock": m1},
            "std_w": {"gaussian": g_std, "fock": fock_std},
            "rel_ent_t_eq": {"gaussian": g_ent_t_eq, "fock": ent.evolved_vs_equilibrium},
            "rel_ent_ad_eq": {"gaussian": g_ent_ad_eq, "fock": ent.adiabatic_vs_equilibrium},
            "rel_ent_t_ad": {"gaussian": g_ent_t_ad, "fock": ent.evolved_vs_adiabatic},
        }
        rows.append(row)
        for key, pair in row.items():
            if key == "t":
                continue
            d = _rel_disc(pair["gaussian"], pair["fock"])
            worst[key] = max(worst.get(key, 0.0), d)
    return {"rows": rows, "max_discrepancy": worst}
