"""Mean-field single-particle dynamics for pair-interacting ensembles.

Implements the nonlinear one-body equation dD/dt = -(i/hbar) [V, D(x)D]^(1)
(contraction = partial trace over the second factor), a fixed-step RK4
integrator for it, the closed-form solution for the Curie-Weiss potential,
the finite-n pairwise-sum Hamiltonian (1/n) sum_{i<j} V_ij, and a dense
finite-n probe that measures how fast evolved product-state marginals
approach the mean-field trajectory.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, states
from .curie_weiss import CWParams
from .errors import CapExceededError, DimensionError, HermiticityError, IntegrationError, StateValidationError
from .states import DEFAULT_DIM_CAP, QubitState

# Tolerance for RK4 positivity drift; looser than the static state tolerance
# because fourth-order local error accumulates over ~1e4 steps.
INTEGRATE_PSD_TOL = 1e-8


def swap_operator(d: int) -> np.ndarray:
    """Unitary S on the two-factor space with S (u (x) v) = v (x) u."""
    return np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d).astype(complex)


@dataclass(frozen=True)
class PairPotential:
    """Hermitian, swap-symmetric operator on the two-particle space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.require_hermitian(self.matrix)
        d = math.isqrt(m.shape[0])
        if d * d != m.shape[0]:
            raise DimensionError(
                f"pair potential dim {m.shape[0]} is not a perfect square"
            )
        s = swap_operator(d)
        defect = float(np.abs(s @ m @ s - m).max())
        if defect > linalg.HERMITICITY_TOL:
            raise HermiticityError(
                f"pair potential is not swap-symmetric: max |SVS - V| = {defect:.3e}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:
        return math.isqrt(self.matrix.shape[0])


@dataclass(frozen=True)
class Trajectory:
    """Time grid with one single-particle density snapshot per point."""

    times: np.ndarray
    states: list

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise DimensionError("times and states lengths differ")


def contract_first(m) -> np.ndarray:
    """Reduce a two-factor operator to the first factor: partial trace over
    the second."""
    a = linalg.as_complex_matrix(m)
    d = math.isqrt(a.shape[0])
    if d * d != a.shape[0]:
        raise DimensionError(f"dim {a.shape[0]} is not a perfect square")
    return linalg.partial_trace_tail(a, d, 2, 1)


def mean_field_rhs(d0, v: PairPotential, hbar: float) -> np.ndarray:
    """-(i/hbar) [V, D(x)D]^(1); Hermitian and traceless up to roundoff."""
    a = linalg.as_complex_matrix(d0)
    if a.shape[0] != v.d:
        raise DimensionError(f"state dim {a.shape[0]} != potential factor dim {v.d}")
    dd = np.kron(a, a)
    comm = v.matrix @ dd - dd @ v.matrix
    return (-1j / hbar) * contract_first(comm)


def cw_pair_potential(p: CWParams) -> PairPotential:
    """V = -2J sz(x)sz - Hfield (sz(x)1 + 1(x)sz) with sz = (hbar/2) diag(1,-1).

    Chosen so (1/n) sum_{i<j} V_ij reproduces the n-site Curie-Weiss
    Hamiltonian up to an identity shift and an O(1/n) field rescaling.
    """
    sz = 0.5 * p.hbar * np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    v = (-2.0 * p.J) * np.kron(sz, sz) - p.Hfield * (np.kron(sz, eye) + np.kron(eye, sz))
    return PairPotential(v)


def closed_form_cw(q0: QubitState, p: CWParams, t: float) -> QubitState:
    """Exact mean-field solution for the Curie-Weiss potential.

    Populations freeze; the coherence rotates at the effective field rate:
    c(t) = c * exp(i t (Hfield + hbar J (a - d))).
    """
    omega = p.Hfield + p.hbar * p.J * (q0.a - q0.d)
    return QubitState(q0.a, q0.d, q0.c * cmath.exp(1j * t * omega))


def integrate(d0, v: PairPotential, hbar: float, t_end: float, dt: float) -> Trajectory:
    """Fixed-step classical RK4 for the mean-field equation.

    Every accepted step is re-symmetrized and validated (trace 1e-10,
    positivity 1e-8); a violation raises IntegrationError carrying the step
    index.  A final short step covers any remainder of t_end not divisible
    by dt.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValueError(f"t_end must be >= 0, got {t_end}")
    if t_end > 0 and dt > t_end:
        raise ValueError(f"dt = {dt} exceeds t_end = {t_end}")
    state = states.validate_density(d0, check_psd=True)

    def deriv(m):
        return mean_field_rhs(m, v, hbar)

    n_full = int(math.floor(t_end / dt + 1e-12))
    rem = t_end - n_full * dt
    if rem < 1e-12 * max(1.0, abs(t_end)):
        rem = 0.0
    snapshots = [state]
    step_sizes = [dt] * n_full + ([rem] if rem else [])
    for step, h in enumerate(step_sizes, start=1):
        k1 = deriv(state)
        k2 = deriv(state + 0.5 * h * k1)
        k3 = deriv(state + 0.5 * h * k2)
        k4 = deriv(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        state = 0.5 * (state + state.conj().T)
        try:
            state = states.validate_density(state, psd_tol=INTEGRATE_PSD_TOL,
                                            check_psd=True)
        except StateValidationError as exc:
            raise IntegrationError(
                step, f"state invalid at step {step} (t={step * dt:.6g}): {exc}"
            ) from exc
        snapshots.append(state)
    # grid times generated multiplicatively so they carry no accumulated drift
    times = [i * dt for i in range(n_full + 1)] + ([t_end] if rem else [])
    return Trajectory(np.asarray(times), snapshots)


def pair_sum_hamiltonian(v: PairPotential, n: int,
                         max_dim: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """(1/n) sum_{i<j} V_ij on the n-fold product space (dense).

    n = 1 gives the empty sum (zero matrix on one factor).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d = v.d
    dim = d**n
    if dim > max_dim:
        raise CapExceededError(f"dense dimension {d}**{n} exceeds cap {max_dim}")
    if n == 1:
        return np.zeros((d, d), dtype=complex)
    base = np.kron(v.matrix, np.eye(d ** (n - 2), dtype=complex))
    tens = base.reshape([d] * (2 * n))
    acc = np.zeros([d] * (2 * n), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            acc += np.moveaxis(tens, (0, 1, n, n + 1), (i, j, n + i, n + j))
    return acc.reshape(dim, dim) / n


@dataclass(frozen=True)
class ProbeEntry:
    n: int
    trace_distance: float


@dataclass(frozen=True)
class ConjectureProbeReport:
    """Dense finite-n distances to the mean-field trajectory."""

    k: int
    t: float
    ode_state: np.ndarray
    entries: list = field(default_factory=list)


def conjecture_probe(d0, v: PairPotential, n_list, k: int, t: float, dt: float,
                     hbar: float = 1.0,
                     max_dim: int = DEFAULT_DIM_CAP) -> ConjectureProbeReport:
    """Evolve d0^(x)n under the pairwise-sum Hamiltonian and measure
    ||k-marginal - D_ode(t)^(x)k||_1 for each n.

    The generic path conjugates by a dense unitary; exactly diagonal
    Hamiltonians (the Curie-Weiss family) shortcut to elementwise phases.
    """
    d0 = states.validate_density(d0, check_psd=True)
    if d0.shape[0] != v.d:
        raise DimensionError(f"state dim {d0.shape[0]} != potential factor dim {v.d}")
    traj = integrate(d0, v, hbar, t, dt)
    ode_final = traj.states[-1]
    target = states.product_power(ode_final, k, max_dim)
    entries = []
    for n in sorted(n_list):
        if k > n:
            raise DimensionError(f"k = {k} exceeds n = {n}")
        ham = pair_sum_hamiltonian(v, n, max_dim)
        dn = states.product_power(d0, n, max_dim)
        off = ham.copy()
        np.fill_diagonal(off, 0.0)
        if not np.count_nonzero(off):
            phase = np.exp(-1j * t / hbar * np.diag(ham).real)
            dn_t = dn * phase[:, None]
            dn_t *= phase.conj()[None, :]
        else:
            u = linalg.matrix_exp_hermitian(ham, -1j * t / hbar)
            dn_t = u @ dn @ u.conj().T
        marg = states.validate_density(
            linalg.partial_trace_tail(dn_t, v.d, n, k)
        )
        entries.append(ProbeEntry(n, linalg.trace_norm(marg - target)))
    return ConjectureProbeReport(k=k, t=t, ode_state=ode_final, entries=entries)
