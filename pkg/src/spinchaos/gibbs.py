"""Canonical mean-field ensembles and the free-energy minimizer.

The free energy F[D] = (1/2) Tr((D(x)D) V) + Tr(D log D) (inverse
temperature absorbed into V) is minimized over all single-particle density
matrices; canonical n-particle states e^(-H_n)/Z built from the pairwise-sum
Hamiltonian have k-marginals that approach the minimizer's product powers,
which ``gibbs_chaos_check`` measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.special import gammaln, logsumexp

from . import linalg, states
from .chaos_metrics import ChaosEntry, ChaosReport, fit_loglog_slope
from .curie_weiss import index_labels
from .errors import ConvergenceError, DimensionError
from .mean_field import PairPotential, pair_sum_hamiltonian
from .states import DEFAULT_DIM_CAP, BlochVector, product_power, qubit_from_bloch

ENTROPY_FLOOR = 1e-300
RESIDUAL_TARGET = 1e-6
# Bloch vectors are projected inside the ball by this margin so the entropy
# term stays finite during refinement.
BLOCH_RADIUS_MAX = 1.0 - 1e-9
_GRID_TICKS = 21
_BLOCH_RESTARTS = 5
_GENERIC_RESTARTS = 8


def _entropy(d0: np.ndarray) -> float:
    """Tr(D log D) with the 0 log 0 = 0 convention."""
    w = np.linalg.eigvalsh(d0)
    w = np.clip(w, 0.0, None)
    return float(np.sum(w * np.log(np.maximum(w, ENTROPY_FLOOR))))


def free_energy(d0, v: PairPotential) -> float:
    """F[D] = (1/2) Tr((D(x)D) V) + Tr(D log D)."""
    a = states.validate_density(d0, check_psd=True)
    if a.shape[0] != v.d:
        raise DimensionError(f"state dim {a.shape[0]} != potential factor dim {v.d}")
    dd = np.kron(a, a)
    interaction = 0.5 * float(np.einsum("ij,ji->", dd, v.matrix).real)
    return interaction + _entropy(a)


@dataclass(frozen=True)
class FreeEnergyReport:
    minimizer: np.ndarray
    value: float
    stationarity_residual: float
    restarts_used: int
    # all refinement endpoints within 1e-8 of the best value, deduplicated;
    # more than one entry signals a (near-)degenerate minimum
    distinct_minima: list = field(default_factory=list)


def _fd_gradient(fun, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2.0 * h)
    return g


def _ball_project(vec: np.ndarray) -> np.ndarray:
    r = float(np.linalg.norm(vec))
    if r > BLOCH_RADIUS_MAX:
        return vec * (BLOCH_RADIUS_MAX / r)
    return vec


def _minimize_bloch(v: PairPotential) -> FreeEnergyReport:
    """d = 2 path: coarse Bloch-ball grid, then simplex refinement from the
    best few separated cells."""

    def objective(vec):
        b = _ball_project(np.asarray(vec, dtype=float))
        q = qubit_from_bloch(BlochVector(b[0], b[1], b[2]))
        return free_energy(q.matrix(), v)

    ticks = np.linspace(-1.0, 1.0, _GRID_TICKS)
    grid = [np.array([x, y, z])
            for x in ticks for y in ticks for z in ticks
            if x * x + y * y + z * z <= 1.0 + 1e-12]
    scored = sorted(((objective(pt), i) for i, pt in enumerate(grid)),
                    key=lambda s: s[0])
    # greedy pick of well-separated starts (separation > one grid cell)
    starts: list[np.ndarray] = []
    for _, i in scored:
        pt = grid[i]
        if all(np.linalg.norm(pt - s) > 0.15 for s in starts):
            starts.append(pt)
        if len(starts) == _BLOCH_RESTARTS:
            break
    finals = []
    for x0 in starts:
        res = optimize.minimize(objective, x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14,
                                         "maxiter": 2000, "maxfev": 4000})
        finals.append((float(res.fun), _ball_project(np.asarray(res.x))))
    finals.sort(key=lambda s: s[0])
    best_val, best_x = finals[0]
    grad = _fd_gradient(objective, best_x)
    r = float(np.linalg.norm(best_x))
    if r >= BLOCH_RADIUS_MAX - 1e-9:
        unit = best_x / r
        radial = float(grad @ unit)
        if radial < 0:
            # outward descent blocked by the ball constraint
            grad = grad - radial * unit
    residual = float(np.abs(grad).max())
    if residual > RESIDUAL_TARGET:
        raise ConvergenceError(
            f"stationarity residual {residual:.3e} exceeds {RESIDUAL_TARGET:.1e}"
        )
    distinct = []
    for val, x in finals:
        if val > best_val + 1e-8:
            continue
        if all(np.linalg.norm(x - x_seen) > 1e-5 for _, x_seen in distinct):
            distinct.append((val, x))
    minima = [qubit_from_bloch(BlochVector(*x)).matrix() for _, x in distinct]
    return FreeEnergyReport(
        minimizer=minima[0],
        value=best_val,
        stationarity_residual=residual,
        restarts_used=len(starts),
        distinct_minima=minima,
    )


def _params_to_state(p: np.ndarray, d: int) -> np.ndarray:
    """Map d^2 reals to a density matrix via D = e^A / Tr e^A."""
    p = np.clip(p, -40.0, 40.0)
    a = np.zeros((d, d), dtype=complex)
    for i in range(d):
        a[i, i] = p[i]
    pos = d
    for i in range(d):
        for j in range(i + 1, d):
            a[i, j] = complex(p[pos], p[pos + 1])
            a[j, i] = complex(p[pos], -p[pos + 1])
            pos += 2
    e = linalg.matrix_exp_hermitian(a, 1.0)
    return e / e.trace().real


def _minimize_generic(v: PairPotential, d: int, seed: int) -> FreeEnergyReport:
    """2 < d <= 4 path: seeded multistart simplex over the exponential
    parametrization (surjective onto the interior of the state space)."""

    def objective(p):
        return free_energy(_params_to_state(np.asarray(p, dtype=float), d), v)

    n_par = d * d
    starts = [np.zeros(n_par)]
    for i in range(_GENERIC_RESTARTS - 1):
        rng = np.random.default_rng([seed, i])
        starts.append(rng.normal(0.0, 0.7, n_par))
    finals = []
    for x0 in starts:
        res = optimize.minimize(objective, x0, method="Nelder-Mead",
                                options={"xatol": 1e-9, "fatol": 1e-13,
                                         "maxiter": 4000, "maxfev": 8000})
        finals.append((float(res.fun), np.asarray(res.x, dtype=float)))
    finals.sort(key=lambda s: s[0])
    best_val, best_x = finals[0]
    residual = float(np.abs(_fd_gradient(objective, best_x)).max())
    if residual > RESIDUAL_TARGET:
        raise ConvergenceError(
            f"stationarity residual {residual:.3e} exceeds {RESIDUAL_TARGET:.1e}"
        )
    distinct = []
    for val, x in finals:
        if val > best_val + 1e-8:
            continue
        m = _params_to_state(x, d)
        if all(linalg.trace_norm(m - seen) > 1e-5 for seen in distinct):
            distinct.append(m)
    return FreeEnergyReport(
        minimizer=distinct[0],
        value=best_val,
        stationarity_residual=residual,
        restarts_used=len(starts),
        distinct_minima=distinct,
    )


def minimize_free_energy(v: PairPotential, d: int | None = None,
                         seed: int = 0) -> FreeEnergyReport:
    """Minimize F over all d-dimensional density matrices.

    d = 2 uses a deterministic Bloch-ball grid + simplex refinement; d = 3, 4
    use a seeded multistart over the exponential parametrization.  Raises
    ConvergenceError if the final stationarity residual exceeds 1e-6.
    """
    if d is None:
        d = v.d
    if d != v.d:
        raise DimensionError(f"d = {d} != potential factor dim {v.d}")
    if d == 2:
        return _minimize_bloch(v)
    if d <= 4:
        return _minimize_generic(v, d, seed)
    raise DimensionError(f"minimization supports d <= 4, got d = {d}")


def canonical_state(v: PairPotential, n: int,
                    max_dim: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """e^(-H_n)/Z for the pairwise-sum Hamiltonian (dense).

    The exponent is shifted by the largest diagonal entry before
    exponentiating; the shift cancels in the normalization.
    """
    ham = pair_sum_hamiltonian(v, n, max_dim)
    shift = float(np.diag(ham).real.max())
    e = linalg.matrix_exp_hermitian(ham - shift * np.eye(ham.shape[0]), -1.0)
    z = e.trace().real
    return states.validate_density(e / z)


def _is_z_diagonal(v: PairPotential) -> bool:
    off = v.matrix.copy()
    np.fill_diagonal(off, 0.0)
    return v.d == 2 and not np.count_nonzero(off)


def _diag_weight_energies(v: PairPotential, n: int, u: np.ndarray) -> np.ndarray:
    """Eigenvalue of the pairwise-sum Hamiltonian on configurations with u up
    sites (z-diagonal V only)."""
    vm = np.diag(v.matrix).real
    v_uu, v_ud, v_dd = vm[0], vm[1], vm[3]
    u = u.astype(float)
    pairs_uu = u * (u - 1.0) / 2.0
    pairs_dd = (n - u) * (n - u - 1.0) / 2.0
    return (pairs_uu * v_uu + u * (n - u) * v_ud + pairs_dd * v_dd) / n


def canonical_marginal(v: PairPotential, n: int, k: int, method: str = "auto",
                       max_dim: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """k-site marginal of the canonical n-particle state.

    ``method`` is "dense", "fast" or "auto".  The fast path applies to
    z-diagonal 2x2-factor potentials (the Curie-Weiss family): the
    Hamiltonian is diagonal with energies depending only on the up-site
    count, so marginal entries are O(n) log-sum-exp reductions and n may
    reach 1e4.  The dense path exponentiates the full d^n Hamiltonian.
    """
    if not 1 <= k <= n:
        raise DimensionError(f"k = {k} outside [1, {n}]")
    if method not in ("auto", "dense", "fast"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "fast" if _is_z_diagonal(v) else "dense"
    if method == "dense":
        full = canonical_state(v, n, max_dim)
        return states.validate_density(
            linalg.partial_trace_tail(full, v.d, n, k)
        )
    if not _is_z_diagonal(v):
        raise DimensionError("fast path requires a z-diagonal 2x2-factor potential")
    u_all = np.arange(n + 1)
    log_z = logsumexp(
        gammaln(n + 1) - gammaln(u_all + 1) - gammaln(n - u_all + 1)
        - _diag_weight_energies(v, n, u_all)
    )
    dim = 2**k
    out = np.zeros((dim, dim), dtype=complex)
    u_rest = np.arange(n - k + 1)
    log_binom_rest = (gammaln(n - k + 1) - gammaln(u_rest + 1)
                      - gammaln(n - k - u_rest + 1))
    for idx in range(dim):
        u_kept = index_labels(idx, k).count(1)
        out[idx, idx] = math.exp(
            logsumexp(log_binom_rest
                      - _diag_weight_energies(v, n, u_kept + u_rest))
            - log_z
        )
    return states.validate_density(out)


@dataclass(frozen=True)
class GibbsChaosResult:
    report: ChaosReport
    free_energy: FreeEnergyReport


def gibbs_chaos_check(v: PairPotential, n_list, k: int, seed: int = 0,
                      method: str = "auto",
                      max_dim: int = DEFAULT_DIM_CAP) -> GibbsChaosResult:
    """Distance of canonical k-marginals from the minimizer's product power,
    per n, with a strict monotone-decrease flag."""
    fe = minimize_free_energy(v, seed=seed)
    target = product_power(fe.minimizer, k)
    entries = []
    for n in sorted(n_list):
        marg = canonical_marginal(v, n, k, method, max_dim)
        dist = linalg.trace_norm(marg - target)
        entries.append(ChaosEntry(n, k, 0.0, dist))
    dists = [e.trace_distance for e in entries]
    monotone = all(b < a for a, b in zip(dists, dists[1:]))
    slope, r2 = fit_loglog_slope([e.n for e in entries], dists)
    report = ChaosReport(tuple(entries), slope, r2, monotone_decreasing=monotone)
    return GibbsChaosResult(report=report, free_energy=fe)
