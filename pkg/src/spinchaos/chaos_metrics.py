"""Chaoticity diagnostics.

Measures how fast k-site marginals of evolved n-site product states approach
the k-fold power of the mean-field solution, pushes quantum states through
two-outcome measurements to classical symmetric measures, and numerically
verifies the weighted-sum concentration property that drives the mean-field
limit.

Measurement convention: the POVM pair is (q0, q1 = I - q0) with outcomes
labeled 0 and 1; configuration weight counts outcome-1 results, and
single-site laws are ordered (P(outcome 0), P(outcome 1)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from . import linalg
from .curie_weiss import (CWParams, DENSE_SITE_CAP, evolve_dense,
                          marginal_fast_matrix)
from .errors import DimensionError, StateValidationError
from .kernels import binomial_weights, phase_weighted_sum
from .mean_field import closed_form_cw
from .states import QubitState, product_power

# Distances below this are treated as numerical zeros (excluded from slope
# fits, allowed to break monotone trends).
NOISE_FLOOR = 1e-13


@dataclass(frozen=True)
class ChaosEntry:
    n: int
    k: int
    t: float
    trace_distance: float


@dataclass(frozen=True)
class ChaosReport:
    """Per-n marginal-vs-product distances with an optional log-log fit."""

    entries: tuple
    fitted_slope: float | None = None
    fit_r2: float | None = None
    monotone_decreasing: bool | None = None


def fit_loglog_slope(ns, dists, floor: float = NOISE_FLOOR):
    """OLS slope and r^2 of log(dist) vs log(n), ignoring sub-floor points.

    Returns (None, None) when fewer than two usable points remain.
    """
    pts = [(n, d) for n, d in zip(ns, dists) if d > floor]
    if len(pts) < 2:
        return None, None
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), float(r2)


def chaos_profile(d0: QubitState, p_base: CWParams, n_list, k: int, t: float,
                  tail_sigma: float | None = None) -> ChaosReport:
    """Distance of the evolved (n, k) marginal from the mean-field product
    power, for each n."""
    target = product_power(closed_form_cw(d0, p_base, t).matrix(), k)
    entries = []
    for n in sorted(n_list):
        p = replace(p_base, n=n)
        m = marginal_fast_matrix(d0, p, k, t, tail_sigma)
        entries.append(ChaosEntry(n, k, t, linalg.trace_norm(m - target)))
    slope, r2 = fit_loglog_slope([e.n for e in entries],
                                 [e.trace_distance for e in entries])
    return ChaosReport(tuple(entries), slope, r2)


@dataclass(frozen=True)
class ClassicalSymmetricMeasure:
    """Permutation-symmetric measure on n binary outcomes, stored by weight.

    ``weight_probs[w]`` is the probability of exactly w outcome-1 results.
    """

    n: int
    weight_probs: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weight_probs, dtype=float)
        if w.shape != (self.n + 1,):
            raise DimensionError(
                f"weight_probs shape {w.shape} != ({self.n + 1},)"
            )
        if float(w.min()) < -1e-12:
            raise StateValidationError(
                "invalid-state", f"negative weight probability {w.min():.3e}"
            )
        total = math.fsum(w)
        if abs(total - 1.0) > 1e-12:
            raise StateValidationError(
                "invalid-state", f"weight probabilities sum to {total:.17g}"
            )
        object.__setattr__(self, "weight_probs", np.maximum(w, 0.0))


def _validate_povm_element(q0) -> np.ndarray:
    q = linalg.require_hermitian(q0)
    if q.shape[0] != 2:
        raise DimensionError(f"expected a 2x2 POVM element, got {q.shape}")
    w = np.linalg.eigvalsh(q)
    if w[0] < -1e-10 or w[-1] > 1 + 1e-10:
        raise StateValidationError(
            "invalid-state",
            f"POVM element eigenvalues [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1]",
        )
    return q


def _dense_weight_probs(dn, q0, q1, n: int) -> np.ndarray:
    """P(weight = w) by site-at-a-time contraction of the 2^n state."""
    if n == 0:
        return np.array([dn[0, 0].real])
    half = dn.shape[0] // 2
    r = dn.reshape(2, half, 2, half)
    out = np.zeros(n + 1)
    # contract site 1 with each outcome: sum_{x,y} q[y,x] dn[(x,.),(y,.)]
    out[:n] += _dense_weight_probs(np.einsum("yx,xiyj->ij", q0, r), q0, q1, n - 1)
    out[1:] += _dense_weight_probs(np.einsum("yx,xiyj->ij", q1, r), q0, q1, n - 1)
    return out


def povm_pushforward(d0: QubitState, p: CWParams, t: float, q0,
                     dense_cap: int = DENSE_SITE_CAP) -> ClassicalSymmetricMeasure:
    """Push the evolved n-site product state through the POVM (q0, I - q0).

    Diagonal q0 only sees the (frozen, product) diagonal of the state, so
    the result is the exact Binomial(n, p1) law at any n; general q0 takes
    the dense route and requires n within the dense cap.
    """
    q0 = _validate_povm_element(q0)
    d0m = d0.matrix()
    off = q0.copy()
    np.fill_diagonal(off, 0.0)
    if not np.count_nonzero(off):
        p0 = float(q0[0, 0].real * d0.a + q0[1, 1].real * d0.d)
        p1 = min(1.0, max(0.0, 1.0 - p0))
        _, w = binomial_weights(p.n, p1)
        return ClassicalSymmetricMeasure(p.n, w)
    dn_t = evolve_dense(product_power(d0m, p.n), p, t, dense_cap)
    q1 = np.eye(2, dtype=complex) - q0
    probs = _dense_weight_probs(dn_t, q0, q1, p.n)
    return ClassicalSymmetricMeasure(p.n, probs)


def classical_marginal_tv(m: ClassicalSymmetricMeasure, k: int, p_single) -> float:
    """Total-variation distance between the k-site marginal of ``m`` and the
    product Bernoulli law with single-site probabilities ``p_single``.

    The marginal law of the weight under sampling k of n exchangeable
    outcomes is the hypergeometric mixture of ``weight_probs``.
    """
    p_arr = np.asarray(p_single, dtype=float)
    if p_arr.shape != (2,) or p_arr.min() < -1e-12 or abs(p_arr.sum() - 1) > 1e-9:
        raise StateValidationError(
            "invalid-state", f"p_single must be two nonneg reals summing to 1, got {p_single}"
        )
    if k == 0:
        return 0.0
    if not 0 <= k <= m.n:
        raise DimensionError(f"k = {k} outside [0, {m.n}]")
    w = np.arange(k + 1)
    mix = stats.hypergeom.pmf(w[:, None], m.n, np.arange(m.n + 1)[None, :], k)
    marg = mix @ m.weight_probs
    prod = stats.binom.pmf(w, k, p_arr[1])
    return 0.5 * float(np.abs(marg - prod).sum())


@dataclass(frozen=True)
class CorollaryReport:
    """Does small k=2 distance at the largest n imply small k=3,4 distances."""

    threshold: float
    factor: float
    triggered: bool
    holds: bool
    final_distances: dict  # k -> distance at the largest n
    ratio: float | None  # max(d3, d4) / d2, when d2 is above the noise floor
    profiles: dict  # k -> ChaosReport


def corollary_check(d0: QubitState, p_base: CWParams, n_list, t: float,
                    threshold: float = 1e-2, factor: float = 3.0,
                    tail_sigma: float | None = None) -> CorollaryReport:
    """Check numerically that pair-marginal convergence controls the higher
    marginals: if the k=2 distance at the largest n is below ``threshold``,
    the k=3 and k=4 distances must be below ``factor * threshold``."""
    profiles = {k: chaos_profile(d0, p_base, n_list, k, t, tail_sigma)
                for k in (2, 3, 4)}
    finals = {k: profiles[k].entries[-1].trace_distance for k in (2, 3, 4)}
    triggered = finals[2] < threshold
    holds = (not triggered) or (finals[3] < factor * threshold
                                and finals[4] < factor * threshold)
    ratio = None
    if finals[2] > NOISE_FLOOR:
        ratio = max(finals[3], finals[4]) / finals[2]
    return CorollaryReport(threshold, factor, triggered, holds, finals, ratio,
                           profiles)


@dataclass(frozen=True)
class LemmaEntry:
    n: int
    theta: float
    abs_error: float


@dataclass(frozen=True)
class LemmaReport:
    """Concentration of binomially weighted phase sums around c * G(a)."""

    entries: tuple
    c: complex
    f_one: float


def lemma_verifier(d0: QubitState, k_fixed: int, x_labels, y_labels,
                   p_base: CWParams, n_list,
                   thetas=(0.0, 0.5, 1.5)) -> LemmaReport:
    """Evaluate sum_j C(n,j) a^j d^(n-j) G(j/n) against its n -> oo limit.

    The weight family is the product family: the summand weight is the
    diagonal product over n extra sites, scaled by the fixed-site element
    product c = prod_r d0[x_r, y_r]; the test functions are
    G(s) = exp(i theta (2s - 1)), whose limit value is G(a).  Reported
    error per (n, theta) is |sum - c * G(a)|.
    """
    x = tuple(x_labels)
    y = tuple(y_labels)
    if len(x) != k_fixed or len(y) != k_fixed:
        raise DimensionError(
            f"label lengths {len(x)}, {len(y)} != k_fixed = {k_fixed}"
        )
    for label in x + y:
        if label not in (1, 2):
            raise ValueError(f"basis label must be 1 or 2, got {label}")
    d0m = d0.matrix()
    c = 1.0 + 0j
    for xr, yr in zip(x, y):
        c *= d0m[xr - 1, yr - 1]
    a = d0.a
    entries = []
    for n in sorted(n_list):
        j0, w = binomial_weights(n, a)
        for theta in thetas:
            total = c * phase_weighted_sum(
                w, theta * (2.0 * j0 / n - 1.0), 2.0 * theta / n
            )
            target = c * cmath.exp(1j * theta * (2.0 * a - 1.0))
            entries.append(LemmaEntry(n, theta, abs(total - target)))
    return LemmaReport(tuple(entries), c, a)
