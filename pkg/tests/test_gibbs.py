"""Free-energy minimization and canonical marginals.

Independent oracles:
- scalar golden-section search along the population axis for diagonal
  potentials (the minimizer is known to lie there),
- the fixed-point condition atanh(z) = (J/2) z for the symmetric double well,
- dense exponentiation cross-checked against the O(n) counting path.
"""

import math

import numpy as np
import pytest

from spinchaos import (CWParams, ConvergenceError, DimensionError,
                       PairPotential, canonical_marginal, canonical_state,
                       cw_pair_potential, free_energy, gibbs_chaos_check,
                       minimize_free_energy, partial_trace_tail, product_power,
                       trace_norm)
from util import (golden_section, random_density, random_pair_potential,
                  z_axis_free_energy)

LOG2 = math.log(2.0)


def zero_potential(d=2):
    return PairPotential(np.zeros((d * d, d * d), dtype=complex))


def test_free_energy_reference_values():
    eye2 = np.eye(2, dtype=complex) / 2.0
    assert abs(free_energy(eye2, zero_potential()) + LOG2) < 1e-12
    pure = np.diag([1.0, 0.0]).astype(complex)
    assert abs(free_energy(pure, zero_potential())) < 1e-12
    v = cw_pair_potential(CWParams(J=1.0, Hfield=0.0, n=2))
    assert abs(free_energy(eye2, v) + LOG2) < 1e-12


def test_free_energy_diagonal_matches_z_formula():
    v = cw_pair_potential(CWParams(J=1.3, Hfield=-0.4, n=2))
    for z in (-0.9, -0.3, 0.0, 0.5, 0.99):
        d0 = np.diag([(1 + z) / 2, (1 - z) / 2]).astype(complex)
        assert abs(free_energy(d0, v) - z_axis_free_energy(z, 1.3, -0.4)) < 1e-12


def test_minimize_zero_potential():
    rep = minimize_free_energy(zero_potential())
    assert np.abs(rep.minimizer - np.eye(2) / 2).max() < 1e-8
    assert abs(rep.value + LOG2) < 1e-10
    assert rep.stationarity_residual <= 1e-6
    assert len(rep.distinct_minima) == 1


def test_minimize_scalar_potential_is_maximally_mixed():
    rep = minimize_free_energy(PairPotential(0.7 * np.eye(4, dtype=complex)))
    assert np.abs(rep.minimizer - np.eye(2) / 2).max() < 1e-8
    assert abs(rep.value - (0.35 - LOG2)) < 1e-10


def test_minimize_cw_matches_golden_section():
    v = cw_pair_potential(CWParams(J=1.0, Hfield=0.5, n=2))
    rep = minimize_free_energy(v)
    z_star, f_star = golden_section(
        lambda z: z_axis_free_energy(z, 1.0, 0.5), -0.999999, 0.999999)
    assert abs(rep.value - f_star) < 1e-8
    got_z = (rep.minimizer[0, 0] - rep.minimizer[1, 1]).real
    assert abs(got_z - z_star) < 1e-6
    assert abs(rep.minimizer[0, 1]) < 1e-7  # minimum sits on the z axis


def test_minimize_symmetric_double_well():
    # H = 0, J above threshold: two mirror minima, values equal, both kept
    v = cw_pair_potential(CWParams(J=3.0, Hfield=0.0, n=2))
    rep = minimize_free_energy(v)
    z_star = None
    lo, hi = 1e-8, 1.0 - 1e-12
    from scipy.optimize import brentq
    z_star = brentq(lambda z: math.atanh(z) - 1.5 * z, lo, hi)
    assert len(rep.distinct_minima) == 2
    zs = sorted((m[0, 0] - m[1, 1]).real for m in rep.distinct_minima)
    assert abs(zs[0] + z_star) < 1e-6
    assert abs(zs[1] - z_star) < 1e-6


def test_minimize_never_beats_nothing():
    rng = np.random.default_rng(80)
    eye2 = np.eye(2, dtype=complex) / 2.0
    for _ in range(3):
        v = random_pair_potential(rng, 2)
        rep = minimize_free_energy(v)
        assert rep.value <= free_energy(eye2, v) + 1e-12
        assert abs(np.trace(rep.minimizer) - 1.0) < 1e-10
        assert np.linalg.eigvalsh(rep.minimizer).min() > -1e-10


def test_minimize_d3_zero_potential_and_determinism():
    rep = minimize_free_energy(zero_potential(3), seed=0)
    assert np.abs(rep.minimizer - np.eye(3) / 3).max() < 1e-6
    assert abs(rep.value + math.log(3.0)) < 1e-9
    again = minimize_free_energy(zero_potential(3), seed=0)
    assert rep.value == again.value
    other = minimize_free_energy(zero_potential(3), seed=7)
    assert abs(rep.value - other.value) < 1e-8


def test_minimize_dimension_gate():
    with pytest.raises(DimensionError):
        minimize_free_energy(zero_potential(5))
    with pytest.raises(DimensionError):
        minimize_free_energy(zero_potential(2), d=3)


def test_canonical_state_basics():
    out = canonical_state(zero_potential(), 3)
    assert np.abs(out - np.eye(8) / 8).max() < 1e-14
    one = canonical_state(cw_pair_potential(CWParams(J=1.0, Hfield=0.5, n=1)), 1)
    assert np.abs(one - np.eye(2) / 2).max() < 1e-14
    v = cw_pair_potential(CWParams(J=1.0, Hfield=0.5, n=8))
    marg = partial_trace_tail(canonical_state(v, 8), 2, 8, 1)
    assert abs(marg[0, 1]) < 1e-15
    assert marg[0, 0].real > 0.5  # positive field favors the up population


def test_canonical_marginal_fast_matches_dense():
    v = cw_pair_potential(CWParams(J=1.2, Hfield=0.3, n=10))
    for k in (1, 2, 3):
        fast = canonical_marginal(v, 10, k, method="fast")
        dense = canonical_marginal(v, 10, k, method="dense")
        assert np.abs(fast - dense).max() < 1e-11


def test_canonical_marginal_consistency_and_scale():
    v = cw_pair_potential(CWParams(J=1.0, Hfield=0.5, n=10000))
    m2 = canonical_marginal(v, 10000, 2)
    m1 = canonical_marginal(v, 10000, 1)
    assert np.abs(partial_trace_tail(m2, 2, 2, 1) - m1).max() < 1e-10
    assert abs(np.trace(m1) - 1.0) < 1e-10


def test_canonical_marginal_gates():
    v = cw_pair_potential(CWParams(J=1.0, Hfield=0.5, n=4))
    with pytest.raises(ValueError):
        canonical_marginal(v, 4, 1, method="banana")
    with pytest.raises(DimensionError):
        canonical_marginal(v, 4, 5)
    off = PairPotential(np.full((4, 4), 0.25, dtype=complex))
    with pytest.raises(DimensionError):
        canonical_marginal(off, 4, 1, method="fast")


def test_gibbs_chaos_check_cw():
    v = cw_pair_potential(CWParams(J=1.0, Hfield=0.5, n=2))
    res = gibbs_chaos_check(v, [8, 16, 32, 64, 128], 1)
    dists = [e.trace_distance for e in res.report.entries]
    assert res.report.monotone_decreasing is True
    assert all(b < a for a, b in zip(dists, dists[1:]))
    assert -1.3 < res.report.fitted_slope < -0.7  # near-1/n approach
    assert res.report.fit_r2 > 0.99
    assert abs(res.free_energy.value - (-0.75135669)) < 1e-6


def test_gibbs_chaos_check_zero_potential():
    res = gibbs_chaos_check(zero_potential(), [2, 4, 8], 1, method="dense")
    dists = [e.trace_distance for e in res.report.entries]
    # marginals all equal I/2 exactly; only minimizer jitter remains
    assert max(dists) < 1e-7
    assert max(dists) - min(dists) < 1e-14


def test_canonical_marginal_is_accurate_against_free_sum():
    # V = c*I shifts every energy equally: canonical state stays uniform
    v = PairPotential(1.3 * np.eye(4, dtype=complex))
    for n, k in ((6, 1), (6, 2), (200, 1)):
        out = canonical_marginal(v, n, k)
        assert np.abs(out - np.eye(2**k) / 2**k).max() < 1e-13
