"""State types: validation gates, product powers, Bloch round trips.

The 2x2 positivity oracle is the closed-form eigenvalue pair
(a+d)/2 +- sqrt(((a-d)/2)^2 + |c|^2), evaluated directly in the tests.
"""

import numpy as np
import pytest

from spinchaos import (BlochVector, QubitState, bloch_from_qubit,
                       product_power, qubit_from_bloch, validate_density)
from spinchaos.errors import CapExceededError, StateValidationError
from spinchaos.states import PSD_CHECK_MAX_DIM
from util import random_density, random_qubit


def two_by_two_eigs(a, d, c):
    mid = (a + d) / 2
    rad = np.sqrt(((a - d) / 2) ** 2 + abs(c) ** 2)
    return mid - rad, mid + rad


def test_validate_accepts_maximally_mixed():
    out = validate_density(np.eye(2) / 2)
    assert np.array_equal(out, np.eye(2) / 2)


def test_validate_rejects_each_failure_distinctly():
    with pytest.raises(StateValidationError) as err:
        validate_density(np.array([[0.5, 1e-8j], [0.0, 0.5]]))
    assert err.value.code == "non-hermitian"
    with pytest.raises(StateValidationError) as err:
        validate_density(np.diag([0.6, 0.6]))
    assert err.value.code == "trace"
    with pytest.raises(StateValidationError) as err:
        validate_density(np.diag([1.5, -0.5]))
    assert err.value.code == "negative-eigenvalue"


def test_validate_positivity_matches_eig_formula():
    m = np.array([[0.5, 0.6], [0.6, 0.5]], dtype=complex)
    lo, hi = two_by_two_eigs(0.5, 0.5, 0.6)
    assert abs(lo - (-0.1)) < 1e-14 and abs(hi - 1.1) < 1e-14
    with pytest.raises(StateValidationError) as err:
        validate_density(m)
    assert err.value.code == "negative-eigenvalue"


def test_validate_psd_check_dimension_cutoff():
    dim = PSD_CHECK_MAX_DIM * 2
    diag = np.full(dim, 1.0 / dim)
    diag[1] = -1e-6
    diag[0] += 1.0 / dim + 1e-6  # keep the trace at 1
    m = np.diag(diag).astype(complex)
    assert abs(m.trace() - 1.0) < 1e-12
    validate_density(m)  # auto mode skips the eigen check at this size
    with pytest.raises(StateValidationError):
        validate_density(m, check_psd=True)


def test_product_power_cases():
    rng = np.random.default_rng(21)
    d = random_density(rng, 2)
    assert np.array_equal(product_power(d, 1), validate_density(d))
    proj = np.diag([1.0, 0.0]).astype(complex)
    assert np.array_equal(product_power(proj, 2), np.diag([1.0, 0, 0, 0]))
    assert abs(product_power(random_density(rng, 3), 3).trace() - 1.0) < 1e-12


def test_product_power_cap():
    with pytest.raises(CapExceededError):
        product_power(np.eye(2) / 2, 20)
    with pytest.raises(ValueError):
        product_power(np.eye(2) / 2, 0)


def test_qubit_state_invariants():
    with pytest.raises(StateValidationError) as err:
        QubitState(1.2, -0.2)
    assert err.value.code == "invalid-state"
    with pytest.raises(StateValidationError) as err:
        QubitState(0.6, 0.6)
    assert err.value.code == "trace"
    with pytest.raises(StateValidationError) as err:
        QubitState(0.5, 0.5, 0.6)
    assert err.value.code == "negative-eigenvalue"


def test_qubit_matrix_round_trip():
    rng = np.random.default_rng(22)
    for _ in range(20):
        q = random_qubit(rng)
        back = QubitState.from_matrix(q.matrix())
        assert abs(back.a - q.a) < 1e-14
        assert abs(back.d - q.d) < 1e-14
        assert abs(back.c - q.c) < 1e-14


def test_qubit_json_round_trip():
    q = QubitState(0.7, 0.3, 0.2 + 0.1j)
    obj = q.to_json_dict()
    assert set(obj) == {"a", "d", "c_re", "c_im"}
    assert QubitState.from_json_dict(obj) == q
    with pytest.raises(StateValidationError) as err:
        QubitState.from_json_dict({"a": 0.5})
    assert err.value.code == "invalid-state"


def test_bloch_examples():
    q = qubit_from_bloch(BlochVector(0, 0, 0))
    assert q.a == 0.5 and q.d == 0.5 and q.c == 0
    q = qubit_from_bloch(BlochVector(0, 0, 1))
    assert q.a == 1.0 and q.d == 0.0 and q.c == 0


def test_bloch_round_trip():
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(100):
        v = rng.normal(size=3)
        v = v / np.linalg.norm(v) * rng.uniform() ** (1.0 / 3.0)
        b = BlochVector(*v)
        rt = bloch_from_qubit(qubit_from_bloch(b))
        worst = max(worst, abs(rt.x - b.x), abs(rt.y - b.y), abs(rt.z - b.z))
    assert worst < 1e-13


def test_bloch_norm_gate():
    with pytest.raises(StateValidationError):
        BlochVector(0.8, 0.8, 0.8)
