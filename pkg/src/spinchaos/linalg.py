"""Dense complex linear algebra used throughout the package.

Everything here operates on plain ``numpy.ndarray`` (complex128) values and
goes through the Hermitian eigendecomposition where a matrix function is
needed: every matrix we handle is Hermitian and downstream code usually
needs the spectrum anyway.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, HermiticityError, StateValidationError

# Deviations from exact Hermiticity up to this size are repaired silently.
HERMITICITY_TOL = 1e-10


class HermitianEigen(NamedTuple):
    """Spectral data of a Hermitian matrix: a == eigenvectors @ diag(eigenvalues) @ eigenvectors^H."""

    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns match eigenvalues


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a square complex128 matrix, copying only if needed."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got ndim={m.ndim}")
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest absolute entry of a - a^dagger."""
    return float(np.abs(a - a.conj().T).max()) if a.size else 0.0


def require_hermitian(a, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return the Hermitian part (a + a^dagger)/2, or raise if the defect exceeds tol."""
    m = as_complex_matrix(a)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise HermiticityError(
            f"matrix is not Hermitian: max |a - a^H| = {defect:.3e} > {tol:.1e}"
        )
    return 0.5 * (m + m.conj().T)


def kron(a, b) -> np.ndarray:
    """Tensor (Kronecker) product with the first factor most significant."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def partial_trace_tail(rho, local_dim: int, total_sites: int, keep: int) -> np.ndarray:
    """Trace out the last ``total_sites - keep`` tensor factors.

    ``rho`` must be ``local_dim**total_sites`` square.  Returns the reduced
    matrix on the first ``keep`` factors; ``keep == 0`` gives a 1x1 matrix
    holding the full trace.
    """
    m = as_complex_matrix(rho)
    if local_dim < 1 or total_sites < 0:
        raise DimensionError("local_dim must be >= 1 and total_sites >= 0")
    if not 0 <= keep <= total_sites:
        raise DimensionError(f"keep={keep} outside [0, {total_sites}]")
    dim = local_dim**total_sites
    if m.shape[0] != dim:
        raise DimensionError(
            f"matrix dim {m.shape[0]} != local_dim**total_sites = {dim}"
        )
    t = m.reshape([local_dim] * (2 * total_sites)) if total_sites else m
    for _ in range(total_sites - keep):
        half = t.ndim // 2
        t = np.trace(t, axis1=half - 1, axis2=2 * half - 1)
    out_dim = local_dim**keep
    return np.asarray(t, dtype=complex).reshape(out_dim, out_dim)


def hermitian_eig(a, tol: float = HERMITICITY_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix (eigenvalues ascending)."""
    m = require_hermitian(a, tol)
    w, v = np.linalg.eigh(m)
    return HermitianEigen(w, v)


def matrix_exp_hermitian(a, scale: complex = 1.0) -> np.ndarray:
    """exp(scale * a) for Hermitian ``a`` (scale may be complex, e.g. -i*t).

    Exactly diagonal input short-circuits to exponentiating the diagonal;
    this keeps large diagonal Hamiltonians (the only large matrices we
    exponentiate) out of the O(dim^3) eigensolver.
    """
    m = require_hermitian(a)
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    if not np.count_nonzero(off):
        return np.diag(np.exp(scale * np.diag(m).real))
    w, v = np.linalg.eigh(m)
    return (v * np.exp(scale * w)) @ v.conj().T


def matrix_log_psd(a, floor: float = 1e-300, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Matrix logarithm of a positive semi-definite matrix.

    Eigenvalues below ``floor`` are clipped up to it before taking logs,
    which keeps entropy-style traces finite for rank-deficient input.
    Eigenvalues below ``-tol`` raise ``StateValidationError``.
    """
    m = require_hermitian(a, tol)
    w, v = np.linalg.eigh(m)
    if w[0] < -tol:
        raise StateValidationError(
            "negative-eigenvalue",
            f"matrix has eigenvalue {w[0]:.3e} < -{tol:.1e}, log undefined",
        )
    w = np.maximum(w, floor)
    return (v * np.log(w)) @ v.conj().T


def trace_norm(a, tol: float = HERMITICITY_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix (Schatten 1-norm)."""
    m = require_hermitian(a, tol)
    return float(np.abs(np.linalg.eigvalsh(m)).sum())
