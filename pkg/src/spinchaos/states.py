"""Density-matrix validation, product powers and the qubit parametrizations.

Density matrices are passed around as plain complex ndarrays; ``validate_density``
is the gate that enforces the state invariants (Hermitian, unit trace, PSD)
and returns the symmetrized array.  ``QubitState`` and ``BlochVector`` are the
two 2x2 parametrizations used by the closed-form dynamics and the free-energy
minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import CapExceededError, StateValidationError

STATE_TOL = 1e-10
QUBIT_TOL = 1e-12
# Largest dense matrix dimension materialized by default (2**14).
DEFAULT_DIM_CAP = 16384
# Above this dimension the eigenvalue (PSD) part of validation is skipped in
# "auto" mode; a full eigensolve at dim 4096 takes minutes on one core while
# Hermiticity and trace checks stay cheap at any size.
PSD_CHECK_MAX_DIM = 512


def validate_density(m, tol: float = STATE_TOL, psd_tol: float | None = None,
                     check_psd="auto") -> np.ndarray:
    """Validate a density matrix and return its symmetrized copy.

    Checks Hermiticity (within ``tol``, repaired silently), unit trace
    (within ``tol``) and, depending on ``check_psd`` (True, False or "auto"),
    that the smallest eigenvalue is >= -``psd_tol``.  Raises
    ``StateValidationError`` with code "non-hermitian", "trace" or
    "negative-eigenvalue".
    """
    a = linalg.as_complex_matrix(m)
    defect = linalg.hermiticity_defect(a)
    if defect > tol:
        raise StateValidationError(
            "non-hermitian", f"max |m - m^H| = {defect:.3e} > {tol:.1e}"
        )
    a = 0.5 * (a + a.conj().T)
    tr = a.trace()
    if abs(tr - 1.0) > tol:
        raise StateValidationError("trace", f"trace = {tr:.17g}, expected 1")
    if check_psd == "auto":
        check_psd = a.shape[0] <= PSD_CHECK_MAX_DIM
    if check_psd:
        if psd_tol is None:
            psd_tol = tol
        lo = float(np.linalg.eigvalsh(a)[0])
        if lo < -psd_tol:
            raise StateValidationError(
                "negative-eigenvalue",
                f"min eigenvalue = {lo:.3e} < -{psd_tol:.1e}",
            )
    return a


def product_power(d0, k: int, max_dim: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """k-fold Kronecker power of a density matrix (site 1 most significant)."""
    a = validate_density(d0)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if a.shape[0] ** k > max_dim:
        raise CapExceededError(
            f"product dimension {a.shape[0]}**{k} exceeds cap {max_dim}"
        )
    out = a
    for _ in range(k - 1):
        out = np.kron(out, a)
    return out


@dataclass(frozen=True)
class QubitState:
    """2x2 density matrix [[a, c], [conj(c), d]] with a + d = 1."""

    a: float
    d: float
    c: complex = 0j

    def __post_init__(self):
        if abs(self.a + self.d - 1.0) > QUBIT_TOL:
            raise StateValidationError(
                "trace", f"a + d = {self.a + self.d:.17g}, expected 1"
            )
        if not (-QUBIT_TOL <= self.a <= 1 + QUBIT_TOL
                and -QUBIT_TOL <= self.d <= 1 + QUBIT_TOL):
            raise StateValidationError(
                "invalid-state", f"populations outside [0,1]: a={self.a}, d={self.d}"
            )
        if abs(self.c) ** 2 > self.a * self.d + QUBIT_TOL:
            raise StateValidationError(
                "negative-eigenvalue",
                f"|c|^2 = {abs(self.c)**2:.17g} exceeds a*d = {self.a * self.d:.17g}",
            )

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.c], [np.conj(self.c), self.d]], dtype=complex)

    @classmethod
    def from_matrix(cls, m) -> "QubitState":
        a = validate_density(m, check_psd=True)
        if a.shape[0] != 2:
            raise StateValidationError("invalid-state", f"expected 2x2, got {a.shape}")
        # renormalize away the trace tolerance so the stricter qubit invariant holds
        tr = (a[0, 0] + a[1, 1]).real
        return cls(a[0, 0].real / tr, a[1, 1].real / tr, complex(a[0, 1]) / tr)

    def to_json_dict(self) -> dict:
        return {"a": self.a, "d": self.d, "c_re": self.c.real, "c_im": self.c.imag}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "QubitState":
        try:
            a = float(obj["a"])
            d = float(obj["d"])
            c = complex(float(obj["c_re"]), float(obj["c_im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise StateValidationError(
                "invalid-state", f"qubit state needs a, d, c_re, c_im fields: {exc}"
            ) from None
        return cls(a, d, c)


@dataclass(frozen=True)
class BlochVector:
    """Point in the closed unit ball parametrizing a qubit state."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        r2 = self.x**2 + self.y**2 + self.z**2
        if r2 > 1 + QUBIT_TOL:
            raise StateValidationError(
                "invalid-state", f"Bloch norm^2 = {r2:.17g} > 1"
            )

    def norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


def qubit_from_bloch(b: BlochVector) -> QubitState:
    """D = (I + x sx + y sy + z sz)/2 with unit-normalized Pauli matrices."""
    return QubitState(
        a=(1 + b.z) / 2,
        d=(1 - b.z) / 2,
        c=complex(b.x, -b.y) / 2,
    )


def bloch_from_qubit(q: QubitState) -> BlochVector:
    return BlochVector(x=2 * q.c.real, y=-2 * q.c.imag, z=q.a - q.d)
