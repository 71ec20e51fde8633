"""Seeded random generators shared by the test modules."""

import numpy as np

from spinchaos import PairPotential, QubitState
from spinchaos.mean_field import swap_operator


def random_qubit(rng, pure=False) -> QubitState:
    """Uniform Bloch-ball (or sphere, for pure=True) qubit state."""
    v = rng.normal(size=3)
    v = v / np.linalg.norm(v)
    r = 1.0 if pure else rng.uniform() ** (1.0 / 3.0)
    x, y, z = r * v
    return QubitState((1 + z) / 2, (1 - z) / 2, complex(x, -y) / 2)


def random_density(rng, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return m / m.trace().real


def random_hermitian(rng, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def random_pair_potential(rng, d: int, scale: float = 1.0) -> PairPotential:
    h = random_hermitian(rng, d * d)
    s = swap_operator(d)
    return PairPotential(scale * 0.5 * (h + s @ h @ s))


def z_axis_free_energy(z, J, Hfield):
    """F restricted to diagonal qubit states, parametrized by z = a - d."""
    import math
    p1, p2 = (1.0 + z) / 2.0, (1.0 - z) / 2.0
    ent = sum(p * math.log(p) for p in (p1, p2) if p > 0)
    return -J * z * z / 4.0 - Hfield * z / 2.0 + ent


def golden_section(fun, lo, hi, iters=200):
    """Scalar minimizer used as an independent one-dimensional oracle."""
    import math
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fun(d)
    x = (a + b) / 2.0
    return x, fun(x)
